#include "ammknn/csv.hpp"
#include "ammknn/error.hpp"
#include "ammknn/tabular.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace ammknn;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an ammknn::Error");
    return ErrorCode::InvariantViolation;
}

Frame years_frame() {
    std::vector<Frame::Row> rows;
    for (int y = 2015; y <= 2021; ++y) rows.push_back({double(y), 400.0 + y - 2015});
    return Frame({"cohort", "score"}, rows, "score");
}

} // namespace

TEST_CASE("csv parsing handles quotes, CRLF and blank lines") {
    const auto recs = csv::parse("a,\"b,c\",\"d\"\"e\"\r\n\r\n1,2,3\n");
    REQUIRE(recs.size() == 2);
    CHECK(recs[0] == csv::Record{"a", "b,c", "d\"e"});
    CHECK(recs[1] == csv::Record{"1", "2", "3"});
    CHECK(code_of([] { csv::parse("a,\"b\n"); }) == ErrorCode::MalformedCsv);
}

TEST_CASE("number formatting round-trips exactly") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng);
        CHECK(*csv::parse_number(csv::format_number(v)) == v);
    }
    CHECK(csv::format_number(kMissing).empty());
    CHECK_FALSE(csv::parse_number("nan"));
    CHECK_FALSE(csv::parse_number("inf"));
    CHECK_FALSE(csv::parse_number("abc"));
    CHECK(*csv::parse_number(" 2.5 ") == 2.5);
}

TEST_CASE("read_csv builds a frame with ids") {
    const auto f = read_csv("id,x,y\na,1,2\nb,3,4\nc,5,\n", {"y", "id"});
    CHECK(f.num_rows() == 3);
    CHECK(f.num_columns() == 2);
    CHECK(f.column_names() == std::vector<std::string>{"x", "y"});
    CHECK(f.row_id(1) == "b");
    CHECK(is_missing(f.at(2, 1)));
}

TEST_CASE("read_csv errors") {
    CHECK(code_of([] { read_csv("x,z\n1,2\n", {"y", std::nullopt}); }) == ErrorCode::UnknownTargetColumn);
    CHECK(code_of([] { read_csv("x,y\nabc,2\n", {"y", std::nullopt}); }) == ErrorCode::NonNumericCell);
    CHECK(code_of([] { read_csv("x,x,y\n1,2,3\n", {"y", std::nullopt}); }) == ErrorCode::DuplicateColumnName);
    CHECK(code_of([] { read_csv("", {"y", std::nullopt}); }) == ErrorCode::MissingHeader);
    CHECK(code_of([] { read_csv("x,y\n1\n", {"y", std::nullopt}); }) == ErrorCode::MalformedCsv);
    CHECK(code_of([] { load_csv("/nonexistent/file.csv", {"y", std::nullopt}); }) == ErrorCode::FileNotFound);
    try {
        read_csv("x,y\n1,2\n3,oops\n", {"y", std::nullopt});
        FAIL("expected NonNumericCell");
    } catch (const Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("oops") != std::string::npos);
    }
}

TEST_CASE("missing target column may be synthesized for prediction cohorts") {
    const auto f = read_csv("id,x\na,1\n", {"y", "id", true});
    CHECK(f.has_column("y"));
    CHECK(is_missing(f.targets()[0]));
}

TEST_CASE("CSV round trip preserves every cell and the header order") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-100, 100);
    std::bernoulli_distribution miss(0.1);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t cols = 2 + rng() % 5, n = rng() % 8;
        std::vector<std::string> names;
        for (std::size_t c = 0; c < cols; ++c) names.push_back("c" + std::to_string(c));
        std::vector<Frame::Row> rows(n, Frame::Row(cols));
        for (auto& r : rows)
            for (auto& v : r) v = miss(rng) ? kMissing : u(rng);
        std::optional<IdColumn> ids;
        if (trial % 2) {
            ids = IdColumn{"id", rng() % (cols + 1), {}};
            for (std::size_t i = 0; i < n; ++i) ids->values.push_back("s," + std::to_string(i));
        }
        const Frame f(names, rows, names.back(), ids);
        const auto text = to_csv(f);
        const Frame g = read_csv(text, {names.back(), ids ? std::optional<std::string>("id") : std::nullopt});
        CHECK(f == g);
        CHECK(to_csv(g) == text);
    }
}

TEST_CASE("frame invariants") {
    CHECK(code_of([] { Frame({"a", "a"}, {}, "a"); }) == ErrorCode::DuplicateColumnName);
    CHECK(code_of([] { Frame({"a"}, {}, "b"); }) == ErrorCode::UnknownTargetColumn);
    CHECK(code_of([] { Frame({"a", "b"}, {{1.0}}, "b"); }) == ErrorCode::InvariantViolation);
    const Frame f({"a", "b"}, {{1, 2}}, "b");
    CHECK(code_of([&] { f.with_column("a", {1}); }) == ErrorCode::NameCollision);
    CHECK(code_of([&] { f.with_column("c", {1, 2}); }) == ErrorCode::LengthMismatch);
    CHECK(code_of([&] { f.column_index("zz"); }) == ErrorCode::UnknownColumn);
}

TEST_CASE("filter_by_cutoff keeps order and selects the alumni years") {
    const auto f = years_frame();
    const auto below = filter_by_cutoff(f, "cohort", 2019, Keep::Below);
    CHECK(below.column("cohort") == std::vector<double>{2015, 2016, 2017, 2018});
    const auto above = filter_by_cutoff(f, "cohort", 2019, Keep::AtOrAbove);
    CHECK(above.column("cohort") == std::vector<double>{2019, 2020, 2021});
    CHECK(filter_equal(above, "cohort", 2019).num_rows() == 1);
    CHECK(filter_by_cutoff(f, "cohort", 2000, Keep::Below).empty());
    CHECK(code_of([&] { filter_by_cutoff(f, "year", 2019, Keep::Below); }) == ErrorCode::UnknownColumn);
}

TEST_CASE("drop_missing_target counts removed rows") {
    std::vector<Frame::Row> rows;
    for (int i = 0; i < 183; ++i) rows.push_back({double(i), i == 5 || i == 100 ? kMissing : 400.0});
    const Frame f({"x", "score"}, rows, "score");
    const auto r = drop_missing_target(f);
    CHECK(r.frame.num_rows() == 181);
    CHECK(r.dropped_count == 2);
    const auto again = drop_missing_target(r.frame);
    CHECK(again.dropped_count == 0);
    CHECK(again.frame == r.frame);
}

TEST_CASE("drop_incomplete") {
    std::vector<Frame::Row> rows;
    for (int i = 0; i < 43; ++i) rows.push_back({i == 7 ? kMissing : 1.0 * i, 400.0});
    const Frame f({"x", "score"}, rows, "score");
    const auto r = drop_incomplete(f);
    CHECK(r.frame.num_rows() == 42);
    CHECK(r.dropped_count == 1);
    CHECK(drop_incomplete(r.frame).frame == r.frame);

    const Frame all_missing({"x", "score"}, {{kMissing, 1}, {2, kMissing}}, "score");
    const auto e = drop_incomplete(all_missing);
    CHECK(e.frame.empty());
    CHECK(e.dropped_count == 2);
    CHECK(drop_incomplete(all_missing, {"x"}).dropped_count == 1);
}

TEST_CASE("row operations preserve order and leave no missing cells (property)") {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution miss(0.15);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = rng() % 30;
        std::vector<Frame::Row> rows(n, Frame::Row(4));
        for (std::size_t i = 0; i < n; ++i) {
            rows[i][0] = double(i);
            for (std::size_t c = 1; c < 4; ++c) rows[i][c] = miss(rng) ? kMissing : double(rng() % 100);
        }
        const Frame f({"key", "a", "b", "score"}, rows, "score");
        const auto both = drop_incomplete(drop_missing_target(f).frame).frame;
        const auto single = drop_incomplete(f).frame;
        CHECK(both == single);
        const auto keys = single.column("key");
        CHECK(std::is_sorted(keys.begin(), keys.end()));
        for (const auto& r : single.rows())
            for (double v : r) CHECK_FALSE(is_missing(v));
    }
}

TEST_CASE("aggregate_means") {
    const Frame f({"q1", "q2", "q3", "score"}, {{0.8, 0.9, 1.0, 400}, {0.8, kMissing, 1.0, 380}}, "score");
    const auto g = aggregate_means(f, {{"irat", {"q1", "q2", "q3"}}}, true);
    CHECK(g.column_names() == std::vector<std::string>{"score", "irat"});
    CHECK(g.column("irat")[0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(is_missing(g.column("irat")[1]));

    const auto single = aggregate_means(f, {{"copy", {"q1"}}}, false);
    CHECK(single.column("copy") == f.column("q1"));
    CHECK(single.without_columns({"copy"}) == f);

    CHECK(code_of([&] { aggregate_means(f, {{"q1", {"q2"}}}, false); }) == ErrorCode::NameCollision);
    CHECK(code_of([&] { aggregate_means(f, {{"g", {"nope"}}}, false); }) == ErrorCode::UnknownColumn);
}

TEST_CASE("aggregate_means matches a row-wise oracle (property)") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 1 + rng() % 5, n = 1 + rng() % 10;
        std::vector<std::string> names;
        for (std::size_t c = 0; c < m; ++c) names.push_back("m" + std::to_string(c));
        names.push_back("score");
        std::vector<Frame::Row> rows(n, Frame::Row(m + 1));
        for (auto& r : rows)
            for (auto& v : r) v = u(rng) < 0.1 ? kMissing : u(rng);
        const Frame f(names, rows, "score");
        std::vector<std::string> members(names.begin(), names.end() - 1);
        const auto g = aggregate_means(f, {{"grp", members}}, false).column("grp");
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            bool any_missing = false;
            for (std::size_t c = 0; c < m; ++c) {
                any_missing |= is_missing(rows[i][c]);
                s += rows[i][c];
            }
            if (any_missing)
                CHECK(is_missing(g[i]));
            else
                CHECK(g[i] == doctest::Approx(s / m).epsilon(1e-12));
        }
    }
}

TEST_CASE("summarize_cohorts") {
    const std::vector<double> y2015{270, 318, 331, 340, 347, 350, 352, 355, 358, 361, 365, 369, 374, 378,
                                    383, 388, 393, 398, 403, 408, 414, 419, 425, 431, 437, 443, 449, 455,
                                    461, 468, 474, 481, 487, 494, 501, 507, 514, 521, 528, 536};
    std::vector<Frame::Row> rows;
    for (double y : y2015) rows.push_back({2015, y});
    for (int i = 0; i < 49; ++i) rows.push_back({2016, 360.0 + i});
    for (int i = 0; i < 3; ++i) rows.push_back({2020, kMissing});
    rows.push_back({2021, kMissing});
    const Frame f({"cohort", "score"}, rows, "score");
    const auto s = summarize_cohorts(f, "cohort", 350);
    REQUIRE(s.size() == 4);
    CHECK(s[0].cohort_key == 2015);
    CHECK(s[0].count == 40);
    CHECK(s[0].mean_target == doctest::Approx(417).epsilon(0.0015));
    CHECK(s[0].sd_target == doctest::Approx(65.6).epsilon(0.005));
    CHECK(s[0].pass_count == 35);
    CHECK(s[0].fail_count == 5);
    CHECK(s[1].pass_count == 49);
    CHECK(s[1].fail_count == 0);
    CHECK(std::isnan(s[2].mean_target));
    CHECK(s[2].pass_count == 0);
    CHECK(s[2].fail_count == 0);
    CHECK(s[3].count == 1);
    CHECK(code_of([&] { summarize_cohorts(f, "year", 350); }) == ErrorCode::UnknownColumn);
}
