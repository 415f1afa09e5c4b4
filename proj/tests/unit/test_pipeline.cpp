#include "ammknn/commands.hpp"
#include "ammknn/error.hpp"
#include "ammknn/report.hpp"
#include "ammknn/svg_plot.hpp"
#include "ammknn/synth.hpp"
#include "ammknn/tabular.hpp"

#include <doctest.h>

#include <regex>
#include <sstream>

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

std::size_t count_matches(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

Frame synthetic(std::uint64_t seed = 7) {
    SynthSpec spec;
    spec.seed = seed;
    spec.cohort_sizes = {40, 49, 48, 44, 43};
    return generate_cohort(spec);
}

} // namespace

TEST_CASE("config defaults round-trip through JSON") {
    const PipelineConfig cfg;
    const auto j = config_to_json(cfg);
    const auto back = config_from_json(nlohmann::json::parse(j.dump()));
    CHECK(config_to_json(back) == j);
    CHECK(config_hash(back) == config_hash(cfg));
    CHECK(config_hash(cfg).size() == 16);
    CHECK(cfg.ammknn.max_k == 20);
    CHECK(cfg.ammknn.outlier_cutoff == -2.0);
    CHECK(cfg.validation_predicted_tiers.at_risk_upper == 385);
    CHECK(cfg.sweep_cutoffs == kDefaultSweepCutoffs);

    PipelineConfig other;
    other.correlation_threshold = 0.19;
    CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("config parsing is strict") {
    CHECK(code_of([] { config_from_json(nlohmann::json::parse(R"({"tresh": 0.1})")); }) ==
          ErrorCode::InvalidConfig);
    CHECK(code_of([] { config_from_json(nlohmann::json::parse(R"({"correlation_threshold": "x"})")); }) ==
          ErrorCode::InvalidConfig);
    CHECK(code_of([] { config_from_json(nlohmann::json::parse(R"({"correlation_threshold": 2})")); }) ==
          ErrorCode::InvalidConfig);
    CHECK(code_of([] { config_from_json(nlohmann::json::parse(R"({"ammknn": {"max_k": 0}})")); }) ==
          ErrorCode::InvalidConfig);
    CHECK(code_of([] { config_from_json(nlohmann::json::parse(R"({"sweep_cutoffs": [400, 390]})")); }) ==
          ErrorCode::UnsortedCutoffs);
    const auto cfg = config_from_json(nlohmann::json::parse(
        R"({"correlation_threshold": 0.19, "ammknn": {"outlier_feature": "f04"}, "id_column": null})"));
    CHECK(cfg.correlation_threshold == 0.19);
    CHECK(cfg.ammknn.outlier_feature == "f04");
    CHECK_FALSE(cfg.id_column);
}

TEST_CASE("prepare_data on the seeded synthetic cohort") {
    const PipelineConfig cfg;
    const auto p = prepare_data(cfg, synthetic());
    CHECK(p.alumni.num_rows() == 181);
    CHECK(p.train->num_rows() == 181);
    CHECK(p.cohort->num_rows() == 43);
    CHECK_FALSE(p.alumni.has_column("cohort"));
    CHECK(p.train->column_names() == p.cohort->column_names());
    CHECK(p.alumni.column_names() == p.selection.kept_columns);

    PipelineConfig zero;
    zero.correlation_threshold = 0;
    CHECK(prepare_data(zero, synthetic()).selection.dropped_columns.empty());

    PipelineConfig excluded;
    excluded.exclude_columns = {"f01"};
    CHECK_FALSE(prepare_data(excluded, synthetic()).alumni.has_column("f01"));
    excluded.exclude_columns = {"nope"};
    CHECK(code_of([&] { prepare_data(excluded, synthetic()); }) == ErrorCode::UnknownColumn);
}

TEST_CASE("prepare_data drops missing targets and incomplete rows") {
    const auto base = synthetic();
    auto rows = base.rows();
    const auto score = base.target_index();
    const auto f03 = base.column_index("f03");
    rows[0][score] = kMissing;   // alumni, no target
    rows[1][score] = kMissing;   // alumni, no target
    rows[5][f03] = kMissing;     // alumni, incomplete
    rows[200][score] = kMissing; // current cohort, no target yet
    rows[201][f03] = kMissing;   // current cohort, incomplete
    const auto p = prepare_data(PipelineConfig{}, base.with_rows(rows));
    CHECK(p.alumni_missing_target == 2);
    CHECK(p.alumni_incomplete == 1);
    CHECK(p.alumni.num_rows() == 178);
    CHECK(p.cohort_incomplete == 1);
    CHECK(p.cohort->num_rows() == 42);
    CHECK(p.cohort_missing_target == 1);
}

TEST_CASE("aggregation feeds the selection") {
    PipelineConfig cfg;
    cfg.aggregations = {{"early", {"f01", "f02", "f03"}}};
    const auto p = prepare_data(cfg, synthetic());
    CHECK(p.alumni.has_column("early"));
    CHECK_FALSE(p.alumni.has_column("f01"));
}

TEST_CASE("loocv report on a constant target") {
    std::vector<Frame::Row> rows;
    for (int i = 0; i < 30; ++i) rows.push_back({double(i % 7), double(i % 5), 420});
    const Frame f({"a", "b", "score"}, rows, "score");
    PipelineConfig cfg;
    cfg.ammknn.outlier_feature = "a";
    const auto report = run_loocv(cfg, f, 3);
    for (const auto* model : {"ammknn", "knn"}) {
        const auto& m = report["models"][model];
        for (const auto& s : m["subjects"]) CHECK(s["predicted"].get<double>() == 420);
        CHECK(m["metrics"]["accuracy"].get<double>() == 1.0);
        CHECK(m["metrics"]["sensitivity"] == "undefined");
    }
}

TEST_CASE("loocv and validate agree on a degenerate split") {
    const auto p = prepare_data(PipelineConfig{}, synthetic());
    const auto& frame = p.alumni;
    for (bool fixed_feature : {false, true}) {
        PipelineConfig cfg;
        if (fixed_feature) cfg.ammknn.outlier_feature = *p.selection.strongest_feature();
        const auto loocv = run_loocv(cfg, frame, 4);
        for (std::size_t held : {std::size_t{0}, std::size_t{17}, frame.num_rows() - 1}) {
            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < frame.num_rows(); ++i)
                if (i != held) rest.push_back(i);
            const std::vector<std::size_t> one{held};
            const auto v = run_validate(cfg, frame.select_rows(rest), frame.select_rows(one), 1);
            const double from_validate = v["models"]["ammknn"]["subjects"][0]["predicted"].get<double>();
            const double from_loocv = loocv["models"]["ammknn"]["subjects"][held]["predicted"].get<double>();
            CHECK(from_validate == from_loocv);
        }
    }
}

TEST_CASE("validate report on an empty cohort") {
    const auto p = prepare_data(PipelineConfig{}, synthetic());
    const auto empty = p.cohort->select_rows(std::vector<std::size_t>{});
    const auto report = run_validate(PipelineConfig{}, *p.train, empty, 1);
    CHECK(report["roster"].empty());
    const auto& m = report["models"]["ammknn"];
    CHECK(m["subject_count"] == 0);
    CHECK(m["confusion_2x2"]["tp"] == 0);
    CHECK(m["confusion_2x2"]["tn"] == 0);
    for (const auto& row : m["confusion_3x3"]["counts"])
        for (const auto& c : row) CHECK(c == 0);
    CHECK(m["metrics"]["accuracy"] == "undefined");
}

TEST_CASE("validate roster is sorted worst first and deterministic") {
    const auto p = prepare_data(PipelineConfig{}, synthetic());
    const auto a = run_validate(PipelineConfig{}, *p.train, *p.cohort, 1);
    const auto b = run_validate(PipelineConfig{}, *p.train, *p.cohort, 8);
    CHECK(a.dump() == b.dump());
    const auto& roster = a["roster"];
    CHECK(roster.size() == 43);
    for (std::size_t i = 1; i < roster.size(); ++i)
        CHECK(roster[i - 1]["predicted"].get<double>() <= roster[i]["predicted"].get<double>());
    CHECK(a["models"]["ammknn"]["predicted_tiers"]["at_risk_upper"] == 385);

    const auto missing = p.cohort->select_columns({"score"});
    CHECK(code_of([&] { run_validate(PipelineConfig{}, *p.train, missing, 1); }) == ErrorCode::ColumnMismatch);
}

TEST_CASE("predict on a duplicated training row and on an outlier") {
    const auto p = prepare_data(PipelineConfig{}, synthetic());
    const auto& train = *p.train;
    const std::vector<std::size_t> first{0};
    const auto dup = train.select_rows(first);
    const auto lines = run_predict(PipelineConfig{}, train, dup, 1);
    CHECK(std::count(lines.begin(), lines.end(), '\n') == 1);
    const auto j = nlohmann::json::parse(lines);
    const double pred = j["prediction"].get<double>();
    CHECK(std::isfinite(pred));
    CHECK(pred >= 200);
    CHECK(pred <= 800);
    CHECK(j["neighbors"][0]["distance"].get<double>() == 0.0);
    CHECK(j["neighbors"][0]["id"] == *train.row_id(0));
    double min_prefix = INFINITY;
    for (const auto& m : j["cumulative_means"]) min_prefix = std::min(min_prefix, m.get<double>());
    CHECK(j["min_of_means"].get<double>() == min_prefix);

    PipelineConfig cfg;
    cfg.ammknn.outlier_feature = *p.selection.strongest_feature();
    auto rows = dup.rows();
    rows[0][dup.column_index(*cfg.ammknn.outlier_feature)] = -2.5;
    const auto low = nlohmann::json::parse(run_predict(cfg, train, dup.with_rows(rows), 1));
    CHECK(low["outlier_triggered"] == true);
    CHECK(low["prediction"] == low["min_match"]);

    CHECK(run_predict(cfg, train, dup, 1) == run_predict(cfg, train, dup, 1));
}

TEST_CASE("scatter SVG structure") {
    const auto p = prepare_data(PipelineConfig{}, synthetic());
    const auto report = run_validate(PipelineConfig{}, *p.train, *p.cohort, 1);
    const auto svg = render_scatter_svg(scatter_from_report(report, PlotKind::Scatter, "ammknn"));
    CHECK(count_matches(svg, "<circle class=\"point\"") == 43);
    CHECK(count_matches(svg, "class=\"ref-line\"") == 4);
    CHECK(std::regex_search(svg, std::regex("n = 43, correlation = -?[0-9.]+")));

    const auto loocv = run_loocv(PipelineConfig{}, p.alumni, 2);
    const auto packrat = render_scatter_svg(scatter_from_report(loocv, PlotKind::OutlierScatter, "ammknn"));
    CHECK(count_matches(packrat, "<circle class=\"point\"") == 181);
    CHECK(count_matches(packrat, "class=\"ref-line\"") == 1);
    CHECK(code_of([&] { scatter_from_report(loocv, PlotKind::OutlierScatter, "knn"); }) ==
          ErrorCode::MalformedReport);

    const auto empty = run_validate(PipelineConfig{}, *p.train, p.cohort->select_rows(std::vector<std::size_t>{}), 1);
    const auto bare = render_scatter_svg(scatter_from_report(empty, PlotKind::Scatter, "ammknn"));
    CHECK(count_matches(bare, "<circle") == 0);
    CHECK(count_matches(bare, "class=\"ref-line\"") == 4);
    CHECK(count_matches(bare, "class=\"axis\"") == 2);

    CHECK(code_of([] { scatter_from_report(ordered_json::object(), PlotKind::Scatter, "ammknn"); }) ==
          ErrorCode::MalformedReport);
    CHECK(code_of([] { parse_plot_kind("bar"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
    const auto p = prepare_data(PipelineConfig{}, synthetic());
    CHECK(run_loocv(PipelineConfig{}, p.alumni, 1).dump(2) == run_loocv(PipelineConfig{}, p.alumni, 6).dump(2));
}

TEST_CASE("table rendering mentions every model") {
    const auto p = prepare_data(PipelineConfig{}, synthetic());
    const auto text = format_report_table(run_loocv(PipelineConfig{}, p.alumni, 2));
    CHECK(text.find("== ammknn") != std::string::npos);
    CHECK(text.find("== knn") != std::string::npos);
    CHECK(text.find("sweep") != std::string::npos);
}

TEST_CASE("error context survives re-tagging") {
    const Error e(ErrorCode::NonNumericCell, "row 3, column x");
    const auto tagged = e.with_context("data.csv");
    CHECK(tagged.code() == ErrorCode::NonNumericCell);
    CHECK(std::string(tagged.what()).find("data.csv") != std::string::npos);
    CHECK(std::string(tagged.what()).find("row 3") != std::string::npos);
    CHECK(exit_code_for(ErrorCode::UnknownTargetColumn) == ExitCode::ConfigError);
    CHECK(exit_code_for(ErrorCode::NonNumericCell) == ExitCode::DataError);
    CHECK(exit_code_for(ErrorCode::InvariantViolation) == ExitCode::InternalError);
}
