#include "ammknn/tabular.hpp"

#include "ammknn/csv.hpp"
#include "ammknn/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

namespace ammknn {

Frame read_csv(std::string_view text, const CsvOptions& options) {
    auto records = csv::parse(text);
    if (records.empty()) throw Error(ErrorCode::MissingHeader, "input has no header row");

    const auto& header = records.front();
    {
        std::unordered_set<std::string> seen;
        for (const auto& h : header)
            if (!seen.insert(h).second)
                throw Error(ErrorCode::DuplicateColumnName, "column '" + h + "' appears twice");
    }

    std::optional<std::size_t> id_pos;
    if (options.id_column) {
        auto it = std::find(header.begin(), header.end(), *options.id_column);
        if (it == header.end())
            throw Error(ErrorCode::UnknownColumn, "id column '" + *options.id_column + "' not in header");
        id_pos = static_cast<std::size_t>(it - header.begin());
    }

    const bool has_target = std::find(header.begin(), header.end(), options.target_name) != header.end();
    if (!has_target && !options.allow_missing_target)
        throw Error(ErrorCode::UnknownTargetColumn, "target '" + options.target_name + "' not in header");

    std::vector<std::string> columns;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (j != id_pos) columns.push_back(header[j]);
    if (!has_target) columns.push_back(options.target_name);

    std::vector<Frame::Row> rows;
    std::vector<std::string> ids;
    rows.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != header.size())
            throw Error(ErrorCode::MalformedCsv, "data row " + std::to_string(r) + " has " +
                                                     std::to_string(rec.size()) + " fields, header has " +
                                                     std::to_string(header.size()));
        Frame::Row row;
        row.reserve(columns.size());
        for (std::size_t j = 0; j < rec.size(); ++j) {
            if (j == id_pos) {
                ids.push_back(rec[j]);
                continue;
            }
            const auto& cell = rec[j];
            if (cell.find_first_not_of(" \t") == std::string::npos) {
                row.push_back(kMissing);
                continue;
            }
            auto value = csv::parse_number(cell);
            if (!value)
                throw Error(ErrorCode::NonNumericCell, "row " + std::to_string(r) + ", column '" + header[j] +
                                                           "': '" + cell + "'");
            row.push_back(*value);
        }
        if (!has_target) row.push_back(kMissing);
        rows.push_back(std::move(row));
    }

    std::optional<IdColumn> id_column;
    if (id_pos) id_column = IdColumn{*options.id_column, *id_pos, std::move(ids)};
    return Frame(std::move(columns), std::move(rows), options.target_name, std::move(id_column));
}

Frame load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return read_csv(buf.str(), options);
    } catch (const Error& e) {
        throw e.with_context(path.string());
    }
}

std::string to_csv(const Frame& frame) {
    const auto& ids = frame.ids();
    auto emit = [&](auto&& numeric_field, auto&& id_field) {
        csv::Record rec;
        for (std::size_t j = 0; j <= frame.num_columns(); ++j) {
            if (ids && ids->position == j) rec.push_back(id_field());
            if (j < frame.num_columns()) rec.push_back(numeric_field(j));
        }
        return csv::join_record(rec) + "\n";
    };

    std::string out = emit([&](std::size_t j) { return frame.column_names()[j]; },
                           [&] { return ids->name; });
    for (std::size_t i = 0; i < frame.num_rows(); ++i) {
        out += emit([&](std::size_t j) { return csv::format_number(frame.at(i, j)); },
                    [&] { return ids->values[i]; });
    }
    return out;
}

void write_csv(const Frame& frame, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::FileNotFound, "cannot write '" + path.string() + "'");
    out << to_csv(frame);
}

namespace {

template <typename Pred>
Frame filter_rows(const Frame& frame, Pred keep) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < frame.num_rows(); ++i)
        if (keep(frame.row(i))) idx.push_back(i);
    return frame.select_rows(idx);
}

} // namespace

Frame filter_by_cutoff(const Frame& frame, const std::string& key_column, double cutoff, Keep keep) {
    const auto j = frame.column_index(key_column);
    return filter_rows(frame, [&](const Frame::Row& row) {
        const double v = row[j];
        if (is_missing(v)) return false;
        return keep == Keep::Below ? v < cutoff : v >= cutoff;
    });
}

Frame filter_equal(const Frame& frame, const std::string& key_column, double value) {
    const auto j = frame.column_index(key_column);
    return filter_rows(frame, [&](const Frame::Row& row) { return row[j] == value; });
}

DropResult drop_missing_target(const Frame& frame) {
    const auto t = frame.target_index();
    auto out = filter_rows(frame, [&](const Frame::Row& row) { return !is_missing(row[t]); });
    const auto dropped = frame.num_rows() - out.num_rows();
    return {std::move(out), dropped};
}

DropResult drop_incomplete(const Frame& frame) {
    return drop_incomplete(frame, frame.column_names());
}

DropResult drop_incomplete(const Frame& frame, const std::vector<std::string>& columns) {
    std::vector<std::size_t> idx;
    for (const auto& c : columns) idx.push_back(frame.column_index(c));
    auto out = filter_rows(frame, [&](const Frame::Row& row) {
        return std::none_of(idx.begin(), idx.end(), [&](std::size_t j) { return is_missing(row[j]); });
    });
    const auto dropped = frame.num_rows() - out.num_rows();
    return {std::move(out), dropped};
}

Frame aggregate_means(const Frame& frame, const std::vector<AggregationSpec>& specs, bool drop_members) {
    // Validate every spec before building anything.
    std::unordered_set<std::string> new_names;
    for (const auto& spec : specs) {
        if (spec.member_columns.empty())
            throw Error(ErrorCode::InvalidConfig, "aggregation '" + spec.group_name + "' has no members");
        if (frame.has_column(spec.group_name) || !new_names.insert(spec.group_name).second ||
            (frame.ids() && frame.ids()->name == spec.group_name))
            throw Error(ErrorCode::NameCollision, "aggregation name '" + spec.group_name + "' already in use");
        for (const auto& m : spec.member_columns) {
            frame.column_index(m);
            if (m == frame.target_name())
                throw Error(ErrorCode::InvalidConfig, "aggregation '" + spec.group_name + "' includes the target");
        }
    }

    Frame out = frame;
    for (const auto& spec : specs) {
        std::vector<std::size_t> idx;
        for (const auto& m : spec.member_columns) idx.push_back(frame.column_index(m));
        std::vector<double> means(frame.num_rows());
        for (std::size_t i = 0; i < frame.num_rows(); ++i) {
            double sum = 0.0;
            for (auto j : idx) sum += frame.at(i, j);
            // NaN propagates through the sum: missing poisons the mean.
            means[i] = sum / static_cast<double>(idx.size());
        }
        out = out.with_column(spec.group_name, std::move(means));
    }

    if (drop_members) {
        std::vector<std::string> members;
        for (const auto& spec : specs)
            for (const auto& m : spec.member_columns)
                if (std::find(members.begin(), members.end(), m) == members.end()) members.push_back(m);
        out = out.without_columns(members);
    }
    return out;
}

std::vector<CohortSummary> summarize_cohorts(const Frame& frame,
                                             const std::string& cohort_column,
                                             double pass_threshold) {
    const auto key = frame.column_index(cohort_column);
    const auto t = frame.target_index();

    std::map<double, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < frame.num_rows(); ++i) {
        const double k = frame.at(i, key);
        if (!is_missing(k)) groups[k].push_back(i);
    }

    std::vector<CohortSummary> out;
    for (const auto& [k, members] : groups) {
        CohortSummary s;
        s.cohort_key = k;
        s.count = members.size();
        std::vector<double> observed;
        for (auto i : members) {
            const double y = frame.at(i, t);
            if (is_missing(y)) continue;
            observed.push_back(y);
            if (y > pass_threshold - 1.0)
                ++s.pass_count;
            else
                ++s.fail_count;
        }
        if (!observed.empty()) {
            double sum = 0.0;
            for (double y : observed) sum += y;
            s.mean_target = sum / static_cast<double>(observed.size());
        }
        if (observed.size() >= 2) {
            double ss = 0.0;
            for (double y : observed) ss += (y - s.mean_target) * (y - s.mean_target);
            s.sd_target = std::sqrt(ss / static_cast<double>(observed.size() - 1));
        }
        out.push_back(s);
    }
    return out;
}

} // namespace ammknn
