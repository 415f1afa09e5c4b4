#include "ammknn/config.hpp"

#include "ammknn/csv.hpp"
#include "ammknn/error.hpp"
#include "ammknn/preprocess.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace ammknn {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& why) {
    throw Error(ErrorCode::InvalidConfig, why);
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) bad(where + " must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!known.contains(key)) bad("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        bad(std::string("key '") + key + "': " + e.what());
    }
}

void read_optional_string(const json& j, const char* key, std::optional<std::string>& out) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
        out.reset();
        return;
    }
    std::string s;
    read(j, key, s);
    out = s;
}

TierBoundaries read_tiers(const json& j, const char* key, TierBoundaries fallback) {
    if (!j.contains(key)) return fallback;
    const auto& t = j.at(key);
    reject_unknown_keys(t, {"fail_below", "at_risk_upper"}, key);
    read(t, "fail_below", fallback.fail_below);
    read(t, "at_risk_upper", fallback.at_risk_upper);
    return fallback;
}

ordered_json tiers_json(const TierBoundaries& t) {
    ordered_json j;
    j["fail_below"] = t.fail_below;
    j["at_risk_upper"] = t.at_risk_upper;
    return j;
}

ordered_json optional_string_json(const std::optional<std::string>& s) {
    return s ? ordered_json(*s) : ordered_json(nullptr);
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

void PipelineConfig::validate() const {
    if (target_name.empty()) bad("target_name must not be empty");
    if (!(correlation_threshold >= 0.0 && correlation_threshold <= 1.0))
        bad("correlation_threshold must be in [0, 1]");
    if (ammknn.max_k < 1) bad("ammknn.max_k must be at least 1");
    if (!std::isfinite(ammknn.outlier_cutoff)) bad("ammknn.outlier_cutoff must be finite");
    if (fixed_k < 1) bad("fixed_k must be at least 1");
    if (!(pass_at >= 200.0 && pass_at <= 800.0)) bad("pass_at must be within the score range [200, 800]");
    actual_tiers.validate();
    loocv_predicted_tiers.validate();
    validation_predicted_tiers.validate();
    if (sweep_cutoffs.empty()) bad("sweep_cutoffs must not be empty");
    for (std::size_t i = 0; i < sweep_cutoffs.size(); ++i) {
        if (!(sweep_cutoffs[i] >= 200.0 && sweep_cutoffs[i] <= 800.0))
            bad("sweep cutoffs must be within the score range [200, 800]");
        if (i && sweep_cutoffs[i] < sweep_cutoffs[i - 1])
            throw Error(ErrorCode::UnsortedCutoffs, "sweep_cutoffs must be ascending");
    }
    for (const auto& a : aggregations)
        if (a.group_name.empty() || a.member_columns.empty())
            bad("aggregations need a group_name and at least one member column");
}

PipelineConfig config_from_json(const json& j) {
    reject_unknown_keys(j,
                        {"target_name", "id_column", "cohort_column", "year_cutoff", "aggregations",
                         "drop_aggregated_members", "include_columns", "exclude_columns", "correlation_threshold",
                         "ammknn", "fixed_k", "pass_at", "actual_tiers", "loocv_predicted_tiers",
                         "validation_predicted_tiers", "sweep_cutoffs", "seed"},
                        "config");
    PipelineConfig c;
    read(j, "target_name", c.target_name);
    read_optional_string(j, "id_column", c.id_column);
    read_optional_string(j, "cohort_column", c.cohort_column);
    read(j, "year_cutoff", c.year_cutoff);
    if (j.contains("aggregations")) {
        const auto& list = j.at("aggregations");
        if (!list.is_array()) bad("aggregations must be an array");
        for (const auto& a : list) {
            reject_unknown_keys(a, {"group_name", "member_columns"}, "aggregation");
            AggregationSpec spec;
            read(a, "group_name", spec.group_name);
            read(a, "member_columns", spec.member_columns);
            c.aggregations.push_back(std::move(spec));
        }
    }
    read(j, "drop_aggregated_members", c.drop_aggregated_members);
    read(j, "include_columns", c.include_columns);
    read(j, "exclude_columns", c.exclude_columns);
    read(j, "correlation_threshold", c.correlation_threshold);
    if (j.contains("ammknn")) {
        const auto& a = j.at("ammknn");
        reject_unknown_keys(a, {"max_k", "outlier_feature", "outlier_cutoff"}, "ammknn");
        read(a, "max_k", c.ammknn.max_k);
        read_optional_string(a, "outlier_feature", c.ammknn.outlier_feature);
        read(a, "outlier_cutoff", c.ammknn.outlier_cutoff);
    }
    read(j, "fixed_k", c.fixed_k);
    read(j, "pass_at", c.pass_at);
    c.actual_tiers = read_tiers(j, "actual_tiers", c.actual_tiers);
    c.loocv_predicted_tiers = read_tiers(j, "loocv_predicted_tiers", c.loocv_predicted_tiers);
    c.validation_predicted_tiers = read_tiers(j, "validation_predicted_tiers", c.validation_predicted_tiers);
    read(j, "sweep_cutoffs", c.sweep_cutoffs);
    read(j, "seed", c.seed);
    c.validate();
    return c;
}

ordered_json config_to_json(const PipelineConfig& c) {
    ordered_json j;
    j["target_name"] = c.target_name;
    j["id_column"] = optional_string_json(c.id_column);
    j["cohort_column"] = optional_string_json(c.cohort_column);
    j["year_cutoff"] = c.year_cutoff;
    j["aggregations"] = ordered_json::array();
    for (const auto& a : c.aggregations)
        j["aggregations"].push_back(ordered_json{{"group_name", a.group_name}, {"member_columns", a.member_columns}});
    j["drop_aggregated_members"] = c.drop_aggregated_members;
    j["include_columns"] = c.include_columns;
    j["exclude_columns"] = c.exclude_columns;
    j["correlation_threshold"] = c.correlation_threshold;
    j["ammknn"] = ordered_json{{"max_k", c.ammknn.max_k},
                               {"outlier_feature", optional_string_json(c.ammknn.outlier_feature)},
                               {"outlier_cutoff", c.ammknn.outlier_cutoff}};
    j["fixed_k"] = c.fixed_k;
    j["pass_at"] = c.pass_at;
    j["actual_tiers"] = tiers_json(c.actual_tiers);
    j["loocv_predicted_tiers"] = tiers_json(c.loocv_predicted_tiers);
    j["validation_predicted_tiers"] = tiers_json(c.validation_predicted_tiers);
    j["sweep_cutoffs"] = c.sweep_cutoffs;
    j["seed"] = c.seed;
    return j;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        bad("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const PipelineConfig& config) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config_to_json(config).dump())));
    return buf;
}

SynthSpec synth_spec_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "synth spec must be a JSON object");
    static const std::set<std::string> known{"seed",           "n_rows",    "n_features",        "signal_features",
                                             "noise_sd",       "target_range", "fail_rate_hint", "pass_mark",
                                             "first_cohort_year", "cohort_sizes"};
    SynthSpec s;
    try {
        for (const auto& [key, _] : j.items())
            if (!known.contains(key)) throw Error(ErrorCode::InvalidSpec, "unknown key '" + key + "' in synth spec");
        auto get = [&](const char* key, auto& out) {
            if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
        };
        get("seed", s.seed);
        get("n_rows", s.n_rows);
        get("n_features", s.n_features);
        get("signal_features", s.signal_features);
        get("noise_sd", s.noise_sd);
        if (j.contains("target_range")) {
            const auto range = j.at("target_range").get<std::vector<double>>();
            if (range.size() != 2) throw Error(ErrorCode::InvalidSpec, "target_range must be [low, high]");
            s.target_low = range[0];
            s.target_high = range[1];
        }
        get("fail_rate_hint", s.fail_rate_hint);
        get("pass_mark", s.pass_mark);
        get("first_cohort_year", s.first_cohort_year);
        get("cohort_sizes", s.cohort_sizes);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidSpec, e.what());
    }
    s.validate();
    return s;
}

ordered_json synth_spec_to_json(const SynthSpec& s) {
    ordered_json j;
    j["seed"] = s.seed;
    j["n_rows"] = s.n_rows;
    j["n_features"] = s.n_features;
    j["signal_features"] = s.signal_features;
    j["noise_sd"] = s.noise_sd;
    j["target_range"] = {s.target_low, s.target_high};
    j["fail_rate_hint"] = s.fail_rate_hint;
    j["pass_mark"] = s.pass_mark;
    j["first_cohort_year"] = s.first_cohort_year;
    j["cohort_sizes"] = s.cohort_sizes;
    return j;
}

Frame load_frame(const std::filesystem::path& path, const PipelineConfig& config, bool allow_missing_target) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto text = buf.str();

    CsvOptions options{config.target_name, std::nullopt, allow_missing_target};
    if (config.id_column) {
        const auto records = csv::parse(text.substr(0, text.find('\n')));
        if (!records.empty()) {
            const auto& header = records.front();
            if (std::find(header.begin(), header.end(), *config.id_column) != header.end())
                options.id_column = config.id_column;
        }
    }
    try {
        return read_csv(text, options);
    } catch (const Error& e) {
        throw e.with_context(path.string());
    }
}

std::optional<std::string> resolve_outlier_feature(const PipelineConfig& config, const Frame& training) {
    if (config.ammknn.outlier_feature) return config.ammknn.outlier_feature;
    const auto y = training.targets();
    std::optional<std::string> best;
    double best_abs = -1.0;
    for (const auto& name : training.feature_names()) {
        try {
            const double r = std::abs(pearson_correlation(training.column(name), y));
            if (r > best_abs) {
                best_abs = r;
                best = name;
            }
        } catch (const Error& e) {
            // Constant columns (or a constant target) have no correlation.
            if (e.code() != ErrorCode::ConstantInput && e.code() != ErrorCode::EmptyInput) throw;
        }
    }
    return best;
}

} // namespace ammknn
