#include "ammknn/report.hpp"

#include "ammknn/error.hpp"

#include <array>
#include <cstdio>
#include <sstream>

namespace ammknn {

namespace {

constexpr std::array<Tier, 3> kTiers{Tier::Fail, Tier::AtRisk, Tier::Pass};

ordered_json optional_number(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json("undefined");
}

ordered_json optional_id(const std::optional<std::string>& id) {
    return id ? ordered_json(*id) : ordered_json(nullptr);
}

std::optional<double> safe_correlation(std::span<const double> x, std::span<const double> y) {
    try {
        return pearson_correlation(x, y);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConstantInput || e.code() == ErrorCode::EmptyInput) return std::nullopt;
        throw;
    }
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string json_fraction(const ordered_json& v) {
    if (v.is_number()) return format_fraction(v.get<double>());
    return "undefined";
}

} // namespace

std::string format_fraction(const std::optional<double>& v, int digits) {
    if (!v) return "undefined";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, *v);
    return buf;
}

ordered_json matrix_to_json(const ConfusionMatrix2& cm) {
    return ordered_json{{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
}

ordered_json matrix_to_json(const ConfusionMatrix3& cm) {
    ordered_json counts = ordered_json::array();
    for (auto a : kTiers) {
        ordered_json row = ordered_json::array();
        for (auto p : kTiers) row.push_back(cm.at(a, p));
        counts.push_back(row);
    }
    return ordered_json{{"labels", {"fail", "at_risk", "pass"}}, {"counts", counts}};
}

ordered_json metrics_to_json(const std::optional<Metrics>& m) {
    if (!m)
        return ordered_json{{"accuracy", "undefined"}, {"sensitivity", "undefined"}, {"specificity", "undefined"}};
    return ordered_json{{"accuracy", m->accuracy},
                        {"sensitivity", optional_number(m->sensitivity)},
                        {"specificity", optional_number(m->specificity)}};
}

ordered_json selection_to_json(const SelectionResult& s) {
    ordered_json dropped = ordered_json::array();
    for (const auto& [label, r] : s.dropped_columns)
        dropped.push_back(ordered_json{{"label", label}, {"correlation", r}});
    ordered_json correlations = ordered_json::array();
    for (const auto& c : s.correlations)
        correlations.push_back(ordered_json{{"label", c.label}, {"correlation", c.correlation}, {"sd", c.sd}});
    return ordered_json{{"threshold", s.threshold},
                        {"kept_columns", s.kept_columns},
                        {"dropped_columns", dropped},
                        {"correlations", correlations}};
}

ordered_json prediction_record_to_json(const PredictionRecord& rec,
                                       const TierBoundaries& predicted_tiers,
                                       const std::vector<std::optional<std::string>>& training_ids) {
    ordered_json neighbors = ordered_json::array();
    for (const auto& n : rec.neighbor_ranking) {
        ordered_json item{{"row", n.row_index}};
        if (n.row_index < training_ids.size()) item["id"] = optional_id(training_ids[n.row_index]);
        item["distance"] = n.distance;
        neighbors.push_back(std::move(item));
    }
    ordered_json j;
    j["subject_id"] = optional_id(rec.subject_id);
    j["prediction"] = rec.prediction;
    j["tier"] = std::string(to_string(classify_tier(rec.prediction, predicted_tiers)));
    j["outlier_value"] = is_missing(rec.outlier_value) ? ordered_json(nullptr) : ordered_json(rec.outlier_value);
    j["outlier_triggered"] = rec.outlier_triggered;
    j["min_of_means"] = rec.min_of_means;
    j["min_match"] = rec.min_match;
    j["cumulative_means"] = rec.cumulative_means;
    j["neighbors"] = std::move(neighbors);
    return j;
}

ordered_json evaluate_model(const ModelEvaluation& m) {
    const auto n = m.predicted.size();
    if (m.actual.size() != n || m.ids.size() != n || (!m.records.empty() && m.records.size() != n))
        throw Error(ErrorCode::InvariantViolation, "model evaluation inputs differ in length");

    const auto cm2 = confusion_2x2(m.actual, m.predicted, m.pass_at);
    const auto cm3 = confusion_3x3(m.actual, m.predicted, m.actual_tiers, m.predicted_tiers);
    const std::optional<Metrics> metrics = cm2.total() ? std::optional(metrics_from_cm(cm2)) : std::nullopt;
    const std::optional<double> acc3 = cm3.total() ? std::optional(accuracy_3x3(cm3)) : std::nullopt;

    ordered_json subjects = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
        ordered_json s;
        s["id"] = optional_id(m.ids[i]);
        s["actual"] = m.actual[i];
        s["predicted"] = m.predicted[i];
        s["tier_actual"] = std::string(to_string(classify_tier(m.actual[i], m.actual_tiers)));
        s["tier_predicted"] = std::string(to_string(classify_tier(m.predicted[i], m.predicted_tiers)));
        if (!m.records.empty()) {
            const auto& r = m.records[i];
            s["outlier_value"] = is_missing(r.outlier_value) ? ordered_json(nullptr) : ordered_json(r.outlier_value);
            s["outlier_triggered"] = r.outlier_triggered;
            s["min_of_means"] = r.min_of_means;
            s["min_match"] = r.min_match;
        }
        subjects.push_back(std::move(s));
    }

    ordered_json sweep = ordered_json::array();
    for (const auto& row : threshold_sweep(m.actual, m.predicted, m.sweep_cutoffs, m.pass_at)) {
        ordered_json r{{"cutoff", row.cutoff}};
        r.update(matrix_to_json(row.matrix));
        r.update(metrics_to_json(row.metrics));
        sweep.push_back(std::move(r));
    }

    ordered_json j;
    j["model"] = m.name;
    j["parameters"] = m.parameters;
    j["subject_count"] = n;
    j["pass_at"] = m.pass_at;
    j["actual_tiers"] = ordered_json{{"fail_below", m.actual_tiers.fail_below},
                                     {"at_risk_upper", m.actual_tiers.at_risk_upper}};
    j["predicted_tiers"] = ordered_json{{"fail_below", m.predicted_tiers.fail_below},
                                        {"at_risk_upper", m.predicted_tiers.at_risk_upper}};
    j["confusion_2x2"] = matrix_to_json(cm2);
    j["metrics"] = metrics_to_json(metrics);
    j["confusion_3x3"] = matrix_to_json(cm3);
    j["accuracy_3x3"] = optional_number(acc3);
    j["prediction_actual_correlation"] = optional_number(safe_correlation(m.predicted, m.actual));
    j["sweep"] = std::move(sweep);
    j["subjects"] = std::move(subjects);
    return j;
}

ordered_json report_header(const std::string& kind, const PipelineConfig& config) {
    ordered_json j;
    j["kind"] = kind;
    j["provenance"] = ordered_json{{"tool", kToolVersion}, {"seed", config.seed}, {"config_hash", config_hash(config)}};
    j["config"] = config_to_json(config);
    return j;
}

std::string format_report_table(const ordered_json& report) {
    std::ostringstream out;
    out << "report: " << report.value("kind", std::string("?")) << "  (config " <<
        report["provenance"].value("config_hash", std::string("?")) << ")\n";
    if (!report.contains("models")) return out.str();

    for (const auto& [name, m] : report["models"].items()) {
        out << "\n== " << name << " (" << m["subject_count"].get<std::size_t>() << " subjects) ==\n";
        const auto& c2 = m["confusion_2x2"];
        out << "  2x2 (positive = fail): TP " << c2["tp"] << "  FP " << c2["fp"] << "  TN " << c2["tn"] << "  FN "
            << c2["fn"] << "\n";
        const auto& mt = m["metrics"];
        out << "  accuracy " << json_fraction(mt["accuracy"]) << "  sensitivity " << json_fraction(mt["sensitivity"])
            << "  specificity " << json_fraction(mt["specificity"]) << "\n";

        const auto& pt = m["predicted_tiers"];
        char band[96];
        std::snprintf(band, sizeof(band), "  3x3 (rows actual, cols predicted; predicted bands %g/%g):\n",
                      pt["fail_below"].get<double>(), pt["at_risk_upper"].get<double>());
        out << band;
        out << "  " << pad("", 10) << pad("fail", 9) << pad("at_risk", 9) << pad("pass", 9) << "\n";
        const auto& counts = m["confusion_3x3"]["counts"];
        const char* labels[] = {"fail", "at_risk", "pass"};
        for (std::size_t a = 0; a < 3; ++a) {
            out << "  " << pad(labels[a], 10);
            for (std::size_t p = 0; p < 3; ++p) out << pad(counts[a][p].dump(), 9);
            out << "\n";
        }
        out << "  3x3 accuracy " << json_fraction(m["accuracy_3x3"]) << "\n";
        out << "  sweep (predicted pass iff score > cutoff):\n";
        for (const auto& r : m["sweep"]) {
            char line[160];
            std::snprintf(line, sizeof(line), "    > %-6g TP %3zu FP %3zu TN %3zu FN %3zu  acc %s sens %s spec %s\n",
                          r["cutoff"].get<double>(), r["tp"].get<std::size_t>(), r["fp"].get<std::size_t>(),
                          r["tn"].get<std::size_t>(), r["fn"].get<std::size_t>(),
                          json_fraction(r["accuracy"]).c_str(), json_fraction(r["sensitivity"]).c_str(),
                          json_fraction(r["specificity"]).c_str());
            out << line;
        }
    }

    if (report.contains("roster")) {
        out << "\n== roster (lowest predicted score first) ==\n";
        for (const auto& r : report["roster"]) {
            char line[160];
            const auto id = r["id"].is_string() ? r["id"].get<std::string>() : std::string("-");
            std::snprintf(line, sizeof(line), "  %-12s %9.2f  %s\n", id.c_str(), r["predicted"].get<double>(),
                          r["tier"].get<std::string>().c_str());
            out << line;
        }
    }
    return out.str();
}

} // namespace ammknn
