#include "ammknn/commands.hpp"

#include "ammknn/error.hpp"
#include "ammknn/evaluation.hpp"
#include "ammknn/knn.hpp"
#include "ammknn/report.hpp"
#include "ammknn/synth.hpp"
#include "ammknn/tabular.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace ammknn {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::FileNotFound, "cannot write '" + path.string() + "'");
    out << text;
}

std::vector<std::optional<std::string>> row_ids(const Frame& f) {
    std::vector<std::optional<std::string>> ids;
    ids.reserve(f.num_rows());
    for (std::size_t i = 0; i < f.num_rows(); ++i) ids.push_back(f.row_id(i));
    return ids;
}

void require_column(const Frame& f, const std::string& name, const char* what) {
    if (!f.has_column(name))
        throw Error(ErrorCode::UnknownColumn, std::string(what) + " '" + name + "' is not a column of the input");
}

std::vector<std::string> candidate_columns(const PipelineConfig& config, const Frame& f) {
    for (const auto& c : config.include_columns) require_column(f, c, "include column");
    for (const auto& c : config.exclude_columns) require_column(f, c, "exclude column");

    auto wanted = [&](const std::string& label) {
        if (label == f.target_name()) return true;
        if (config.cohort_column && label == *config.cohort_column) return false;
        if (std::find(config.exclude_columns.begin(), config.exclude_columns.end(), label) !=
            config.exclude_columns.end())
            return false;
        return config.include_columns.empty() ||
               std::find(config.include_columns.begin(), config.include_columns.end(), label) !=
                   config.include_columns.end();
    };
    std::vector<std::string> keep;
    for (const auto& label : f.column_names())
        if (wanted(label)) keep.push_back(label);
    return keep;
}

ordered_json ammknn_parameters(const AmmknnConfig& a) {
    return ordered_json{{"max_k", a.max_k},
                        {"outlier_feature", a.outlier_feature ? ordered_json(*a.outlier_feature) : ordered_json(nullptr)},
                        {"outlier_cutoff", a.outlier_cutoff}};
}

AmmknnConfig resolved_ammknn(const PipelineConfig& config, const Frame& training) {
    AmmknnConfig a = config.ammknn;
    a.outlier_feature = resolve_outlier_feature(config, training);
    return a;
}

std::vector<double> predictions_of(const std::vector<PredictionRecord>& records) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.prediction);
    return out;
}

void emit_report(const ordered_json& report, const CommandContext& ctx) {
    if (ctx.format == OutputFormat::Json)
        ctx.out << report.dump(2) << "\n";
    else
        ctx.out << format_report_table(report);
}

} // namespace

PreparedData prepare_data(const PipelineConfig& config, const Frame& input) {
    config.validate();
    if (config.cohort_column) require_column(input, *config.cohort_column, "cohort column");

    PreparedData out{input, {}, std::nullopt, std::nullopt};
    const Frame f = config.aggregations.empty()
                        ? input
                        : aggregate_means(input, config.aggregations, config.drop_aggregated_members);
    out.input_rows = f.num_rows();
    const auto candidates = candidate_columns(config, f);
    out.candidate_columns = candidates.size();

    const Frame alumni_all =
        config.cohort_column ? filter_by_cutoff(f, *config.cohort_column, config.year_cutoff, Keep::Below) : f;
    auto [alumni, missing] = drop_missing_target(alumni_all);
    out.alumni_missing_target = missing;

    auto [alumni_complete, incomplete] = drop_incomplete(alumni.select_columns(candidates));
    out.alumni_incomplete = incomplete;
    out.alumni_rows = alumni_complete.num_rows();

    const auto standardized = standardize_joint(alumni_complete);
    auto selection = select_by_correlation(standardized.train, config.correlation_threshold);
    out.alumni = std::move(selection.frame);
    out.selection = std::move(selection.result);

    if (config.cohort_column) {
        const auto& kept = out.selection.kept_columns;
        std::vector<std::string> kept_features;
        for (const auto& k : kept)
            if (k != f.target_name()) kept_features.push_back(k);

        const Frame current = filter_equal(f, *config.cohort_column, config.year_cutoff).select_columns(kept);
        out.cohort_rows = current.num_rows();
        auto [current_complete, current_incomplete] = drop_incomplete(current, kept_features);
        out.cohort_incomplete = current_incomplete;
        for (double y : current_complete.targets())
            if (is_missing(y)) ++out.cohort_missing_target;

        auto [train_complete, train_incomplete] = drop_incomplete(alumni.select_columns(kept));
        out.train_incomplete = train_incomplete;

        auto joint = standardize_joint(train_complete, current_complete);
        out.train = std::move(joint.train);
        out.cohort = std::move(*joint.extra);
    }
    return out;
}

ordered_json run_loocv(const PipelineConfig& config, const Frame& frame, unsigned threads) {
    config.validate();
    const auto ammknn = resolved_ammknn(config, frame);
    TrainingSet::from_frame(frame); // rejects missing cells up front

    auto records = loocv_map<PredictionRecord>(
        frame,
        [&](const Frame& training, const Frame& held_out) {
            return ammknn_predict_batch(held_out, training, ammknn).front();
        },
        threads);

    const auto knn = loocv(
        frame,
        [&](const Frame& training, const Frame& held_out) {
            const auto set = TrainingSet::from_frame(training);
            return knn_regress(extract_features(held_out, 0, set.feature_names()), set, config.fixed_k);
        },
        threads);

    const auto ids = row_ids(frame);
    const auto actual = frame.targets();

    ModelEvaluation adaptive{"ammknn", ammknn_parameters(ammknn), ids, actual, predictions_of(records), records,
                             config.pass_at, config.actual_tiers, config.loocv_predicted_tiers, config.sweep_cutoffs};
    ModelEvaluation fixed{"knn", ordered_json{{"k", config.fixed_k}}, ids, actual, knn, {},
                          config.pass_at, config.actual_tiers, config.loocv_predicted_tiers, config.sweep_cutoffs};

    auto report = report_header("loocv", config);
    report["rows"] = frame.num_rows();
    report["features"] = frame.feature_names();
    report["models"]["ammknn"] = evaluate_model(adaptive);
    report["models"]["knn"] = evaluate_model(fixed);
    return report;
}

ordered_json run_validate(const PipelineConfig& config, const Frame& train, const Frame& cohort, unsigned threads) {
    config.validate();
    auto [scored, without_target] = drop_missing_target(cohort);
    const auto ammknn = resolved_ammknn(config, train);
    const auto records = ammknn_predict_batch(scored, train, ammknn, threads);
    const auto predicted = predictions_of(records);

    ModelEvaluation adaptive{"ammknn", ammknn_parameters(ammknn), row_ids(scored), scored.targets(), predicted,
                             records, config.pass_at, config.actual_tiers, config.validation_predicted_tiers,
                             config.sweep_cutoffs};

    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return predicted[a] < predicted[b]; });
    ordered_json roster = ordered_json::array();
    for (auto i : order) {
        const auto& r = records[i];
        roster.push_back(ordered_json{
            {"id", r.subject_id ? ordered_json(*r.subject_id) : ordered_json(nullptr)},
            {"predicted", r.prediction},
            {"tier", std::string(to_string(classify_tier(r.prediction, config.validation_predicted_tiers)))},
            {"outlier_triggered", r.outlier_triggered}});
    }

    auto report = report_header("validate", config);
    report["training_rows"] = train.num_rows();
    report["cohort_rows"] = cohort.num_rows();
    report["cohort_rows_without_target"] = without_target;
    report["features"] = train.feature_names();
    report["models"]["ammknn"] = evaluate_model(adaptive);
    report["roster"] = std::move(roster);
    return report;
}

std::string run_predict(const PipelineConfig& config, const Frame& train, const Frame& cohort, unsigned threads) {
    config.validate();
    const auto ammknn = resolved_ammknn(config, train);
    const auto records = ammknn_predict_batch(cohort, train, ammknn, threads);
    const auto train_ids = row_ids(train);
    std::string out;
    for (const auto& r : records)
        out += prediction_record_to_json(r, config.validation_predicted_tiers, train_ids).dump() + "\n";
    return out;
}

void cmd_prepare(const PipelineConfig& config, const fs::path& input, const fs::path& out_dir,
                 const CommandContext& ctx) {
    const auto frame = load_frame(input, config);
    const auto p = prepare_data(config, frame);

    fs::create_directories(out_dir);
    write_csv(p.alumni, out_dir / "alumni.csv");
    write_text(out_dir / "selection.json", selection_to_json(p.selection).dump(2) + "\n");
    if (p.train) write_csv(*p.train, out_dir / "train.csv");
    if (p.cohort) write_csv(*p.cohort, out_dir / "cohort.csv");

    const auto dropped_cols = p.selection.dropped_columns.size();
    if (ctx.format == OutputFormat::Json) {
        ordered_json j{{"input_rows", p.input_rows},
                       {"alumni_rows", p.alumni.num_rows()},
                       {"alumni_missing_target_dropped", p.alumni_missing_target},
                       {"alumni_incomplete_dropped", p.alumni_incomplete},
                       {"candidate_columns", p.candidate_columns},
                       {"kept_columns", p.selection.kept_columns.size()},
                       {"dropped_columns", dropped_cols}};
        if (p.cohort) {
            j["train_rows"] = p.train->num_rows();
            j["train_incomplete_dropped"] = p.train_incomplete;
            j["cohort_rows"] = p.cohort->num_rows();
            j["cohort_incomplete_dropped"] = p.cohort_incomplete;
            j["cohort_missing_target"] = p.cohort_missing_target;
        }
        ctx.out << j.dump(2) << "\n";
        return;
    }
    for (const auto& line : p.selection.audit_log) ctx.out << line << "\n";
    ctx.out << "input rows: " << p.input_rows << "\n"
            << "alumni rows: " << p.alumni.num_rows() << " (dropped " << p.alumni_missing_target
            << " missing target, " << p.alumni_incomplete << " incomplete)\n"
            << "columns: " << p.candidate_columns << " -> " << p.selection.kept_columns.size() << " (dropped "
            << dropped_cols << " below |r| " << p.selection.threshold << ")\n";
    if (p.cohort)
        ctx.out << "training rows for cohort: " << p.train->num_rows() << " (dropped " << p.train_incomplete
                << " incomplete)\n"
                << "cohort rows: " << p.cohort->num_rows() << " (dropped " << p.cohort_incomplete
                << " incomplete; " << p.cohort_missing_target << " without target)\n";
}

void cmd_loocv(const PipelineConfig& config, const fs::path& prepared, const fs::path& out_dir,
               const CommandContext& ctx) {
    const auto frame = load_frame(prepared, config);
    const auto report = run_loocv(config, frame, ctx.threads);
    write_text(out_dir / "loocv_report.json", report.dump(2) + "\n");
    emit_report(report, ctx);
}

void cmd_validate(const PipelineConfig& config, const fs::path& train, const fs::path& cohort,
                  const fs::path& out_dir, const CommandContext& ctx) {
    const auto train_frame = load_frame(train, config);
    const auto cohort_frame = load_frame(cohort, config, true);
    const auto report = run_validate(config, train_frame, cohort_frame, ctx.threads);
    write_text(out_dir / "validate_report.json", report.dump(2) + "\n");
    emit_report(report, ctx);
}

void cmd_predict(const PipelineConfig& config, const fs::path& train, const fs::path& cohort,
                 const fs::path& out_dir, const CommandContext& ctx) {
    const auto train_frame = load_frame(train, config);
    const auto cohort_frame = load_frame(cohort, config, true);
    const auto lines = run_predict(config, train_frame, cohort_frame, ctx.threads);
    write_text(out_dir / "predictions.jsonl", lines);
    if (ctx.format == OutputFormat::Json) {
        ctx.out << lines;
        return;
    }
    std::istringstream in(lines);
    std::string line;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        const auto id = j["subject_id"].is_string() ? j["subject_id"].get<std::string>() : std::string("-");
        ctx.out << id << "\t" << format_fraction(j["prediction"].get<double>(), 2) << "\t"
                << j["tier"].get<std::string>() << (j["outlier_triggered"].get<bool>() ? "\toutlier" : "") << "\n";
    }
}

void cmd_synth(const SynthSpec& spec, const fs::path& out_file, const CommandContext& ctx) {
    const auto frame = generate_cohort(spec);
    write_text(out_file, to_csv(frame));
    ctx.out << "wrote " << frame.num_rows() << " rows to " << out_file.string() << "\n";
}

void cmd_plot(const fs::path& report, PlotKind kind, const std::string& model, const fs::path& out_file,
              const CommandContext& ctx) {
    std::ifstream in(report);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open report '" + report.string() + "'");
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedReport, report.string() + ": " + e.what());
    }
    const auto data = scatter_from_report(j, kind, model);
    write_text(out_file, render_scatter_svg(data));
    ctx.out << "wrote " << data.x.size() << " points to " << out_file.string() << "\n";
}

} // namespace ammknn
