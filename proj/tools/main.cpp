#include "ammknn/commands.hpp"
#include "ammknn/config.hpp"
#include "ammknn/error.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>

namespace fs = std::filesystem;
using namespace ammknn;

namespace {

struct Options {
    std::string config;
    std::string input;
    std::string train;
    std::string cohort;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::string format = "table";
    unsigned threads = 0;
    std::string spec;
    std::string report;
    std::string kind = "scatter";
    std::string model = "ammknn";
};

PipelineConfig pipeline_config(const Options& o) {
    PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : load_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    cfg.validate();
    return cfg;
}

SynthSpec synth_spec(const Options& o) {
    SynthSpec spec;
    if (!o.spec.empty()) {
        std::ifstream in(o.spec);
        if (!in) throw Error(ErrorCode::FileNotFound, "cannot open spec '" + o.spec + "'");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidSpec, o.spec + ": " + e.what());
        }
        spec = synth_spec_from_json(j);
    }
    if (o.seed) spec.seed = *o.seed;
    spec.validate();
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive minimum-match KNN toolkit for flagging at-risk students"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Pipeline config JSON")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--seed", o.seed, "Seed recorded in provenance (overrides config)");
        sub->add_option("--format", o.format, "Console output format")->check(CLI::IsMember({"json", "table"}));
        sub->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
    };

    auto* prepare = app.add_subcommand("prepare", "Filter, aggregate, select and standardize raw data");
    common(prepare);
    prepare->add_option("--input", o.input, "Raw CSV")->required();

    auto* loocv = app.add_subcommand("loocv", "Leave-one-out evaluation of the adaptive and fixed-k models");
    common(loocv);
    loocv->add_option("--input", o.input, "Prepared alumni CSV")->required();

    auto* validate = app.add_subcommand("validate", "Evaluate predictions on a cohort with known scores");
    common(validate);
    validate->add_option("--train", o.train, "Training CSV")->required();
    validate->add_option("--cohort", o.cohort, "Cohort CSV")->required();

    auto* predict = app.add_subcommand("predict", "Predict scores and tiers for a cohort");
    common(predict);
    predict->add_option("--train", o.train, "Training CSV")->required();
    predict->add_option("--cohort", o.cohort, "Cohort CSV (target column optional)")->required();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort CSV (synthetic.csv)");
    common(synth);
    synth->add_option("--spec", o.spec, "Generator spec JSON");

    auto* plot = app.add_subcommand("plot", "Render a report as an SVG scatter plot");
    common(plot);
    plot->add_option("--report", o.report, "loocv or validate report JSON")->required();
    plot->add_option("--kind", o.kind, "scatter or packrat_scatter");
    plot->add_option("--model", o.model, "Model name inside the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::ConfigError);
    }

    try {
        const unsigned threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
        CommandContext ctx{std::cout, o.format == "json" ? OutputFormat::Json : OutputFormat::Table, threads};
        const fs::path out = o.out;

        if (*prepare) {
            cmd_prepare(pipeline_config(o), o.input, out, ctx);
        } else if (*loocv) {
            cmd_loocv(pipeline_config(o), o.input, out, ctx);
        } else if (*validate) {
            cmd_validate(pipeline_config(o), o.train, o.cohort, out, ctx);
        } else if (*predict) {
            cmd_predict(pipeline_config(o), o.train, o.cohort, out, ctx);
        } else if (*synth) {
            cmd_synth(synth_spec(o), out / "synthetic.csv", ctx);
        } else if (*plot) {
            const auto kind = parse_plot_kind(o.kind);
            cmd_plot(o.report, kind, o.model, out / (o.model + "_" + o.kind + ".svg"), ctx);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(exit_code_for(e.code()));
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::InternalError);
    }
    return 0;
}
