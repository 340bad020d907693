#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "adgve/catalog.hpp"
#include "adgve/pipeline.hpp"
#include "adgve/synth.hpp"

namespace fs = std::filesystem;
using namespace adgve;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string model_path;
    std::string vlm_mode;
    int jobs = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "config file (fallback: $ADGVE_CONFIG)");
    cmd->add_option("--model", o.model_path, "fusion model file (default: built-in weights)");
    cmd->add_option("--vlm-mode", o.vlm_mode, "remote|hash_stub|oracle_stub|replay");
    cmd->add_option("--jobs", o.jobs, "parallel videos")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "stub seed")->each([&](const std::string&) {
        o.seed_set = true;
    });
}

Config make_config(const CommonOpts& o) {
    Config cfg = load_config(o.config_path);
    if (!o.vlm_mode.empty()) cfg.set("vlm.mode", o.vlm_mode);
    if (o.seed_set) cfg.set("vlm.seed", std::to_string(o.seed));
    return cfg;
}

FusionModel make_model(const CommonOpts& o) {
    if (o.model_path.empty()) return FusionModel::default_model();
    std::ifstream in(o.model_path);
    if (!in) throw IoError("cannot open model file: " + o.model_path);
    std::stringstream ss;
    ss << in.rdbuf();
    FusionModel m = FusionModel::deserialize(ss.str());
    if (m.catalog_checksum != catalog_checksum())
        throw SchemaError("model was trained against a different catalog version");
    return m;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adgve: driving-aware quality scoring for generated driving videos"};
    app.require_subcommand(1);

    CommonOpts score_opts, filter_opts, train_opts, ablate_opts;

    // ---- score ----
    auto* score_cmd = app.add_subcommand("score", "score annotation files");
    std::vector<std::string> score_paths;
    double score_tau = 0.2;
    std::string score_out;
    score_cmd->add_option("paths", score_paths, "annotation files")->required();
    score_cmd->add_option("--threshold", score_tau, "keep threshold (strict >)");
    score_cmd->add_option("--out", score_out, "report file (default: stdout)");
    add_common(score_cmd, score_opts);

    // ---- filter ----
    auto* filter_cmd = app.add_subcommand("filter", "filter a manifest by quality");
    std::string filter_manifest_path, filter_out, filter_reports;
    double filter_tau = 0.2;
    filter_cmd->add_option("--manifest", filter_manifest_path, "input manifest")->required();
    filter_cmd->add_option("--out", filter_out, "kept manifest path")->required();
    filter_cmd->add_option("--reports", filter_reports, "report file (default: <out>.reports)");
    filter_cmd->add_option("--threshold", filter_tau, "keep threshold (strict >)");
    add_common(filter_cmd, filter_opts);

    // ---- train-fusion ----
    auto* train_cmd = app.add_subcommand("train-fusion", "train the score-fusion head");
    std::string train_manifest, train_out;
    FusionHyper hyper;
    train_cmd->add_option("--manifest", train_manifest, "annotations with quality_score")
        ->required();
    train_cmd->add_option("--out", train_out, "model output path")->required();
    train_cmd->add_option("--lr", hyper.lr, "learning rate");
    train_cmd->add_option("--epochs", hyper.epochs, "full-batch epochs");
    train_cmd->add_option("--lambda", hyper.lambda, "pairwise loss weight");
    train_cmd->add_option("--train-seed", hyper.seed, "init seed");
    add_common(train_cmd, train_opts);

    // ---- gen-synthetic ----
    auto* gen_cmd = app.add_subcommand("gen-synthetic", "generate labeled synthetic scenes");
    std::string gen_spec, gen_out;
    int gen_count = 0, gen_bad = 0;
    std::uint64_t gen_seed = 1;
    gen_cmd->add_option("--spec", gen_spec, "scenario spec file (object or array)");
    gen_cmd->add_option("--out", gen_out, "output directory")->required();
    gen_cmd->add_option("--count", gen_count, "quick batch: total videos");
    gen_cmd->add_option("--bad", gen_bad, "quick batch: violation-injected videos");
    gen_cmd->add_option("--seed", gen_seed, "batch seed");

    // ---- ablate ----
    auto* ablate_cmd = app.add_subcommand("ablate", "threshold sweep and module ablations");
    std::string ablate_manifest_path, ablate_grid = "0.1,0.2,0.3";
    std::string ablate_drop = "lane,vlm,obj,sem,mot";
    ablate_cmd->add_option("--manifest", ablate_manifest_path, "input manifest")->required();
    ablate_cmd->add_option("--grid", ablate_grid, "comma-separated thresholds");
    ablate_cmd->add_option("--drop", ablate_drop, "comma-separated modules");
    add_common(ablate_cmd, ablate_opts);

    // ---- report ----
    auto* report_cmd = app.add_subcommand("report", "summarize report files");
    std::string report_in, report_out;
    report_cmd->add_option("--in", report_in, "report file (jsonl)")->required();
    report_cmd->add_option("--out", report_out, "output prefix for summary + plot data");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*score_cmd) {
            Config cfg = make_config(score_opts);
            FusionModel model = make_model(score_opts);
            auto backend = make_backend(cfg);
            std::vector<std::string> lines;
            int failed = 0;
            for (const auto& p : score_paths) {
                try {
                    lines.push_back(
                        score_video(p, cfg, model, *backend, score_tau).to_json_line());
                } catch (const std::exception& e) {
                    QualityReport r;
                    r.video_id = p;
                    r.error = e.what();
                    r.config_checksum = cfg.checksum();
                    r.catalog_checksum = catalog_checksum();
                    lines.push_back(r.to_json_line());
                    ++failed;
                }
            }
            std::string all;
            for (const auto& l : lines) all += l + "\n";
            if (score_out.empty())
                std::cout << all;
            else
                write_file(score_out, all);
            if (failed == int(score_paths.size())) return 3;
            return failed > 0 ? 2 : 0;
        }

        if (*filter_cmd) {
            Config cfg = make_config(filter_opts);
            FusionModel model = make_model(filter_opts);
            auto backend = make_backend(cfg);
            BatchResult res = filter_manifest(filter_manifest_path, filter_tau, cfg, model,
                                              *backend, filter_opts.jobs);
            std::string kept;
            for (const auto& p : res.kept) kept += p + "\n";
            write_file(filter_out, kept);
            std::string reports;
            for (const auto& r : res.reports) reports += r.to_json_line() + "\n";
            write_file(filter_reports.empty() ? filter_out + ".reports" : filter_reports,
                       reports);
            std::cout << "kept " << res.kept.size() << " of " << res.reports.size()
                      << " (coverage " << res.coverage << ")\n";
            if (!res.reports.empty() && res.errors == int(res.reports.size())) return 3;
            return res.errors > 0 ? 2 : 0;
        }

        if (*train_cmd) {
            Config cfg = make_config(train_opts);
            auto backend = make_backend(cfg);
            std::vector<TrainingExample> data;
            for (const auto& p : read_manifest(train_manifest)) {
                VideoEvaluation ev = evaluate_video(p, cfg, *backend);
                if (!ev.human_score) continue;
                data.push_back({std::move(ev.bundle), *ev.human_score});
            }
            TrainResult res = train_fusion(data, hyper);
            write_file(train_out, res.model.serialize());
            std::cout << "trained on " << data.size() - res.holdout_size << " videos, loss "
                      << res.final_loss << ", holdout srcc " << res.holdout_srcc << " (n="
                      << res.holdout_size << ")\n";
            return 0;
        }

        if (*gen_cmd) {
            std::vector<ScenarioSpec> specs;
            if (!gen_spec.empty())
                specs = parse_scenario_specs(read_file(gen_spec));
            else if (gen_count > 0)
                specs = batch_specs(gen_seed, gen_count, gen_bad);
            else
                throw SpecError("gen-synthetic needs --spec or --count");
            fs::create_directories(gen_out);
            std::string manifest;
            for (size_t i = 0; i < specs.size(); ++i) {
                Scenario sc = gen_scenario(specs[i]);
                char name[32];
                std::snprintf(name, sizeof name, "ann_%03zu.json", i);
                write_file((fs::path(gen_out) / name).string(), scenario_to_json(sc));
                manifest += std::string(name) + "\n";
            }
            write_file((fs::path(gen_out) / "manifest.txt").string(), manifest);
            std::cout << "wrote " << specs.size() << " scenes to " << gen_out << "\n";
            return 0;
        }

        if (*ablate_cmd) {
            Config cfg = make_config(ablate_opts);
            FusionModel model = make_model(ablate_opts);
            auto backend = make_backend(cfg);
            std::vector<double> grid;
            {
                std::stringstream ss(ablate_grid);
                std::string tok;
                while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
            }
            std::vector<std::string> drops;
            {
                std::stringstream ss(ablate_drop);
                std::string tok;
                while (std::getline(ss, tok, ',')) drops.push_back(tok);
            }
            auto rows = ablate(ablate_manifest_path, grid, drops, cfg, model, *backend,
                               ablate_opts.jobs);
            std::cout << "variant\tcoverage\tsrcc\tn\n";
            for (const auto& r : rows) {
                std::cout << r.label << "\t";
                if (r.coverage >= 0)
                    std::cout << r.coverage;
                else
                    std::cout << "-";
                std::cout << "\t";
                if (r.srcc_defined)
                    std::cout << r.srcc;
                else
                    std::cout << "-";
                std::cout << "\t" << r.n << "\n";
            }
            return 0;
        }

        if (*report_cmd) {
            std::vector<QualityReport> reports;
            std::ifstream in(report_in);
            if (!in) throw IoError("cannot open " + report_in);
            std::string line;
            while (std::getline(in, line))
                if (!line.empty()) reports.push_back(QualityReport::from_json_line(line));
            ReportSummary sum = summarize_reports(reports);
            std::cout << sum.to_text();
            if (!report_out.empty()) {
                write_file(report_out + ".summary.txt", sum.to_text());
                write_file(report_out + ".hist.tsv", sum.histogram_tsv());
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
