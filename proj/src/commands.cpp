#include "stackreg/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "stackreg/config.hpp"
#include "stackreg/csv.hpp"
#include "stackreg/report.hpp"

namespace stackreg {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Config: return kExitUsage;
        case ErrorKind::Degenerate:
        case ErrorKind::Singular: return kExitNumeric;
        case ErrorKind::Dimension:
        case ErrorKind::Input:
        case ErrorKind::Selection:
        case ErrorKind::Partition:
        case ErrorKind::Predictor:
        case ErrorKind::Parse: return kExitData;
    }
    return kExitData;
}

namespace {

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        body();
        return kExitOk;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "error (io): " << e.what() << '\n';
        return kExitData;
    } catch (const std::bad_alloc&) {
        err << "error (resources): out of memory\n";
        return kExitData;
    }
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorKind::Parse, "cannot write '" + p.string() + "'");
    f << content;
    if (!f) throw Error(ErrorKind::Parse, "write failed for '" + p.string() + "'");
}

struct Inputs {
    PredictionsFile train;
    std::optional<PredictionsFile> test;
};

Inputs load_inputs(const CommandOptions& opts) {
    Inputs in;
    in.train = read_predictions_csv(opts.predictions_csv, TargetColumn::Required);
    if (opts.test_csv) in.test = read_predictions_csv(*opts.test_csv, TargetColumn::Forbidden);
    return in;
}

fs::path prepare_out_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

}  // namespace

PipelineConfig effective_config(const CommandOptions& opts) {
    PipelineConfig cfg;
    if (opts.config_file) cfg = load_config_file(*opts.config_file);
    const auto& o = opts.overrides;
    if (o.folds) cfg.folds = *o.folds;
    if (o.seed) cfg.seed = *o.seed;
    if (o.tau_corr) cfg.redundancy.tau_corr = *o.tau_corr;
    if (o.tau_mse) cfg.redundancy.tau_mse = *o.tau_mse;
    if (o.tau_var) cfg.redundancy.tau_var = *o.tau_var;
    if (o.meta) {
        cfg.meta_learners.clear();
        for (const auto& m : *o.meta) cfg.meta_learners.push_back(parse_penalty_kind(m));
    }
    if (o.baselines) cfg.baselines = BaselineSet::from_names(*o.baselines);
    if (o.inner_folds) cfg.inner_folds = *o.inner_folds;
    cfg.validate();
    return cfg;
}

int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        PipelineConfig cfg = effective_config(opts);
        cfg.regularization_paths = true;
        const Inputs in = load_inputs(opts);
        const TargetVector target(*in.train.target);
        const RunReport rep = run(in.train.predictions, target, cfg,
                                  in.test ? &in.test->predictions : nullptr);

        const fs::path dir = prepare_out_dir(opts.out_dir);
        write_file(dir / "report.json", report_to_json(rep).dump(2) + "\n");
        write_file(dir / "report.txt", report_to_text(rep));
        write_file(dir / "selection_log.csv", selection_log_csv(rep.selection));
        write_file(dir / "fold_traces.csv", fold_traces_csv(rep));
        write_file(dir / "blend_weights.csv", blend_weights_csv(rep));
        write_file(dir / "regularization_path.csv", regularization_path_csv(rep));
        write_file(dir / "prediction_error_bins.csv", error_bins_csv(rep.error_bins));
        write_file(dir / "timings.json", timings_to_json(rep).dump(2) + "\n");
        if (in.test) {
            const auto& fin = rep.final_result();
            std::string csv = "id," + csv_field(fin.name) + "\n";
            for (std::size_t i = 0; i < in.test->ids.size(); ++i) {
                csv += csv_field(in.test->ids[i]) + "," + format_double((*fin.test_pred)[i]) + "\n";
            }
            write_file(dir / "test_predictions.csv", csv);
        }
        out << report_to_text(rep);
    });
}

int cmd_ablate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const PipelineConfig cfg = effective_config(opts);
        const Inputs in = load_inputs(opts);
        const TargetVector target(*in.train.target);
        const auto rows = ablate(in.train.predictions, target, cfg);
        const fs::path dir = prepare_out_dir(opts.out_dir);
        write_file(dir / "ablation.json", ablation_to_json(rows, cfg).dump(2) + "\n");
        write_file(dir / "ablation.txt", ablation_to_text(rows));
        write_file(dir / "ablation.csv", ablation_csv(rows));
        out << ablation_to_text(rows);
    });
}

int cmd_dedup(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const PipelineConfig cfg = effective_config(opts);
        const Inputs in = load_inputs(opts);
        const TargetVector target(*in.train.target);
        const auto vp = variance_prune(in.train.predictions, cfg.redundancy.tau_var);
        const SelectionResult sel = project(vp.kept, target, cfg.redundancy);
        const fs::path dir = prepare_out_dir(opts.out_dir);
        nlohmann::json doc = selection_to_json(sel, vp.removed);
        doc["schema_version"] = kReportSchemaVersion;
        doc["config"] = config_to_json(cfg);
        write_file(dir / "dedup.json", doc.dump(2) + "\n");
        write_file(dir / "selection_log.csv", selection_log_csv(sel));
        out << "retained " << sel.k_eff << " of " << vp.kept.n_models() << " models ("
            << vp.removed.size() << " pruned by variance)\n";
        for (const auto& r : sel.removals) {
            out << "  removed " << r.removed << " (kept " << r.kept << ", rho " << r.rho << ")\n";
        }
    });
}

int cmd_synth(const SynthConfig& cfg, const std::string& out_csv, std::ostream& out,
              std::ostream& err) {
    return guarded(err, [&] {
        SynthData data = synthesize(cfg);
        PredictionsFile f;
        for (std::size_t i = 0; i < cfg.n_samples; ++i) f.ids.push_back(std::to_string(i));
        f.target = std::move(data.target);
        f.predictions = std::move(data.predictions);
        const fs::path p(out_csv);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        write_predictions_csv(out_csv, f);
        out << "wrote " << cfg.n_samples << " rows x " << f.predictions.n_models() << " models to "
            << out_csv << '\n';
    });
}

}  // namespace stackreg
