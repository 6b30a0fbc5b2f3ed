#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lpsnn/experiment.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::string> out_dir;
    std::optional<int> samples_per_class;
};

// Flag > environment (LPSNN_*) > config file.
void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment config file (JSON)")
        ->envname("LPSNN_CONFIG")
        ->required();
    cmd->add_option("--seed", flags.seed, "override the config seed")->envname("LPSNN_SEED");
    cmd->add_option("--jobs", flags.jobs, "worker threads (default: all cores)")
        ->envname("LPSNN_JOBS");
    cmd->add_option("--out", flags.out_dir, "override the output directory")
        ->envname("LPSNN_OUT");
    cmd->add_option("--samples-per-class", flags.samples_per_class,
                    "override training samples per class")
        ->envname("LPSNN_SAMPLES_PER_CLASS");
}

lpsnn::ExperimentConfig load_config(const CommonFlags& flags) {
    auto cfg = lpsnn::parse_config(flags.config_path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.jobs) cfg.jobs = *flags.jobs;
    if (flags.out_dir) cfg.output_dir = *flags.out_dir;
    if (flags.samples_per_class) cfg.samples_per_class = *flags.samples_per_class;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"low-precision spiking-network continual-learning lab"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "train and evaluate one scenario");
    add_common(run_cmd, run_flags);

    CommonFlags search_flags;
    auto* search_cmd =
        app.add_subcommand("search", "grid refinement of w_decay and the threshold term");
    add_common(search_cmd, search_flags);

    CommonFlags report_flags;
    std::string checkpoint_path;
    auto* report_cmd =
        app.add_subcommand("report", "recompute metrics from a checkpoint and a test set");
    add_common(report_cmd, report_flags);
    report_cmd->add_option("--checkpoint", checkpoint_path, "model checkpoint to evaluate")
        ->envname("LPSNN_CHECKPOINT")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            lpsnn::run_experiment(load_config(run_flags), std::cerr);
        } else if (search_cmd->parsed()) {
            lpsnn::run_search_experiment(load_config(search_flags), std::cerr);
        } else if (report_cmd->parsed()) {
            lpsnn::run_report(load_config(report_flags), checkpoint_path, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
