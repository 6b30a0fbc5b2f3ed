#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpsnn/errors.hpp"
#include "lpsnn/network.hpp"
#include "lpsnn/scenario.hpp"
#include "lpsnn/search.hpp"

namespace lpsnn {

struct DataConfig {
    enum class Kind { idx, synthetic };
    Kind kind = Kind::synthetic;
    // kind == idx
    std::filesystem::path train_images;
    std::filesystem::path train_labels;
    std::filesystem::path test_images;
    std::filesystem::path test_labels;
    // kind == synthetic
    int train_per_class = 800;
    int test_per_class = 250;
    std::uint64_t seed = 7;
};

struct SearchSettings {
    SearchConfig sc;
    // When absent the search run measures the non-quantized 32-bit baseline
    // itself before exploring the grid.
    std::optional<double> baseline_avg;
};

// One declarative file per experiment; a handful of override flags (seed,
// jobs, output dir, samples per class) mirror the CLI.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    int jobs = 0; // 0: use all available cores
    std::filesystem::path output_dir = "out";

    NetworkParams net;
    LifParams lif;
    StdpParams stdp;
    double w_decay = 0.0002;

    ScenarioKind kind = ScenarioKind::dynamic;
    int num_classes = kNumClasses;
    int samples_per_class = 500;
    int test_cap_per_class = 0;
    int label_cap_per_class = 0;
    int duration_steps = 100;
    double max_rate_hz = 63.75;

    DataConfig data;
    std::optional<SearchSettings> search;

    ScenarioConfig scenario_config() const {
        ScenarioConfig cfg;
        cfg.kind = kind;
        cfg.num_classes = num_classes;
        cfg.samples_per_class = samples_per_class;
        cfg.test_cap_per_class = test_cap_per_class;
        cfg.label_cap_per_class = label_cap_per_class;
        cfg.duration_steps = duration_steps;
        cfg.max_rate_hz = max_rate_hz;
        cfg.seed = seed;
        cfg.jobs = jobs <= 0 ? default_jobs() : jobs;
        return cfg;
    }
};

namespace cfgdetail {

using nlohmann::json;

inline void check_keys(std::vector<std::string>& issues, const json& obj,
                       const std::string& context, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            issues.push_back(context + ": unknown key \"" + key + "\"");
        }
    }
}

template <typename T>
void get(std::vector<std::string>& issues, const json& obj, const std::string& context,
         const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        issues.push_back(context + "." + key + ": wrong type");
    }
}

inline void get_path(std::vector<std::string>& issues, const json& obj,
                     const std::string& context, const char* key,
                     std::filesystem::path& out, bool required) {
    if (!obj.contains(key)) {
        if (required) issues.push_back(context + "." + key + ": missing");
        return;
    }
    std::string s;
    get(issues, obj, context, key, s);
    if (!s.empty()) out = s;
}

} // namespace cfgdetail

inline ExperimentConfig parse_config_json(const nlohmann::json& root) {
    using cfgdetail::check_keys;
    using cfgdetail::get;
    std::vector<std::string> issues;
    ExperimentConfig cfg;
    cfg.net.num_excitatory = 400; // the config layer defaults to a usable network

    check_keys(issues, root, "config",
               {"seed", "jobs", "output_dir", "network", "lif", "stdp", "scenario", "data",
                "search"});
    get(issues, root, "config", "seed", cfg.seed);
    get(issues, root, "config", "jobs", cfg.jobs);
    {
        std::string out_dir;
        get(issues, root, "config", "output_dir", out_dir);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
    }

    if (root.contains("network")) {
        const auto& net = root.at("network");
        check_keys(issues, net, "network",
                   {"num_excitatory", "num_inputs", "inhibition_strength", "weight_format",
                    "rounding", "w_max", "init_weight_max"});
        get(issues, net, "network", "num_excitatory", cfg.net.num_excitatory);
        get(issues, net, "network", "num_inputs", cfg.net.num_inputs);
        get(issues, net, "network", "inhibition_strength", cfg.net.inhibition_strength);
        get(issues, net, "network", "w_max", cfg.net.w_max);
        get(issues, net, "network", "init_weight_max", cfg.net.init_weight_max);
        std::string fmt = "float32";
        if (net.contains("weight_format")) {
            get(issues, net, "network", "weight_format", fmt);
            if (fmt == "float32") {
                cfg.net.format.reset();
            } else {
                try {
                    cfg.net.format = parse_format(fmt);
                } catch (const ConfigError& e) {
                    issues.push_back(std::string("network.weight_format: ") + e.what());
                }
            }
        }
        std::string rounding = "truncate";
        get(issues, net, "network", "rounding", rounding);
        if (rounding == "truncate") {
            cfg.net.rounding = Rounding::truncate;
        } else if (rounding == "nearest") {
            cfg.net.rounding = Rounding::nearest;
        } else {
            issues.push_back("network.rounding: expected \"truncate\" or \"nearest\"");
        }
    }

    if (root.contains("lif")) {
        const auto& lif = root.at("lif");
        check_keys(issues, lif, "lif",
                   {"v_rest", "v_reset", "v_th_base", "v_decay", "theta_inc", "theta_decay",
                    "t_ref", "dt_ms"});
        get(issues, lif, "lif", "v_rest", cfg.lif.v_rest);
        get(issues, lif, "lif", "v_reset", cfg.lif.v_reset);
        get(issues, lif, "lif", "v_th_base", cfg.lif.v_th_base);
        get(issues, lif, "lif", "v_decay", cfg.lif.v_decay);
        get(issues, lif, "lif", "theta_inc", cfg.lif.theta_inc);
        get(issues, lif, "lif", "theta_decay", cfg.lif.theta_decay);
        get(issues, lif, "lif", "t_ref", cfg.lif.t_ref);
        get(issues, lif, "lif", "dt_ms", cfg.lif.dt_ms);
    }

    if (root.contains("stdp")) {
        const auto& stdp = root.at("stdp");
        check_keys(issues, stdp, "stdp",
                   {"eta_post", "eta_pre", "trace_decay_pre", "trace_decay_post", "trace_inc",
                    "w_decay"});
        get(issues, stdp, "stdp", "eta_post", cfg.stdp.eta_post);
        get(issues, stdp, "stdp", "eta_pre", cfg.stdp.eta_pre);
        get(issues, stdp, "stdp", "trace_decay_pre", cfg.stdp.trace_decay_pre);
        get(issues, stdp, "stdp", "trace_decay_post", cfg.stdp.trace_decay_post);
        get(issues, stdp, "stdp", "trace_inc", cfg.stdp.trace_inc);
        get(issues, stdp, "stdp", "w_decay", cfg.w_decay);
    }

    if (root.contains("scenario")) {
        const auto& sc = root.at("scenario");
        check_keys(issues, sc, "scenario",
                   {"kind", "num_classes", "samples_per_class", "test_cap_per_class",
                    "label_cap_per_class", "duration_steps", "max_rate_hz"});
        std::string kind = "dynamic";
        get(issues, sc, "scenario", "kind", kind);
        if (kind == "dynamic") {
            cfg.kind = ScenarioKind::dynamic;
        } else if (kind == "nondynamic") {
            cfg.kind = ScenarioKind::nondynamic;
        } else {
            issues.push_back("scenario.kind: expected \"dynamic\" or \"nondynamic\"");
        }
        get(issues, sc, "scenario", "num_classes", cfg.num_classes);
        get(issues, sc, "scenario", "samples_per_class", cfg.samples_per_class);
        get(issues, sc, "scenario", "test_cap_per_class", cfg.test_cap_per_class);
        get(issues, sc, "scenario", "label_cap_per_class", cfg.label_cap_per_class);
        get(issues, sc, "scenario", "duration_steps", cfg.duration_steps);
        get(issues, sc, "scenario", "max_rate_hz", cfg.max_rate_hz);
    }

    if (root.contains("data")) {
        const auto& data = root.at("data");
        std::string kind = "synthetic";
        get(issues, data, "data", "kind", kind);
        if (kind == "idx") {
            cfg.data.kind = DataConfig::Kind::idx;
            check_keys(issues, data, "data",
                       {"kind", "train_images", "train_labels", "test_images", "test_labels"});
            cfgdetail::get_path(issues, data, "data", "train_images", cfg.data.train_images, true);
            cfgdetail::get_path(issues, data, "data", "train_labels", cfg.data.train_labels, true);
            cfgdetail::get_path(issues, data, "data", "test_images", cfg.data.test_images, true);
            cfgdetail::get_path(issues, data, "data", "test_labels", cfg.data.test_labels, true);
        } else if (kind == "synthetic") {
            cfg.data.kind = DataConfig::Kind::synthetic;
            check_keys(issues, data, "data", {"kind", "train_per_class", "test_per_class", "seed"});
            get(issues, data, "data", "train_per_class", cfg.data.train_per_class);
            get(issues, data, "data", "test_per_class", cfg.data.test_per_class);
            get(issues, data, "data", "seed", cfg.data.seed);
        } else {
            issues.push_back("data.kind: expected \"idx\" or \"synthetic\"");
        }
    } else {
        issues.push_back("data: missing section");
    }

    if (root.contains("search")) {
        const auto& se = root.at("search");
        check_keys(issues, se, "search",
                   {"step_w", "w_decay_upper", "step_vth", "vth_lower", "acc_low", "acc_loss",
                    "baseline_avg"});
        SearchSettings settings;
        settings.sc.w_decay_upper = cfg.w_decay; // degenerate bounds by default
        settings.sc.vth_lower = cfg.lif.theta_inc;
        get(issues, se, "search", "step_w", settings.sc.step_w);
        get(issues, se, "search", "w_decay_upper", settings.sc.w_decay_upper);
        get(issues, se, "search", "step_vth", settings.sc.step_vth);
        get(issues, se, "search", "vth_lower", settings.sc.vth_lower);
        get(issues, se, "search", "acc_low", settings.sc.acc_low);
        get(issues, se, "search", "acc_loss", settings.sc.acc_loss);
        if (se.contains("baseline_avg")) {
            double b = 0.0;
            get(issues, se, "search", "baseline_avg", b);
            settings.baseline_avg = b;
        }
        cfg.search = settings;
    }

    // Component-level validation, re-run here so a config file is either
    // fully usable or rejected with the complete issue list.
    for (auto& s : cfg.net.validate()) issues.push_back(std::move(s));
    for (auto& s : cfg.lif.validate()) issues.push_back(std::move(s));
    for (auto& s : cfg.stdp.validate()) issues.push_back(std::move(s));
    if (!(cfg.w_decay >= 0.0 && cfg.w_decay < 1.0))
        issues.push_back("stdp.w_decay: must be in [0, 1)");
    {
        ScenarioConfig sc = cfg.scenario_config();
        for (auto& s : sc.validate()) issues.push_back(std::move(s));
    }
    if (cfg.max_rate_hz * cfg.lif.dt_ms > 1000.0) {
        issues.push_back("scenario.max_rate_hz: per-step spike probability exceeds 1 at the "
                         "configured dt");
    }
    if (cfg.search) {
        for (auto& s : cfg.search->sc.validate(cfg.w_decay, cfg.lif.theta_inc)) {
            issues.push_back(std::move(s));
        }
    }
    if (cfg.data.kind == DataConfig::Kind::synthetic &&
        (cfg.data.train_per_class <= 0 || cfg.data.test_per_class <= 0)) {
        issues.push_back("data: synthetic per-class counts must be > 0");
    }

    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

inline ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config_json(root);
}

} // namespace lpsnn
