#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lpsnn/data.hpp"
#include "lpsnn/encoding.hpp"
#include "lpsnn/network.hpp"
#include "lpsnn/parallel.hpp"

namespace lpsnn {

enum class ScenarioKind { dynamic, nondynamic };

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::dynamic;
    int num_classes = kNumClasses;
    int samples_per_class = 500;
    int test_cap_per_class = 0;  // 0 = all available test samples per class
    int label_cap_per_class = 0; // 0 = all training samples of seen classes
    int duration_steps = 100;
    double max_rate_hz = 63.75;
    std::uint64_t seed = 1;
    int jobs = 1;

    std::vector<std::string> validate() const {
        std::vector<std::string> issues;
        if (num_classes < 1 || num_classes > kNumClasses)
            issues.push_back("scenario: num_classes must be in [1, 10]");
        if (samples_per_class <= 0) issues.push_back("scenario: samples_per_class must be > 0");
        if (test_cap_per_class < 0) issues.push_back("scenario: test_cap_per_class must be >= 0");
        if (label_cap_per_class < 0) issues.push_back("scenario: label_cap_per_class must be >= 0");
        if (duration_steps <= 0) issues.push_back("scenario: duration_steps must be > 0");
        if (max_rate_hz <= 0.0) issues.push_back("scenario: max_rate_hz must be > 0");
        if (jobs < 0) issues.push_back("scenario: jobs must be >= 0");
        return issues;
    }
};

// Instrumentation points used by the structural test harness and for
// progress logging.
struct ScenarioHooks {
    std::function<void(int phase, int class_id, int dataset_index)> on_train_sample;
    std::function<void(int phase, int class_id, std::size_t num_test_samples)> on_evaluate;
    std::function<void(int phase, const std::vector<double>& accuracy_row)> on_phase_done;
};

// acc[i][k] for k <= i: accuracy on task k after training phase i.
struct AccuracyMatrix {
    std::vector<std::vector<double>> acc;

    int num_phases() const { return static_cast<int>(acc.size()); }
    double at(int phase, int task) const { return acc[static_cast<std::size_t>(phase)][static_cast<std::size_t>(task)]; }

    const std::vector<double>& final_row() const { return acc.back(); }

    std::vector<double> per_phase_avg() const {
        std::vector<double> avg;
        avg.reserve(acc.size());
        for (const auto& row : acc) {
            avg.push_back(std::accumulate(row.begin(), row.end(), 0.0) /
                          static_cast<double>(row.size()));
        }
        return avg;
    }

    double overall_avg() const {
        const auto& row = final_row();
        return std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size());
    }

    bool complete(int num_classes) const {
        if (num_phases() != num_classes) return false;
        for (int i = 0; i < num_phases(); ++i) {
            if (static_cast<int>(acc[static_cast<std::size_t>(i)].size()) != i + 1) return false;
        }
        return true;
    }
};

struct MemoryReport {
    std::int64_t synapse_count = 0;
    int bits_per_weight = 0;
    std::int64_t total_bits = 0;
    double ratio_vs_32bit = 0.0;
};

// Exact bit accounting of the learned weight matrix only.
inline MemoryReport memory_report(const SnnModel& m) {
    MemoryReport r;
    r.synapse_count = m.synapse_count();
    r.bits_per_weight = m.net.format ? m.net.format->width() : 32;
    r.total_bits = r.synapse_count * r.bits_per_weight;
    r.ratio_vs_32bit = static_cast<double>(r.bits_per_weight) / 32.0;
    return r;
}

// Final-row tasks at or below the low-accuracy borderline.
inline std::vector<std::pair<int, int>> low_accuracy_tasks(const AccuracyMatrix& m,
                                                           double acc_low) {
    if (!(acc_low > 0.0 && acc_low < 1.0)) {
        throw std::invalid_argument("low_accuracy_tasks: acc_low must be in (0, 1)");
    }
    std::vector<std::pair<int, int>> out;
    const int phase = m.num_phases() - 1;
    const auto& row = m.final_row();
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (row[k] <= acc_low) out.emplace_back(phase, static_cast<int>(k));
    }
    return out;
}

namespace detail {

// Seed-stream tags so every presentation's encoding noise is an independent,
// order-free function of (seed, role, class, position).
inline constexpr std::uint64_t kTrainTag = 0x7261;
inline constexpr std::uint64_t kLabelTag = 0x6c61;
inline constexpr std::uint64_t kTestTag = 0x7465;
inline constexpr std::uint64_t kSplitTag = 0x7370;
inline constexpr std::uint64_t kShuffleTag = 0x7368;

} // namespace detail

// Owns the per-run data selection and the encoded spike-train caches; the
// same stimuli are reused across phases and across grid-search points.
class ScenarioRunner {
public:
    ScenarioRunner(const Dataset& train, const Dataset& test, const ScenarioConfig& cfg)
        : train_(train), test_(test), cfg_(cfg) {
        auto issues = cfg.validate();
        if (!issues.empty()) throw ConfigError(std::move(issues));

        Rng split_rng(mix_seed(cfg.seed, detail::kSplitTag));
        train_split_ = split_by_class(train, cfg.samples_per_class, split_rng, cfg.num_classes);
        test_sel_ = test_indices_by_class(test, cfg.test_cap_per_class);
        for (int c = 0; c < cfg.num_classes; ++c) {
            if (test_sel_[static_cast<std::size_t>(c)].empty()) {
                throw ConfigError("scenario: class " + std::to_string(c) + " has no test samples");
            }
        }

        label_sel_ = train_split_;
        if (cfg.label_cap_per_class > 0) {
            for (auto& cls : label_sel_) {
                if (static_cast<int>(cls.size()) > cfg.label_cap_per_class) {
                    cls.resize(static_cast<std::size_t>(cfg.label_cap_per_class));
                }
            }
        }

        train_cache_.resize(static_cast<std::size_t>(cfg.num_classes));
        label_cache_.resize(static_cast<std::size_t>(cfg.num_classes));
        test_cache_.resize(static_cast<std::size_t>(cfg.num_classes));
    }

    const ScenarioConfig& config() const { return cfg_; }
    const std::vector<std::vector<int>>& train_split() const { return train_split_; }
    const std::vector<std::vector<int>>& test_selection() const { return test_sel_; }

    // Alg. 1: train class i, then test every class k <= i, for i = 0..C-1.
    // Labels are re-assigned after each phase from the seen classes only.
    AccuracyMatrix run_dynamic(SnnModel& model, const ScenarioHooks* hooks = nullptr) {
        AccuracyMatrix matrix;
        for (int phase = 0; phase < cfg_.num_classes; ++phase) {
            train_class(model, phase, phase, hooks);
            relabel(model, phase);

            std::vector<double> row;
            row.reserve(static_cast<std::size_t>(phase) + 1);
            for (int task = 0; task <= phase; ++task) {
                if (hooks && hooks->on_evaluate) {
                    hooks->on_evaluate(phase, task,
                                       test_sel_[static_cast<std::size_t>(task)].size());
                }
                row.push_back(class_accuracy(model, task));
            }
            if (hooks && hooks->on_phase_done) hooks->on_phase_done(phase, row);
            matrix.acc.push_back(std::move(row));
        }
        return matrix;
    }

    // Non-dynamic control: one pass over a seeded shuffle of all classes'
    // training samples, then a single evaluation over the full test set.
    double run_nondynamic(SnnModel& model, const ScenarioHooks* hooks = nullptr) {
        std::vector<std::pair<int, int>> order; // (class, position)
        for (int c = 0; c < cfg_.num_classes; ++c) {
            for (std::size_t k = 0; k < train_split_[static_cast<std::size_t>(c)].size(); ++k) {
                order.emplace_back(c, static_cast<int>(k));
            }
        }
        Rng shuffle_rng(mix_seed(cfg_.seed, detail::kShuffleTag));
        shuffle_rng.shuffle(order);

        for (const auto& [cls, pos] : order) {
            if (hooks && hooks->on_train_sample) {
                hooks->on_train_sample(0, cls, train_split_[static_cast<std::size_t>(cls)][static_cast<std::size_t>(pos)]);
            }
            present_sample(model, train_encoding(cls, pos), /*learn=*/true);
        }
        relabel(model, cfg_.num_classes - 1);
        return overall_accuracy(model);
    }

    // Sample-level top-1 accuracy on one class's test selection.
    double class_accuracy(SnnModel& model, int class_id) {
        ensure_test_encoded(class_id);
        const auto n = test_cache_[static_cast<std::size_t>(class_id)].size();
        return static_cast<double>(class_correct_count(model, class_id)) / static_cast<double>(n);
    }

    double overall_accuracy(SnnModel& model) {
        std::uint64_t correct = 0;
        std::uint64_t total = 0;
        for (int c = 0; c < cfg_.num_classes; ++c) {
            ensure_test_encoded(c);
            correct += class_correct_count(model, c);
            total += test_cache_[static_cast<std::size_t>(c)].size();
        }
        return static_cast<double>(correct) / static_cast<double>(total);
    }

    void train_class(SnnModel& model, int phase, int class_id, const ScenarioHooks* hooks) {
        const auto& indices = train_split_[static_cast<std::size_t>(class_id)];
        for (std::size_t pos = 0; pos < indices.size(); ++pos) {
            if (hooks && hooks->on_train_sample) {
                hooks->on_train_sample(phase, class_id, indices[pos]);
            }
            present_sample(model, train_encoding(class_id, static_cast<int>(pos)), /*learn=*/true);
        }
    }

    // Labeling pass over the seen classes' label selections, learning off.
    void relabel(SnnModel& model, int last_seen_class) {
        std::vector<std::vector<double>> mean_counts(static_cast<std::size_t>(cfg_.num_classes));
        for (int c = 0; c <= last_seen_class; ++c) {
            ensure_label_encoded(c);
            const auto& trains = label_cache_[static_cast<std::size_t>(c)];
            const int n_exc = model.net.num_excitatory;
            std::vector<std::uint64_t> sums(static_cast<std::size_t>(n_exc), 0);

            std::vector<std::vector<std::uint32_t>> per_sample(trains.size());
            parallel_for(
                trains.size(), cfg_.jobs, [&] { return model_context(model); },
                [&](std::unique_ptr<SnnModel>& copy, std::size_t i) {
                    SnnModel& m = copy ? *copy : model;
                    per_sample[i] = present_sample(m, trains[i], /*learn=*/false).counts;
                });
            for (const auto& counts : per_sample) {
                for (int n = 0; n < n_exc; ++n) sums[static_cast<std::size_t>(n)] += counts[static_cast<std::size_t>(n)];
            }

            auto& mc = mean_counts[static_cast<std::size_t>(c)];
            mc.resize(static_cast<std::size_t>(n_exc));
            for (int n = 0; n < n_exc; ++n) {
                mc[static_cast<std::size_t>(n)] = static_cast<double>(sums[static_cast<std::size_t>(n)]) /
                                                  static_cast<double>(trains.size());
            }
        }
        model.neuron_labels = labels_from_mean_counts(mean_counts, model.net.num_excitatory);
        model.num_classes = cfg_.num_classes;
    }

private:
    // Inference is side-effect-free but transiently mutates neuron state, so
    // concurrent evaluation gives each worker its own model copy.
    std::unique_ptr<SnnModel> model_context(const SnnModel& model) const {
        return cfg_.jobs <= 1 ? nullptr : std::make_unique<SnnModel>(model);
    }

    std::uint64_t class_correct_count(SnnModel& model, int class_id) {
        // A fully dead network (labels present, none assigned) cannot get
        // anything right; report zero accuracy instead of failing the run.
        if (model.neuron_labels) {
            bool any = false;
            for (auto l : *model.neuron_labels) any = any || l != kUnassignedLabel;
            if (!any) return 0;
        }
        const auto& trains = test_cache_[static_cast<std::size_t>(class_id)];
        std::vector<std::uint8_t> correct(trains.size(), 0);
        parallel_for(
            trains.size(), cfg_.jobs, [&] { return model_context(model); },
            [&](std::unique_ptr<SnnModel>& copy, std::size_t i) {
                SnnModel& m = copy ? *copy : model;
                correct[i] = classify(m, trains[i]) == class_id ? 1 : 0;
            });
        std::uint64_t sum = 0;
        for (auto c : correct) sum += c;
        return sum;
    }

    SpikeTrain encode(const Image& img, std::uint64_t seed) const {
        Rng rng(seed);
        return encode_rate(img, cfg_.duration_steps, cfg_.max_rate_hz, 1.0, rng);
    }

    const SpikeTrain& train_encoding(int class_id, int pos) {
        auto& cache = train_cache_[static_cast<std::size_t>(class_id)];
        if (cache.empty()) {
            const auto& indices = train_split_[static_cast<std::size_t>(class_id)];
            cache.reserve(indices.size());
            for (std::size_t k = 0; k < indices.size(); ++k) {
                cache.push_back(encode(train_.images[static_cast<std::size_t>(indices[k])],
                                       mix_seed(cfg_.seed, detail::kTrainTag, class_id, k)));
            }
        }
        return cache[static_cast<std::size_t>(pos)];
    }

    void ensure_label_encoded(int class_id) {
        auto& cache = label_cache_[static_cast<std::size_t>(class_id)];
        if (!cache.empty()) return;
        const auto& indices = label_sel_[static_cast<std::size_t>(class_id)];
        cache.reserve(indices.size());
        for (std::size_t k = 0; k < indices.size(); ++k) {
            cache.push_back(encode(train_.images[static_cast<std::size_t>(indices[k])],
                                   mix_seed(cfg_.seed, detail::kLabelTag, class_id, k)));
        }
    }

    void ensure_test_encoded(int class_id) {
        auto& cache = test_cache_[static_cast<std::size_t>(class_id)];
        if (!cache.empty()) return;
        const auto& indices = test_sel_[static_cast<std::size_t>(class_id)];
        cache.reserve(indices.size());
        for (std::size_t k = 0; k < indices.size(); ++k) {
            cache.push_back(encode(test_.images[static_cast<std::size_t>(indices[k])],
                                   mix_seed(cfg_.seed, detail::kTestTag, class_id, k)));
        }
    }

    const Dataset& train_;
    const Dataset& test_;
    ScenarioConfig cfg_;
    std::vector<std::vector<int>> train_split_;
    std::vector<std::vector<int>> label_sel_;
    std::vector<std::vector<int>> test_sel_;
    std::vector<std::vector<SpikeTrain>> train_cache_;
    std::vector<std::vector<SpikeTrain>> label_cache_;
    std::vector<std::vector<SpikeTrain>> test_cache_;
};

inline AccuracyMatrix run_dynamic(SnnModel& model, const Dataset& train, const Dataset& test,
                                  const ScenarioConfig& cfg, const ScenarioHooks* hooks = nullptr) {
    ScenarioRunner runner(train, test, cfg);
    return runner.run_dynamic(model, hooks);
}

inline double run_nondynamic(SnnModel& model, const Dataset& train, const Dataset& test,
                             const ScenarioConfig& cfg, const ScenarioHooks* hooks = nullptr) {
    ScenarioRunner runner(train, test, cfg);
    return runner.run_nondynamic(model, hooks);
}

} // namespace lpsnn
