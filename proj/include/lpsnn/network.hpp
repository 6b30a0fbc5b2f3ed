#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lpsnn/encoding.hpp"
#include "lpsnn/errors.hpp"
#include "lpsnn/neuron.hpp"
#include "lpsnn/plasticity.hpp"
#include "lpsnn/quant.hpp"
#include "lpsnn/rng.hpp"

namespace lpsnn {

constexpr std::int32_t kUnassignedLabel = -1;

struct NetworkParams {
    int num_inputs = 784;
    int num_excitatory = 0;
    double inhibition_strength = 4.0;  // uniform one-step-delayed lateral inhibition
    double w_max = 1.0;
    double init_weight_max = 0.8;
    std::optional<FixedPointFormat> format; // nullopt: native full-precision weights
    Rounding rounding = Rounding::truncate;

    std::vector<std::string> validate() const {
        std::vector<std::string> issues;
        if (num_inputs <= 0) issues.push_back("network: num_inputs must be > 0");
        if (num_inputs > std::numeric_limits<std::uint16_t>::max())
            issues.push_back("network: num_inputs exceeds the spike-train index range");
        if (num_excitatory <= 0) issues.push_back("network: num_excitatory must be > 0");
        if (inhibition_strength < 0.0)
            issues.push_back("network: inhibition_strength must be >= 0");
        if (!(w_max > 0.0)) issues.push_back("network: w_max must be > 0");
        if (init_weight_max < 0.0 || init_weight_max > w_max)
            issues.push_back("network: init_weight_max must be in [0, w_max]");
        return issues;
    }
};

// The single-layer architecture: input layer fully connected to N excitatory
// neurons, with uniform delayed lateral inhibition standing in for the
// explicit inhibitory population (soft winner-take-all).
struct SnnModel {
    NetworkParams net;
    LifParams lif;
    StdpParams stdp;
    SynapseMatrix synapses;
    std::vector<LifNeuronState> neurons;
    std::optional<std::vector<std::int32_t>> neuron_labels; // kUnassignedLabel = silent neuron
    int num_classes = 0;                                    // set by assign_labels

    std::int64_t synapse_count() const {
        return static_cast<std::int64_t>(net.num_inputs) * net.num_excitatory;
    }
};

struct SpikeCountVector {
    std::vector<std::uint32_t> counts;

    std::uint64_t total() const {
        std::uint64_t sum = 0;
        for (auto c : counts) sum += c;
        return sum;
    }
};

inline SnnModel build_model(const NetworkParams& net, const LifParams& lif,
                            const StdpParams& stdp, double w_decay, std::uint64_t seed) {
    std::vector<std::string> issues = net.validate();
    for (auto& s : lif.validate()) issues.push_back(std::move(s));
    for (auto& s : stdp.validate()) issues.push_back(std::move(s));
    if (!(w_decay >= 0.0 && w_decay < 1.0))
        issues.push_back("network: w_decay must be in [0, 1)");
    if (!issues.empty()) throw ConfigError(std::move(issues));

    SnnModel m;
    m.net = net;
    m.lif = lif;
    m.stdp = stdp;
    m.synapses = SynapseMatrix::zeros(net.num_inputs, net.num_excitatory);
    m.synapses.w_decay = w_decay;
    m.synapses.w_max = net.w_max;
    m.synapses.format = net.format;
    m.synapses.rounding = net.rounding;

    Rng rng(mix_seed(seed, 0x1717));
    for (double& w : m.synapses.weights) {
        w = rng.uniform(0.0, net.init_weight_max);
    }
    requantize_weights(m.synapses);

    m.neurons.assign(static_cast<std::size_t>(net.num_excitatory), rest_state(lif));
    return m;
}

// Between-presentation reset: membrane back to rest, refractory cleared,
// traces cleared. Theta persists; homeostasis spans samples and tasks.
inline void reset_transient_state(SnnModel& m) {
    for (auto& s : m.neurons) {
        s.v_mem = m.lif.v_rest;
        s.refractory_remaining = 0;
    }
    clear_traces(m.synapses);
}

// Runs one sample presentation for `spikes.duration_steps` timesteps.
//
// Per step: input current to neuron n is sum_j w[j][n] over this step's
// active inputs, minus inhibition_strength times the number of *other*
// neurons that spiked on the previous step. With learning enabled the STDP
// hooks fire inside the step loop and per-presentation weight decay applies
// at the end; with learning disabled the model state is left bit-identical
// (inference is side-effect-free).
inline SpikeCountVector present_sample(SnnModel& m, const SpikeTrain& spikes, bool learn) {
    if (spikes.num_inputs != m.net.num_inputs) {
        throw std::invalid_argument("present_sample: spike train has " +
                                    std::to_string(spikes.num_inputs) + " inputs, model expects " +
                                    std::to_string(m.net.num_inputs));
    }

    const int n_exc = m.net.num_excitatory;
    const std::vector<LifNeuronState> snapshot = learn ? std::vector<LifNeuronState>{} : m.neurons;

    SpikeCountVector out;
    out.counts.assign(static_cast<std::size_t>(n_exc), 0);

    std::vector<double> current(static_cast<std::size_t>(n_exc));
    std::vector<std::uint8_t> prev_spiked(static_cast<std::size_t>(n_exc), 0);
    int prev_spike_total = 0;
    std::vector<int> spiked_now;
    spiked_now.reserve(16);

    for (int t = 0; t < spikes.duration_steps; ++t) {
        const auto active = spikes.active_at(t);
        if (learn) {
            decay_traces(m.synapses, m.stdp);
            on_pre_spikes(m.synapses, m.stdp, active);
        }

        std::fill(current.begin(), current.end(), 0.0);
        for (std::uint16_t j : active) {
            const double* w = m.synapses.row(j);
            for (int n = 0; n < n_exc; ++n) current[n] += w[n];
        }
        if (m.net.inhibition_strength > 0.0 && prev_spike_total > 0) {
            for (int n = 0; n < n_exc; ++n) {
                current[n] -= m.net.inhibition_strength *
                              static_cast<double>(prev_spike_total - prev_spiked[n]);
            }
        }

        spiked_now.clear();
        for (int n = 0; n < n_exc; ++n) {
            if (step_neuron(m.neurons[static_cast<std::size_t>(n)], m.lif, current[n])) {
                spiked_now.push_back(n);
                ++out.counts[static_cast<std::size_t>(n)];
            }
        }

        if (learn && !spiked_now.empty()) {
            on_post_spikes(m.synapses, m.stdp, std::span<const int>(spiked_now));
        }

        std::fill(prev_spiked.begin(), prev_spiked.end(), std::uint8_t{0});
        for (int n : spiked_now) prev_spiked[static_cast<std::size_t>(n)] = 1;
        prev_spike_total = static_cast<int>(spiked_now.size());
    }

    if (learn) {
        std::vector<std::uint8_t> learning_mask(static_cast<std::size_t>(n_exc));
        for (int n = 0; n < n_exc; ++n) {
            learning_mask[static_cast<std::size_t>(n)] = out.counts[static_cast<std::size_t>(n)] > 0;
        }
        decay_weights(m.synapses, learning_mask);
        reset_transient_state(m);
    } else {
        m.neurons = snapshot;
    }
    return out;
}

// Winner label for each neuron from its per-class mean spike counts.
// mean_counts[c][n]: mean count of neuron n over class c's samples. Neurons
// with zero activity everywhere stay unassigned; ties go to the lower class.
inline std::vector<std::int32_t> labels_from_mean_counts(
    const std::vector<std::vector<double>>& mean_counts, int num_neurons) {
    std::vector<std::int32_t> labels(static_cast<std::size_t>(num_neurons), kUnassignedLabel);
    for (int n = 0; n < num_neurons; ++n) {
        double best = 0.0;
        std::int32_t winner = kUnassignedLabel;
        for (std::size_t c = 0; c < mean_counts.size(); ++c) {
            if (mean_counts[c].empty()) continue; // class without samples
            const double v = mean_counts[c][static_cast<std::size_t>(n)];
            if (v > best) {
                best = v;
                winner = static_cast<std::int32_t>(c);
            }
        }
        labels[static_cast<std::size_t>(n)] = winner;
    }
    return labels;
}

// Labeling pass: runs inference over the labeled samples and assigns each
// neuron the class that drives it hardest on average.
inline void assign_labels(SnnModel& m,
                          const std::vector<std::vector<const SpikeTrain*>>& samples_per_class) {
    std::size_t total = 0;
    for (const auto& cls : samples_per_class) total += cls.size();
    if (total == 0) {
        throw std::invalid_argument("assign_labels: empty sample set");
    }

    const int n_exc = m.net.num_excitatory;
    std::vector<std::vector<double>> mean_counts(samples_per_class.size());
    for (std::size_t c = 0; c < samples_per_class.size(); ++c) {
        if (samples_per_class[c].empty()) continue;
        std::vector<std::uint64_t> sums(static_cast<std::size_t>(n_exc), 0);
        for (const SpikeTrain* train : samples_per_class[c]) {
            const auto counts = present_sample(m, *train, /*learn=*/false);
            for (int n = 0; n < n_exc; ++n) sums[static_cast<std::size_t>(n)] += counts.counts[static_cast<std::size_t>(n)];
        }
        mean_counts[c].resize(static_cast<std::size_t>(n_exc));
        for (int n = 0; n < n_exc; ++n) {
            mean_counts[c][static_cast<std::size_t>(n)] =
                static_cast<double>(sums[static_cast<std::size_t>(n)]) /
                static_cast<double>(samples_per_class[c].size());
        }
    }

    m.neuron_labels = labels_from_mean_counts(mean_counts, n_exc);
    m.num_classes = static_cast<int>(samples_per_class.size());
}

inline void assign_labels(SnnModel& m,
                          const std::vector<std::pair<const SpikeTrain*, int>>& labeled_samples,
                          int num_classes) {
    std::vector<std::vector<const SpikeTrain*>> per_class(static_cast<std::size_t>(num_classes));
    for (const auto& [train, cls] : labeled_samples) {
        per_class.at(static_cast<std::size_t>(cls)).push_back(train);
    }
    assign_labels(m, per_class);
}

// Readout for one presentation's spike counts: the class whose labeled
// neurons respond with the highest mean count. Silent presentations (or ones
// that only excite unassigned neurons) fall back to the globally most common
// label.
inline int classify_from_counts(const std::vector<std::int32_t>& labels, int num_classes,
                                const std::vector<std::uint32_t>& counts) {
    std::vector<double> sum(static_cast<std::size_t>(num_classes), 0.0);
    std::vector<int> members(static_cast<std::size_t>(num_classes), 0);
    bool any_assigned = false;
    for (std::size_t n = 0; n < labels.size(); ++n) {
        const std::int32_t c = labels[n];
        if (c == kUnassignedLabel) continue;
        any_assigned = true;
        sum[static_cast<std::size_t>(c)] += counts[n];
        members[static_cast<std::size_t>(c)] += 1;
    }
    if (!any_assigned) {
        throw ModelStateError("classify: no neuron carries a class label");
    }

    int winner = -1;
    double best = 0.0;
    for (int c = 0; c < num_classes; ++c) {
        if (members[static_cast<std::size_t>(c)] == 0) continue;
        const double mean = sum[static_cast<std::size_t>(c)] / members[static_cast<std::size_t>(c)];
        if (mean > best) {
            best = mean;
            winner = c;
        }
    }
    if (winner >= 0) return winner;

    // Fallback: most common label, ties to the lower class id.
    int fallback = -1;
    int fallback_members = 0;
    for (int c = 0; c < num_classes; ++c) {
        if (members[static_cast<std::size_t>(c)] > fallback_members) {
            fallback_members = members[static_cast<std::size_t>(c)];
            fallback = c;
        }
    }
    return fallback;
}

inline int classify(SnnModel& m, const SpikeTrain& spikes) {
    if (!m.neuron_labels) {
        throw ModelStateError("classify: model has no labels; run assign_labels first");
    }
    const auto counts = present_sample(m, spikes, /*learn=*/false);
    return classify_from_counts(*m.neuron_labels, m.num_classes, counts.counts);
}

} // namespace lpsnn
