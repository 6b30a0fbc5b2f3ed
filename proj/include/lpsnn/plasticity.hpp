#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpsnn/errors.hpp"
#include "lpsnn/quant.hpp"

namespace lpsnn {

// Pair-based STDP: presynaptic traces drive potentiation on postsynaptic
// spikes; depression is carried by per-presentation weight decay on neurons
// without learning activity (eta_pre stays 0 unless trace-driven depression
// is wanted as well).
struct StdpParams {
    double eta_post = 0.40;       // potentiation rate on post-spike
    double eta_pre = 0.30;        // trace-driven depression rate on pre-spike
    double trace_decay_pre = 0.60;  // per-step multiplicative factors
    double trace_decay_post = 0.65;
    double trace_inc = 1.5; // trace increment per spike

    std::vector<std::string> validate() const {
        std::vector<std::string> issues;
        // eta_post = 0 is allowed so no-learning controls can be configured.
        if (eta_post < 0.0) issues.push_back("stdp: eta_post must be >= 0");
        if (eta_pre < 0.0) issues.push_back("stdp: eta_pre must be >= 0");
        if (!(trace_decay_pre > 0.0 && trace_decay_pre < 1.0))
            issues.push_back("stdp: trace_decay_pre must be in (0, 1)");
        if (!(trace_decay_post > 0.0 && trace_decay_post < 1.0))
            issues.push_back("stdp: trace_decay_post must be in (0, 1)");
        if (!(trace_inc > 0.0)) issues.push_back("stdp: trace_inc must be > 0");
        return issues;
    }
};

// Input -> excitatory weight matrix plus STDP traces. Weights are stored
// row-major by input index, so per-timestep current accumulation walks
// contiguous rows. When `format` is set, every stored weight sits exactly on
// the quantization grid; updates are computed in full precision and snapped
// immediately (simulated quantization). `format == nullopt` is the native
// full-precision mode used by the 32-bit baseline.
struct SynapseMatrix {
    int num_inputs = 0;
    int num_excitatory = 0;
    std::vector<double> weights;
    std::vector<double> pre_traces;
    std::vector<double> post_traces;
    double w_decay = 0.0; // per-presentation depression rate, in [0, 1)
    double w_max = 1.0;
    std::optional<FixedPointFormat> format;
    Rounding rounding = Rounding::truncate;

    static SynapseMatrix zeros(int num_inputs, int num_excitatory) {
        SynapseMatrix m;
        m.num_inputs = num_inputs;
        m.num_excitatory = num_excitatory;
        m.weights.assign(static_cast<std::size_t>(num_inputs) * num_excitatory, 0.0);
        m.pre_traces.assign(static_cast<std::size_t>(num_inputs), 0.0);
        m.post_traces.assign(static_cast<std::size_t>(num_excitatory), 0.0);
        return m;
    }

    double* row(int input) { return weights.data() + static_cast<std::size_t>(input) * num_excitatory; }
    const double* row(int input) const {
        return weights.data() + static_cast<std::size_t>(input) * num_excitatory;
    }
    double& at(int input, int neuron) { return row(input)[neuron]; }
    double at(int input, int neuron) const { return row(input)[neuron]; }

    // Clamp to [0, w_max], then snap to the grid when quantization is active.
    double snap(double candidate) const {
        double w = candidate < 0.0 ? 0.0 : (candidate > w_max ? w_max : candidate);
        if (format) w = quantize_value(w, *format, rounding);
        return w;
    }

    std::vector<std::string> validate() const {
        std::vector<std::string> issues;
        if (num_inputs <= 0 || num_excitatory <= 0)
            issues.push_back("synapses: dimensions must be positive");
        if (!(w_decay >= 0.0 && w_decay < 1.0))
            issues.push_back("synapses: w_decay must be in [0, 1)");
        if (!(w_max > 0.0)) issues.push_back("synapses: w_max must be > 0");
        return issues;
    }
};

// Snaps every weight to the given grid; traces and other state untouched.
inline void quantize_weights(SynapseMatrix& syn, const FixedPointFormat& fmt) {
    for (double& w : syn.weights) {
        double v = w < 0.0 ? 0.0 : (w > syn.w_max ? syn.w_max : w);
        w = quantize_value(v, fmt, syn.rounding);
    }
}

// Re-snap with the matrix's own format (no-op in full-precision mode).
inline void requantize_weights(SynapseMatrix& syn) {
    if (syn.format) quantize_weights(syn, *syn.format);
}

// Presynaptic spike arrival: bump presynaptic traces; when trace-driven
// depression is enabled, depress the spiking inputs' weights by the
// postsynaptic traces.
inline void on_pre_spikes(SynapseMatrix& syn, const StdpParams& p,
                          std::span<const std::uint16_t> spiked_inputs) {
    for (std::uint16_t j : spiked_inputs) {
        syn.pre_traces[j] += p.trace_inc;
    }
    if (p.eta_pre > 0.0) {
        for (std::uint16_t j : spiked_inputs) {
            double* w = syn.row(j);
            for (int n = 0; n < syn.num_excitatory; ++n) {
                w[n] = syn.snap(w[n] - p.eta_pre * syn.post_traces[n]);
            }
        }
    }
}

inline void on_pre_spikes(SynapseMatrix& syn, const StdpParams& p,
                          const std::vector<std::uint8_t>& pre_spiked) {
    std::vector<std::uint16_t> idx;
    for (std::size_t j = 0; j < pre_spiked.size(); ++j) {
        if (pre_spiked[j]) idx.push_back(static_cast<std::uint16_t>(j));
    }
    on_pre_spikes(syn, p, std::span<const std::uint16_t>(idx));
}

// Postsynaptic spikes: potentiate every incoming weight of each spiking
// neuron by eta_post * pre_trace, then bump the postsynaptic traces.
inline void on_post_spikes(SynapseMatrix& syn, const StdpParams& p,
                           std::span<const int> spiked_neurons) {
    if (!spiked_neurons.empty()) {
        for (int j = 0; j < syn.num_inputs; ++j) {
            const double dw = p.eta_post * syn.pre_traces[j];
            if (dw == 0.0) continue;
            double* w = syn.row(j);
            for (int n : spiked_neurons) {
                w[n] = syn.snap(w[n] + dw);
            }
        }
    }
    for (int n : spiked_neurons) {
        syn.post_traces[n] += p.trace_inc;
    }
}

inline void on_post_spikes(SynapseMatrix& syn, const StdpParams& p,
                           const std::vector<std::uint8_t>& post_spiked) {
    std::vector<int> idx;
    for (std::size_t n = 0; n < post_spiked.size(); ++n) {
        if (post_spiked[n]) idx.push_back(static_cast<int>(n));
    }
    on_post_spikes(syn, p, std::span<const int>(idx));
}

// Per-presentation depression: neurons without learning activity during the
// presentation have all incoming weights decayed by (1 - w_decay). Under
// truncation this also collapses below-grid values to the next grid point
// down, which is what frees capacity at low precision.
inline void decay_weights(SynapseMatrix& syn, const std::vector<std::uint8_t>& learning_mask) {
    if (!(syn.w_decay >= 0.0 && syn.w_decay < 1.0)) {
        throw ConfigError("w_decay must be in [0, 1), got " + std::to_string(syn.w_decay));
    }
    if (syn.w_decay == 0.0) return;
    const double keep = 1.0 - syn.w_decay;
    for (int j = 0; j < syn.num_inputs; ++j) {
        double* w = syn.row(j);
        for (int n = 0; n < syn.num_excitatory; ++n) {
            if (!learning_mask[static_cast<std::size_t>(n)]) {
                w[n] = syn.snap(w[n] * keep);
            }
        }
    }
}

// Once per timestep. Traces below kTraceFloor flush to exact zero so the
// pairing windows are finite; without this, ever-positive residual traces
// keep triggering depression arbitrarily long after a spike (and under
// truncation any nonzero depression costs a full grid step).
inline constexpr double kTraceFloor = 0.01;

inline void decay_traces(SynapseMatrix& syn, const StdpParams& p) {
    for (double& x : syn.pre_traces) {
        x *= p.trace_decay_pre;
        if (x < kTraceFloor) x = 0.0;
    }
    for (double& x : syn.post_traces) {
        x *= p.trace_decay_post;
        if (x < kTraceFloor) x = 0.0;
    }
}

inline void clear_traces(SynapseMatrix& syn) {
    std::fill(syn.pre_traces.begin(), syn.pre_traces.end(), 0.0);
    std::fill(syn.post_traces.begin(), syn.post_traces.end(), 0.0);
}

} // namespace lpsnn
