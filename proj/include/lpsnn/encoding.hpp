#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lpsnn/errors.hpp"
#include "lpsnn/rng.hpp"

namespace lpsnn {

// A T x num_inputs boolean spike matrix, stored sparsely as per-step lists of
// active input indices (CSR-style). Presentations are sparse, so this is both
// the compact and the fast representation for the simulation loop.
struct SpikeTrain {
    int duration_steps = 0;
    int num_inputs = 0;
    double dt_ms = 1.0;
    std::vector<std::uint32_t> step_offsets; // size duration_steps + 1
    std::vector<std::uint16_t> active;       // active input ids, grouped by step

    std::span<const std::uint16_t> active_at(int t) const {
        return {active.data() + step_offsets[t], active.data() + step_offsets[t + 1]};
    }

    bool at(int t, int input) const {
        for (std::uint16_t j : active_at(t)) {
            if (j == static_cast<std::uint16_t>(input)) return true;
        }
        return false;
    }

    std::size_t total_spikes() const { return active.size(); }
};

// Poisson-style rate coding: pixel p in [0, 255] emits independent per-step
// spikes with probability (p / 255) * max_rate_hz * dt / 1000.
inline SpikeTrain encode_rate(std::span<const std::uint8_t> image, int duration_steps,
                              double max_rate_hz, double dt_ms, Rng& rng) {
    if (max_rate_hz * dt_ms > 1000.0) {
        throw ConfigError("rate coding: max_rate_hz * dt exceeds 1000 ms^-1, "
                          "per-step spike probability would exceed 1");
    }
    if (max_rate_hz < 0.0) {
        throw ConfigError("rate coding: max_rate_hz must be >= 0");
    }

    SpikeTrain train;
    train.duration_steps = duration_steps;
    train.num_inputs = static_cast<int>(image.size());
    train.dt_ms = dt_ms;
    train.step_offsets.reserve(static_cast<std::size_t>(duration_steps) + 1);
    train.step_offsets.push_back(0);

    // Zero pixels can never spike; draw only for the active ones.
    const double scale = max_rate_hz * dt_ms / 1000.0 / 255.0;
    std::vector<std::uint16_t> nonzero;
    std::vector<double> prob;
    for (std::size_t j = 0; j < image.size(); ++j) {
        if (image[j] > 0) {
            nonzero.push_back(static_cast<std::uint16_t>(j));
            prob.push_back(static_cast<double>(image[j]) * scale);
        }
    }

    for (int t = 0; t < duration_steps; ++t) {
        for (std::size_t k = 0; k < nonzero.size(); ++k) {
            if (rng.bernoulli(prob[k])) train.active.push_back(nonzero[k]);
        }
        train.step_offsets.push_back(static_cast<std::uint32_t>(train.active.size()));
    }
    return train;
}

} // namespace lpsnn
