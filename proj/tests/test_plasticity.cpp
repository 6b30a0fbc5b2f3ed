#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "lpsnn/plasticity.hpp"
#include "lpsnn/rng.hpp"
#include "support/oracles.hpp"

using lpsnn::make_format;
using lpsnn::StdpParams;
using lpsnn::SynapseMatrix;

namespace {

SynapseMatrix make_matrix(int inputs, int neurons, double fill) {
    auto syn = SynapseMatrix::zeros(inputs, neurons);
    std::fill(syn.weights.begin(), syn.weights.end(), fill);
    return syn;
}

// Scalar reference for the stored-weight update: clamp the full-precision
// candidate, then truncate on the grid (when a format is active).
double reference_snap(const SynapseMatrix& syn, double candidate) {
    double w = std::min(std::max(candidate, 0.0), syn.w_max);
    if (syn.format) {
        w = lpsnn::testing::reference_truncate(w, syn.format->integer_bits,
                                               syn.format->fractional_bits);
    }
    return w;
}

} // namespace

TEST(QuantizeWeights, SpecExamples) {
    auto syn = make_matrix(4, 3, 0.0);
    lpsnn::quantize_weights(syn, make_format(0, 4));
    for (double w : syn.weights) EXPECT_EQ(w, 0.0);

    lpsnn::Rng rng(3);
    syn = make_matrix(8, 8, 0.0);
    for (double& w : syn.weights) w = rng.uniform();
    syn.pre_traces[0] = 0.7;
    lpsnn::quantize_weights(syn, make_format(0, 4));
    for (double w : syn.weights) {
        ASSERT_EQ(w, lpsnn::testing::reference_truncate(w, 0, 4));
        ASSERT_GE(w, 0.0);
        ASSERT_LE(w, 0.9375);
    }
    EXPECT_DOUBLE_EQ(syn.pre_traces[0], 0.7); // non-weight state untouched

    // Idempotence on an already-quantized matrix.
    const auto before = syn.weights;
    lpsnn::quantize_weights(syn, make_format(0, 4));
    EXPECT_EQ(syn.weights, before);
}

TEST(PreSpikes, NoSpikesLeavesMatrixUntouched) {
    auto syn = make_matrix(4, 2, 0.5);
    StdpParams p;
    p.eta_pre = 0.01;
    const auto weights = syn.weights;
    on_pre_spikes(syn, p, std::vector<std::uint8_t>{0, 0, 0, 0});
    EXPECT_EQ(syn.weights, weights);
    for (double t : syn.pre_traces) EXPECT_EQ(t, 0.0);
}

TEST(PreSpikes, ZeroPostTraceDepresssNothing) {
    auto syn = make_matrix(4, 2, 0.5);
    StdpParams p;
    p.eta_pre = 0.01;
    on_pre_spikes(syn, p, std::vector<std::uint8_t>{0, 1, 0, 0});
    for (double w : syn.weights) EXPECT_DOUBLE_EQ(w, 0.5);
    EXPECT_DOUBLE_EQ(syn.pre_traces[1], p.trace_inc);
    EXPECT_DOUBLE_EQ(syn.pre_traces[0], 0.0);
}

TEST(PreSpikes, QuantizedDepressionNeverGoesNegative) {
    auto syn = make_matrix(2, 2, 0.5);
    syn.format = make_format(0, 4);
    StdpParams p;
    p.eta_pre = 0.01;
    syn.post_traces = {0.5, 0.0};

    on_pre_spikes(syn, p, std::vector<std::uint8_t>{0, 1});
    // candidate 0.5 - 0.01*0.5 = 0.495 -> floor(0.495 * 16)/16 = 0.4375
    EXPECT_DOUBLE_EQ(syn.at(1, 0), 0.4375);
    EXPECT_DOUBLE_EQ(syn.at(1, 1), 0.5); // post trace 0, no change
    EXPECT_DOUBLE_EQ(syn.at(0, 0), 0.5); // input 0 did not spike

    syn.at(1, 0) = 0.0;
    on_pre_spikes(syn, p, std::vector<std::uint8_t>{0, 1});
    EXPECT_DOUBLE_EQ(syn.at(1, 0), 0.0);
}

TEST(PostSpikes, NoSpikesNoChange) {
    auto syn = make_matrix(3, 2, 0.25);
    syn.pre_traces = {1.0, 1.0, 1.0};
    const auto weights = syn.weights;
    on_post_spikes(syn, StdpParams{}, std::vector<std::uint8_t>{0, 0});
    EXPECT_EQ(syn.weights, weights);
    for (double t : syn.post_traces) EXPECT_EQ(t, 0.0);
}

TEST(PostSpikes, PotentiatesByEtaTimesTrace) {
    auto syn = make_matrix(3, 2, 0.25);
    StdpParams p;
    p.eta_post = 0.01;
    syn.pre_traces = {1.0, 1.0, 1.0};

    on_post_spikes(syn, p, std::vector<std::uint8_t>{1, 0});
    for (int j = 0; j < 3; ++j) {
        EXPECT_DOUBLE_EQ(syn.at(j, 0), 0.26);
        EXPECT_DOUBLE_EQ(syn.at(j, 1), 0.25);
    }
    EXPECT_DOUBLE_EQ(syn.post_traces[0], p.trace_inc);
    EXPECT_DOUBLE_EQ(syn.post_traces[1], 0.0);
}

TEST(PostSpikes, SaturatesAtUpperBound) {
    auto syn = make_matrix(2, 1, 1.0);
    StdpParams p;
    p.eta_post = 0.5;
    syn.pre_traces = {1.0, 1.0};
    on_post_spikes(syn, p, std::vector<std::uint8_t>{1});
    EXPECT_DOUBLE_EQ(syn.at(0, 0), 1.0);

    // Under quantization the ceiling is the top grid point.
    syn = make_matrix(2, 1, 0.9375);
    syn.format = make_format(0, 4);
    syn.pre_traces = {1.0, 1.0};
    on_post_spikes(syn, p, std::vector<std::uint8_t>{1});
    EXPECT_DOUBLE_EQ(syn.at(0, 0), 0.9375);
}

TEST(PostSpikes, StuckAtZeroUnderTruncation) {
    // With format Q0.f, a potentiation increment below 2^-f cannot move a
    // grid-aligned weight: floor truncation swallows it entirely.
    const auto fmt = make_format(0, 3); // epsilon = 0.125
    StdpParams p;
    p.eta_post = 1.0;
    for (double w = 0.0; w < 0.876; w += 0.125) {
        for (double delta : {1e-4, 0.04, 0.1249}) {
            auto syn = make_matrix(1, 1, w);
            syn.format = fmt;
            syn.pre_traces = {delta};
            on_post_spikes(syn, p, std::vector<std::uint8_t>{1});
            ASSERT_DOUBLE_EQ(syn.at(0, 0), w) << "w=" << w << " delta=" << delta;
        }
    }
    // An increment of at least epsilon does register.
    auto syn = make_matrix(1, 1, 0.25);
    syn.format = fmt;
    syn.pre_traces = {0.125};
    on_post_spikes(syn, p, std::vector<std::uint8_t>{1});
    EXPECT_DOUBLE_EQ(syn.at(0, 0), 0.375);
}

TEST(DecayWeights, SpecExamples) {
    auto syn = make_matrix(2, 2, 0.5);
    syn.w_decay = 0.0;
    decay_weights(syn, {0, 0});
    for (double w : syn.weights) EXPECT_DOUBLE_EQ(w, 0.5);

    syn.w_decay = 0.1;
    decay_weights(syn, {0, 1});
    EXPECT_DOUBLE_EQ(syn.at(0, 0), 0.45); // full precision arithmetic
    EXPECT_DOUBLE_EQ(syn.at(0, 1), 0.5);  // potentiated neurons untouched

    // Truncation collapses below-grid values: this is what frees capacity.
    syn = make_matrix(1, 1, 0.0625);
    syn.format = make_format(0, 4);
    syn.w_decay = 0.5;
    decay_weights(syn, {0});
    EXPECT_DOUBLE_EQ(syn.at(0, 0), 0.0);
}

TEST(DecayWeights, RejectsOutOfRangeRate) {
    auto syn = make_matrix(1, 1, 0.5);
    syn.w_decay = 1.0;
    EXPECT_THROW(decay_weights(syn, {0}), lpsnn::ConfigError);
    syn.w_decay = -0.1;
    EXPECT_THROW(decay_weights(syn, {0}), lpsnn::ConfigError);
}

TEST(DecayTraces, ClosedFormMatchesIteration) {
    auto syn = make_matrix(2, 2, 0.0);
    StdpParams p;
    p.trace_decay_pre = 0.9;
    p.trace_decay_post = 0.8;
    syn.pre_traces = {1.0, 0.0};
    syn.post_traces = {2.0, 0.0};

    decay_traces(syn, p);
    EXPECT_DOUBLE_EQ(syn.pre_traces[0], 0.9);
    EXPECT_DOUBLE_EQ(syn.post_traces[0], 1.6);
    EXPECT_DOUBLE_EQ(syn.pre_traces[1], 0.0);

    for (int k = 1; k < 10; ++k) decay_traces(syn, p);
    EXPECT_NEAR(syn.pre_traces[0], std::pow(0.9, 10), 1e-12);
    EXPECT_NEAR(syn.post_traces[0], 2.0 * std::pow(0.8, 10), 1e-12);

    // Sub-threshold traces flush to exact zero: the pairing window is finite.
    for (int k = 0; k < 40; ++k) decay_traces(syn, p);
    EXPECT_EQ(syn.pre_traces[0], 0.0);
    EXPECT_EQ(syn.post_traces[0], 0.0);
}

// Randomized op sequences checked against a scalar shadow that recomputes
// every stored weight as snap(full-precision candidate).
TEST(Plasticity, StoredWeightAlwaysEqualsSnappedCandidate) {
    lpsnn::Rng rng(0x5d);
    for (bool quantized : {false, true}) {
        auto syn = SynapseMatrix::zeros(6, 4);
        if (quantized) syn.format = make_format(0, 3);
        syn.w_decay = 0.2;
        for (double& w : syn.weights) w = syn.snap(rng.uniform());

        StdpParams p;
        p.eta_post = 0.3;
        p.eta_pre = 0.05;

        for (int step = 0; step < 2000; ++step) {
            const int op = static_cast<int>(rng.below(4));
            if (op == 0) {
                std::vector<std::uint8_t> spiked(6);
                for (auto& s : spiked) s = rng.bernoulli(0.3);
                auto expected = syn.weights;
                if (p.eta_pre > 0.0) {
                    for (int j = 0; j < 6; ++j) {
                        if (!spiked[j]) continue;
                        for (int n = 0; n < 4; ++n) {
                            expected[j * 4 + n] =
                                reference_snap(syn, syn.at(j, n) - p.eta_pre * syn.post_traces[n]);
                        }
                    }
                }
                on_pre_spikes(syn, p, spiked);
                ASSERT_EQ(syn.weights, expected);
            } else if (op == 1) {
                std::vector<std::uint8_t> spiked(4);
                for (auto& s : spiked) s = rng.bernoulli(0.3);
                auto expected = syn.weights;
                for (int j = 0; j < 6; ++j) {
                    for (int n = 0; n < 4; ++n) {
                        if (spiked[n]) {
                            expected[j * 4 + n] =
                                reference_snap(syn, syn.at(j, n) + p.eta_post * syn.pre_traces[j]);
                        }
                    }
                }
                on_post_spikes(syn, p, spiked);
                ASSERT_EQ(syn.weights, expected);
            } else if (op == 2) {
                std::vector<std::uint8_t> mask(4);
                for (auto& m : mask) m = rng.bernoulli(0.5);
                auto expected = syn.weights;
                for (int j = 0; j < 6; ++j) {
                    for (int n = 0; n < 4; ++n) {
                        if (!mask[n]) {
                            expected[j * 4 + n] =
                                reference_snap(syn, syn.at(j, n) * (1.0 - syn.w_decay));
                        }
                    }
                }
                decay_weights(syn, mask);
                ASSERT_EQ(syn.weights, expected);
            } else {
                decay_traces(syn, p);
            }

            for (double w : syn.weights) {
                ASSERT_GE(w, 0.0);
                ASSERT_LE(w, syn.w_max);
                if (syn.format) {
                    ASSERT_EQ(w, lpsnn::testing::reference_truncate(w, 0, 3));
                }
            }
            for (double t : syn.pre_traces) ASSERT_GE(t, 0.0);
            for (double t : syn.post_traces) ASSERT_GE(t, 0.0);
        }
    }
}

TEST(Plasticity, DepressionMonotoneWithoutPostSpikes) {
    lpsnn::Rng rng(0xdec);
    auto syn = SynapseMatrix::zeros(5, 3);
    syn.format = make_format(0, 5);
    syn.w_decay = 0.05;
    for (double& w : syn.weights) w = syn.snap(rng.uniform());

    StdpParams p;
    p.eta_pre = 0.02;
    for (int round = 0; round < 200; ++round) {
        const auto before = syn.weights;
        std::vector<std::uint8_t> pre(5);
        for (auto& s : pre) s = rng.bernoulli(0.4);
        on_pre_spikes(syn, p, pre);
        decay_weights(syn, {0, 0, 0});
        for (std::size_t k = 0; k < syn.weights.size(); ++k) {
            ASSERT_LE(syn.weights[k], before[k]);
        }
    }
}
