#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lpsnn/quant.hpp"
#include "lpsnn/rng.hpp"
#include "support/oracles.hpp"

using lpsnn::FixedPointFormat;
using lpsnn::make_format;
using lpsnn::parse_format;
using lpsnn::quantize;
using lpsnn::quantize_value;
using lpsnn::Rounding;

TEST(Format, RangeAndPrecision) {
    const auto q12 = make_format(1, 2);
    EXPECT_DOUBLE_EQ(q12.min_value(), -2.0);
    EXPECT_DOUBLE_EQ(q12.max_value(), 1.75);
    EXPECT_DOUBLE_EQ(q12.epsilon(), 0.25);
    EXPECT_EQ(q12.width(), 4);

    const auto q03 = make_format(0, 3);
    EXPECT_DOUBLE_EQ(q03.min_value(), -1.0);
    EXPECT_DOUBLE_EQ(q03.max_value(), 0.875);
    EXPECT_DOUBLE_EQ(q03.epsilon(), 0.125);

    // Widest supported format, the stand-in for bit-exact 32-bit storage.
    const auto q031 = make_format(0, 31);
    EXPECT_EQ(q031.width(), 32);
}

TEST(Format, RejectsZeroFractionalBits) {
    EXPECT_THROW(make_format(1, 0), lpsnn::ConfigError);
    EXPECT_THROW(make_format(-1, 3), lpsnn::ConfigError);
    EXPECT_THROW(make_format(0, 63), lpsnn::ConfigError);
}

TEST(Format, ParseRoundTrip) {
    const auto fmt = parse_format("Q0.3");
    EXPECT_EQ(fmt.integer_bits, 0);
    EXPECT_EQ(fmt.fractional_bits, 3);
    EXPECT_EQ(fmt.to_string(), "Q0.3");
    EXPECT_EQ(parse_format("Q1.11").width(), 13);

    for (const char* bad : {"", "Q", "Q3", "0.3", "Q.3", "Q0.", "Q0.0", "Qx.y", "Q0.3x"}) {
        EXPECT_THROW(parse_format(bad), lpsnn::ConfigError) << bad;
    }
}

TEST(Quantize, SpecExamples) {
    const auto q12 = make_format(1, 2);
    EXPECT_DOUBLE_EQ(quantize_value(0.0, q12), 0.0);
    EXPECT_DOUBLE_EQ(quantize_value(0.8125, q12), 0.75);
    // floor(-1.2) = -2, i.e. truncation toward -inf, not toward zero.
    EXPECT_DOUBLE_EQ(quantize_value(-0.3, q12), -0.5);
    // Saturation at the top of the range.
    EXPECT_DOUBLE_EQ(quantize_value(5.0, make_format(1, 4)), 1.9375);
    EXPECT_DOUBLE_EQ(quantize_value(-5.0, make_format(1, 4)), -2.0);
}

TEST(Quantize, NonFiniteIsContractViolation) {
    const auto fmt = make_format(0, 3);
    EXPECT_THROW(quantize_value(std::nan(""), fmt), std::invalid_argument);
    EXPECT_THROW(quantize_value(INFINITY, fmt), std::invalid_argument);
}

TEST(Quantize, NearestModeDiffersFromTruncation) {
    const auto q12 = make_format(1, 2);
    EXPECT_DOUBLE_EQ(quantize_value(-0.3, q12, Rounding::nearest), -0.25);
    EXPECT_DOUBLE_EQ(quantize_value(0.8125, q12, Rounding::nearest), 0.75);
    EXPECT_DOUBLE_EQ(quantize_value(0.9, q12, Rounding::nearest), 1.0);
    EXPECT_DOUBLE_EQ(quantize_value(0.9, q12, Rounding::truncate), 0.75);
}

TEST(Quantize, ScaledRepresentationIsStructural) {
    const auto fmt = make_format(0, 4);
    const auto qv = quantize(0.51, fmt);
    EXPECT_EQ(qv.scaled, 8);
    EXPECT_DOUBLE_EQ(qv.value(), 0.5);
}

namespace {

std::vector<double> sample_inputs(const FixedPointFormat& fmt, int count, lpsnn::Rng& rng) {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(count));
    const double lo = fmt.min_value();
    const double hi = fmt.max_value();
    for (int k = 0; k < count; ++k) {
        switch (k % 4) {
            case 0: xs.push_back(rng.uniform(lo, hi)); break;
            case 1: xs.push_back(rng.uniform(2.0 * lo, 2.0 * hi)); break;
            case 2: xs.push_back(rng.uniform(-1e6, 1e6)); break;
            default: {
                // Near-grid values, where off-by-one-ulp bugs would show up.
                const double grid = fmt.epsilon() * std::floor(rng.uniform(lo, hi) / fmt.epsilon());
                xs.push_back(grid + rng.uniform(-1e-12, 1e-12));
            }
        }
    }
    return xs;
}

} // namespace

TEST(Quantize, MatchesIndependentIntegerReference) {
    lpsnn::Rng rng(0xACCE55);
    for (const auto& fmt : {make_format(0, 3), make_format(0, 5), make_format(0, 7),
                            make_format(0, 11), make_format(1, 2), make_format(2, 6)}) {
        for (double x : sample_inputs(fmt, 100000, rng)) {
            const double got = quantize_value(x, fmt);
            const double want =
                lpsnn::testing::reference_truncate(x, fmt.integer_bits, fmt.fractional_bits);
            ASSERT_EQ(got, want) << fmt.to_string() << " x=" << x;
        }
    }
}

TEST(Quantize, Properties) {
    lpsnn::Rng rng(42);
    const auto fmt = make_format(0, 4);
    double prev_x = 0.0;
    double prev_q = quantize_value(prev_x, fmt);
    for (int k = 0; k < 20000; ++k) {
        const double x = rng.uniform(-4.0, 4.0);
        const double q = quantize_value(x, fmt);

        // Idempotence and grid membership.
        ASSERT_EQ(quantize_value(q, fmt), q);
        ASSERT_EQ(std::ldexp(q, fmt.fractional_bits), std::floor(std::ldexp(q, fmt.fractional_bits)));

        // Monotonicity against the previous sample.
        if (x <= prev_x) {
            ASSERT_LE(q, prev_q);
        } else {
            ASSERT_GE(q, prev_q);
        }
        prev_x = x;
        prev_q = q;

        // Error bound inside the representable range.
        if (x >= fmt.min_value() && x <= fmt.max_value()) {
            ASSERT_GE(x - q, 0.0);
            ASSERT_LT(x - q, fmt.epsilon());
        }
    }
}

TEST(Quantize, SpanSnapsEveryElement) {
    lpsnn::Rng rng(7);
    const auto fmt = make_format(0, 4);
    std::vector<double> values(512);
    for (double& v : values) v = rng.uniform();
    lpsnn::quantize_span(values, fmt);
    for (double v : values) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 0.9375);
        ASSERT_EQ(v, lpsnn::testing::reference_truncate(v, 0, 4));
    }
    // Re-quantization of an already snapped span is the identity.
    auto copy = values;
    lpsnn::quantize_span(copy, fmt);
    EXPECT_EQ(copy, values);
}
