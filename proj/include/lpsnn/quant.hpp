#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "lpsnn/errors.hpp"

namespace lpsnn {

// Signed fixed-point format Qi.f: one sign bit, `i` integer bits, `f`
// fractional bits, two's-complement semantics. Representable range is
// [-2^i, 2^i - 2^-f] on a grid of step 2^-f.
struct FixedPointFormat {
    int integer_bits = 0;
    int fractional_bits = 0;

    int width() const { return 1 + integer_bits + fractional_bits; }
    double epsilon() const { return std::ldexp(1.0, -fractional_bits); }
    double min_value() const { return -std::ldexp(1.0, integer_bits); }
    double max_value() const { return std::ldexp(1.0, integer_bits) - epsilon(); }

    // Bounds of value * 2^f.
    std::int64_t min_scaled() const {
        return -(std::int64_t{1} << (integer_bits + fractional_bits));
    }
    std::int64_t max_scaled() const {
        return (std::int64_t{1} << (integer_bits + fractional_bits)) - 1;
    }

    double from_scaled(std::int64_t s) const {
        return std::ldexp(static_cast<double>(s), -fractional_bits);
    }

    std::string to_string() const {
        return "Q" + std::to_string(integer_bits) + "." + std::to_string(fractional_bits);
    }

    bool operator==(const FixedPointFormat&) const = default;
};

inline FixedPointFormat make_format(int integer_bits, int fractional_bits) {
    if (integer_bits < 0) {
        throw ConfigError("integer_bits must be >= 0, got " + std::to_string(integer_bits));
    }
    if (fractional_bits < 1) {
        throw ConfigError("fractional_bits must be >= 1 (sub-unit weights are not "
                          "representable otherwise), got " + std::to_string(fractional_bits));
    }
    if (integer_bits + fractional_bits > 62) {
        throw ConfigError("format too wide: integer_bits + fractional_bits must be <= 62");
    }
    return FixedPointFormat{integer_bits, fractional_bits};
}

// Parses the config spelling "Qi.f", e.g. "Q0.3".
inline FixedPointFormat parse_format(const std::string& text) {
    auto fail = [&] {
        throw ConfigError("bad fixed-point format \"" + text + "\", expected \"Qi.f\" like \"Q0.3\"");
    };
    if (text.size() < 4 || text[0] != 'Q') fail();
    auto dot = text.find('.');
    if (dot == std::string::npos || dot < 2 || dot + 1 >= text.size()) fail();
    int i = 0;
    int f = 0;
    try {
        std::size_t used = 0;
        i = std::stoi(text.substr(1, dot - 1), &used);
        if (used != dot - 1) fail();
        f = std::stoi(text.substr(dot + 1), &used);
        if (used != text.size() - dot - 1) fail();
    } catch (const std::logic_error&) {
        fail();
    }
    return make_format(i, f);
}

enum class Rounding {
    truncate, // floor on the scaled integer: T(x) = floor(x * 2^f) / 2^f
    nearest,  // round to nearest grid point, ties away from zero
};

// Scaled-integer quantization: returns round(x * 2^f) saturated to the
// format's range. Saturating, never wrapping; out-of-range reals clamp to the
// nearest representable bound.
inline std::int64_t quantize_scaled(double x, const FixedPointFormat& fmt,
                                    Rounding rounding = Rounding::truncate) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("quantize: input must be finite");
    }
    if (x <= fmt.min_value()) return fmt.min_scaled();
    if (x >= fmt.max_value()) return fmt.max_scaled();
    const double scaled = std::ldexp(x, fmt.fractional_bits); // exact: power-of-two scale
    const std::int64_t q = rounding == Rounding::truncate
                               ? static_cast<std::int64_t>(std::floor(scaled))
                               : static_cast<std::int64_t>(std::llround(scaled));
    return q;
}

// A real number structurally on the format's grid: stored as value * 2^f.
struct QuantizedValue {
    std::int64_t scaled = 0;
    FixedPointFormat format;

    double value() const { return format.from_scaled(scaled); }

    bool operator==(const QuantizedValue&) const = default;
};

inline QuantizedValue quantize(double x, const FixedPointFormat& fmt,
                               Rounding rounding = Rounding::truncate) {
    return QuantizedValue{quantize_scaled(x, fmt, rounding), fmt};
}

// Grid snap returning the real value. Results are exact dyadic rationals, so
// repeated round trips through double storage cannot drift off the grid.
inline double quantize_value(double x, const FixedPointFormat& fmt,
                             Rounding rounding = Rounding::truncate) {
    return fmt.from_scaled(quantize_scaled(x, fmt, rounding));
}

inline void quantize_span(std::span<double> values, const FixedPointFormat& fmt,
                          Rounding rounding = Rounding::truncate) {
    for (double& v : values) {
        v = quantize_value(v, fmt, rounding);
    }
}

} // namespace lpsnn
