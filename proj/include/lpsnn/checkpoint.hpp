#pragma once

// Model checkpoint, little-endian binary. Layout (version 1):
//
//   8 bytes  magic "LPSNNCK1"
//   u32      version
//   u8       format_kind: 0 = native float64 weights, 1 = fixed point Qi.f
//   i32 i32  integer_bits, fractional_bits (zero when native)
//   u8       rounding: 0 = truncate, 1 = nearest
//   i32 i32  num_inputs, num_excitatory
//   f64 x4   w_max, w_decay, inhibition_strength, init_weight_max
//   f64 x6   v_rest, v_reset, v_th_base, v_decay, theta_inc, theta_decay
//   i32 f64  t_ref, dt_ms
//   f64 x5   eta_post, eta_pre, trace_decay_pre, trace_decay_post, trace_inc
//   weights  num_inputs*num_excitatory entries, row-major by input:
//            i64 scaled integers (fixed point) or f64 bits (native)
//   f64 xN   theta per neuron
//   u8       has_labels
//   i32      num_classes, then i32 label per neuron (when has_labels)
//
// Neuron membrane state is transient and not persisted; loading restores
// neurons at rest with the stored theta.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "lpsnn/errors.hpp"
#include "lpsnn/network.hpp"

namespace lpsnn {

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "checkpoint i/o assumes a little-endian host");

template <typename T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& offset) {
    if (offset + sizeof(T) > in.size()) {
        throw DataError("checkpoint truncated");
    }
    T v;
    std::memcpy(&v, in.data() + offset, sizeof(T));
    offset += sizeof(T);
    return v;
}

} // namespace detail

inline constexpr char kCheckpointMagic[9] = "LPSNNCK1";

inline std::string serialize_checkpoint(const SnnModel& m) {
    std::string out;
    out.append(kCheckpointMagic, 8);
    detail::put<std::uint32_t>(out, 1);
    detail::put<std::uint8_t>(out, m.net.format ? 1 : 0);
    detail::put<std::int32_t>(out, m.net.format ? m.net.format->integer_bits : 0);
    detail::put<std::int32_t>(out, m.net.format ? m.net.format->fractional_bits : 0);
    detail::put<std::uint8_t>(out, m.net.rounding == Rounding::nearest ? 1 : 0);
    detail::put<std::int32_t>(out, m.net.num_inputs);
    detail::put<std::int32_t>(out, m.net.num_excitatory);
    detail::put<double>(out, m.net.w_max);
    detail::put<double>(out, m.synapses.w_decay);
    detail::put<double>(out, m.net.inhibition_strength);
    detail::put<double>(out, m.net.init_weight_max);
    detail::put<double>(out, m.lif.v_rest);
    detail::put<double>(out, m.lif.v_reset);
    detail::put<double>(out, m.lif.v_th_base);
    detail::put<double>(out, m.lif.v_decay);
    detail::put<double>(out, m.lif.theta_inc);
    detail::put<double>(out, m.lif.theta_decay);
    detail::put<std::int32_t>(out, m.lif.t_ref);
    detail::put<double>(out, m.lif.dt_ms);
    detail::put<double>(out, m.stdp.eta_post);
    detail::put<double>(out, m.stdp.eta_pre);
    detail::put<double>(out, m.stdp.trace_decay_pre);
    detail::put<double>(out, m.stdp.trace_decay_post);
    detail::put<double>(out, m.stdp.trace_inc);

    if (m.net.format) {
        // Grid values stored as scaled integers, bit-exact by construction.
        for (double w : m.synapses.weights) {
            detail::put<std::int64_t>(out, quantize_scaled(w, *m.net.format));
        }
    } else {
        for (double w : m.synapses.weights) detail::put<double>(out, w);
    }
    for (const auto& s : m.neurons) detail::put<double>(out, s.theta);

    detail::put<std::uint8_t>(out, m.neuron_labels ? 1 : 0);
    if (m.neuron_labels) {
        detail::put<std::int32_t>(out, m.num_classes);
        for (auto l : *m.neuron_labels) detail::put<std::int32_t>(out, l);
    }
    return out;
}

inline SnnModel deserialize_checkpoint(const std::string& bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0) {
        throw DataError("not a model checkpoint (bad magic)");
    }
    std::size_t off = 8;
    const auto version = detail::take<std::uint32_t>(bytes, off);
    if (version != 1) {
        throw DataError("unsupported checkpoint version " + std::to_string(version));
    }

    const auto format_kind = detail::take<std::uint8_t>(bytes, off);
    const auto integer_bits = detail::take<std::int32_t>(bytes, off);
    const auto fractional_bits = detail::take<std::int32_t>(bytes, off);
    const auto rounding = detail::take<std::uint8_t>(bytes, off);

    SnnModel m;
    m.net.num_inputs = detail::take<std::int32_t>(bytes, off);
    m.net.num_excitatory = detail::take<std::int32_t>(bytes, off);
    m.net.w_max = detail::take<double>(bytes, off);
    const double w_decay = detail::take<double>(bytes, off);
    m.net.inhibition_strength = detail::take<double>(bytes, off);
    m.net.init_weight_max = detail::take<double>(bytes, off);
    m.lif.v_rest = detail::take<double>(bytes, off);
    m.lif.v_reset = detail::take<double>(bytes, off);
    m.lif.v_th_base = detail::take<double>(bytes, off);
    m.lif.v_decay = detail::take<double>(bytes, off);
    m.lif.theta_inc = detail::take<double>(bytes, off);
    m.lif.theta_decay = detail::take<double>(bytes, off);
    m.lif.t_ref = detail::take<std::int32_t>(bytes, off);
    m.lif.dt_ms = detail::take<double>(bytes, off);
    m.stdp.eta_post = detail::take<double>(bytes, off);
    m.stdp.eta_pre = detail::take<double>(bytes, off);
    m.stdp.trace_decay_pre = detail::take<double>(bytes, off);
    m.stdp.trace_decay_post = detail::take<double>(bytes, off);
    m.stdp.trace_inc = detail::take<double>(bytes, off);

    if (format_kind == 1) m.net.format = make_format(integer_bits, fractional_bits);
    m.net.rounding = rounding == 1 ? Rounding::nearest : Rounding::truncate;

    m.synapses = SynapseMatrix::zeros(m.net.num_inputs, m.net.num_excitatory);
    m.synapses.w_decay = w_decay;
    m.synapses.w_max = m.net.w_max;
    m.synapses.format = m.net.format;
    m.synapses.rounding = m.net.rounding;
    if (m.net.format) {
        for (double& w : m.synapses.weights) {
            w = m.net.format->from_scaled(detail::take<std::int64_t>(bytes, off));
        }
    } else {
        for (double& w : m.synapses.weights) w = detail::take<double>(bytes, off);
    }

    m.neurons.assign(static_cast<std::size_t>(m.net.num_excitatory), rest_state(m.lif));
    for (auto& s : m.neurons) s.theta = detail::take<double>(bytes, off);

    if (detail::take<std::uint8_t>(bytes, off) == 1) {
        m.num_classes = detail::take<std::int32_t>(bytes, off);
        std::vector<std::int32_t> labels(static_cast<std::size_t>(m.net.num_excitatory));
        for (auto& l : labels) l = detail::take<std::int32_t>(bytes, off);
        m.neuron_labels = std::move(labels);
    }
    return m;
}

inline void save_checkpoint(const SnnModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    const auto bytes = serialize_checkpoint(m);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline SnnModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return deserialize_checkpoint(bytes);
}

} // namespace lpsnn
