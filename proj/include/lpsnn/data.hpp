#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "lpsnn/errors.hpp"
#include "lpsnn/rng.hpp"

namespace lpsnn {

inline constexpr int kImageRows = 28;
inline constexpr int kImageCols = 28;
inline constexpr int kImagePixels = kImageRows * kImageCols;
inline constexpr int kNumClasses = 10;

using Image = std::array<std::uint8_t, kImagePixels>;

struct Dataset {
    std::vector<Image> images;
    std::vector<std::int32_t> labels;
    std::vector<std::vector<int>> per_class_index; // class -> sample indices

    std::size_t size() const { return images.size(); }

    void rebuild_index() {
        per_class_index.assign(kNumClasses, {});
        for (std::size_t i = 0; i < labels.size(); ++i) {
            per_class_index[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
        }
    }
};

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset) {
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

inline void write_be32(std::ofstream& out, std::uint32_t v) {
    const std::uint8_t bytes[4] = {static_cast<std::uint8_t>(v >> 24),
                                   static_cast<std::uint8_t>(v >> 16),
                                   static_cast<std::uint8_t>(v >> 8),
                                   static_cast<std::uint8_t>(v)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

inline void check_size(const std::filesystem::path& path, std::size_t expected,
                       std::size_t actual) {
    if (actual < expected) {
        throw IdxTruncatedError(path.string() + " is truncated: expected " +
                                std::to_string(expected) + " bytes, got " +
                                std::to_string(actual));
    }
}

} // namespace detail

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// Parses the big-endian IDX pair used by MNIST. Image files carry magic
// 0x00000803 and 28x28 pixels; label files carry magic 0x00000801 with one
// byte per label in [0, 9]. Image and label counts must agree.
inline Dataset load_mnist(const std::filesystem::path& images_path,
                          const std::filesystem::path& labels_path) {
    const auto img_bytes = detail::read_file(images_path);
    detail::check_size(images_path, 16, img_bytes.size());
    const std::uint32_t img_magic = detail::read_be32(img_bytes, 0);
    if (img_magic != kIdxImageMagic) {
        throw IdxBadMagicError(images_path.string() + ": bad image magic 0x" +
                               std::to_string(img_magic) + ", expected 0x803");
    }
    const std::uint32_t count = detail::read_be32(img_bytes, 4);
    const std::uint32_t rows = detail::read_be32(img_bytes, 8);
    const std::uint32_t cols = detail::read_be32(img_bytes, 12);
    if (rows != kImageRows || cols != kImageCols) {
        throw DataError(images_path.string() + ": expected 28x28 images, got " +
                        std::to_string(rows) + "x" + std::to_string(cols));
    }
    detail::check_size(images_path, 16 + static_cast<std::size_t>(count) * kImagePixels,
                       img_bytes.size());

    const auto lbl_bytes = detail::read_file(labels_path);
    detail::check_size(labels_path, 8, lbl_bytes.size());
    const std::uint32_t lbl_magic = detail::read_be32(lbl_bytes, 0);
    if (lbl_magic != kIdxLabelMagic) {
        throw IdxBadMagicError(labels_path.string() + ": bad label magic 0x" +
                               std::to_string(lbl_magic) + ", expected 0x801");
    }
    const std::uint32_t lbl_count = detail::read_be32(lbl_bytes, 4);
    if (lbl_count != count) {
        throw IdxCountMismatchError("image/label count mismatch: " + std::to_string(count) +
                                    " images vs " + std::to_string(lbl_count) + " labels");
    }
    detail::check_size(labels_path, 8 + static_cast<std::size_t>(lbl_count), lbl_bytes.size());

    Dataset ds;
    ds.images.resize(count);
    ds.labels.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        std::copy_n(img_bytes.begin() + 16 + static_cast<std::size_t>(i) * kImagePixels,
                    kImagePixels, ds.images[i].begin());
        const std::uint8_t label = lbl_bytes[8 + i];
        if (label >= kNumClasses) {
            throw DataError(labels_path.string() + ": label " + std::to_string(label) +
                            " out of range at index " + std::to_string(i));
        }
        ds.labels[i] = label;
    }
    ds.rebuild_index();
    return ds;
}

inline void write_idx_images(const std::filesystem::path& path, std::span<const Image> images) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    detail::write_be32(out, kIdxImageMagic);
    detail::write_be32(out, static_cast<std::uint32_t>(images.size()));
    detail::write_be32(out, kImageRows);
    detail::write_be32(out, kImageCols);
    for (const auto& img : images) {
        out.write(reinterpret_cast<const char*>(img.data()), img.size());
    }
}

inline void write_idx_labels(const std::filesystem::path& path,
                             std::span<const std::int32_t> labels) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    detail::write_be32(out, kIdxLabelMagic);
    detail::write_be32(out, static_cast<std::uint32_t>(labels.size()));
    for (std::int32_t l : labels) {
        const auto byte = static_cast<std::uint8_t>(l);
        out.write(reinterpret_cast<const char*>(&byte), 1);
    }
}

// Draws `samples_per_class` training indices per class: equally sized,
// disjoint, seeded-shuffled subsets.
inline std::vector<std::vector<int>> split_by_class(const Dataset& ds, int samples_per_class,
                                                    Rng& rng, int num_classes = kNumClasses) {
    if (samples_per_class <= 0) {
        throw ConfigError("split_by_class: samples_per_class must be > 0");
    }
    std::vector<std::vector<int>> split(static_cast<std::size_t>(num_classes));
    for (int c = 0; c < num_classes; ++c) {
        const auto& all = ds.per_class_index[static_cast<std::size_t>(c)];
        if (static_cast<int>(all.size()) < samples_per_class) {
            throw ConfigError("split_by_class: class " + std::to_string(c) + " has only " +
                              std::to_string(all.size()) + " samples, requested " +
                              std::to_string(samples_per_class));
        }
        auto shuffled = all;
        rng.shuffle(shuffled);
        split[static_cast<std::size_t>(c)].assign(shuffled.begin(),
                                                  shuffled.begin() + samples_per_class);
    }
    return split;
}

// Per-class test indices, optionally capped (0 = use everything available).
inline std::vector<std::vector<int>> test_indices_by_class(const Dataset& ds, int cap_per_class) {
    std::vector<std::vector<int>> out(kNumClasses);
    for (int c = 0; c < kNumClasses; ++c) {
        const auto& all = ds.per_class_index[static_cast<std::size_t>(c)];
        const std::size_t take = cap_per_class > 0
                                     ? std::min<std::size_t>(all.size(), static_cast<std::size_t>(cap_per_class))
                                     : all.size();
        out[static_cast<std::size_t>(c)].assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take));
    }
    return out;
}

} // namespace lpsnn
