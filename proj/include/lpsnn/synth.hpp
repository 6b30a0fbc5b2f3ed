#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "lpsnn/data.hpp"
#include "lpsnn/rng.hpp"

namespace lpsnn {

// Deterministic 10-class 28x28 digit-glyph dataset. Serves as a drop-in
// MNIST-shaped workload for tests and for environments without the MNIST
// files: distinct per-class glyphs, random placement jitter, intensity
// variation, pixel dropout, and light background noise.
namespace synth {

inline constexpr int kGlyphRows = 7;
inline constexpr int kGlyphCols = 7;

// Stroke areas are kept within ~15% of each other so every class delivers a
// comparable input drive (handwritten digits have thick strokes even for
// thin shapes like "1"), and stroke placement is spread over the canvas to
// keep cross-class overlap moderate.
inline constexpr std::array<std::array<std::string_view, kGlyphRows>, 10> kGlyphs = {{
    {".####..", "#....#.", "#....#.", "#....#.", "#....#.", "#....#.", ".####.."}, // 0
    {"...##..", "..###..", "...##..", "...##..", "...##..", "...##..", "..####."}, // 1
    {".####..", "#....#.", ".....#.", "....#..", "...#...", "..#....", ".######"}, // 2
    {".####..", ".....#.", ".....#.", "..###..", ".....#.", ".....#.", ".####.."}, // 3
    {"..#..#.", ".#...#.", "#....#.", "#######", ".....#.", ".....#.", ".....#."}, // 4
    {".#####.", ".#.....", ".#.....", ".####..", ".....#.", ".....#.", ".####.."}, // 5
    {"..###..", ".#.....", "#......", "#.###..", "#....#.", "#....#.", ".####.."}, // 6
    {"######.", ".....#.", "....#..", "...#...", "..##...", "..##...", "..#...."}, // 7
    {".###...", "#...#..", "#...#..", ".###...", "#...#..", "#...#..", ".###..."}, // 8
    {"..###..", ".#...#.", ".#...#.", "..####.", ".....#.", ".....#.", "..###.."}, // 9
}};

inline Image render_glyph(int digit, Rng& rng) {
    Image img{};
    const auto& glyph = kGlyphs[static_cast<std::size_t>(digit)];

    // 3x upscale (21x21 footprint), centered with one pixel of jitter the
    // way center-normalized digits are.
    const int row0 = 3 + static_cast<int>(rng.below(2)); // rows 3..4
    const int col0 = 3 + static_cast<int>(rng.below(2)); // cols 3..4
    const double base = rng.uniform(0.65, 1.0);

    for (int gr = 0; gr < kGlyphRows; ++gr) {
        for (int gc = 0; gc < kGlyphCols; ++gc) {
            if (glyph[static_cast<std::size_t>(gr)][static_cast<std::size_t>(gc)] != '#') continue;
            for (int dr = 0; dr < 3; ++dr) {
                for (int dc = 0; dc < 3; ++dc) {
                    if (rng.bernoulli(0.08)) continue; // stroke dropout
                    const int r = row0 + gr * 3 + dr;
                    const int c = col0 + gc * 3 + dc;
                    const double shade = base * rng.uniform(0.7, 1.0);
                    img[static_cast<std::size_t>(r * kImageCols + c)] =
                        static_cast<std::uint8_t>(55.0 + 200.0 * shade);
                }
            }
        }
    }

    // Sparse background speckle.
    for (int k = 0; k < 6; ++k) {
        if (!rng.bernoulli(0.5)) continue;
        const auto p = static_cast<std::size_t>(rng.below(kImagePixels));
        if (img[p] == 0) img[p] = static_cast<std::uint8_t>(20 + rng.below(60));
    }
    return img;
}

inline Dataset make_dataset(int samples_per_class, std::uint64_t seed) {
    Dataset ds;
    ds.images.reserve(static_cast<std::size_t>(samples_per_class) * kNumClasses);
    ds.labels.reserve(ds.images.capacity());
    for (int c = 0; c < kNumClasses; ++c) {
        Rng rng(mix_seed(seed, 0x5158, c));
        for (int k = 0; k < samples_per_class; ++k) {
            ds.images.push_back(render_glyph(c, rng));
            ds.labels.push_back(c);
        }
    }
    ds.rebuild_index();
    return ds;
}

struct TrainTest {
    Dataset train;
    Dataset test;
};

inline TrainTest make_train_test(int train_per_class, int test_per_class, std::uint64_t seed) {
    return TrainTest{make_dataset(train_per_class, mix_seed(seed, 1)),
                     make_dataset(test_per_class, mix_seed(seed, 2))};
}

} // namespace synth
} // namespace lpsnn
