// Writes the synthetic digit-glyph dataset as MNIST-layout IDX files, for
// running the lab where the original MNIST files are not available.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lpsnn/synth.hpp"

int main(int argc, char** argv) {
    CLI::App app{"synthetic digit dataset generator (IDX output)"};
    std::string out_dir = "data";
    int train_per_class = 800;
    int test_per_class = 250;
    std::uint64_t seed = 7;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--train-per-class", train_per_class, "training samples per class");
    app.add_option("--test-per-class", test_per_class, "test samples per class");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::create_directories(out_dir);
        const auto tt = lpsnn::synth::make_train_test(train_per_class, test_per_class, seed);
        const std::filesystem::path dir(out_dir);
        lpsnn::write_idx_images(dir / "train-images-idx3-ubyte", tt.train.images);
        lpsnn::write_idx_labels(dir / "train-labels-idx1-ubyte", tt.train.labels);
        lpsnn::write_idx_images(dir / "t10k-images-idx3-ubyte", tt.test.images);
        lpsnn::write_idx_labels(dir / "t10k-labels-idx1-ubyte", tt.test.labels);
        std::cerr << "wrote " << tt.train.size() << " train and " << tt.test.size()
                  << " test samples to " << out_dir << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
