#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "rsub/matrix.hpp"
#include "rsub/mlp.hpp"
#include "rsub/rng.hpp"

namespace rsub {

// Vanilla GAN on 2-D data. Generator: noise -> 3 x (fc 100, ReLU) -> fc 2.
// Discriminator: 2 -> 3 x (fc 100, ReLU) -> fc 1 -> sigmoid.
struct ToyGan {
    MlpModel generator;
    MlpModel discriminator;  // includes the sigmoid head
    std::size_t noise_dim = 2;

    std::string to_json() const;
    static ToyGan from_json(const std::string& text);
};

struct GanTrainConfig {
    std::size_t epochs = 50;
    std::size_t batch = 512;
    double lr = 1e-3;
    std::size_t noise_dim = 2;
    std::size_t hidden_width = 100;
};

// Alternating Adam steps on the standard non-saturating losses, computed on
// logits for stability.
ToyGan train_toy_gan(const DenseMatrix& data, const GanTrainConfig& cfg,
                     RandomStream& rng);

DenseMatrix gan_sample(const ToyGan& gan, std::size_t n, RandomStream& rng);

void save_gan(const ToyGan& gan, const std::filesystem::path& path);
ToyGan load_gan(const std::filesystem::path& path);

}  // namespace rsub
