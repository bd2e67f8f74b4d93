#include "rsub/gan.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rsub/errors.hpp"
#include "rsub/generator.hpp"
#include "rsub/numeric.hpp"

namespace rsub {

namespace {

MlpModel build_net(std::size_t in, std::size_t out, std::size_t width,
                   std::size_t hidden_layers) {
    std::vector<LayerSpec> layers;
    std::size_t d = in;
    for (std::size_t i = 0; i < hidden_layers; ++i) {
        layers.push_back(LayerSpec::fc(d, width));
        layers.push_back(LayerSpec::relu(width));
        d = width;
    }
    layers.push_back(LayerSpec::fc(d, out));
    return make_mlp(std::move(layers));
}

void shuffle_indices(std::vector<std::size_t>& idx, RandomStream& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = rng.next_below(i);
        std::swap(idx[i - 1], idx[j]);
    }
}

}  // namespace

ToyGan train_toy_gan(const DenseMatrix& data, const GanTrainConfig& cfg,
                     RandomStream& rng) {
    if (data.cols() != 2) throw ShapeError("train_toy_gan: data must be n x 2");
    if (data.rows() < 1) throw UsageError("train_toy_gan: empty data");
    if (cfg.batch < 1) throw UsageError("train_toy_gan: batch must be >= 1");

    MlpModel gen = build_net(cfg.noise_dim, 2, cfg.hidden_width, 3);
    MlpModel disc = build_net(2, 1, cfg.hidden_width, 3);  // headless during training
    RandomStream init_rng = rng.derive("gan/init");
    init_params(gen, init_rng);
    init_params(disc, init_rng);

    AdamState adam_g(gen.params.size(), cfg.lr);
    AdamState adam_d(disc.params.size(), cfg.lr);
    RandomStream train_rng = rng.derive("gan/train");

    const std::size_t m = std::min<std::size_t>(cfg.batch, data.rows());
    const std::size_t steps = std::max<std::size_t>(data.rows() / m, 1);
    std::vector<std::size_t> order(data.rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_indices(order, train_rng);
        for (std::size_t step = 0; step < steps; ++step) {
            const std::span<const std::size_t> slice(order.data() + step * m, m);
            DenseMatrix real = take_rows(data, slice);

            // Discriminator step.
            DenseMatrix z = train_rng.normal_matrix(m, cfg.noise_dim, 0.0, 1.0);
            DenseMatrix fake = forward_eval(gen, z);
            auto fwd_r = forward(disc, real, RunMode::Train, train_rng);
            auto fwd_f = forward(disc, fake, RunMode::Train, train_rng);
            DenseMatrix d_lr(m, 1);
            DenseMatrix d_lf(m, 1);
            const double inv_m = 1.0 / static_cast<double>(m);
            for (std::size_t i = 0; i < m; ++i) {
                d_lr(i, 0) = (sigmoid(fwd_r.outputs(i, 0)) - 1.0) * inv_m;
                d_lf(i, 0) = sigmoid(fwd_f.outputs(i, 0)) * inv_m;
            }
            auto back_r = backward(disc, fwd_r.cache, d_lr);
            auto back_f = backward(disc, fwd_f.cache, d_lf);
            std::vector<double> d_grads(disc.params.size());
            for (std::size_t i = 0; i < d_grads.size(); ++i)
                d_grads[i] = back_r.param_grads[i] + back_f.param_grads[i];
            adam_step(adam_d, disc.params, d_grads);

            // Generator step on fresh noise; gradients flow through the
            // discriminator without updating it.
            DenseMatrix z2 = train_rng.normal_matrix(m, cfg.noise_dim, 0.0, 1.0);
            auto fwd_g = forward(gen, z2, RunMode::Train, train_rng);
            auto fwd_d = forward(disc, fwd_g.outputs, RunMode::Train, train_rng);
            DenseMatrix d_logit(m, 1);
            for (std::size_t i = 0; i < m; ++i)
                d_logit(i, 0) = (sigmoid(fwd_d.outputs(i, 0)) - 1.0) * inv_m;
            auto back_d = backward(disc, fwd_d.cache, d_logit);
            auto back_g = backward(gen, fwd_g.cache, back_d.input_grads);
            adam_step(adam_g, gen.params, back_g.param_grads);
        }
    }

    ToyGan out;
    out.noise_dim = cfg.noise_dim;
    out.generator = std::move(gen);
    std::vector<LayerSpec> d_layers = disc.layers;
    d_layers.push_back(LayerSpec::sigmoid_head(1));
    out.discriminator = make_mlp(std::move(d_layers));
    out.discriminator.params = std::move(disc.params);
    return out;
}

DenseMatrix gan_sample(const ToyGan& gan, std::size_t n, RandomStream& rng) {
    return GanSource(gan.generator, gan.noise_dim).sample(n, rng);
}

std::string ToyGan::to_json() const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["noise_dim"] = noise_dim;
    j["generator"] = nlohmann::json::parse(checkpoint_to_json(generator));
    j["discriminator"] = nlohmann::json::parse(checkpoint_to_json(discriminator));
    return j.dump();
}

ToyGan ToyGan::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("gan: ") + e.what(), e.byte);
    }
    try {
        ToyGan gan;
        gan.noise_dim = j.at("noise_dim").get<std::size_t>();
        gan.generator = checkpoint_from_json(j.at("generator").dump());
        gan.discriminator = checkpoint_from_json(j.at("discriminator").dump());
        return gan;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("gan: ") + e.what(), 0);
    }
}

void save_gan(const ToyGan& gan, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << gan.to_json();
    if (!out) throw IoError("write failed: " + path.string());
}

ToyGan load_gan(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ToyGan::from_json(ss.str());
}

}  // namespace rsub
