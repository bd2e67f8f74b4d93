#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "rsub/matrix.hpp"
#include "rsub/rng.hpp"

namespace rsub {

enum class LayerKind { FullyConnected, Relu, SigmoidHead, TanhHead, GroupNorm, Dropout };

struct LayerSpec {
    LayerKind kind = LayerKind::FullyConnected;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::size_t groups = 4;    // group-norm only
    double drop_prob = 0.0;    // dropout only

    static LayerSpec fc(std::size_t in, std::size_t out);
    static LayerSpec relu(std::size_t dim);
    static LayerSpec sigmoid_head(std::size_t dim);
    static LayerSpec tanh_head(std::size_t dim);
    static LayerSpec group_norm(std::size_t dim, std::size_t groups = 4);
    static LayerSpec dropout(std::size_t dim, double p);

    std::size_t param_count() const;
    void validate() const;
};

// Fully-connected network with a flat parameter vector. Parameter layout
// follows layer order: fc stores weights (in x out, row-major) then biases;
// group-norm stores per-channel scales then shifts. `final_nonneg` appends a
// terminal ReLU so outputs are guaranteed >= 0 (used by ratio models).
struct MlpModel {
    std::vector<LayerSpec> layers;
    std::vector<double> params;
    bool final_nonneg = false;

    std::size_t input_dim() const;
    std::size_t output_dim() const;
    void validate() const;
};

MlpModel make_mlp(std::vector<LayerSpec> layers, bool final_nonneg = false);

// Uniform(-sqrt(6/(in+out)), +...) weights, zero biases, unit GN scales.
void init_params(MlpModel& model, RandomStream& rng);

enum class RunMode { Train, Eval };

// Everything backward() needs from the corresponding forward pass.
struct ForwardCache {
    struct LayerRecord {
        DenseMatrix input;
        DenseMatrix extra;      // dropout mask / GN x-hat / head outputs
        DenseMatrix gn_inv_std; // GN: per (sample, group) 1/sqrt(var+eps)
    };
    std::vector<LayerRecord> records;
    DenseMatrix final_pre_relu;
    std::size_t layers_run = 0;
    bool train_mode = false;
    bool valid = false;
};

struct ForwardResult {
    DenseMatrix outputs;
    ForwardCache cache;
};

ForwardResult forward(const MlpModel& model, const DenseMatrix& batch, RunMode mode,
                      RandomStream& rng);
// Eval-mode forward (dropout off); no RNG involved.
DenseMatrix forward_eval(const MlpModel& model, const DenseMatrix& batch);
// Pre-sigmoid activations of a model whose last layer is a sigmoid head.
DenseMatrix forward_logits(const MlpModel& model, const DenseMatrix& batch);

struct BackwardResult {
    std::vector<double> param_grads;
    DenseMatrix input_grads;
};

// d(loss)/d(params) and d(loss)/d(inputs) given d(loss)/d(outputs).
// The cache must come from a train-mode forward of the same model.
BackwardResult backward(const MlpModel& model, const ForwardCache& cache,
                        const DenseMatrix& out_grads);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t step = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    AdamState(std::size_t n, double learning_rate)
        : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

void adam_step(AdamState& state, std::vector<double>& params,
               const std::vector<double>& grads);

// Checkpoint format: JSON {format_version, layers, params, final_nonneg};
// doubles printed shortest-roundtrip so reload is bit-exact.
std::string checkpoint_to_json(const MlpModel& model);
MlpModel checkpoint_from_json(const std::string& text);
void save_checkpoint(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_checkpoint(const std::filesystem::path& path);

}  // namespace rsub
