#include "rsub/mlp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rsub/errors.hpp"
#include "rsub/numeric.hpp"

namespace rsub {

namespace {

constexpr double kGnEps = 1e-8;

const char* kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::FullyConnected: return "fully-connected";
        case LayerKind::Relu: return "relu";
        case LayerKind::SigmoidHead: return "sigmoid-head";
        case LayerKind::TanhHead: return "tanh-head";
        case LayerKind::GroupNorm: return "group-norm";
        case LayerKind::Dropout: return "dropout";
    }
    return "?";
}

LayerKind kind_from_name(const std::string& s, std::size_t offset_hint) {
    if (s == "fully-connected") return LayerKind::FullyConnected;
    if (s == "relu") return LayerKind::Relu;
    if (s == "sigmoid-head") return LayerKind::SigmoidHead;
    if (s == "tanh-head") return LayerKind::TanhHead;
    if (s == "group-norm") return LayerKind::GroupNorm;
    if (s == "dropout") return LayerKind::Dropout;
    throw ParseError("checkpoint: unknown layer kind '" + s + "'", offset_hint);
}

}  // namespace

LayerSpec LayerSpec::fc(std::size_t in, std::size_t out) {
    return {LayerKind::FullyConnected, in, out, 4, 0.0};
}
LayerSpec LayerSpec::relu(std::size_t dim) { return {LayerKind::Relu, dim, dim, 4, 0.0}; }
LayerSpec LayerSpec::sigmoid_head(std::size_t dim) {
    return {LayerKind::SigmoidHead, dim, dim, 4, 0.0};
}
LayerSpec LayerSpec::tanh_head(std::size_t dim) {
    return {LayerKind::TanhHead, dim, dim, 4, 0.0};
}
LayerSpec LayerSpec::group_norm(std::size_t dim, std::size_t groups) {
    return {LayerKind::GroupNorm, dim, dim, groups, 0.0};
}
LayerSpec LayerSpec::dropout(std::size_t dim, double p) {
    return {LayerKind::Dropout, dim, dim, 4, p};
}

std::size_t LayerSpec::param_count() const {
    switch (kind) {
        case LayerKind::FullyConnected: return in_dim * out_dim + out_dim;
        case LayerKind::GroupNorm: return 2 * in_dim;
        default: return 0;
    }
}

void LayerSpec::validate() const {
    switch (kind) {
        case LayerKind::FullyConnected:
            if (in_dim < 1 || out_dim < 1)
                throw UsageError("layer: fully-connected dims must be >= 1");
            break;
        case LayerKind::GroupNorm:
            if (in_dim != out_dim) throw UsageError("layer: group-norm must keep width");
            if (groups < 1 || in_dim % groups != 0)
                throw UsageError("layer: group count must divide the layer width");
            break;
        case LayerKind::Dropout:
            if (!(drop_prob >= 0.0 && drop_prob < 1.0))
                throw UsageError("layer: dropout probability outside [0,1)");
            [[fallthrough]];
        default:
            if (in_dim != out_dim || in_dim < 1)
                throw UsageError("layer: elementwise layer must keep width");
            break;
    }
}

std::size_t MlpModel::input_dim() const {
    if (layers.empty()) throw UsageError("model: empty layer list");
    return layers.front().in_dim;
}

std::size_t MlpModel::output_dim() const {
    if (layers.empty()) throw UsageError("model: empty layer list");
    return layers.back().out_dim;
}

void MlpModel::validate() const {
    if (layers.empty()) throw UsageError("model: empty layer list");
    std::size_t expected = 0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i].validate();
        if (i > 0 && layers[i].in_dim != layers[i - 1].out_dim)
            throw UsageError("model: layer dimensions do not chain");
        expected += layers[i].param_count();
    }
    if (params.size() != expected)
        throw UsageError("model: parameter vector length does not match layers");
}

MlpModel make_mlp(std::vector<LayerSpec> layers, bool final_nonneg) {
    MlpModel m;
    m.layers = std::move(layers);
    m.final_nonneg = final_nonneg;
    std::size_t n = 0;
    for (const auto& l : m.layers) n += l.param_count();
    m.params.assign(n, 0.0);
    m.validate();
    return m;
}

void init_params(MlpModel& model, RandomStream& rng) {
    std::size_t off = 0;
    for (const auto& l : model.layers) {
        if (l.kind == LayerKind::FullyConnected) {
            const double a = std::sqrt(6.0 / static_cast<double>(l.in_dim + l.out_dim));
            for (std::size_t i = 0; i < l.in_dim * l.out_dim; ++i)
                model.params[off + i] = a * (2.0 * rng.next_double() - 1.0);
            for (std::size_t i = 0; i < l.out_dim; ++i)
                model.params[off + l.in_dim * l.out_dim + i] = 0.0;
        } else if (l.kind == LayerKind::GroupNorm) {
            for (std::size_t i = 0; i < l.in_dim; ++i) model.params[off + i] = 1.0;
            for (std::size_t i = 0; i < l.in_dim; ++i) model.params[off + l.in_dim + i] = 0.0;
        }
        off += l.param_count();
    }
}

namespace {

struct LayerRun {
    const LayerSpec& spec;
    const double* params;  // layer's slice of the flat vector
};

std::vector<LayerRun> layer_runs(const MlpModel& model, std::size_t count) {
    std::vector<LayerRun> runs;
    runs.reserve(count);
    std::size_t off = 0;
    for (std::size_t i = 0; i < count; ++i) {
        runs.push_back({model.layers[i], model.params.data() + off});
        off += model.layers[i].param_count();
    }
    return runs;
}

DenseMatrix run_forward(const MlpModel& model, const DenseMatrix& batch, RunMode mode,
                        RandomStream* rng, std::size_t layer_count, bool apply_final_relu,
                        ForwardCache* cache) {
    model.validate();
    if (batch.cols() != model.layers.front().in_dim)
        throw ShapeError("forward: batch width does not match the first layer");
    if (mode == RunMode::Train && rng == nullptr)
        throw UsageError("forward: train mode needs a random stream");

    const auto runs = layer_runs(model, layer_count);
    if (cache) {
        cache->records.clear();
        cache->records.reserve(runs.size());
        cache->layers_run = layer_count;
        cache->train_mode = (mode == RunMode::Train);
        cache->valid = true;
    }

    DenseMatrix x = batch;
    for (const auto& run : runs) {
        const LayerSpec& l = run.spec;
        ForwardCache::LayerRecord rec;
        if (cache) rec.input = x;
        const std::size_t m = x.rows();

        switch (l.kind) {
            case LayerKind::FullyConnected: {
                DenseMatrix w(l.in_dim, l.out_dim,
                              std::vector<double>(run.params, run.params + l.in_dim * l.out_dim));
                DenseMatrix y = matmul(x, w);
                const double* b = run.params + l.in_dim * l.out_dim;
                for (std::size_t i = 0; i < m; ++i) {
                    auto row = y.row(i);
                    for (std::size_t j = 0; j < l.out_dim; ++j) row[j] += b[j];
                }
                x = std::move(y);
                break;
            }
            case LayerKind::Relu: {
                for (double& v : x.data()) v = v > 0.0 ? v : 0.0;
                break;
            }
            case LayerKind::SigmoidHead: {
                for (double& v : x.data()) v = sigmoid(v);
                if (cache) rec.extra = x;
                break;
            }
            case LayerKind::TanhHead: {
                for (double& v : x.data()) v = std::tanh(v);
                if (cache) rec.extra = x;
                break;
            }
            case LayerKind::GroupNorm: {
                const std::size_t w = l.in_dim;
                const std::size_t gsize = w / l.groups;
                const double* gamma = run.params;
                const double* beta = run.params + w;
                DenseMatrix xhat(m, w);
                DenseMatrix inv(m, l.groups);
                for (std::size_t i = 0; i < m; ++i) {
                    auto row = x.row(i);
                    for (std::size_t g = 0; g < l.groups; ++g) {
                        double mu = 0.0;
                        for (std::size_t c = g * gsize; c < (g + 1) * gsize; ++c) mu += row[c];
                        mu /= static_cast<double>(gsize);
                        double var = 0.0;
                        for (std::size_t c = g * gsize; c < (g + 1) * gsize; ++c) {
                            const double d = row[c] - mu;
                            var += d * d;
                        }
                        var /= static_cast<double>(gsize);
                        const double s = 1.0 / std::sqrt(var + kGnEps);
                        inv(i, g) = s;
                        for (std::size_t c = g * gsize; c < (g + 1) * gsize; ++c)
                            xhat(i, c) = (row[c] - mu) * s;
                    }
                    for (std::size_t c = 0; c < w; ++c)
                        row[c] = gamma[c] * xhat(i, c) + beta[c];
                }
                if (cache) {
                    rec.extra = std::move(xhat);
                    rec.gn_inv_std = std::move(inv);
                }
                break;
            }
            case LayerKind::Dropout: {
                if (mode == RunMode::Train && l.drop_prob > 0.0) {
                    DenseMatrix mask(m, l.in_dim);
                    const double keep_scale = 1.0 / (1.0 - l.drop_prob);
                    for (std::size_t i = 0; i < mask.size(); ++i)
                        mask.data()[i] = rng->next_double() < l.drop_prob ? 0.0 : keep_scale;
                    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] *= mask.data()[i];
                    if (cache) rec.extra = std::move(mask);
                }
                // eval mode: identity (inverted scaling applied at train time)
                break;
            }
        }
        if (cache) cache->records.push_back(std::move(rec));
    }

    if (apply_final_relu && model.final_nonneg) {
        if (cache) cache->final_pre_relu = x;
        for (double& v : x.data()) v = v > 0.0 ? v : 0.0;
    }
    x.require_finite("forward");
    return x;
}

}  // namespace

ForwardResult forward(const MlpModel& model, const DenseMatrix& batch, RunMode mode,
                      RandomStream& rng) {
    ForwardResult out;
    out.outputs =
        run_forward(model, batch, mode, &rng, model.layers.size(), true, &out.cache);
    return out;
}

DenseMatrix forward_eval(const MlpModel& model, const DenseMatrix& batch) {
    RandomStream unused(0);
    return run_forward(model, batch, RunMode::Eval, &unused, model.layers.size(), true,
                       nullptr);
}

DenseMatrix forward_logits(const MlpModel& model, const DenseMatrix& batch) {
    if (model.layers.empty() || model.layers.back().kind != LayerKind::SigmoidHead)
        throw UsageError("forward_logits: model has no sigmoid head");
    RandomStream unused(0);
    return run_forward(model, batch, RunMode::Eval, &unused, model.layers.size() - 1,
                       false, nullptr);
}

BackwardResult backward(const MlpModel& model, const ForwardCache& cache,
                        const DenseMatrix& out_grads) {
    model.validate();
    if (!cache.valid || !cache.train_mode)
        throw UsageError("backward: cache missing or not from a train-mode forward");
    if (cache.records.size() != cache.layers_run ||
        cache.layers_run > model.layers.size())
        throw UsageError("backward: cache does not match this model");

    BackwardResult res;
    res.param_grads.assign(model.params.size(), 0.0);
    const auto runs = layer_runs(model, cache.layers_run);

    DenseMatrix dy = out_grads;
    const bool full_run = cache.layers_run == model.layers.size();
    if (full_run && model.final_nonneg) {
        if (dy.rows() != cache.final_pre_relu.rows() ||
            dy.cols() != cache.final_pre_relu.cols())
            throw ShapeError("backward: out_grads shape mismatch");
        for (std::size_t i = 0; i < dy.size(); ++i)
            if (cache.final_pre_relu.data()[i] <= 0.0) dy.data()[i] = 0.0;
    }

    std::size_t off_end = model.params.size();
    if (!full_run) {
        off_end = 0;
        for (std::size_t i = 0; i < cache.layers_run; ++i)
            off_end += model.layers[i].param_count();
    }

    std::size_t off = off_end;
    for (std::size_t li = cache.layers_run; li-- > 0;) {
        const LayerSpec& l = runs[li].spec;
        const ForwardCache::LayerRecord& rec = cache.records[li];
        off -= l.param_count();
        const std::size_t m = rec.input.rows();
        if (dy.rows() != m || dy.cols() != l.out_dim)
            throw ShapeError("backward: gradient shape mismatch");

        switch (l.kind) {
            case LayerKind::FullyConnected: {
                DenseMatrix w(l.in_dim, l.out_dim,
                              std::vector<double>(runs[li].params,
                                                  runs[li].params + l.in_dim * l.out_dim));
                DenseMatrix dw = matmul_tn(rec.input, dy);
                for (std::size_t i = 0; i < dw.size(); ++i)
                    res.param_grads[off + i] += dw.data()[i];
                double* db = res.param_grads.data() + off + l.in_dim * l.out_dim;
                for (std::size_t i = 0; i < m; ++i) {
                    auto row = dy.row(i);
                    for (std::size_t j = 0; j < l.out_dim; ++j) db[j] += row[j];
                }
                dy = matmul_nt(dy, w);
                break;
            }
            case LayerKind::Relu: {
                for (std::size_t i = 0; i < dy.size(); ++i)
                    if (rec.input.data()[i] <= 0.0) dy.data()[i] = 0.0;
                break;
            }
            case LayerKind::SigmoidHead: {
                for (std::size_t i = 0; i < dy.size(); ++i) {
                    const double s = rec.extra.data()[i];
                    dy.data()[i] *= s * (1.0 - s);
                }
                break;
            }
            case LayerKind::TanhHead: {
                for (std::size_t i = 0; i < dy.size(); ++i) {
                    const double t = rec.extra.data()[i];
                    dy.data()[i] *= 1.0 - t * t;
                }
                break;
            }
            case LayerKind::GroupNorm: {
                const std::size_t w = l.in_dim;
                const std::size_t gsize = w / l.groups;
                const double* gamma = runs[li].params;
                double* dgamma = res.param_grads.data() + off;
                double* dbeta = res.param_grads.data() + off + w;
                DenseMatrix dx(m, w);
                for (std::size_t i = 0; i < m; ++i) {
                    for (std::size_t g = 0; g < l.groups; ++g) {
                        double s1 = 0.0, s2 = 0.0;
                        for (std::size_t c = g * gsize; c < (g + 1) * gsize; ++c) {
                            const double dxh = dy(i, c) * gamma[c];
                            s1 += dxh;
                            s2 += dxh * rec.extra(i, c);
                        }
                        const double inv = rec.gn_inv_std(i, g);
                        const double n = static_cast<double>(gsize);
                        for (std::size_t c = g * gsize; c < (g + 1) * gsize; ++c) {
                            const double dxh = dy(i, c) * gamma[c];
                            dx(i, c) = inv / n * (n * dxh - s1 - rec.extra(i, c) * s2);
                        }
                    }
                    for (std::size_t c = 0; c < w; ++c) {
                        dgamma[c] += dy(i, c) * rec.extra(i, c);
                        dbeta[c] += dy(i, c);
                    }
                }
                dy = std::move(dx);
                break;
            }
            case LayerKind::Dropout: {
                if (!rec.extra.empty()) {
                    for (std::size_t i = 0; i < dy.size(); ++i)
                        dy.data()[i] *= rec.extra.data()[i];
                }
                break;
            }
        }
    }
    res.input_grads = std::move(dy);
    return res;
}

void adam_step(AdamState& state, std::vector<double>& params,
               const std::vector<double>& grads) {
    if (state.m.size() != params.size() || grads.size() != params.size())
        throw ShapeError("adam_step: length mismatch");
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

std::string checkpoint_to_json(const MlpModel& model) {
    model.validate();
    for (double v : model.params)
        if (!std::isfinite(v)) throw NumericError("checkpoint: non-finite parameter");
    nlohmann::json j;
    j["format_version"] = 1;
    auto& layers = j["layers"] = nlohmann::json::array();
    for (const auto& l : model.layers) {
        nlohmann::json jl;
        jl["kind"] = kind_name(l.kind);
        jl["in_dim"] = l.in_dim;
        jl["out_dim"] = l.out_dim;
        if (l.kind == LayerKind::GroupNorm) jl["groups"] = l.groups;
        if (l.kind == LayerKind::Dropout) jl["drop_prob"] = l.drop_prob;
        layers.push_back(std::move(jl));
    }
    j["params"] = model.params;
    j["final_nonneg"] = model.final_nonneg;
    return j.dump();
}

MlpModel checkpoint_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("checkpoint: ") + e.what(), e.byte);
    }
    try {
        if (!j.is_object() || j.value("format_version", 0) != 1)
            throw ParseError("checkpoint: unsupported format_version", 0);
        MlpModel model;
        for (const auto& jl : j.at("layers")) {
            LayerSpec l;
            l.kind = kind_from_name(jl.at("kind").get<std::string>(), 0);
            l.in_dim = jl.at("in_dim").get<std::size_t>();
            l.out_dim = jl.at("out_dim").get<std::size_t>();
            if (l.kind == LayerKind::GroupNorm) l.groups = jl.value("groups", std::size_t{4});
            if (l.kind == LayerKind::Dropout) l.drop_prob = jl.value("drop_prob", 0.0);
            model.layers.push_back(l);
        }
        model.params = j.at("params").get<std::vector<double>>();
        model.final_nonneg = j.at("final_nonneg").get<bool>();
        model.validate();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("checkpoint: ") + e.what(), 0);
    } catch (const UsageError& e) {
        throw ParseError(std::string("checkpoint: ") + e.what(), 0);
    }
}

void save_checkpoint(const MlpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << checkpoint_to_json(model);
    if (!out) throw IoError("write failed: " + path.string());
}

MlpModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_json(ss.str());
}

}  // namespace rsub
