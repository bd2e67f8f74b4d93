#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rsub/matrix.hpp"
#include "rsub/mixture.hpp"
#include "rsub/mlp.hpp"
#include "rsub/rng.hpp"

namespace rsub {

// Anything that can emit arbitrarily many sample rows: a trained generator
// network, an analytic mixture, or a fixed pool resampled with replacement.
class GeneratorSource {
  public:
    virtual ~GeneratorSource() = default;
    virtual std::size_t dim() const = 0;
    virtual DenseMatrix sample(std::size_t n, RandomStream& rng) const = 0;
};

class MixtureSource final : public GeneratorSource {
  public:
    explicit MixtureSource(MixtureSpec spec) : spec_(std::move(spec)) { spec_.validate(); }
    std::size_t dim() const override { return 2; }
    DenseMatrix sample(std::size_t n, RandomStream& rng) const override {
        return mixture_sample(spec_, n, rng);
    }
    const MixtureSpec& spec() const { return spec_; }

  private:
    MixtureSpec spec_;
};

class GanSource final : public GeneratorSource {
  public:
    GanSource(MlpModel generator, std::size_t noise_dim)
        : generator_(std::move(generator)), noise_dim_(noise_dim) {
        generator_.validate();
    }
    std::size_t dim() const override { return generator_.output_dim(); }
    DenseMatrix sample(std::size_t n, RandomStream& rng) const override {
        return forward_eval(generator_, rng.normal_matrix(n, noise_dim_, 0.0, 1.0));
    }

  private:
    MlpModel generator_;
    std::size_t noise_dim_;
};

// Draws rows of a fixed matrix with replacement, optionally weighted.
// Doubles as the discrete-atom test generator and the fake-feature pool.
class PoolSource final : public GeneratorSource {
  public:
    explicit PoolSource(DenseMatrix rows, std::vector<double> weights = {});
    std::size_t dim() const override { return rows_.cols(); }
    DenseMatrix sample(std::size_t n, RandomStream& rng) const override;

  private:
    DenseMatrix rows_;
    std::vector<double> cum_;
};

}  // namespace rsub
