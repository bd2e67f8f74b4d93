#pragma once

#include <span>
#include <string>
#include <vector>

namespace rsub {

// Density-ratio training losses. All take the ratio-model outputs on fake
// and real samples; fake/real means use pairwise summation.
enum class LossKind { SP, ULSIF, DSKL, BARR };

std::string loss_kind_name(LossKind k);
LossKind loss_kind_from_name(const std::string& s);

struct PenaltyConfig {
    double lambda = 0.0;       // weight on the mean-ratio penalty (SP, uLSIF)
    double barr_lambda = 10.0; // BARR's built-in absolute-deviation weight
};

// Softplus loss: mean_g[sigmoid(r)*r - softplus(r)] - mean_r[sigmoid(r)].
// Bounded below by -ln2 - 1 for nonnegative inputs.
double sp_loss(std::span<const double> fake_ratios, std::span<const double> real_ratios);

// Least-squares importance fitting: mean_g[r^2]/2 - mean_r[r]. Unbounded below.
double ulsif_loss(std::span<const double> fake_ratios,
                  std::span<const double> real_ratios);

// -mean_r[log r] + mean_g[log r]; every input must be strictly positive.
double dskl_loss(std::span<const double> fake_ratios,
                 std::span<const double> real_ratios);

// -mean_r[log r] + barr_lambda * |mean_g[r] - 1|.
double barr_loss(std::span<const double> fake_ratios,
                 std::span<const double> real_ratios, double barr_lambda);

// (mean_g[r] - 1)^2; zero exactly when the fake-ratio mean is 1.
double penalty_qhat(std::span<const double> fake_ratios);

struct LossGrads {
    double total = 0.0;   // training objective (includes any penalty term)
    double base = 0.0;    // bare loss without the lambda*Qhat penalty
    double penalty = 0.0; // Qhat value (0 for kinds without the penalty)
    std::vector<double> d_fake;
    std::vector<double> d_real;
};

// Training objective and its exact partials w.r.t. each ratio value.
// SP and uLSIF carry the +lambda*Qhat term; DSKL has no penalty; BARR uses
// only its built-in term. DSKL/BARR inputs are floored at 1e-12 before the
// log since a final-ReLU model emits exact zeros.
LossGrads loss_and_ratio_grads(LossKind kind, const PenaltyConfig& cfg,
                               std::span<const double> fake_ratios,
                               std::span<const double> real_ratios);

inline constexpr double kRatioLogFloor = 1e-12;

}  // namespace rsub
