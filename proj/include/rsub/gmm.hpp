#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "rsub/matrix.hpp"
#include "rsub/mixture.hpp"
#include "rsub/rng.hpp"

namespace rsub {

// Full-covariance 2-D Gaussian mixture fitted by EM; models an unknown
// generator density from its samples.
struct GmmFit {
    std::size_t components = 0;
    std::vector<Point2> means;
    // Symmetric 2x2 covariances stored as (xx, xy, yy).
    std::vector<std::array<double, 3>> covariances;
    std::vector<double> weights;
    double log_likelihood = 0.0;
    double bic = 0.0;
    std::vector<double> ll_trace;  // per-iteration log-likelihood of the final k
};

double gmm_log_pdf(const GmmFit& fit, const Point2& x);
double gmm_pdf(const GmmFit& fit, const Point2& x);

// EM from a k-means++-style init, covariance eigenvalues floored at 1e-9,
// stopping when the log-likelihood gain drops below 1e-7 * |logL| (500
// iterations max).
GmmFit gmm_fit_em(const DenseMatrix& samples, std::size_t k, RandomStream& rng);

// Fits every k in [k_min, k_max] and keeps the fit minimizing
// BIC = -2 logL + params * ln(n).
GmmFit gmm_fit_em_bic(const DenseMatrix& samples, std::size_t k_min, std::size_t k_max,
                      RandomStream& rng);

double true_ratio(const MixtureSpec& p_r, const GmmFit& p_g, const Point2& x);

}  // namespace rsub
