#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "rsub/matrix.hpp"
#include "rsub/rng.hpp"

namespace rsub {

using Point2 = std::array<double, 2>;

// Isotropic 2-D Gaussian mixture: the ground-truth world and any analytic
// stand-in generators. `std` is a standard deviation shared by all
// components (covariance std^2 * I).
struct MixtureSpec {
    std::vector<Point2> means;
    double std = 0.05;
    std::vector<double> weights;

    void validate() const;
    std::string to_json() const;
    static MixtureSpec from_json(const std::string& text);
};

// The 25-mode benchmark: means on {-2,-1,0,1,2}^2, std 0.05, uniform weights.
MixtureSpec default_mixture();

DenseMatrix mixture_sample(const MixtureSpec& spec, std::size_t n, RandomStream& rng);

double mixture_log_pdf(const MixtureSpec& spec, const Point2& x);
double mixture_pdf(const MixtureSpec& spec, const Point2& x);

// p_r(x) / p_g(x), evaluated in the log domain.
double true_ratio(const MixtureSpec& p_r, const MixtureSpec& p_g, const Point2& x);

// Analytic imperfect generator: inflates every component's std and moves
// `bridge_prob` of the mass to midpoints of horizontally adjacent mode pairs.
// Unlike a trained generator, its density is known in closed form.
MixtureSpec perturbed_generator(const MixtureSpec& spec, double inflate,
                                double bridge_prob);

}  // namespace rsub
