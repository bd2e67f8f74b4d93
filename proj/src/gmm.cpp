#include "rsub/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rsub/errors.hpp"

namespace rsub {

namespace {

constexpr double kCovFloor = 1e-9;
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

// Clamp both eigenvalues of a symmetric 2x2 matrix from below.
std::array<double, 3> floor_cov(std::array<double, 3> cov) {
    const double a = cov[0], b = cov[1], c = cov[2];
    const double tr = a + c;
    const double disc = std::sqrt(std::max(0.25 * (a - c) * (a - c) + b * b, 0.0));
    double l1 = 0.5 * tr + disc;
    double l2 = 0.5 * tr - disc;
    if (l2 >= kCovFloor) return cov;
    l1 = std::max(l1, kCovFloor);
    l2 = kCovFloor;
    if (std::abs(b) < 1e-300) {
        // Already diagonal.
        return {a >= c ? l1 : l2, 0.0, a >= c ? l2 : l1};
    }
    // Eigenvector for l1 is (b, l1 - a), its orthogonal complement for l2.
    double vx = b, vy = l1 - a;
    const double norm = std::sqrt(vx * vx + vy * vy);
    vx /= norm;
    vy /= norm;
    return {l1 * vx * vx + l2 * vy * vy, (l1 - l2) * vx * vy,
            l1 * vy * vy + l2 * vx * vx};
}

double comp_log_pdf(const Point2& mean, const std::array<double, 3>& cov, double x0,
                    double x1) {
    const double det = cov[0] * cov[2] - cov[1] * cov[1];
    const double dx = x0 - mean[0];
    const double dy = x1 - mean[1];
    const double quad = (cov[2] * dx * dx - 2.0 * cov[1] * dx * dy + cov[0] * dy * dy) / det;
    return -kLogTwoPi - 0.5 * std::log(det) - 0.5 * quad;
}

std::vector<Point2> kmeanspp_init(const DenseMatrix& x, std::size_t k,
                                  RandomStream& rng) {
    const std::size_t n = x.rows();
    std::vector<Point2> centers;
    centers.reserve(k);
    const std::size_t first = rng.next_below(n);
    centers.push_back({x(first, 0), x(first, 1)});
    std::vector<double> d2(n);
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) {
                const double dx = x(i, 0) - c[0];
                const double dy = x(i, 1) - c[1];
                best = std::min(best, dx * dx + dy * dy);
            }
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            // All points coincide with existing centers; duplicate one.
            centers.push_back(centers.back());
            continue;
        }
        double u = rng.next_double() * total;
        std::size_t pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            u -= d2[i];
            if (u <= 0.0) {
                pick = i;
                break;
            }
        }
        centers.push_back({x(pick, 0), x(pick, 1)});
    }
    return centers;
}

}  // namespace

double gmm_log_pdf(const GmmFit& fit, const Point2& x) {
    double max_lp = -std::numeric_limits<double>::infinity();
    std::vector<double> lps(fit.components);
    for (std::size_t k = 0; k < fit.components; ++k) {
        lps[k] = fit.weights[k] > 0.0
                     ? std::log(fit.weights[k]) +
                           comp_log_pdf(fit.means[k], fit.covariances[k], x[0], x[1])
                     : -std::numeric_limits<double>::infinity();
        max_lp = std::max(max_lp, lps[k]);
    }
    if (!std::isfinite(max_lp)) return -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (double lp : lps) s += std::exp(lp - max_lp);
    return max_lp + std::log(s);
}

double gmm_pdf(const GmmFit& fit, const Point2& x) {
    return std::exp(gmm_log_pdf(fit, x));
}

GmmFit gmm_fit_em(const DenseMatrix& samples, std::size_t k, RandomStream& rng) {
    if (samples.cols() != 2) throw ShapeError("gmm: samples must be n x 2");
    const std::size_t n = samples.rows();
    if (k < 1 || n < k) throw UsageError("gmm: need at least k samples");

    GmmFit fit;
    fit.components = k;
    fit.means = kmeanspp_init(samples, k, rng);
    fit.weights.assign(k, 1.0 / static_cast<double>(k));

    // Start every component from the global covariance.
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += samples(i, 0);
        my += samples(i, 1);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    std::array<double, 3> global{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = samples(i, 0) - mx;
        const double dy = samples(i, 1) - my;
        global[0] += dx * dx;
        global[1] += dx * dy;
        global[2] += dy * dy;
    }
    for (double& v : global) v /= static_cast<double>(n);
    fit.covariances.assign(k, floor_cov(global));

    std::vector<double> resp(n * k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 500; ++iter) {
        // E-step in the log domain.
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double max_lp = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j) {
                const double lp =
                    (fit.weights[j] > 0.0
                         ? std::log(fit.weights[j]) +
                               comp_log_pdf(fit.means[j], fit.covariances[j],
                                            samples(i, 0), samples(i, 1))
                         : -std::numeric_limits<double>::infinity());
                resp[i * k + j] = lp;
                max_lp = std::max(max_lp, lp);
            }
            double s = 0.0;
            for (std::size_t j = 0; j < k; ++j) s += std::exp(resp[i * k + j] - max_lp);
            const double lse = max_lp + std::log(s);
            ll += lse;
            for (std::size_t j = 0; j < k; ++j)
                resp[i * k + j] = std::exp(resp[i * k + j] - lse);
        }
        fit.log_likelihood = ll;
        fit.ll_trace.push_back(ll);

        // M-step.
        for (std::size_t j = 0; j < k; ++j) {
            double nk = 0.0, sx = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double r = resp[i * k + j];
                nk += r;
                sx += r * samples(i, 0);
                sy += r * samples(i, 1);
            }
            if (nk < 1e-300) {
                fit.weights[j] = 0.0;
                continue;
            }
            fit.weights[j] = nk / static_cast<double>(n);
            fit.means[j] = {sx / nk, sy / nk};
            std::array<double, 3> cov{0.0, 0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) {
                const double r = resp[i * k + j];
                const double dx = samples(i, 0) - fit.means[j][0];
                const double dy = samples(i, 1) - fit.means[j][1];
                cov[0] += r * dx * dx;
                cov[1] += r * dx * dy;
                cov[2] += r * dy * dy;
            }
            for (double& v : cov) v /= nk;
            fit.covariances[j] = floor_cov(cov);
        }

        if (std::isfinite(prev_ll) &&
            std::abs(ll - prev_ll) < 1e-7 * std::abs(ll)) {
            break;
        }
        prev_ll = ll;
    }

    const double params = 6.0 * static_cast<double>(k) - 1.0;
    fit.bic = -2.0 * fit.log_likelihood + params * std::log(static_cast<double>(n));
    return fit;
}

GmmFit gmm_fit_em_bic(const DenseMatrix& samples, std::size_t k_min, std::size_t k_max,
                      RandomStream& rng) {
    if (k_min < 1 || k_max < k_min) throw UsageError("gmm: bad k range");
    if (samples.rows() < 10 * k_max)
        throw UsageError("gmm: need at least 10*k_max samples");

    GmmFit best;
    bool have = false;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        RandomStream sub = rng.derive(k);
        GmmFit fit = gmm_fit_em(samples, k, sub);
        if (!have || fit.bic < best.bic) {
            best = std::move(fit);
            have = true;
        }
    }
    return best;
}

double true_ratio(const MixtureSpec& p_r, const GmmFit& p_g, const Point2& x) {
    const double lr = mixture_log_pdf(p_r, x) - gmm_log_pdf(p_g, x);
    const double r = std::exp(lr);
    if (!std::isfinite(r))
        throw DomainError("true_ratio: generator density vanishes at this point");
    return r;
}

}  // namespace rsub
