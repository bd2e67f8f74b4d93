#include "rsub/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "rsub/errors.hpp"

namespace rsub {

double softplus(double t) {
    return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double sigmoid(double t) {
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 16) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double mean(std::span<const double> xs) {
    if (xs.empty()) throw UsageError("mean: empty input");
    return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double percentile(std::span<const double> xs, double q) {
    if (xs.empty()) throw UsageError("percentile: empty input");
    if (!(q > 0.0 && q < 100.0)) throw DomainError("percentile: q outside (0,100)");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double rank = q / 100.0 * static_cast<double>(sorted.size());
    std::size_t idx = static_cast<std::size_t>(std::ceil(rank));
    if (idx == 0) idx = 1;
    if (idx > sorted.size()) idx = sorted.size();
    return sorted[idx - 1];
}

}  // namespace rsub
