#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rsub {

// ln(1 + e^t), stable for |t| up to ~700.
double softplus(double t);
// e^t / (1 + e^t), stable; sigmoid(t) + sigmoid(-t) == 1.
double sigmoid(double t);

// Pairwise (cascade) summation; keeps batch means accurate enough that
// analytic loss bounds survive floating point at batch size 512+.
double pairwise_sum(std::span<const double> xs);
double mean(std::span<const double> xs);

// Nearest-rank percentile, q in (0, 100). Copies and sorts.
double percentile(std::span<const double> xs, double q);

}  // namespace rsub
