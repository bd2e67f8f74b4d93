#include "rsub/generator.hpp"

#include <algorithm>

#include "rsub/errors.hpp"

namespace rsub {

PoolSource::PoolSource(DenseMatrix rows, std::vector<double> weights)
    : rows_(std::move(rows)) {
    if (rows_.rows() == 0) throw UsageError("PoolSource: empty pool");
    if (!weights.empty()) {
        if (weights.size() != rows_.rows())
            throw ShapeError("PoolSource: weights/rows length mismatch");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw DomainError("PoolSource: negative weight");
            total += w;
        }
        if (total <= 0.0) throw DomainError("PoolSource: weights sum to zero");
        cum_.resize(weights.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i] / total;
            cum_[i] = acc;
        }
        cum_.back() = 1.0;
    }
}

DenseMatrix PoolSource::sample(std::size_t n, RandomStream& rng) const {
    std::vector<std::size_t> idx(n);
    if (cum_.empty()) {
        for (auto& i : idx) i = rng.next_below(rows_.rows());
    } else {
        for (auto& i : idx) {
            const double u = rng.next_double();
            i = static_cast<std::size_t>(
                std::lower_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
        }
    }
    return take_rows(rows_, idx);
}

}  // namespace rsub
