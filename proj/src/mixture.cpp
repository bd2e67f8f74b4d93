#include "rsub/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "rsub/errors.hpp"

namespace rsub {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void MixtureSpec::validate() const {
    if (means.empty()) throw UsageError("mixture: no components");
    if (!(std > 0.0)) throw DomainError("mixture: std must be > 0");
    if (weights.size() != means.size())
        throw ShapeError("mixture: weights/means length mismatch");
    double s = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw DomainError("mixture: negative weight");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-12) throw DomainError("mixture: weights must sum to 1");
}

std::string MixtureSpec::to_json() const {
    validate();
    nlohmann::json j;
    auto& m = j["means"] = nlohmann::json::array();
    for (const auto& p : means) m.push_back({p[0], p[1]});
    j["std"] = std;
    j["weights"] = weights;
    return j.dump();
}

MixtureSpec MixtureSpec::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("mixture: ") + e.what(), e.byte);
    }
    try {
        MixtureSpec spec;
        for (const auto& p : j.at("means"))
            spec.means.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        spec.std = j.at("std").get<double>();
        spec.weights = j.at("weights").get<std::vector<double>>();
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("mixture: ") + e.what(), 0);
    }
}

MixtureSpec default_mixture() {
    MixtureSpec spec;
    for (int iy = -2; iy <= 2; ++iy)
        for (int ix = -2; ix <= 2; ++ix)
            spec.means.push_back({static_cast<double>(ix), static_cast<double>(iy)});
    spec.std = 0.05;
    spec.weights.assign(spec.means.size(), 1.0 / static_cast<double>(spec.means.size()));
    return spec;
}

DenseMatrix mixture_sample(const MixtureSpec& spec, std::size_t n, RandomStream& rng) {
    spec.validate();
    if (n < 1) throw UsageError("mixture_sample: n must be >= 1");
    std::vector<double> cum(spec.weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.weights.size(); ++i) {
        acc += spec.weights[i];
        cum[i] = acc;
    }
    cum.back() = 1.0;

    DenseMatrix out(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.next_double();
        const std::size_t k = static_cast<std::size_t>(
            std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        out(i, 0) = spec.means[k][0] + spec.std * rng.next_normal();
        out(i, 1) = spec.means[k][1] + spec.std * rng.next_normal();
    }
    out.require_finite("mixture_sample");
    return out;
}

double mixture_log_pdf(const MixtureSpec& spec, const Point2& x) {
    spec.validate();
    const double inv2v = 1.0 / (2.0 * spec.std * spec.std);
    const double log_norm = -std::log(kTwoPi * spec.std * spec.std);
    double max_lp = -std::numeric_limits<double>::infinity();
    std::vector<double> lps(spec.means.size());
    for (std::size_t k = 0; k < spec.means.size(); ++k) {
        if (spec.weights[k] == 0.0) {
            lps[k] = -std::numeric_limits<double>::infinity();
            continue;
        }
        const double dx = x[0] - spec.means[k][0];
        const double dy = x[1] - spec.means[k][1];
        lps[k] = std::log(spec.weights[k]) + log_norm - (dx * dx + dy * dy) * inv2v;
        max_lp = std::max(max_lp, lps[k]);
    }
    if (!std::isfinite(max_lp)) return -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (double lp : lps) s += std::exp(lp - max_lp);
    return max_lp + std::log(s);
}

double mixture_pdf(const MixtureSpec& spec, const Point2& x) {
    return std::exp(mixture_log_pdf(spec, x));
}

double true_ratio(const MixtureSpec& p_r, const MixtureSpec& p_g, const Point2& x) {
    const double lr = mixture_log_pdf(p_r, x) - mixture_log_pdf(p_g, x);
    const double r = std::exp(lr);
    if (!std::isfinite(r))
        throw DomainError("true_ratio: generator density vanishes at this point");
    return r;
}

MixtureSpec perturbed_generator(const MixtureSpec& spec, double inflate,
                                double bridge_prob) {
    spec.validate();
    if (!(inflate >= 1.0)) throw DomainError("perturbed_generator: inflate must be >= 1");
    if (!(bridge_prob >= 0.0 && bridge_prob < 1.0))
        throw DomainError("perturbed_generator: bridge_prob outside [0,1)");

    MixtureSpec out;
    out.std = spec.std * inflate;
    out.means = spec.means;

    // Bridges sit at midpoints of horizontally adjacent mode pairs: same y,
    // x gap equal to the smallest same-row spacing in the grid.
    std::vector<Point2> bridges;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.means.size(); ++i)
        for (std::size_t j = 0; j < spec.means.size(); ++j) {
            if (std::abs(spec.means[i][1] - spec.means[j][1]) > 1e-12) continue;
            const double gap = spec.means[j][0] - spec.means[i][0];
            if (gap > 1e-12) min_gap = std::min(min_gap, gap);
        }
    if (std::isfinite(min_gap)) {
        for (std::size_t i = 0; i < spec.means.size(); ++i)
            for (std::size_t j = 0; j < spec.means.size(); ++j) {
                if (std::abs(spec.means[i][1] - spec.means[j][1]) > 1e-12) continue;
                if (std::abs(spec.means[j][0] - spec.means[i][0] - min_gap) > 1e-9) continue;
                bridges.push_back({0.5 * (spec.means[i][0] + spec.means[j][0]),
                                   spec.means[i][1]});
            }
    }
    if (bridges.empty()) bridge_prob = 0.0;

    const double mode_w = (1.0 - bridge_prob) / static_cast<double>(spec.means.size());
    out.weights.assign(spec.means.size(), mode_w);
    if (bridge_prob > 0.0) {
        const double bw = bridge_prob / static_cast<double>(bridges.size());
        for (const auto& b : bridges) {
            out.means.push_back(b);
            out.weights.push_back(bw);
        }
    }
    out.validate();
    return out;
}

}  // namespace rsub
