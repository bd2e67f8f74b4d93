#include "rsub/losses.hpp"

#include <cmath>

#include "rsub/errors.hpp"
#include "rsub/numeric.hpp"

namespace rsub {

namespace {

void check_inputs(std::span<const double> fake, std::span<const double> real,
                  bool strictly_positive_real, bool strictly_positive_fake) {
    if (fake.empty() || real.empty()) throw UsageError("loss: empty ratio vector");
    for (double r : fake) {
        if (!(r >= 0.0)) throw DomainError("loss: negative or NaN fake ratio");
        if (strictly_positive_fake && r <= 0.0)
            throw DomainError("loss: nonpositive fake ratio under a log loss");
    }
    for (double r : real) {
        if (!(r >= 0.0)) throw DomainError("loss: negative or NaN real ratio");
        if (strictly_positive_real && r <= 0.0)
            throw DomainError("loss: nonpositive real ratio under a log loss");
    }
}

double mean_of(std::span<const double> xs, double (*f)(double)) {
    std::vector<double> vals(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) vals[i] = f(xs[i]);
    return mean(vals);
}

double sp_g(double r) { return sigmoid(r) * r - softplus(r); }
double log_id(double r) { return std::log(r); }
double square(double r) { return r * r; }
double identity(double r) { return r; }

}  // namespace

std::string loss_kind_name(LossKind k) {
    switch (k) {
        case LossKind::SP: return "SP";
        case LossKind::ULSIF: return "uLSIF";
        case LossKind::DSKL: return "DSKL";
        case LossKind::BARR: return "BARR";
    }
    return "?";
}

LossKind loss_kind_from_name(const std::string& s) {
    if (s == "SP" || s == "sp") return LossKind::SP;
    if (s == "uLSIF" || s == "ulsif" || s == "ULSIF") return LossKind::ULSIF;
    if (s == "DSKL" || s == "dskl") return LossKind::DSKL;
    if (s == "BARR" || s == "barr") return LossKind::BARR;
    throw UsageError("unknown loss kind: " + s);
}

double sp_loss(std::span<const double> fake, std::span<const double> real) {
    check_inputs(fake, real, false, false);
    return mean_of(fake, sp_g) - mean_of(real, sigmoid);
}

double ulsif_loss(std::span<const double> fake, std::span<const double> real) {
    check_inputs(fake, real, false, false);
    return 0.5 * mean_of(fake, square) - mean_of(real, identity);
}

double dskl_loss(std::span<const double> fake, std::span<const double> real) {
    check_inputs(fake, real, true, true);
    return -mean_of(real, log_id) + mean_of(fake, log_id);
}

double barr_loss(std::span<const double> fake, std::span<const double> real,
                 double barr_lambda) {
    check_inputs(fake, real, true, false);
    return -mean_of(real, log_id) + barr_lambda * std::abs(mean_of(fake, identity) - 1.0);
}

double penalty_qhat(std::span<const double> fake) {
    if (fake.empty()) throw UsageError("penalty_qhat: empty input");
    const double d = mean(fake) - 1.0;
    return d * d;
}

LossGrads loss_and_ratio_grads(LossKind kind, const PenaltyConfig& cfg,
                               std::span<const double> fake,
                               std::span<const double> real) {
    if (cfg.lambda < 0.0) throw DomainError("loss: lambda must be >= 0");
    check_inputs(fake, real, false, false);

    const double ng = static_cast<double>(fake.size());
    const double nr = static_cast<double>(real.size());
    LossGrads out;
    out.d_fake.assign(fake.size(), 0.0);
    out.d_real.assign(real.size(), 0.0);

    // DSKL/BARR see log-floored copies; below the floor the gradient is 0.
    std::vector<double> fake_f, real_f;
    auto floored = [](std::span<const double> xs, std::vector<double>& dst) {
        dst.assign(xs.begin(), xs.end());
        for (double& v : dst) v = std::max(v, kRatioLogFloor);
        return std::span<const double>(dst);
    };

    switch (kind) {
        case LossKind::SP: {
            out.base = sp_loss(fake, real);
            for (std::size_t i = 0; i < fake.size(); ++i) {
                const double s = sigmoid(fake[i]);
                out.d_fake[i] = s * (1.0 - s) * fake[i] / ng;
            }
            for (std::size_t i = 0; i < real.size(); ++i) {
                const double s = sigmoid(real[i]);
                out.d_real[i] = -s * (1.0 - s) / nr;
            }
            break;
        }
        case LossKind::ULSIF: {
            out.base = ulsif_loss(fake, real);
            for (std::size_t i = 0; i < fake.size(); ++i) out.d_fake[i] = fake[i] / ng;
            for (std::size_t i = 0; i < real.size(); ++i) out.d_real[i] = -1.0 / nr;
            break;
        }
        case LossKind::DSKL: {
            out.base = dskl_loss(floored(fake, fake_f), floored(real, real_f));
            for (std::size_t i = 0; i < fake.size(); ++i)
                if (fake[i] > kRatioLogFloor) out.d_fake[i] = 1.0 / (ng * fake[i]);
            for (std::size_t i = 0; i < real.size(); ++i)
                if (real[i] > kRatioLogFloor) out.d_real[i] = -1.0 / (nr * real[i]);
            break;
        }
        case LossKind::BARR: {
            out.base = barr_loss(fake, floored(real, real_f), cfg.barr_lambda);
            const double dm = mean(fake) - 1.0;
            const double sign = dm > 0.0 ? 1.0 : (dm < 0.0 ? -1.0 : 0.0);
            for (std::size_t i = 0; i < fake.size(); ++i)
                out.d_fake[i] = cfg.barr_lambda * sign / ng;
            for (std::size_t i = 0; i < real.size(); ++i)
                if (real[i] > kRatioLogFloor) out.d_real[i] = -1.0 / (nr * real[i]);
            break;
        }
    }

    out.total = out.base;
    if ((kind == LossKind::SP || kind == LossKind::ULSIF) && cfg.lambda > 0.0) {
        out.penalty = penalty_qhat(fake);
        out.total += cfg.lambda * out.penalty;
        const double d = 2.0 * cfg.lambda * (mean(fake) - 1.0) / ng;
        for (std::size_t i = 0; i < fake.size(); ++i) out.d_fake[i] += d;
    }
    return out;
}

}  // namespace rsub
