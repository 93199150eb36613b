#pragma once

// One-dimensional loss distributions used as risk margins.
//
// Four families: the unit exponential, the unit uniform, the unit Pareto
// F(x) = x/(1+x), and the lognormal LN(mu, sigma). Each exposes cdf,
// quantile (pseudo-inverse) and density; lognormal parameters can be
// fitted from positive loss data via log-moments.

#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>

#include "patchvar/normal.hpp"

namespace patchvar {

enum class MarginalKind { exponential_unit, uniform_unit, pareto_unit, lognormal };

class Marginal {
  public:
    static Marginal exponential_unit() { return Marginal(MarginalKind::exponential_unit, 0.0, 1.0); }
    static Marginal uniform_unit() { return Marginal(MarginalKind::uniform_unit, 0.0, 1.0); }
    static Marginal pareto_unit() { return Marginal(MarginalKind::pareto_unit, 0.0, 1.0); }

    static Marginal lognormal(double mu, double sigma) {
        if (!(sigma > 0.0))
            throw std::domain_error("Marginal::lognormal: sigma must be > 0");
        return Marginal(MarginalKind::lognormal, mu, sigma);
    }

    MarginalKind kind() const { return kind_; }
    double mu() const { return mu_; }
    double sigma() const { return sigma_; }

    double cdf(double x) const {
        switch (kind_) {
        case MarginalKind::exponential_unit:
            return x <= 0.0 ? 0.0 : -std::expm1(-x);
        case MarginalKind::uniform_unit:
            return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x);
        case MarginalKind::pareto_unit:
            return x <= 0.0 ? 0.0 : x / (1.0 + x);
        case MarginalKind::lognormal:
            return x <= 0.0 ? 0.0 : norm_cdf((std::log(x) - mu_) / sigma_);
        }
        return 0.0;
    }

    // Smallest x with F(x) >= u; closed form for every family.
    double quantile(double u) const {
        if (!(u > 0.0 && u < 1.0))
            throw std::domain_error("Marginal::quantile: u must be in (0,1)");
        switch (kind_) {
        case MarginalKind::exponential_unit:
            return -std::log1p(-u);
        case MarginalKind::uniform_unit:
            return u;
        case MarginalKind::pareto_unit:
            return u / (1.0 - u);
        case MarginalKind::lognormal:
            return std::exp(mu_ + sigma_ * norm_quantile(u));
        }
        return 0.0;
    }

    double pdf(double x) const {
        switch (kind_) {
        case MarginalKind::exponential_unit:
            return x < 0.0 ? 0.0 : std::exp(-x);
        case MarginalKind::uniform_unit:
            return (x < 0.0 || x > 1.0) ? 0.0 : 1.0;
        case MarginalKind::pareto_unit:
            return x < 0.0 ? 0.0 : 1.0 / ((1.0 + x) * (1.0 + x));
        case MarginalKind::lognormal:
            return x <= 0.0 ? 0.0 : norm_pdf((std::log(x) - mu_) / sigma_) / (sigma_ * x);
        }
        return 0.0;
    }

    std::string name() const {
        switch (kind_) {
        case MarginalKind::exponential_unit: return "exponential";
        case MarginalKind::uniform_unit: return "uniform";
        case MarginalKind::pareto_unit: return "pareto";
        case MarginalKind::lognormal:
            return "lognormal(" + std::to_string(mu_) + "," + std::to_string(sigma_) + ")";
        }
        return "?";
    }

  private:
    Marginal(MarginalKind k, double mu, double sigma) : kind_(k), mu_(mu), sigma_(sigma) {}

    MarginalKind kind_;
    double mu_;    // lognormal only
    double sigma_; // lognormal only
};

// Right end of the support: 1 for the unit uniform, +inf otherwise.
inline double support_max(const Marginal& m) {
    return m.kind() == MarginalKind::uniform_unit ? 1.0
                                                  : std::numeric_limits<double>::infinity();
}

// Fit LN(mu, sigma) by the mean and standard deviation (divisor n-1) of the
// log data. Requires at least two strictly positive observations and
// non-degenerate dispersion.
inline Marginal fit_lognormal(std::span<const double> losses) {
    if (losses.size() < 2)
        throw std::domain_error("fit_lognormal: need at least 2 observations");
    const std::size_t n = losses.size();
    double sum = 0.0;
    for (double v : losses) {
        if (!(v > 0.0))
            throw std::domain_error("fit_lognormal: losses must be > 0");
        sum += std::log(v);
    }
    const double mu = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : losses) {
        const double d = std::log(v) - mu;
        ss += d * d;
    }
    const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sigma > 0.0))
        throw std::domain_error("fit_lognormal: degenerate data (zero dispersion)");
    return Marginal::lognormal(mu, sigma);
}

} // namespace patchvar
