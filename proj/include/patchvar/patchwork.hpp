#pragma once

// Patchwork copula: a body copula U scaled into [0, 1-beta]^d and a tail
// copula V scaled into [1-beta, 1]^d, selected by an independent Bernoulli
// switch with P(body) = 1 - beta. The mixture W again has uniform margins,
// so quantile-transforming W leaves the risk margins untouched while the
// tail dependence is replaced wholesale.

#include <numeric>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "patchvar/copulas.hpp"
#include "patchvar/marginals.hpp"

namespace patchvar {

struct PatchworkCopula {
    CopulaSpec body;
    CopulaSpec tail;
    double beta = 0.0; // tail mass; beta = 1 - p

    PatchworkCopula(CopulaSpec body_, CopulaSpec tail_, double beta_)
        : body(std::move(body_)), tail(std::move(tail_)), beta(beta_) {
        if (dim(body) != dim(tail))
            throw std::invalid_argument("PatchworkCopula: body and tail dimensions differ");
        if (!(beta >= 0.0 && beta <= 1.0))
            throw std::domain_error("PatchworkCopula: beta must be in [0,1]");
    }

    int dimension() const { return dim(body); }
};

// The endpoints beta = 0 / beta = 1 degenerate to the body / tail copula.
// Draw order is fixed: one uniform for the switch, then the selected
// copula's draws, which makes runs bit-reproducible for a given stream.
inline void sample_w(const PatchworkCopula& pc, Rng& rng, std::span<double> out) {
    const double u0 = rng.uniform();
    const double beta = pc.beta;
    if (u0 < 1.0 - beta) {
        sample(pc.body, rng, out);
        for (double& w : out) w *= (1.0 - beta);
    } else {
        sample(pc.tail, rng, out);
        for (double& w : out) w = 1.0 - beta + beta * w;
    }
}

inline std::vector<double> sample_w(const PatchworkCopula& pc, Rng& rng) {
    std::vector<double> w(static_cast<std::size_t>(pc.dimension()));
    sample_w(pc, rng, w);
    return w;
}

// ---------------------------------------------------------------------------
// Risk model: margins + dependence
// ---------------------------------------------------------------------------

using CopulaModel = std::variant<CopulaSpec, PatchworkCopula>;

inline int dim(const CopulaModel& c) {
    if (const auto* spec = std::get_if<CopulaSpec>(&c)) return dim(*spec);
    return std::get<PatchworkCopula>(c).dimension();
}

struct RiskModel {
    std::vector<Marginal> margins;
    CopulaModel copula;

    RiskModel(std::vector<Marginal> margins_, CopulaModel copula_)
        : margins(std::move(margins_)), copula(std::move(copula_)) {
        if (static_cast<int>(margins.size()) != dim(copula))
            throw std::invalid_argument("RiskModel: margin count != copula dimension");
    }

    int dimension() const { return static_cast<int>(margins.size()); }
};

namespace detail {

// Uniform samples of exactly 0 or 1 are nudged one representable step into
// the open interval; quantiles are undefined at the endpoints for
// unbounded margins.
inline double clamp_open_unit(double u) {
    if (u <= 0.0) return 0x1.0p-53;
    if (u >= 1.0) return 1.0 - 0x1.0p-53;
    return u;
}

} // namespace detail

// Componentwise quantile transform of a copula sample.
inline void risks_from_uniforms(std::span<const Marginal> margins, std::span<const double> w,
                                std::span<double> out) {
    for (std::size_t i = 0; i < margins.size(); ++i)
        out[i] = margins[i].quantile(detail::clamp_open_unit(w[i]));
}

inline void sample_risks(const RiskModel& model, Rng& rng, std::span<double> out,
                         std::span<double> w_scratch) {
    if (const auto* spec = std::get_if<CopulaSpec>(&model.copula))
        sample(*spec, rng, w_scratch);
    else
        sample_w(std::get<PatchworkCopula>(model.copula), rng, w_scratch);
    risks_from_uniforms(model.margins, w_scratch, out);
}

inline std::vector<double> sample_risks(const RiskModel& model, Rng& rng) {
    std::vector<double> x(static_cast<std::size_t>(model.dimension()));
    std::vector<double> w(static_cast<std::size_t>(model.dimension()));
    sample_risks(model, rng, x, w);
    return x;
}

// Aggregated loss S = sum of the components, summed left to right.
inline double aggregate(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

} // namespace patchvar
