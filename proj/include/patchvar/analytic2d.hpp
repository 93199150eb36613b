#pragma once

// Exact closed-form engine for the two-dimensional patchwork examples with
// equal margins (exponential, uniform, Pareto) and independent body/tail
// components:
//
//   - transformed-margin cdfs of the body block [0, Q(1-b)] and the tail
//     block [Q(1-b), inf);
//   - numeric convolution of densities on a common interval (used as an
//     independent oracle for the closed forms);
//   - the piecewise cdf/density of the aggregated loss S, its quantile
//     Q_S(u, b), the independent-sum cdf G, and the worst-case cdf H
//     (countermonotone tail);
//   - the VaR-maximizing choice of the tail mass b;
//   - the Solvency II volume factor rho_{1-a}(sigma).
//
// The Pareto upper branch of F_S is implemented in the oracle-validated
// form (x^2 + 2x - (2/b) ln(bx + 2b - 1)) / (2+x)^2.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "patchvar/marginals.hpp"
#include "patchvar/quadrature.hpp"

namespace patchvar {

enum class ExampleFamily { exponential, uniform, pareto };

inline Marginal margin_of(ExampleFamily fam) {
    switch (fam) {
    case ExampleFamily::exponential: return Marginal::exponential_unit();
    case ExampleFamily::uniform: return Marginal::uniform_unit();
    case ExampleFamily::pareto: return Marginal::pareto_unit();
    }
    throw std::invalid_argument("margin_of: unknown family");
}

inline std::string family_name(ExampleFamily fam) {
    switch (fam) {
    case ExampleFamily::exponential: return "exponential";
    case ExampleFamily::uniform: return "uniform";
    case ExampleFamily::pareto: return "pareto";
    }
    return "?";
}

namespace detail {
inline void check_beta_open(double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::domain_error("beta must be in (0,1)");
}
} // namespace detail

// ---------------------------------------------------------------------------
// Transformed margins (body and tail blocks)
// ---------------------------------------------------------------------------

// cdf of Z1 = Q((1-b) U): F(x)/(1-b) capped at 1 beyond Q(1-b).
inline double lower_tail_cdf(const Marginal& m, double beta, double x) {
    detail::check_beta_open(beta);
    const double v = m.cdf(x) / (1.0 - beta);
    return v >= 1.0 ? 1.0 : v;
}

// cdf of Z2 = Q(1 - b + b V): zero below Q(1-b), (F(x)+b-1)/b above.
inline double upper_tail_cdf(const Marginal& m, double beta, double x) {
    detail::check_beta_open(beta);
    const double v = (m.cdf(x) + beta - 1.0) / beta;
    return v <= 0.0 ? 0.0 : (v >= 1.0 ? 1.0 : v);
}

// ---------------------------------------------------------------------------
// Numeric convolution of interval densities
// ---------------------------------------------------------------------------

struct IntervalDensity {
    std::function<double(double)> pdf;
    double lo = 0.0;
    double hi = 0.0; // +inf for a right-unbounded support
};

inline IntervalDensity lower_tail_density(const Marginal& m, double beta) {
    detail::check_beta_open(beta);
    const double q = m.quantile(1.0 - beta);
    return {[m, beta, q](double x) { return (x < 0.0 || x > q) ? 0.0 : m.pdf(x) / (1.0 - beta); },
            0.0, q};
}

inline IntervalDensity upper_tail_density(const Marginal& m, double beta) {
    detail::check_beta_open(beta);
    const double q = m.quantile(1.0 - beta);
    const double hi = support_max(m);
    return {[m, beta, q, hi](double x) { return (x < q || x > hi) ? 0.0 : m.pdf(x) / beta; }, q,
            hi};
}

// Density of X + Y at x for independent X ~ f, Y ~ g on a common interval.
// Finite supports convolve over y in [max(lo, x-hi), min(hi, x-lo)];
// right-unbounded supports over y in [lo, x-lo]. Either way the density
// vanishes at twice the left/right endpoint.
inline double convolve_density(const IntervalDensity& f, const IntervalDensity& g, double x,
                               double abs_tol = 1e-10) {
    if (f.lo != g.lo || f.hi != g.hi)
        throw std::domain_error("convolve_density: supports differ");
    const bool infinite = std::isinf(f.hi);
    double ylo, yhi;
    if (infinite) {
        ylo = f.lo;
        yhi = x - f.lo;
    } else {
        ylo = std::max(f.lo, x - f.hi);
        yhi = std::min(f.hi, x - f.lo);
    }
    if (!(yhi > ylo)) return 0.0;
    return integrate([&](double y) { return f.pdf(x - y) * g.pdf(y); }, ylo, yhi, abs_tol);
}

// ---------------------------------------------------------------------------
// Closed-form branch functions
// ---------------------------------------------------------------------------

namespace detail {

// exponential, q = -ln b
inline double exp_cdf_body(double b, double x) {
    return (1.0 - (1.0 + x) * std::exp(-x)) / (1.0 - b);
}
inline double exp_cdf_mid(double b, double x) {
    const double ex = std::exp(-x);
    return (1.0 - 2.0 * b + 2.0 * ex * std::log(b) + (1.0 + x) * ex) / (1.0 - b);
}
inline double exp_cdf_tail(double b, double x) {
    const double ex = std::exp(-x);
    return (b - 2.0 * ex * std::log(b) - (1.0 + x) * ex) / b;
}

// uniform
inline double uni_cdf_b1(double b, double x) { return x * x / (2.0 * (1.0 - b)); }
inline double uni_cdf_b2(double b, double x) {
    return (4.0 * x * (1.0 - b) - x * x - 2.0 * (1.0 - b) * (1.0 - b)) / (2.0 * (1.0 - b));
}
inline double uni_cdf_b3(double b, double x) {
    return (4.0 * (1.0 - b) * (1.0 - x) + x * x - 2.0 * b + 2.0 * b * b) / (2.0 * b);
}
inline double uni_cdf_b4(double b, double x) {
    return (2.0 * b - 4.0 * (1.0 - x) - x * x) / (2.0 * b);
}

// Pareto, q = 1/b - 1
inline double par_cdf_body(double b, double x) {
    const double s = 2.0 + x;
    return (x * x + 2.0 * x - 2.0 * std::log1p(x)) / (s * s * (1.0 - b));
}
inline double par_cdf_mid(double b, double x) {
    const double s = 2.0 + x;
    return ((1.0 - 2.0 * b) * x * x + (4.0 - 6.0 * b) * x + 4.0 - 4.0 * b +
            2.0 * std::log(b * x + 2.0 * b - 1.0)) /
           (s * s * (1.0 - b));
}
inline double par_cdf_tail(double b, double x) {
    const double s = 2.0 + x;
    return 1.0 - 2.0 / s - (2.0 / b) * std::log(b * x + 2.0 * b - 1.0) / (s * s);
}

// worst-case countermonotone branches; the sqrt argument cancels to a few
// ulps of b^2 at the branch edge, so noise at that scale is treated as zero
inline double cusp_sqrt(double v, double scale) {
    if (v <= 8.0 * std::numeric_limits<double>::epsilon() * scale) return 0.0;
    return std::sqrt(v);
}
inline double exp_worst_tail(double b, double x) {
    return 1.0 - b + cusp_sqrt(b * b - 4.0 * std::exp(-x), b * b);
}
inline double par_worst_tail(double b, double x) {
    return 1.0 - b + cusp_sqrt(b * b - 4.0 * b / (2.0 + x), b * b);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Closed-form cdfs and densities of S = X1 + X2
// ---------------------------------------------------------------------------

// F_S(x, b), continuous piecewise cdf of the aggregated patchwork loss
// (independent body and tail blocks).
inline double sum_cdf(ExampleFamily fam, double beta, double x) {
    detail::check_beta_open(beta);
    const double b = beta;
    switch (fam) {
    case ExampleFamily::exponential: {
        if (x <= 0.0) return 0.0;
        const double q = -std::log(b);
        if (x <= q) return detail::exp_cdf_body(b, x);
        if (x <= 2.0 * q) return detail::exp_cdf_mid(b, x);
        return detail::exp_cdf_tail(b, x);
    }
    case ExampleFamily::uniform: {
        if (x <= 0.0) return 0.0;
        if (x >= 2.0) return 1.0;
        if (x <= 1.0 - b) return detail::uni_cdf_b1(b, x);
        if (x <= 2.0 - 2.0 * b) return detail::uni_cdf_b2(b, x);
        if (x <= 2.0 - b) return detail::uni_cdf_b3(b, x);
        return detail::uni_cdf_b4(b, x);
    }
    case ExampleFamily::pareto: {
        if (x <= 0.0) return 0.0;
        const double q = 1.0 / b - 1.0;
        if (x <= q) return detail::par_cdf_body(b, x);
        if (x <= 2.0 * q) return detail::par_cdf_mid(b, x);
        return detail::par_cdf_tail(b, x);
    }
    }
    return 0.0;
}

// f_S(x, b), density of S; branchwise derivative of sum_cdf.
inline double sum_pdf(ExampleFamily fam, double beta, double x) {
    detail::check_beta_open(beta);
    const double b = beta;
    switch (fam) {
    case ExampleFamily::exponential: {
        if (x < 0.0) return 0.0;
        const double q = -std::log(b);
        const double ex = std::exp(-x);
        if (x <= q) return x * ex / (1.0 - b);
        if (x <= 2.0 * q) return (2.0 * q - x) * ex / (1.0 - b);
        return (x - 2.0 * q) * ex / b;
    }
    case ExampleFamily::uniform: {
        if (x < 0.0 || x > 2.0) return 0.0;
        if (x <= 1.0 - b) return x / (1.0 - b);
        if (x <= 2.0 - 2.0 * b) return (2.0 - 2.0 * b - x) / (1.0 - b);
        if (x <= 2.0 - b) return (x - 2.0 + 2.0 * b) / b;
        return (2.0 - x) / b;
    }
    case ExampleFamily::pareto: {
        if (x < 0.0) return 0.0;
        const double q = 1.0 / b - 1.0;
        const double s = 2.0 + x;
        if (x <= q)
            return (2.0 * x / (1.0 + x) + 4.0 * std::log1p(x) / s) / (s * s * (1.0 - b));
        const double w = b * x + 2.0 * b - 1.0; // in [b, 1] on the middle branch
        if (x <= 2.0 * q)
            return (2.0 * b * b * (2.0 * q - x) / w - 4.0 * std::log(w) / s) /
                   ((1.0 - b) * s * s);
        return 2.0 / (s * s) - 2.0 / (w * s * s) + 4.0 * std::log(w) / (b * s * s * s);
    }
    }
    return 0.0;
}

// G(x), cdf of the independent sum T = Q(U1) + Q(U2).
inline double independent_sum_cdf(ExampleFamily fam, double x) {
    switch (fam) {
    case ExampleFamily::exponential:
        return x <= 0.0 ? 0.0 : 1.0 - (1.0 + x) * std::exp(-x);
    case ExampleFamily::uniform: {
        if (x <= 0.0) return 0.0;
        if (x >= 2.0) return 1.0;
        if (x <= 1.0) return 0.5 * x * x;
        return 1.0 - 0.5 * (2.0 - x) * (2.0 - x);
    }
    case ExampleFamily::pareto: {
        if (x <= 0.0) return 0.0;
        const double s = 2.0 + x;
        return (x * x + 2.0 * x - 2.0 * std::log1p(x)) / (s * s);
    }
    }
    return 0.0;
}

// H(x, b), cdf of S under the worst VaR scenario (countermonotone tail):
// equal to F_S in the body, flat at 1-b across the tail gap, then the
// closed-form countermonotone branch.
inline double worst_case_cdf(ExampleFamily fam, double beta, double x) {
    detail::check_beta_open(beta);
    const double b = beta;
    switch (fam) {
    case ExampleFamily::exponential: {
        const double gap_lo = -2.0 * std::log(b);
        const double gap_hi = -2.0 * std::log(0.5 * b);
        if (x <= gap_lo) return sum_cdf(fam, b, x);
        if (x < gap_hi) return 1.0 - b;
        return detail::exp_worst_tail(b, x);
    }
    case ExampleFamily::uniform: {
        if (x <= 2.0 - 2.0 * b) return sum_cdf(fam, b, x);
        if (x < 2.0 - b) return 1.0 - b;
        return 1.0;
    }
    case ExampleFamily::pareto: {
        const double gap_lo = 2.0 / b - 2.0;
        const double gap_hi = 4.0 / b - 2.0;
        if (x <= gap_lo) return sum_cdf(fam, b, x);
        if (x < gap_hi) return 1.0 - b;
        return detail::par_worst_tail(b, x);
    }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Piecewise curve descriptors (ordered branch segments + evaluators)
// ---------------------------------------------------------------------------

struct CurveSegment {
    double lo = 0.0;
    double hi = 0.0;
    std::function<double(double)> eval; // the branch's closed form
};

struct PiecewiseCurve {
    std::vector<CurveSegment> segments; // ordered and contiguous

    double lo() const { return segments.front().lo; }
    double hi() const { return segments.back().hi; }

    std::vector<double> breakpoints() const {
        std::vector<double> b;
        for (std::size_t i = 1; i < segments.size(); ++i) b.push_back(segments[i].lo);
        return b;
    }

    double operator()(double x) const {
        if (x <= lo()) return segments.front().eval(lo());
        for (const auto& s : segments)
            if (x <= s.hi) return s.eval(x);
        return segments.back().eval(hi());
    }
};

inline PiecewiseCurve sum_cdf_curve(ExampleFamily fam, double beta) {
    detail::check_beta_open(beta);
    const double b = beta;
    const double inf = std::numeric_limits<double>::infinity();
    PiecewiseCurve c;
    switch (fam) {
    case ExampleFamily::exponential: {
        const double q = -std::log(b);
        c.segments = {{0.0, q, [b](double x) { return detail::exp_cdf_body(b, x); }},
                      {q, 2.0 * q, [b](double x) { return detail::exp_cdf_mid(b, x); }},
                      {2.0 * q, inf, [b](double x) { return detail::exp_cdf_tail(b, x); }}};
        break;
    }
    case ExampleFamily::uniform:
        c.segments = {{0.0, 1.0 - b, [b](double x) { return detail::uni_cdf_b1(b, x); }},
                      {1.0 - b, 2.0 - 2.0 * b, [b](double x) { return detail::uni_cdf_b2(b, x); }},
                      {2.0 - 2.0 * b, 2.0 - b, [b](double x) { return detail::uni_cdf_b3(b, x); }},
                      {2.0 - b, 2.0, [b](double x) { return detail::uni_cdf_b4(b, x); }}};
        break;
    case ExampleFamily::pareto: {
        const double q = 1.0 / b - 1.0;
        c.segments = {{0.0, q, [b](double x) { return detail::par_cdf_body(b, x); }},
                      {q, 2.0 * q, [b](double x) { return detail::par_cdf_mid(b, x); }},
                      {2.0 * q, inf, [b](double x) { return detail::par_cdf_tail(b, x); }}};
        break;
    }
    }
    return c;
}

inline PiecewiseCurve worst_case_cdf_curve(ExampleFamily fam, double beta) {
    detail::check_beta_open(beta);
    const double b = beta;
    const double inf = std::numeric_limits<double>::infinity();
    auto body = [fam, b](double x) { return sum_cdf(fam, b, x); };
    auto flat = [b](double) { return 1.0 - b; };
    PiecewiseCurve c;
    switch (fam) {
    case ExampleFamily::exponential: {
        const double gap_lo = -2.0 * std::log(b);
        const double gap_hi = -2.0 * std::log(0.5 * b);
        c.segments = {{0.0, gap_lo, body},
                      {gap_lo, gap_hi, flat},
                      {gap_hi, inf, [b](double x) { return detail::exp_worst_tail(b, x); }}};
        break;
    }
    case ExampleFamily::uniform:
        c.segments = {{0.0, 2.0 - 2.0 * b, body},
                      {2.0 - 2.0 * b, 2.0 - b, flat},
                      {2.0 - b, 2.0, [](double) { return 1.0; }}};
        break;
    case ExampleFamily::pareto: {
        const double gap_lo = 2.0 / b - 2.0;
        const double gap_hi = 4.0 / b - 2.0;
        c.segments = {{0.0, gap_lo, body},
                      {gap_lo, gap_hi, flat},
                      {gap_hi, inf, [b](double x) { return detail::par_worst_tail(b, x); }}};
        break;
    }
    }
    return c;
}

inline PiecewiseCurve sum_pdf_curve(ExampleFamily fam, double beta) {
    detail::check_beta_open(beta);
    const Marginal m = margin_of(fam);
    const double q = m.quantile(1.0 - beta);
    const double hi =
        fam == ExampleFamily::uniform ? 2.0 : std::numeric_limits<double>::infinity();
    auto eval = [fam, beta](double x) { return sum_pdf(fam, beta, x); };
    PiecewiseCurve c;
    if (fam == ExampleFamily::uniform) {
        const double b = beta;
        c.segments = {{0.0, 1.0 - b, eval},
                      {1.0 - b, 2.0 - 2.0 * b, eval},
                      {2.0 - 2.0 * b, 2.0 - b, eval},
                      {2.0 - b, 2.0, eval}};
    } else {
        c.segments = {{0.0, q, eval}, {q, 2.0 * q, eval}, {2.0 * q, hi, eval}};
    }
    return c;
}

// ---------------------------------------------------------------------------
// Quantiles by bisection
// ---------------------------------------------------------------------------

namespace detail {

// Lower pseudo-inverse inf{x : F(x) >= u} of a nondecreasing F by bisection.
// When `strict` is set, inverts to inf{x : F(x) > u} instead (the upper
// pseudo-inverse, needed where the cdf has a flat stretch at level u).
template <class F>
double bisect_inverse(const F& f, double u, double lo, double hi, double x_tol, bool relative,
                      bool strict = false) {
    auto above = [&](double x) { return strict ? f(x) > u : f(x) >= u; };
    // grow the bracket for unbounded supports
    int guard = 0;
    while (!above(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 256)
            throw std::runtime_error("bisect_inverse: failed to bracket the level");
    }
    while (true) {
        const double tol = relative ? x_tol * std::max(1.0, std::abs(hi)) : x_tol;
        if (hi - lo <= tol) break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (above(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace detail

// Q_S(u, b): inverse of sum_cdf. Absolute x-tolerance 1e-10 for the bounded
// and light-tailed families, relative for the Pareto family.
inline double sum_quantile(ExampleFamily fam, double beta, double u) {
    detail::check_beta_open(beta);
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("sum_quantile: u must be in (0,1)");
    auto f = [fam, beta](double x) { return sum_cdf(fam, beta, x); };
    switch (fam) {
    case ExampleFamily::uniform:
        return detail::bisect_inverse(f, u, 0.0, 2.0, 1e-10, false);
    case ExampleFamily::exponential:
        return detail::bisect_inverse(f, u, 0.0, 4.0, 1e-10, false);
    case ExampleFamily::pareto:
        return detail::bisect_inverse(f, u, 0.0, 4.0, 1e-10, true);
    }
    return 0.0;
}

// Closed-form Q_S(u, b) for the uniform family, valid on 1-b <= u <= 1-b/2
// (up to a few ulps at the edges).
inline double uniform_sum_quantile_closed(double beta, double u) {
    detail::check_beta_open(beta);
    const double slack = 4.0 * std::numeric_limits<double>::epsilon();
    if (u < 1.0 - beta - slack || u > 1.0 - 0.5 * beta + slack)
        throw std::domain_error("uniform_sum_quantile_closed: u outside [1-b, 1-b/2]");
    return 2.0 - 2.0 * beta + std::sqrt(std::max(0.0, 2.0 * beta * (beta + u - 1.0)));
}

inline double independent_sum_quantile(ExampleFamily fam, double u) {
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("independent_sum_quantile: u must be in (0,1)");
    auto f = [fam](double x) { return independent_sum_cdf(fam, x); };
    switch (fam) {
    case ExampleFamily::uniform:
        return u <= 0.5 ? std::sqrt(2.0 * u) : 2.0 - std::sqrt(2.0 * (1.0 - u));
    case ExampleFamily::exponential:
        return detail::bisect_inverse(f, u, 0.0, 4.0, 1e-10, false);
    case ExampleFamily::pareto:
        return detail::bisect_inverse(f, u, 0.0, 4.0, 1e-10, true);
    }
    return 0.0;
}

// wVaR-style inverse of H: upper pseudo-inverse, so that at u = 1-b the
// result is the point where H leaves the flat stretch, not where it
// first reaches it.
inline double worst_case_quantile(ExampleFamily fam, double beta, double u) {
    detail::check_beta_open(beta);
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("worst_case_quantile: u must be in (0,1)");
    auto f = [fam, beta](double x) { return worst_case_cdf(fam, beta, x); };
    switch (fam) {
    case ExampleFamily::uniform:
        return detail::bisect_inverse(f, u, 0.0, 2.0, 1e-10, false, true);
    case ExampleFamily::exponential:
        return detail::bisect_inverse(f, u, 0.0, 4.0, 1e-10, false, true);
    case ExampleFamily::pareto:
        return detail::bisect_inverse(f, u, 0.0, 4.0, 1e-10, true, true);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Summaries and the VaR-maximizing tail mass
// ---------------------------------------------------------------------------

struct VarSummary {
    double alpha = 0.0;
    double beta = 0.0;
    double var_s = 0.0; // VaR_a(S) under the patchwork construction
    double var_t = 0.0; // VaR_a(T), independent sum
    double wvar = 0.0;  // wVaR_a(S), countermonotone tail
    double svar = 0.0;  // VaR_a(X1) + VaR_a(X2)
};

inline VarSummary var_summary(ExampleFamily fam, double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("var_summary: alpha must be in (0,1)");
    const Marginal m = margin_of(fam);
    VarSummary s;
    s.alpha = alpha;
    s.beta = beta;
    s.var_s = sum_quantile(fam, beta, 1.0 - alpha);
    s.var_t = independent_sum_quantile(fam, 1.0 - alpha);
    // the worst VaR over all dependence structures; attained by the
    // countermonotone tail with tail mass alpha, so it does not vary
    // with the summary's beta
    s.wvar = worst_case_quantile(fam, alpha, 1.0 - alpha);
    s.svar = 2.0 * m.quantile(1.0 - alpha);
    return s;
}

struct BetaOptimum {
    double beta_star = 0.0;
    double var_star = 0.0;
};

// Maximize b -> Q_S(1-a, b) over b in [a, 4a]: coarse grid (step a/50)
// followed by golden-section refinement. The grid stage handles the kink
// at b = a where the tail branch starts to matter.
inline BetaOptimum optimize_beta(ExampleFamily fam, double alpha, double beta_tol = 1e-6) {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw std::domain_error("optimize_beta: alpha must be in (0, 0.5)");
    const double u = 1.0 - alpha;
    auto value = [&](double b) { return sum_quantile(fam, b, u); };

    const double step = alpha / 50.0;
    double best_b = alpha;
    double best_v = value(alpha);
    for (double b = alpha + step; b <= 4.0 * alpha + 0.5 * step; b += step) {
        const double v = value(b);
        if (v > best_v) {
            best_v = v;
            best_b = b;
        }
    }

    double lo = std::max(alpha, best_b - step);
    double hi = std::min(4.0 * alpha, best_b + step);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = value(x1);
    double f2 = value(x2);
    while (hi - lo > beta_tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = value(x1);
        }
    }
    const double b_star = 0.5 * (lo + hi);
    const double v_star = value(b_star);
    if (v_star >= best_v) return {b_star, v_star};
    return {best_b, best_v};
}

// ---------------------------------------------------------------------------
// Solvency II volume factor
// ---------------------------------------------------------------------------

// rho_{1-a}(sigma) = exp(k_{1-a} sqrt(ln(1+sigma^2))) / sqrt(1+sigma^2) - 1,
// with k_{1-a} the standard normal 1-a quantile. The regulation replaces it
// by 3 sigma for a = 0.005.
inline double scr_volume_factor(double sigma, double alpha = 0.005) {
    if (!(sigma > 0.0))
        throw std::domain_error("scr_volume_factor: sigma must be > 0");
    const double k = norm_quantile(1.0 - alpha);
    const double l = std::log1p(sigma * sigma);
    return std::exp(k * std::sqrt(l)) / std::sqrt(1.0 + sigma * sigma) - 1.0;
}

// (sigma, rho(sigma), 3 sigma) rows over a sigma grid.
inline std::vector<std::array<double, 3>> scr_curve(const std::vector<double>& sigmas,
                                                    double alpha = 0.005) {
    std::vector<std::array<double, 3>> rows;
    rows.reserve(sigmas.size());
    for (double s : sigmas) rows.push_back({s, scr_volume_factor(s, alpha), 3.0 * s});
    return rows;
}

} // namespace patchvar
