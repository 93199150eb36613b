#pragma once

// Copula samplers: independence, comonotone, countermonotone (d=2),
// Gaussian with equicorrelation Sigma_d = (1-r) I + r E, and the
// rank-based Bernstein copula.
//
// The equicorrelation sampler uses the explicit spectral factor
// A = T sqrt(Delta) with the closed-form orthonormal basis
//
//   T_1 = e / sqrt(d),  t_ij = -1/sqrt(j(j-1)) (i<j), sqrt((j-1)/j) (i=j), 0 (i>j)
//
// and eigenvalues lambda_1 = 1+(d-1)r, lambda_i = 1-r. No iterative
// eigensolver is involved, so the singular boundary r = -1/(d-1) is exact:
// samples then lie on the hyperplane sum_i Phi^{-1}(w_i) = 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "patchvar/matrix.hpp"
#include "patchvar/normal.hpp"
#include "patchvar/rng.hpp"

namespace patchvar {

// ---------------------------------------------------------------------------
// Equicorrelation spectral factor (closed form)
// ---------------------------------------------------------------------------

struct SpectralFactor {
    int dim = 0;
    double r = 0.0;
    Matrix a;                        // T * sqrt(diag(eigenvalues))
    std::vector<double> eigenvalues; // lambda_1, 1-r, ..., 1-r
};

inline double min_equicorrelation(int d) { return -1.0 / (d - 1); }

inline Matrix equicorrelation_basis(int d) {
    Matrix t(d, d);
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i) t(i, 0) = inv_sqrt_d;
    for (int j = 2; j <= d; ++j) {
        const double off = -1.0 / std::sqrt(static_cast<double>(j) * (j - 1));
        for (int i = 0; i < j - 1; ++i) t(i, j - 1) = off;
        t(j - 1, j - 1) = std::sqrt((j - 1.0) / j);
    }
    return t;
}

inline SpectralFactor spectral_factor(int d, double r) {
    if (d < 2)
        throw std::domain_error("spectral_factor: d must be >= 2");
    if (r < min_equicorrelation(d) || r > 1.0)
        throw std::domain_error(
            "spectral_factor: r outside [-1/(d-1), 1], Sigma_d not positive semidefinite");

    SpectralFactor sf;
    sf.dim = d;
    sf.r = r;
    sf.eigenvalues.assign(static_cast<std::size_t>(d), 1.0 - r);
    sf.eigenvalues[0] = 1.0 + (d - 1) * r;

    sf.a = equicorrelation_basis(d);
    for (int j = 0; j < d; ++j) {
        const double s = std::sqrt(std::max(0.0, sf.eigenvalues[static_cast<std::size_t>(j)]));
        for (int i = 0; i < d; ++i) sf.a(i, j) *= s;
    }
    return sf;
}

// ---------------------------------------------------------------------------
// Rank matrix for the Bernstein copula
// ---------------------------------------------------------------------------

struct RankMatrix {
    int n_obs = 0;
    int dim = 0;
    std::vector<int> r; // row-major, values in 1..n_obs

    int operator()(int i, int j) const { return r[static_cast<std::size_t>(i) * dim + j]; }
};

// Columnwise ranks in 1..n; ties broken by first occurrence (stable).
inline RankMatrix ranks_from_data(const Matrix& data) {
    const int n = data.rows();
    const int d = data.cols();
    if (n < 2)
        throw std::domain_error("ranks_from_data: need at least 2 rows");
    RankMatrix rm;
    rm.n_obs = n;
    rm.dim = d;
    rm.r.assign(static_cast<std::size_t>(n) * d, 0);
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int j = 0; j < d; ++j) {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return data(a, j) < data(b, j); });
        for (int k = 0; k < n; ++k)
            rm.r[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]) * d + j] = k + 1;
    }
    return rm;
}

// ---------------------------------------------------------------------------
// Copula specifications
// ---------------------------------------------------------------------------

struct Independence {
    int dim;
    explicit Independence(int d) : dim(d) {
        if (d < 2) throw std::domain_error("Independence: d must be >= 2");
    }
};

struct Comonotone {
    int dim;
    explicit Comonotone(int d) : dim(d) {
        if (d < 2) throw std::domain_error("Comonotone: d must be >= 2");
    }
};

struct Countermonotone {
    int dim = 2; // lower Frechet bound exists only in two dimensions
};

class GaussianEqui {
  public:
    GaussianEqui(int d, double r) : factor_(spectral_factor(d, r)) {}

    int dim() const { return factor_.dim; }
    double r() const { return factor_.r; }
    const SpectralFactor& factor() const { return factor_; }

  private:
    SpectralFactor factor_;
};

class BernsteinRanks {
  public:
    explicit BernsteinRanks(RankMatrix ranks) : ranks_(std::move(ranks)) {
        if (ranks_.dim < 2)
            throw std::domain_error("BernsteinRanks: d must be >= 2");
        // each column must be a permutation of 1..n
        std::vector<char> seen(static_cast<std::size_t>(ranks_.n_obs));
        for (int j = 0; j < ranks_.dim; ++j) {
            std::fill(seen.begin(), seen.end(), 0);
            for (int i = 0; i < ranks_.n_obs; ++i) {
                const int v = ranks_(i, j);
                if (v < 1 || v > ranks_.n_obs || seen[static_cast<std::size_t>(v - 1)])
                    throw std::domain_error("BernsteinRanks: column is not a permutation of 1..n");
                seen[static_cast<std::size_t>(v - 1)] = 1;
            }
        }
    }

    int dim() const { return ranks_.dim; }
    int n_obs() const { return ranks_.n_obs; }
    const RankMatrix& ranks() const { return ranks_; }

  private:
    RankMatrix ranks_;
};

using CopulaSpec =
    std::variant<Independence, Comonotone, Countermonotone, GaussianEqui, BernsteinRanks>;

inline int dim(const CopulaSpec& spec) {
    return std::visit(
        [](const auto& s) -> int {
            if constexpr (requires { s.dim(); })
                return s.dim();
            else
                return s.dim;
        },
        spec);
}

// Gaussian copula with the most negative admissible common correlation
// r = -1/(d-1). Sigma_d is singular there; for d = 2 this is the
// countermonotonicity copula.
inline CopulaSpec minimal_correlation_gaussian(int d) {
    return GaussianEqui(d, min_equicorrelation(d));
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace detail {

// Gamma(k) variate for integer k >= 1 as a sum of unit exponentials.
// Fixed draw count (k uniforms), which keeps streams reproducible.
inline double gamma_int(Rng& rng, int k) {
    double acc = 0.0;
    for (int i = 0; i < k; ++i) acc -= std::log1p(-rng.uniform());
    return acc;
}

// Beta(a, b) with integer shapes via the gamma ratio.
inline double beta_int(Rng& rng, int a, int b) {
    const double x = gamma_int(rng, a);
    const double y = gamma_int(rng, b);
    return x / (x + y);
}

} // namespace detail

inline void sample(const CopulaSpec& spec, Rng& rng, std::span<double> out);

namespace detail {

struct SampleVisitor {
    Rng& rng;
    std::span<double> out;

    void operator()(const Independence& s) const {
        for (int i = 0; i < s.dim; ++i) out[static_cast<std::size_t>(i)] = rng.uniform();
    }

    void operator()(const Comonotone& s) const {
        const double u = rng.uniform();
        for (int i = 0; i < s.dim; ++i) out[static_cast<std::size_t>(i)] = u;
    }

    void operator()(const Countermonotone&) const {
        const double u = rng.uniform();
        out[0] = u;
        out[1] = 1.0 - u;
    }

    void operator()(const GaussianEqui& s) const {
        const int d = s.dim();
        const Matrix& a = s.factor().a;
        std::vector<double> y(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            double u = rng.uniform();
            if (u <= 0.0) u = 0x1.0p-53;
            y[static_cast<std::size_t>(i)] = norm_quantile(u);
        }
        for (int i = 0; i < d; ++i) {
            double x = 0.0;
            for (int j = 0; j < d; ++j) x += a(i, j) * y[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = norm_cdf(x);
        }
    }

    void operator()(const BernsteinRanks& s) const {
        const int n = s.n_obs();
        const int d = s.dim();
        // observation index, uniform over 1..n
        int j = static_cast<int>(rng.uniform() * n);
        if (j >= n) j = n - 1;
        for (int i = 0; i < d; ++i) {
            const int rank = s.ranks()(j, i);
            out[static_cast<std::size_t>(i)] = beta_int(rng, rank, n + 1 - rank);
        }
    }
};

} // namespace detail

// Draw one copula sample into out (size must equal dim(spec)). Every
// variant has exactly uniform margins.
inline void sample(const CopulaSpec& spec, Rng& rng, std::span<double> out) {
    if (static_cast<int>(out.size()) != dim(spec))
        throw std::invalid_argument("sample: output span size != copula dimension");
    std::visit(detail::SampleVisitor{rng, out}, spec);
}

inline std::vector<double> sample(const CopulaSpec& spec, Rng& rng) {
    std::vector<double> w(static_cast<std::size_t>(dim(spec)));
    sample(spec, rng, w);
    return w;
}

} // namespace patchvar
