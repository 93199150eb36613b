#pragma once

// Seeded Monte-Carlo simulation of aggregated losses with empirical VaR
// and Expected Shortfall estimators.
//
// Each path draws from its own sub-stream derived from (master_seed, path
// index), so the sorted sample is bitwise independent of the shard count
// and shards can run on separate threads without coordination.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "patchvar/csv.hpp"
#include "patchvar/patchwork.hpp"

namespace patchvar {

inline constexpr std::int64_t max_simulation_paths = 100'000'000;

struct SimulationConfig {
    RiskModel model;
    std::int64_t n_paths = 0;
    std::uint64_t master_seed = 0;
    int shards = 1;
};

struct EmpiricalSample {
    std::vector<double> values; // sorted ascending
    std::uint64_t master_seed = 0;
    std::string config_digest;
};

namespace detail {

inline void describe_marginal(std::ostringstream& os, const Marginal& m) {
    os << m.name() << ';';
}

inline void describe_copula_spec(std::ostringstream& os, const CopulaSpec& spec) {
    if (const auto* s = std::get_if<Independence>(&spec))
        os << "independence(" << s->dim << ')';
    else if (const auto* s = std::get_if<Comonotone>(&spec))
        os << "comonotone(" << s->dim << ')';
    else if (std::get_if<Countermonotone>(&spec))
        os << "countermonotone(2)";
    else if (const auto* s = std::get_if<GaussianEqui>(&spec))
        os << "gaussian_equi(" << s->dim() << ',' << s->r() << ')';
    else if (const auto* s = std::get_if<BernsteinRanks>(&spec)) {
        os << "bernstein(" << s->n_obs() << 'x' << s->dim() << ':';
        for (int v : s->ranks().r) os << v << ',';
        os << ')';
    }
}

inline std::string describe_config(const SimulationConfig& config) {
    std::ostringstream os;
    os << "n=" << config.n_paths << ";seed=" << config.master_seed << ";margins=";
    for (const auto& m : config.model.margins) describe_marginal(os, m);
    os << ";copula=";
    if (const auto* spec = std::get_if<CopulaSpec>(&config.model.copula)) {
        describe_copula_spec(os, *spec);
    } else {
        const auto& pw = std::get<PatchworkCopula>(config.model.copula);
        os << "patchwork(beta=" << pw.beta << ";body=";
        describe_copula_spec(os, pw.body);
        os << ";tail=";
        describe_copula_spec(os, pw.tail);
        os << ')';
    }
    return os.str();
}

} // namespace detail

// n_paths draws of S = sum_i Q_i(W_i), sorted ascending. Deterministic for
// a fixed master_seed and invariant to the shard count.
inline EmpiricalSample simulate(const SimulationConfig& config) {
    if (config.n_paths < 1)
        throw std::invalid_argument("simulate: n_paths must be >= 1");
    if (config.n_paths > max_simulation_paths)
        throw std::invalid_argument("simulate: n_paths exceeds the configured cap");
    if (config.shards < 1)
        throw std::invalid_argument("simulate: shards must be >= 1");

    const std::int64_t n = config.n_paths;
    std::vector<double> values(static_cast<std::size_t>(n));

    auto run_range = [&](std::int64_t begin, std::int64_t end) {
        const int d = config.model.dimension();
        std::vector<double> x(static_cast<std::size_t>(d));
        std::vector<double> w(static_cast<std::size_t>(d));
        for (std::int64_t i = begin; i < end; ++i) {
            Rng rng = derived_stream(config.master_seed, static_cast<std::uint64_t>(i));
            sample_risks(config.model, rng, x, w);
            values[static_cast<std::size_t>(i)] = aggregate(x);
        }
    };

    const int shards = static_cast<int>(std::min<std::int64_t>(config.shards, n));
    if (shards <= 1) {
        run_range(0, n);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(shards));
        for (int k = 0; k < shards; ++k) {
            const std::int64_t begin = n * k / shards;
            const std::int64_t end = n * (k + 1) / shards;
            workers.emplace_back(run_range, begin, end);
        }
        for (auto& t : workers) t.join();
    }

    std::sort(values.begin(), values.end());
    EmpiricalSample s;
    s.values = std::move(values);
    s.master_seed = config.master_seed;
    s.config_digest = fnv1a64_hex(detail::describe_config(config));
    return s;
}

// Order-statistic VaR estimate: the ceil((1-alpha) n)-th smallest value
// (the conservative convention).
inline double empirical_var(const EmpiricalSample& s, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("empirical_var: alpha must be in (0,1)");
    if (s.values.empty())
        throw std::domain_error("empirical_var: empty sample");
    const auto n = static_cast<double>(s.values.size());
    auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * n));
    if (k < 1) k = 1;
    if (k > s.values.size()) k = s.values.size();
    return s.values[k - 1];
}

// Mean of the sample points strictly above the VaR estimate.
inline double empirical_es(const EmpiricalSample& s, double alpha) {
    const double var = empirical_var(s, alpha);
    auto it = std::upper_bound(s.values.begin(), s.values.end(), var);
    if (it == s.values.end())
        throw std::domain_error("empirical_es: no observations above VaR (degenerate tail)");
    double sum = 0.0;
    std::size_t count = 0;
    for (; it != s.values.end(); ++it) {
        sum += *it;
        ++count;
    }
    return sum / static_cast<double>(count);
}

// Fraction of the sample <= each grid point.
inline std::vector<double> empirical_cdf_points(const EmpiricalSample& s,
                                                const std::vector<double>& grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    const double n = static_cast<double>(s.values.size());
    for (double g : grid) {
        const auto it = std::upper_bound(s.values.begin(), s.values.end(), g);
        out.push_back(static_cast<double>(it - s.values.begin()) / n);
    }
    return out;
}

// One sorted value per line, header carries the seed and config digest.
inline std::string sample_to_csv(const EmpiricalSample& s) {
    std::string out = "# seed=" + std::to_string(s.master_seed) + " config=" + s.config_digest + "\n";
    out += "s\n";
    for (double v : s.values) {
        out += format_double(v);
        out += '\n';
    }
    return out;
}

inline std::string cdf_points_to_csv(const std::vector<double>& grid,
                                     const std::vector<double>& probs) {
    std::string out = "x,p\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        out += format_double(grid[i]) + "," + format_double(probs[i]) + "\n";
    return out;
}

} // namespace patchvar
