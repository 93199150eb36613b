#pragma once

// The 19-area / 20-year Nat-Cat case study: panel ingestion, lognormal
// margin fits, raw/log correlation tables, and the Table-8 style scenario
// survey with a rank-based Bernstein body copula.

#include <array>
#include <charconv>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "patchvar/copulas.hpp"
#include "patchvar/csv.hpp"
#include "patchvar/matrix.hpp"
#include "patchvar/mc_engine.hpp"

namespace patchvar {

struct LossPanel {
    std::vector<std::string> years; // row labels
    std::vector<std::string> areas; // column labels
    Matrix losses;                  // n_years x n_areas, strictly positive

    int n_years() const { return losses.rows(); }
    int n_areas() const { return losses.cols(); }
};

inline LossPanel load_panel(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.size() < 3)
        throw std::runtime_error("load_panel: need a header row and at least 2 data rows in " + path);
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 3)
        throw std::runtime_error("load_panel: need at least 2 area columns in " + path);

    LossPanel panel;
    panel.areas.assign(header.begin() + 1, header.end());
    const std::size_t n_cols = header.size();
    const int d = static_cast<int>(n_cols - 1);
    const int n = static_cast<int>(lines.size() - 1);
    panel.losses = Matrix(n, d);
    for (int i = 0; i < n; ++i) {
        const auto fields = split_csv_line(lines[static_cast<std::size_t>(i) + 1]);
        if (fields.size() != n_cols)
            throw std::runtime_error("load_panel: row " + std::to_string(i + 1) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(n_cols));
        panel.years.push_back(fields[0]);
        for (int j = 0; j < d; ++j) {
            const std::string where =
                "row " + std::to_string(i + 1) + ", column '" + panel.areas[static_cast<std::size_t>(j)] + "'";
            const double v = parse_double(fields[static_cast<std::size_t>(j) + 1], where);
            if (!(v > 0.0))
                throw std::runtime_error("load_panel: non-positive loss at " + where);
            panel.losses(i, j) = v;
        }
    }
    return panel;
}

inline std::vector<Marginal> fit_margins(const LossPanel& panel) {
    std::vector<Marginal> margins;
    margins.reserve(static_cast<std::size_t>(panel.n_areas()));
    std::vector<double> column(static_cast<std::size_t>(panel.n_years()));
    for (int j = 0; j < panel.n_areas(); ++j) {
        for (int i = 0; i < panel.n_years(); ++i)
            column[static_cast<std::size_t>(i)] = panel.losses(i, j);
        margins.push_back(fit_lognormal(column));
    }
    return margins;
}

// Pearson product-moment correlations of the raw or log-transformed columns.
inline Matrix correlation_matrix(const LossPanel& panel, bool on_logs) {
    const int n = panel.n_years();
    const int d = panel.n_areas();
    Matrix x(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
            x(i, j) = on_logs ? std::log(panel.losses(i, j)) : panel.losses(i, j);

    std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < n; ++i) mean[static_cast<std::size_t>(j)] += x(i, j);
        mean[static_cast<std::size_t>(j)] /= n;
    }
    std::vector<double> ss(static_cast<std::size_t>(d), 0.0);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < n; ++i) {
            const double c = x(i, j) - mean[static_cast<std::size_t>(j)];
            ss[static_cast<std::size_t>(j)] += c * c;
        }
        if (!(ss[static_cast<std::size_t>(j)] > 0.0))
            throw std::domain_error("correlation_matrix: zero-variance column " +
                                    panel.areas[static_cast<std::size_t>(j)]);
    }
    Matrix corr(d, d);
    for (int j = 0; j < d; ++j) {
        corr(j, j) = 1.0;
        for (int k = j + 1; k < d; ++k) {
            double cov = 0.0;
            for (int i = 0; i < n; ++i)
                cov += (x(i, j) - mean[static_cast<std::size_t>(j)]) *
                       (x(i, k) - mean[static_cast<std::size_t>(k)]);
            const double r = cov / std::sqrt(ss[static_cast<std::size_t>(j)] * ss[static_cast<std::size_t>(k)]);
            corr(j, k) = r;
            corr(k, j) = r;
        }
    }
    return corr;
}

// ---------------------------------------------------------------------------
// Scenario survey
// ---------------------------------------------------------------------------

enum class TailKind { min_corr_gauss, upper_frechet, independence, none };

inline std::string tail_name(TailKind t) {
    switch (t) {
    case TailKind::min_corr_gauss: return "min_corr_gauss";
    case TailKind::upper_frechet: return "upper_frechet";
    case TailKind::independence: return "independence";
    case TailKind::none: return "none";
    }
    return "?";
}

inline std::optional<TailKind> parse_tail_kind(const std::string& s) {
    if (s == "min_corr_gauss" || s == "mincorr") return TailKind::min_corr_gauss;
    if (s == "upper_frechet" || s == "frechet" || s == "comonotone") return TailKind::upper_frechet;
    if (s == "independence" || s == "independent") return TailKind::independence;
    if (s == "none") return TailKind::none;
    return std::nullopt;
}

struct ScenarioSpec {
    double p = 1.0; // body probability; beta = 1 - p
    TailKind tail_kind = TailKind::none;
    double alpha = 0.005;
    std::int64_t n_paths = 100'000;
    std::uint64_t master_seed = 0;
    int shards = 4;
};

struct VarReport {
    double alpha = 0.0;
    double p = 1.0;
    double beta = 0.0; // = 1 - p, kept explicit to avoid p/beta confusion
    std::string tail;
    std::int64_t n_paths = 0;
    std::uint64_t master_seed = 0;
    double var_s = 0.0;
    double es_s = 0.0;
    double svar = 0.0; // sum of the margins' individual VaR_alpha values
    std::string var_estimator = "order-statistic ceil((1-alpha)n)";
};

struct ScenarioResult {
    VarReport report;
    EmpiricalSample sample;
};

inline ScenarioResult run_scenario(const LossPanel& panel, const ScenarioSpec& spec) {
    if (!(spec.p >= 0.0 && spec.p <= 1.0))
        throw std::domain_error("run_scenario: p must be in [0,1]");
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
        throw std::domain_error("run_scenario: alpha must be in (0,1)");

    const auto margins = fit_margins(panel);
    const int d = panel.n_areas();
    const double beta = 1.0 - spec.p;
    CopulaSpec body = BernsteinRanks(ranks_from_data(panel.losses));

    CopulaModel model_copula = [&]() -> CopulaModel {
        if (spec.tail_kind == TailKind::none) return CopulaSpec(std::move(body));
        CopulaSpec tail = [&]() -> CopulaSpec {
            switch (spec.tail_kind) {
            case TailKind::min_corr_gauss: return minimal_correlation_gaussian(d);
            case TailKind::upper_frechet: return Comonotone(d);
            case TailKind::independence: return Independence(d);
            case TailKind::none: break;
            }
            throw std::invalid_argument("run_scenario: bad tail kind");
        }();
        return PatchworkCopula(std::move(body), std::move(tail), beta);
    }();

    SimulationConfig config{RiskModel(margins, std::move(model_copula)), spec.n_paths,
                            spec.master_seed, spec.shards};
    EmpiricalSample sample = simulate(config);

    VarReport rep;
    rep.alpha = spec.alpha;
    rep.p = spec.p;
    rep.beta = beta;
    rep.tail = tail_name(spec.tail_kind);
    rep.n_paths = spec.n_paths;
    rep.master_seed = spec.master_seed;
    rep.var_s = empirical_var(sample, spec.alpha);
    rep.es_s = empirical_es(sample, spec.alpha);
    rep.svar = 0.0;
    for (const auto& m : margins) rep.svar += m.quantile(1.0 - spec.alpha);
    return {std::move(rep), std::move(sample)};
}

inline std::vector<ScenarioResult> scenario_grid(const LossPanel& panel,
                                                 const std::vector<ScenarioSpec>& specs) {
    std::vector<ScenarioResult> out;
    out.reserve(specs.size());
    for (const auto& spec : specs) out.push_back(run_scenario(panel, spec));
    return out;
}

// The five standard survey configurations, in the usual column order. All
// five share the master seed (common random numbers), so the ordering
// reflects the tail construction rather than sampling noise.
inline std::vector<ScenarioSpec> table8_scenarios(double alpha, std::int64_t n_paths,
                                                  std::uint64_t master_seed) {
    auto mk = [&](double p, TailKind tail) {
        ScenarioSpec s;
        s.p = p;
        s.tail_kind = tail;
        s.alpha = alpha;
        s.n_paths = n_paths;
        s.master_seed = master_seed;
        return s;
    };
    return {mk(0.990, TailKind::min_corr_gauss), mk(0.994, TailKind::min_corr_gauss),
            mk(0.994, TailKind::upper_frechet), mk(0.994, TailKind::independence),
            mk(1.0, TailKind::none)};
}

// ---------------------------------------------------------------------------
// Table emission
// ---------------------------------------------------------------------------

inline std::string format_fixed(double v, int digits) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
    if (res.ec != std::errc())
        throw std::runtime_error("format_fixed: to_chars failed");
    return std::string(buf, res.ptr);
}

inline std::string table5_csv(const LossPanel& panel) {
    const auto margins = fit_margins(panel);
    std::string out = "parameter";
    for (const auto& a : panel.areas) out += "," + a;
    out += "\nmu";
    for (const auto& m : margins) out += "," + format_fixed(m.mu(), 3);
    out += "\nsigma";
    for (const auto& m : margins) out += "," + format_fixed(m.sigma(), 3);
    out += "\n";
    return out;
}

inline std::string correlation_csv(const LossPanel& panel, bool on_logs) {
    const Matrix corr = correlation_matrix(panel, on_logs);
    std::string out = "area";
    for (const auto& a : panel.areas) out += "," + a;
    out += "\n";
    for (int i = 0; i < corr.rows(); ++i) {
        out += panel.areas[static_cast<std::size_t>(i)];
        for (int j = 0; j < corr.cols(); ++j) out += "," + format_fixed(corr(i, j), 2);
        out += "\n";
    }
    return out;
}

inline std::string table8_csv(const std::vector<ScenarioResult>& results) {
    std::string out = "p,beta,tail,alpha,n_paths,seed,var,es,svar\n";
    for (const auto& r : results) {
        const auto& rep = r.report;
        out += format_double(rep.p) + "," + format_double(rep.beta) + "," + rep.tail + "," +
               format_double(rep.alpha) + "," + std::to_string(rep.n_paths) + "," +
               std::to_string(rep.master_seed) + "," + format_double(rep.var_s) + "," +
               format_double(rep.es_s) + "," + format_double(rep.svar) + "\n";
    }
    return out;
}

// Tail cdf curves (one column per scenario) on a shared grid, as in the
// estimated-cdf plots.
inline std::string tail_cdf_csv(const std::vector<ScenarioResult>& results,
                                const std::vector<double>& grid) {
    std::string out = "x";
    for (std::size_t k = 0; k < results.size(); ++k)
        out += ",F" + std::to_string(k + 1) + "_p" + format_double(results[k].report.p) + "_" +
               results[k].report.tail;
    out += "\n";
    std::vector<std::vector<double>> cols;
    cols.reserve(results.size());
    for (const auto& r : results) cols.push_back(empirical_cdf_points(r.sample, grid));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out += format_double(grid[i]);
        for (const auto& c : cols) out += "," + format_double(c[i]);
        out += "\n";
    }
    return out;
}

} // namespace patchvar
