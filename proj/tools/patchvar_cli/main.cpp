// patchvar command line front end.
//
// Subcommands:
//   analytic   closed-form cdf/density curves and a VaR summary row
//   optimize   VaR-maximizing tail mass for an example family
//   simulate   seeded Monte-Carlo run from a model spec file
//   casestudy  full Nat-Cat pipeline: tables 5-8 plus tail cdf curves
//
// Every command writes its outputs as CSV plus a JSON manifest holding the
// full parameter set, master seed, tool version and output digests, so a
// run can be reproduced bitwise from the manifest alone.
//
// Exit codes: 0 success, 1 runtime/data error, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "patchvar/analytic2d.hpp"
#include "patchvar/casestudy.hpp"
#include "patchvar/csv.hpp"
#include "patchvar/mc_engine.hpp"
#include "patchvar/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace patchvar;

namespace {

std::string default_out_dir() {
    if (const char* env = std::getenv("PATCHVAR_OUTDIR"); env && *env) return env;
    return ".";
}

class OutputWriter {
  public:
    explicit OutputWriter(std::string dir) : dir_(std::move(dir)) {
        fs::create_directories(dir_);
    }

    std::string write(const std::string& name, const std::string& content) {
        const std::string path = (fs::path(dir_) / name).string();
        write_text_file(path, content);
        outputs_.push_back({name, fnv1a64_hex(content)});
        return path;
    }

    void write_manifest(const std::string& command, const json& parameters,
                        std::uint64_t master_seed) {
        json m;
        m["command"] = command;
        m["tool_version"] = version;
        m["parameters"] = parameters;
        m["master_seed"] = master_seed;
        json outs = json::array();
        for (const auto& [name, digest] : outputs_) {
            outs.push_back({{"file", name}, {"fnv1a64", digest}});
        }
        m["outputs"] = outs;
        const std::string path = (fs::path(dir_) / (command + "_manifest.json")).string();
        write_text_file(path, m.dump(2) + "\n");
    }

  private:
    std::string dir_;
    std::vector<std::pair<std::string, std::string>> outputs_;
};

ExampleFamily parse_family(const std::string& s) {
    if (s == "exp" || s == "exponential") return ExampleFamily::exponential;
    if (s == "uniform") return ExampleFamily::uniform;
    if (s == "pareto") return ExampleFamily::pareto;
    throw CLI::ValidationError("--family", "must be one of exp|uniform|pareto");
}

std::string summary_csv(ExampleFamily fam, const VarSummary& s) {
    std::string out = "family,alpha,beta,var_s,var_t,wvar,svar\n";
    out += family_name(fam) + "," + format_double(s.alpha) + "," + format_double(s.beta) + "," +
           format_double(s.var_s) + "," + format_double(s.var_t) + "," + format_double(s.wvar) +
           "," + format_double(s.svar) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// analytic
// ---------------------------------------------------------------------------

int run_analytic(const std::string& family, double beta, double alpha, int points,
                 const std::string& out_dir) {
    const ExampleFamily fam = parse_family(family);
    OutputWriter out(out_dir);

    const double x_max = fam == ExampleFamily::uniform
                             ? 2.0
                             : 1.05 * worst_case_quantile(fam, beta, std::max(0.999, 1.0 - alpha));
    std::string curves = "x,f_s,F_s,G,H\n";
    for (int i = 0; i <= points; ++i) {
        const double x = x_max * i / points;
        curves += format_double(x) + "," + format_double(sum_pdf(fam, beta, x)) + "," +
                  format_double(sum_cdf(fam, beta, x)) + "," +
                  format_double(independent_sum_cdf(fam, x)) + "," +
                  format_double(worst_case_cdf(fam, beta, x)) + "\n";
    }
    out.write("analytic_" + family_name(fam) + "_curves.csv", curves);

    const VarSummary s = var_summary(fam, alpha, beta);
    const std::string summary = summary_csv(fam, s);
    out.write("analytic_" + family_name(fam) + "_summary.csv", summary);
    std::cout << summary;

    out.write_manifest("analytic",
                       {{"family", family_name(fam)},
                        {"beta", beta},
                        {"alpha", alpha},
                        {"points", points},
                        {"out", out_dir}},
                       0);
    return 0;
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

int run_optimize(const std::string& family, double alpha, const std::string& out_dir) {
    const ExampleFamily fam = parse_family(family);
    OutputWriter out(out_dir);

    std::string sweep = "beta,q_s\n";
    const double step = alpha / 50.0;
    for (double b = alpha; b <= 4.0 * alpha + 0.5 * step; b += step)
        sweep += format_double(b) + "," + format_double(sum_quantile(fam, b, 1.0 - alpha)) + "\n";
    out.write("optimize_" + family_name(fam) + "_sweep.csv", sweep);

    const auto opt = optimize_beta(fam, alpha);
    std::string result = "family,alpha,beta_star,var_star\n";
    result += family_name(fam) + "," + format_double(alpha) + "," + format_double(opt.beta_star) +
              "," + format_double(opt.var_star) + "\n";
    out.write("optimize_" + family_name(fam) + "_result.csv", result);
    std::cout << result;

    out.write_manifest("optimize",
                       {{"family", family_name(fam)}, {"alpha", alpha}, {"out", out_dir}}, 0);
    return 0;
}

// ---------------------------------------------------------------------------
// simulate: flat key-value model spec files
// ---------------------------------------------------------------------------

std::vector<std::string> tokens_of(const std::string& value) {
    std::istringstream in(value);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

Marginal parse_margin(const std::vector<std::string>& toks, const std::string& where) {
    if (toks.empty()) throw std::runtime_error("empty margin at " + where);
    if (toks[0] == "exponential") return Marginal::exponential_unit();
    if (toks[0] == "uniform") return Marginal::uniform_unit();
    if (toks[0] == "pareto") return Marginal::pareto_unit();
    if (toks[0] == "lognormal") {
        if (toks.size() != 3)
            throw std::runtime_error("lognormal needs 'lognormal <mu> <sigma>' at " + where);
        return Marginal::lognormal(parse_double(toks[1], where), parse_double(toks[2], where));
    }
    throw std::runtime_error("unknown margin '" + toks[0] + "' at " + where);
}

CopulaSpec parse_copula_spec(const std::vector<std::string>& toks, int d,
                             const std::string& where) {
    if (toks.empty()) throw std::runtime_error("empty copula at " + where);
    const std::string& kind = toks[0];
    if (kind == "independence") return Independence(d);
    if (kind == "comonotone") return Comonotone(d);
    if (kind == "countermonotone") {
        if (d != 2) throw std::runtime_error("countermonotone requires dim = 2 at " + where);
        return Countermonotone{};
    }
    if (kind == "mincorr") return minimal_correlation_gaussian(d);
    if (kind == "gaussian") {
        if (toks.size() != 2) throw std::runtime_error("gaussian needs 'gaussian <r>' at " + where);
        return GaussianEqui(d, parse_double(toks[1], where));
    }
    if (kind == "bernstein") {
        if (toks.size() != 2)
            throw std::runtime_error("bernstein needs 'bernstein <panel.csv>' at " + where);
        const auto panel = load_panel(toks[1]);
        if (panel.n_areas() != d)
            throw std::runtime_error("bernstein panel has " + std::to_string(panel.n_areas()) +
                                     " columns, model dim is " + std::to_string(d) + " at " + where);
        return BernsteinRanks(ranks_from_data(panel.losses));
    }
    throw std::runtime_error("unknown copula '" + kind + "' at " + where);
}

struct ParsedModel {
    RiskModel model;
    json description;
};

ParsedModel parse_model_file(const std::string& path) {
    const auto lines = read_lines(path);
    std::map<std::string, std::pair<std::string, int>> kv; // key -> (value, line no)
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = lines[i];
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = true;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
            if (blank) continue;
            throw std::runtime_error(path + ":" + std::to_string(i + 1) +
                                     ": expected 'key = value'");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = {trim(line.substr(eq + 1)), static_cast<int>(i + 1)};
    }

    auto require = [&](const std::string& key) -> std::pair<std::string, std::string> {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw std::runtime_error(path + ": missing required key '" + key + "'");
        return {it->second.first, path + ":" + std::to_string(it->second.second)};
    };
    auto lookup = [&](const std::string& key) -> std::optional<std::pair<std::string, std::string>> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return std::make_pair(it->second.first, path + ":" + std::to_string(it->second.second));
    };

    const auto [dim_str, dim_where] = require("dim");
    const int d = static_cast<int>(parse_double(dim_str, dim_where));
    if (d < 2) throw std::runtime_error(dim_where + ": dim must be >= 2");

    std::vector<Marginal> margins;
    if (const auto all = lookup("margin.all")) {
        const auto m = parse_margin(tokens_of(all->first), all->second);
        margins.assign(static_cast<std::size_t>(d), m);
    } else {
        for (int i = 1; i <= d; ++i) {
            const auto [v, where] = require("margin." + std::to_string(i));
            margins.push_back(parse_margin(tokens_of(v), where));
        }
    }

    const auto [cop, cop_where] = require("copula");
    CopulaModel copula = [&]() -> CopulaModel {
        if (tokens_of(cop).at(0) == "patchwork") {
            const auto [beta_str, beta_where] = require("beta");
            const auto [body, body_where] = require("body");
            const auto [tail, tail_where] = require("tail");
            return PatchworkCopula(parse_copula_spec(tokens_of(body), d, body_where),
                                   parse_copula_spec(tokens_of(tail), d, tail_where),
                                   parse_double(beta_str, beta_where));
        }
        return parse_copula_spec(tokens_of(cop), d, cop_where);
    }();

    json desc;
    for (const auto& [k, v] : kv) desc[k] = v.first;
    return {RiskModel(std::move(margins), std::move(copula)), desc};
}

int run_simulate(const std::string& model_path, std::int64_t n, std::uint64_t seed, double alpha,
                 int shards, const std::string& out_dir) {
    auto parsed = parse_model_file(model_path);
    OutputWriter out(out_dir);

    const SimulationConfig config{std::move(parsed.model), n, seed, shards};
    const EmpiricalSample sample = simulate(config);

    const double var = empirical_var(sample, alpha);
    const double es = empirical_es(sample, alpha);
    std::string report = "alpha,n_paths,seed,var,es,estimator\n";
    report += format_double(alpha) + "," + std::to_string(n) + "," + std::to_string(seed) + "," +
              format_double(var) + "," + format_double(es) +
              ",order-statistic ceil((1-alpha)n)\n";
    out.write("simulate_report.csv", report);
    out.write("simulate_sample.csv", sample_to_csv(sample));
    std::cout << report;

    out.write_manifest("simulate",
                       {{"model_file", model_path},
                        {"model", parsed.description},
                        {"n", n},
                        {"alpha", alpha},
                        {"shards", shards},
                        {"out", out_dir}},
                       seed);
    return 0;
}

// ---------------------------------------------------------------------------
// casestudy
// ---------------------------------------------------------------------------

int run_casestudy(const std::string& data_path, std::int64_t n, std::uint64_t seed, double alpha,
                  int shards, bool scr, const std::string& out_dir) {
    const LossPanel panel = load_panel(data_path);
    OutputWriter out(out_dir);

    out.write("table5.csv", table5_csv(panel));
    out.write("table6.csv", correlation_csv(panel, false));
    out.write("table7.csv", correlation_csv(panel, true));

    auto specs = table8_scenarios(alpha, n, seed);
    for (auto& s : specs) s.shards = shards;
    const auto results = scenario_grid(panel, specs);
    const std::string t8 = table8_csv(results);
    out.write("table8.csv", t8);
    std::cout << t8;

    // tail grid between the smallest and largest scenario VaR estimates
    double lo = results.front().report.var_s, hi = lo;
    for (const auto& r : results) {
        lo = std::min(lo, r.report.var_s);
        hi = std::max(hi, r.report.var_s);
    }
    std::vector<double> grid;
    const int grid_n = 200;
    for (int i = 0; i <= grid_n; ++i)
        grid.push_back(0.5 * lo + (1.3 * hi - 0.5 * lo) * i / grid_n);
    out.write("figure15_tail_cdf.csv", tail_cdf_csv(results, grid));

    if (scr) {
        std::string curve = "sigma,rho,three_sigma\n";
        for (int i = 1; i <= 60; ++i) {
            const double s = 0.005 * i;
            curve += format_double(s) + "," + format_double(scr_volume_factor(s, alpha)) + "," +
                     format_double(3.0 * s) + "\n";
        }
        out.write("scr_curve.csv", curve);
    }

    out.write_manifest("casestudy",
                       {{"data", data_path},
                        {"n", n},
                        {"alpha", alpha},
                        {"shards", shards},
                        {"scr_curve", scr},
                        {"out", out_dir}},
                       seed);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"patchwork-copula VaR scenario toolkit"};
    app.require_subcommand(1);

    std::string family, out_dir = default_out_dir();
    double beta = 0.005, alpha = 0.005;
    int points = 500, shards = 4;
    std::int64_t n = 100000;
    std::uint64_t seed = 20210505;
    std::string model_path, data_path;
    bool scr = false;

    auto* analytic = app.add_subcommand("analytic", "closed-form curves and VaR summary");
    analytic->add_option("--family", family, "exp|uniform|pareto")->required();
    analytic->add_option("--beta", beta, "tail mass in (0,1)")->check(CLI::Range(1e-12, 1.0));
    analytic->add_option("--alpha", alpha, "tail level")->check(CLI::Range(1e-12, 1.0));
    analytic->add_option("--points", points, "curve resolution")->check(CLI::PositiveNumber);
    analytic->add_option("--out", out_dir, "output directory");

    auto* optimize = app.add_subcommand("optimize", "VaR-maximizing tail mass");
    optimize->add_option("--family", family, "exp|uniform|pareto")->required();
    optimize->add_option("--alpha", alpha, "tail level")->check(CLI::Range(1e-12, 0.5));
    optimize->add_option("--out", out_dir, "output directory");

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo run from a model spec file");
    simulate_cmd->add_option("--model", model_path, "model spec file")->required();
    simulate_cmd->add_option("--n", n, "number of paths")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", seed, "master seed");
    simulate_cmd->add_option("--alpha", alpha, "tail level")->check(CLI::Range(1e-12, 1.0));
    simulate_cmd->add_option("--shards", shards, "parallel shards")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--out", out_dir, "output directory");

    auto* casestudy = app.add_subcommand("casestudy", "Nat-Cat tables and scenario survey");
    casestudy->add_option("--data", data_path, "loss panel csv")->required();
    casestudy->add_option("--n", n, "paths per scenario")->check(CLI::PositiveNumber);
    casestudy->add_option("--seed", seed, "master seed");
    casestudy->add_option("--alpha", alpha, "tail level")->check(CLI::Range(1e-12, 1.0));
    casestudy->add_option("--shards", shards, "parallel shards")->check(CLI::PositiveNumber);
    casestudy->add_flag("--scr-curve", scr, "also emit the SCR volume-factor curve");
    casestudy->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(analytic)) return run_analytic(family, beta, alpha, points, out_dir);
        if (app.got_subcommand(optimize)) return run_optimize(family, alpha, out_dir);
        if (app.got_subcommand(simulate_cmd))
            return run_simulate(model_path, n, seed, alpha, shards, out_dir);
        if (app.got_subcommand(casestudy))
            return run_casestudy(data_path, n, seed, alpha, shards, scr, out_dir);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
