#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "patchvar/analytic2d.hpp"
#include "patchvar/mc_engine.hpp"
#include "test_helpers.hpp"

using namespace patchvar;
using Catch::Approx;

namespace {

RiskModel exponential_patchwork(double beta) {
    return RiskModel({Marginal::exponential_unit(), Marginal::exponential_unit()},
                     PatchworkCopula(Independence(2), Countermonotone{}, beta));
}

EmpiricalSample make_sample(std::vector<double> sorted) {
    EmpiricalSample s;
    s.values = std::move(sorted);
    return s;
}

} // namespace

TEST_CASE("simulation is deterministic and shard invariant", "[mc]") {
    SimulationConfig base{exponential_patchwork(0.1), 20000, 987654321ULL, 1};

    const auto s1 = simulate(base);
    const auto s2 = simulate(base);
    CHECK(s1.values == s2.values);
    CHECK(s1.config_digest == s2.config_digest);

    for (int shards : {4, 8}) {
        SimulationConfig c = base;
        c.shards = shards;
        const auto s = simulate(c);
        CHECK(s.values == s1.values);
    }

    SimulationConfig other = base;
    other.master_seed = 5;
    CHECK(simulate(other).values != s1.values);
}

TEST_CASE("simulate validates its configuration", "[mc]") {
    SimulationConfig c{exponential_patchwork(0.1), 0, 1, 1};
    CHECK_THROWS_AS(simulate(c), std::invalid_argument);
    c.n_paths = max_simulation_paths + 1;
    CHECK_THROWS_AS(simulate(c), std::invalid_argument);
    c.n_paths = 10;
    c.shards = 0;
    CHECK_THROWS_AS(simulate(c), std::invalid_argument);
}

TEST_CASE("comonotone uniform margins double to a uniform aggregate", "[mc]") {
    RiskModel model({Marginal::uniform_unit(), Marginal::uniform_unit()},
                    CopulaSpec(Comonotone(2)));
    const auto s = simulate({model, 20000, 11, 2});
    std::vector<double> halves;
    halves.reserve(s.values.size());
    for (double v : s.values) halves.push_back(0.5 * v);
    CHECK(testutil::ks_uniform(halves) < 1.95 / std::sqrt(static_cast<double>(s.values.size())));
}

TEST_CASE("simulated aggregate matches the analytic cdfs", "[mc][slow]") {
    // F_S assumes an independent tail block; the countermonotone tail
    // produces the worst-case cdf H instead.
    const int n = 100000;
    const double crit = 1.95 / std::sqrt(static_cast<double>(n));

    RiskModel indep_tail({Marginal::exponential_unit(), Marginal::exponential_unit()},
                         PatchworkCopula(Independence(2), Independence(2), 0.1));
    const auto s1 = simulate({indep_tail, n, 2024, 4});
    const double d1 = testutil::ks_statistic(
        s1.values, [](double x) { return sum_cdf(ExampleFamily::exponential, 0.1, x); });
    CHECK(d1 < crit);

    const auto s2 = simulate({exponential_patchwork(0.1), n, 2025, 4});
    const double d2 = testutil::ks_statistic(
        s2.values, [](double x) { return worst_case_cdf(ExampleFamily::exponential, 0.1, x); });
    CHECK(d2 < crit);
}

TEST_CASE("empirical VaR is consistent for the analytic exponential model", "[mc][slow]") {
    // At beta = alpha the density of S vanishes at the 0.995 quantile, so
    // the order statistic is dispersed in x even at large n; consistency is
    // asserted in probability space there. At beta = 0.1 the density is
    // healthy and the x-space band applies.
    const double alpha = 0.005;
    {
        RiskModel model({Marginal::exponential_unit(), Marginal::exponential_unit()},
                        PatchworkCopula(Independence(2), Independence(2), 0.005));
        for (std::uint64_t seed : {11ULL, 22ULL, 33ULL}) {
            const int n = 1000000;
            const auto s = simulate({model, n, seed, 8});
            const double level = sum_cdf(ExampleFamily::exponential, 0.005,
                                         empirical_var(s, alpha));
            const double sigma_u = std::sqrt(alpha * (1.0 - alpha) / n);
            CHECK(std::abs(level - 0.995) <= 5.0 * sigma_u);
        }
    }
    {
        RiskModel model({Marginal::exponential_unit(), Marginal::exponential_unit()},
                        PatchworkCopula(Independence(2), Independence(2), 0.1));
        const double exact = sum_quantile(ExampleFamily::exponential, 0.1, 1.0 - alpha);
        for (std::uint64_t seed : {11ULL, 22ULL, 33ULL}) {
            const auto s = simulate({model, 100000, seed, 8});
            CHECK(std::abs(empirical_var(s, alpha) - exact) <= 0.25);
        }
    }
}

TEST_CASE("empirical VaR is the conservative order statistic", "[mc]") {
    std::vector<double> v(1000);
    for (int i = 0; i < 1000; ++i) v[static_cast<std::size_t>(i)] = i + 1;
    const auto s = make_sample(std::move(v));
    CHECK(empirical_var(s, 0.5) == 500.0);
    CHECK(empirical_var(s, 0.005) == 995.0);
    CHECK_THROWS_AS(empirical_var(make_sample({}), 0.5), std::domain_error);
    CHECK_THROWS_AS(empirical_var(s, 0.0), std::domain_error);
    CHECK_THROWS_AS(empirical_var(s, 1.0), std::domain_error);
}

TEST_CASE("empirical ES averages the strict exceedances", "[mc]") {
    const auto s = make_sample({1.0, 2.0, 3.0, 4.0});
    CHECK(empirical_es(s, 0.5) == Approx(3.5).margin(1e-15));
    CHECK_THROWS_AS(empirical_es(make_sample({2.0, 2.0, 2.0}), 0.5), std::domain_error);

    // ES >= VaR on simulated samples
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto sim = simulate({exponential_patchwork(0.2), 5000, seed, 2});
        for (double alpha : {0.5, 0.1, 0.01})
            CHECK(empirical_es(sim, alpha) >= empirical_var(sim, alpha));
    }
}

TEST_CASE("comonotone additivity of the empirical VaR is exact", "[mc]") {
    // With a comonotone copula the aggregate order statistics are the sums
    // of the per-margin order statistics computed from the same uniforms.
    RiskModel model({Marginal::exponential_unit(), Marginal::pareto_unit()},
                    CopulaSpec(Comonotone(2)));
    const int n = 5000;
    std::vector<double> s(n), x1(n), x2(n);
    std::vector<double> x(2), w(2);
    for (int i = 0; i < n; ++i) {
        Rng rng = derived_stream(31337, static_cast<std::uint64_t>(i));
        sample_risks(model, rng, x, w);
        x1[static_cast<std::size_t>(i)] = x[0];
        x2[static_cast<std::size_t>(i)] = x[1];
        s[static_cast<std::size_t>(i)] = x[0] + x[1];
    }
    std::sort(s.begin(), s.end());
    std::sort(x1.begin(), x1.end());
    std::sort(x2.begin(), x2.end());
    const auto agg = make_sample(std::move(s));
    const auto m1 = make_sample(std::move(x1));
    const auto m2 = make_sample(std::move(x2));
    for (double alpha : {0.5, 0.1, 0.01, 0.005})
        CHECK(empirical_var(agg, alpha) == empirical_var(m1, alpha) + empirical_var(m2, alpha));
}

TEST_CASE("comonotone tail makes ES nearly additive", "[mc][slow]") {
    RiskModel model({Marginal::exponential_unit(), Marginal::exponential_unit()},
                    PatchworkCopula(Independence(2), Comonotone(2), 0.2));
    const int n = 200000;
    const double alpha = 0.005;
    std::vector<double> s(n), x1(n), x2(n);
    std::vector<double> x(2), w(2);
    for (int i = 0; i < n; ++i) {
        Rng rng = derived_stream(777, static_cast<std::uint64_t>(i));
        sample_risks(model, rng, x, w);
        x1[static_cast<std::size_t>(i)] = x[0];
        x2[static_cast<std::size_t>(i)] = x[1];
        s[static_cast<std::size_t>(i)] = x[0] + x[1];
    }
    std::sort(s.begin(), s.end());
    std::sort(x1.begin(), x1.end());
    std::sort(x2.begin(), x2.end());
    const double es_s = empirical_es(make_sample(std::move(s)), alpha);
    const double es_sum = empirical_es(make_sample(std::move(x1)), alpha) +
                          empirical_es(make_sample(std::move(x2)), alpha);
    CHECK(std::abs(es_s - es_sum) / es_sum <= 0.03);
}

TEST_CASE("empirical cdf points", "[mc]") {
    const auto s = make_sample({1.0, 2.0, 3.0});
    const auto p = empirical_cdf_points(s, {0.5, 2.0, 3.5});
    REQUIRE(p.size() == 3);
    CHECK(p[0] == 0.0);
    CHECK(p[1] == Approx(2.0 / 3.0).margin(1e-15));
    CHECK(p[2] == 1.0);
}

TEST_CASE("csv export is deterministic and carries metadata", "[mc]") {
    const auto s = simulate({exponential_patchwork(0.1), 50, 7, 1});
    const auto csv1 = sample_to_csv(s);
    const auto csv2 = sample_to_csv(simulate({exponential_patchwork(0.1), 50, 7, 3}));
    CHECK(csv1 == csv2);
    CHECK(csv1.find("seed=7") != std::string::npos);
    CHECK(csv1.find(s.config_digest) != std::string::npos);

    const auto cdf_csv = cdf_points_to_csv({1.0, 2.0}, {0.25, 0.75});
    CHECK(cdf_csv == "x,p\n1,0.25\n2,0.75\n");
}
