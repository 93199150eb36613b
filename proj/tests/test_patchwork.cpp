#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "patchvar/analytic2d.hpp"
#include "patchvar/patchwork.hpp"
#include "test_helpers.hpp"

using namespace patchvar;
using Catch::Approx;

TEST_CASE("beta endpoints select body or tail outright", "[patchwork]") {
    PatchworkCopula body_only(Comonotone(2), Countermonotone{}, 0.0);
    PatchworkCopula tail_only(Comonotone(2), Countermonotone{}, 1.0);

    // beta = 0: output equals the body sample drawn after the switch uniform
    {
        Rng a(5), b(5);
        auto w = sample_w(body_only, a);
        (void)b.uniform(); // the switch draw
        auto expected = sample(CopulaSpec(Comonotone(2)), b);
        CHECK(w == expected);
    }
    // beta = 1: output equals the tail sample
    {
        Rng a(6), b(6);
        auto w = sample_w(tail_only, a);
        (void)b.uniform();
        auto expected = sample(CopulaSpec(Countermonotone{}), b);
        CHECK(w == expected);
    }
}

TEST_CASE("support split is exact and body fraction is binomial", "[patchwork]") {
    const double beta = 0.25;
    PatchworkCopula pc(Independence(3), Comonotone(3), beta);
    Rng rng(42);
    const int n = 100000;
    int body_count = 0;
    std::vector<double> w(3);
    for (int k = 0; k < n; ++k) {
        sample_w(pc, rng, w);
        const bool all_body = w[0] <= 1.0 - beta && w[1] <= 1.0 - beta && w[2] <= 1.0 - beta;
        const bool all_tail = w[0] >= 1.0 - beta && w[1] >= 1.0 - beta && w[2] >= 1.0 - beta;
        REQUIRE((all_body || all_tail));
        if (all_body) ++body_count;
    }
    // binomial standard error at p = 0.75, n = 1e5 is 0.00137; 3 sigma ~ 0.0041
    CHECK(std::abs(body_count / static_cast<double>(n) - 0.75) <= 0.01);
}

TEST_CASE("patchwork margins stay uniform (KS)", "[patchwork][slow]") {
    const int n = 100000;
    const double crit = 1.95 / std::sqrt(static_cast<double>(n));
    int seed = 1000;
    for (double beta : {0.005, 0.25, 0.9}) {
        PatchworkCopula pc(Independence(2), Countermonotone{}, beta);
        Rng rng(static_cast<std::uint64_t>(seed++));
        std::vector<double> c0, c1;
        c0.reserve(n);
        c1.reserve(n);
        std::vector<double> w(2);
        for (int k = 0; k < n; ++k) {
            sample_w(pc, rng, w);
            c0.push_back(w[0]);
            c1.push_back(w[1]);
        }
        INFO("beta = " << beta);
        CHECK(testutil::ks_uniform(c0) < crit);
        CHECK(testutil::ks_uniform(c1) < crit);
    }
}

TEST_CASE("switch indicator is independent of the block uniforms", "[patchwork][slow]") {
    const double beta = 0.25;
    PatchworkCopula pc(Independence(2), Independence(2), beta);
    Rng rng(77);
    const int n = 100000;
    const int bins = 10;
    std::vector<long> body_bins(bins, 0), tail_bins(bins, 0);
    std::vector<double> w(2);
    for (int k = 0; k < n; ++k) {
        sample_w(pc, rng, w);
        const bool body = w[0] <= 1.0 - beta && w[1] <= 1.0 - beta;
        const double raw = body ? w[0] / (1.0 - beta) : (w[0] - (1.0 - beta)) / beta;
        int bin = static_cast<int>(raw * bins);
        if (bin >= bins) bin = bins - 1;
        if (body)
            ++body_bins[static_cast<std::size_t>(bin)];
        else
            ++tail_bins[static_cast<std::size_t>(bin)];
    }
    // chi-square on the 2 x 10 table, 9 dof, 0.999 critical value 27.877
    CHECK(testutil::chi_square_2xk(body_bins, tail_bins) < 27.877);
}

TEST_CASE("at beta 0 the aggregate matches the independent-sum cdf", "[patchwork][slow]") {
    RiskModel model({Marginal::exponential_unit(), Marginal::exponential_unit()},
                    PatchworkCopula(Independence(2), Independence(2), 0.0));
    Rng rng(99);
    const int n = 100000;
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) s[static_cast<std::size_t>(k)] = aggregate(sample_risks(model, rng));
    const double d = testutil::ks_statistic(
        std::move(s), [](double x) { return independent_sum_cdf(ExampleFamily::exponential, x); });
    CHECK(d < 1.95 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampled risk margins follow the marginal cdf", "[patchwork][slow]") {
    RiskModel model({Marginal::exponential_unit(), Marginal::exponential_unit()},
                    PatchworkCopula(Independence(2), Countermonotone{}, 0.005));
    Rng rng(123);
    const int n = 100000;
    std::vector<double> x1;
    x1.reserve(n);
    for (int k = 0; k < n; ++k) x1.push_back(sample_risks(model, rng)[0]);
    const double d = testutil::ks_statistic(std::move(x1), [](double x) {
        return Marginal::exponential_unit().cdf(x);
    });
    CHECK(d < 1.95 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("comonotone copula gives the identity transform on uniform margins", "[patchwork]") {
    RiskModel model({Marginal::uniform_unit(), Marginal::uniform_unit(), Marginal::uniform_unit()},
                    CopulaSpec(Comonotone(3)));
    Rng rng(3);
    for (int k = 0; k < 100; ++k) {
        auto x = sample_risks(model, rng);
        CHECK(x[1] == x[0]);
        CHECK(x[2] == x[0]);
        CHECK((x[0] > 0.0 && x[0] < 1.0));
    }
}

TEST_CASE("quantile transform of a fixed uniform vector", "[patchwork]") {
    const std::vector<Marginal> margins = {Marginal::pareto_unit(), Marginal::pareto_unit()};
    const std::vector<double> w = {0.995, 0.995};
    std::vector<double> x(2);
    risks_from_uniforms(margins, w, x);
    CHECK(x[0] == Approx(199.0).margin(1e-9));
    CHECK(x[1] == Approx(199.0).margin(1e-9));
    CHECK(aggregate(x) == Approx(398.0).margin(1e-8));
}

TEST_CASE("endpoint uniforms are nudged into the open interval", "[patchwork]") {
    const std::vector<Marginal> margins = {Marginal::exponential_unit(),
                                           Marginal::lognormal(0.0, 1.0)};
    const std::vector<double> w = {0.0, 1.0};
    std::vector<double> x(2);
    CHECK_NOTHROW(risks_from_uniforms(margins, w, x));
    CHECK(x[0] >= 0.0);
    CHECK(std::isfinite(x[1]));
}

TEST_CASE("aggregate", "[patchwork]") {
    CHECK(aggregate(std::vector<double>{1.0, 2.0, 3.0}) == 6.0);
    CHECK(aggregate(std::vector<double>{0.0, 0.0}) == 0.0);
    CHECK(aggregate(std::vector<double>{}) == 0.0);
}

TEST_CASE("model validation", "[patchwork]") {
    CHECK_THROWS_AS(PatchworkCopula(Independence(2), Independence(3), 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(PatchworkCopula(Independence(2), Independence(2), -0.1), std::domain_error);
    CHECK_THROWS_AS(PatchworkCopula(Independence(2), Independence(2), 1.1), std::domain_error);
    CHECK_THROWS_AS(RiskModel({Marginal::uniform_unit()}, CopulaSpec(Independence(2))),
                    std::invalid_argument);
}
