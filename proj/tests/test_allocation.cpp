#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fieldest/allocation.hpp"
#include "fieldest/error.hpp"
#include "oracles.hpp"

using namespace fieldest;

namespace {

using V = std::vector<double>;

double sum(const V& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// sum |a_j|^q / n_j^p, written out independently of the library
double objective(const V& a, const V& n, double p, double q) {
    long double s = 0;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (a[j] != 0) s += std::pow(std::fabs(a[j]), q) / std::pow(n[j], p);
    return static_cast<double>(s);
}

V random_coeffs(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2, 2);
    V c(1 + rng() % 8);
    for (auto& v : c) v = u(rng);
    return c;
}

}  // namespace

TEST_CASE("p-norm examples") {
    CHECK(pnorm(V{3, 4}, 2) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(pnorm(V{1, 1}, 2.0 / 3.0) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-15));
    for (double p : {0.3, 1.0, 2.0, 7.5}) CHECK(pnorm(V{5, 0, 0}, p) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(pnorm(V{0, 0}, 1) == 0.0);
    CHECK(pnorm(V{1e-200, 1e-200}, 2) == doctest::Approx(std::sqrt(2.0) * 1e-200).epsilon(1e-14));
    CHECK_THROWS_AS(pnorm(V{1}, 0.0), Error);
    CHECK_THROWS_AS(pnorm(V{1}, -1.0), Error);
}

TEST_CASE("general allocation examples") {
    const auto a = allocate_general(V{1, 1}, 10, 2, 2);
    CHECK(a.n == V{5, 5});
    CHECK(a.variance == doctest::Approx(0.08).epsilon(1e-14));
    const auto b = allocate_general(V{1, 0}, 10, 2, 2);
    CHECK(b.n == V{10, 0});
    CHECK(b.variance == doctest::Approx(0.01).epsilon(1e-14));
    const auto c = allocate_general(V{1, 1}, 10, 1, 2);
    CHECK(c.n == V{5, 5});
    CHECK(c.variance == doctest::Approx(0.4).epsilon(1e-14));
    CHECK_THROWS_AS(allocate_general(V{0, 0}, 10, 2, 2), Error);
    CHECK_THROWS_AS(allocate_general(V{1}, 0, 2, 2), Error);
    CHECK_THROWS_AS(allocate_general(V{}, 1, 2, 2), Error);
}

TEST_CASE("strategy examples") {
    const V half{0.5, 0.5};
    const auto nl = nonlocal_allocation(half, 10);
    CHECK(nl.n == V{5, 5});
    CHECK(nl.variance == doctest::Approx(0.01).epsilon(1e-14));
    const auto lo = local_allocation(half, 10);
    CHECK(lo.n == V{5, 5});
    CHECK(lo.variance == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(local_classical_allocation(V{1, 1}, 10).variance == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(nonlocal_allocation(half, 10, 4).variance == doctest::Approx(0.0025).epsilon(1e-14));

    const V e1{0, 3, 0};
    CHECK(nonlocal_allocation(e1, 7).variance == doctest::Approx(9.0 / 49).epsilon(1e-14));
    CHECK(nonlocal_allocation(e1, 7).n == V{0, 7, 0});
    CHECK(local_allocation(e1, 7).variance == doctest::Approx(nonlocal_allocation(e1, 7).variance).epsilon(1e-14));

    const auto twice = nonlocal_allocation(V{1, 1}, 10);
    CHECK(twice.variance == doctest::Approx(4 * nl.variance).epsilon(1e-14));
    CHECK(twice.n == nl.n);

    for (std::size_t d = 1; d <= 6; ++d) {
        const V u(d, 0.3);
        CHECK(local_allocation(u, 5).variance ==
              doctest::Approx(static_cast<double>(d) * nonlocal_allocation(u, 5).variance).epsilon(1e-12));
    }
    CHECK(allocate(Strategy::LocalQuantum, half, 10).variance == lo.variance);
    CHECK_THROWS_AS(allocate(Strategy::General, half, 10), Error);
}

TEST_CASE("strategy names") {
    for (auto s : {Strategy::NonlocalQuantum, Strategy::LocalQuantum, Strategy::LocalClassical})
        CHECK(strategy_from_string(to_string(s)) == s);
    CHECK(strategy_from_string("nonlocal") == Strategy::NonlocalQuantum);
    CHECK(strategy_from_string("local") == Strategy::LocalQuantum);
    CHECK(strategy_from_string("classical") == Strategy::LocalClassical);
    CHECK_THROWS_AS(strategy_from_string("ghz"), Error);
}

TEST_CASE("precision gain") {
    CHECK(precision_gain(V{0, 1, 0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(precision_gain(V{0.5, 0.5}) == doctest::Approx(2.0).epsilon(1e-14));
    for (std::size_t d = 1; d <= 25; ++d) CHECK(precision_gain(V(d, -0.7)) == doctest::Approx(double(d)).epsilon(1e-12));
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 500; ++trial) {
        auto c = random_coeffs(rng);
        if (trial % 3 == 0) c[rng() % c.size()] = 0;
        std::size_t support = 0;
        for (double v : c) support += v != 0;
        if (support == 0) continue;
        const double g = precision_gain(c);
        CHECK(g >= 1 - 1e-12);
        CHECK(g <= static_cast<double>(support) * (1 + 1e-12));
        const double ratio = local_allocation(c, 3.0).variance / nonlocal_allocation(c, 3.0).variance;
        CHECK(g == doctest::Approx(ratio).epsilon(1e-12));
    }
    CHECK_THROWS_AS(precision_gain(V{0, 0}), Error);
}

TEST_CASE("property: norm inequalities") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> up(0.05, 4.0), uv(-3, 3);
    for (int trial = 0; trial < 10000; ++trial) {
        V x(1 + rng() % 10);
        for (auto& v : x) v = uv(rng);
        double p = up(rng), q = up(rng);
        if (q > p) std::swap(p, q);
        if (q == p) continue;
        const double np = pnorm(x, p), nq = pnorm(x, q);
        const double bound = std::pow(static_cast<double>(x.size()), 1 / q - 1 / p) * np;
        CHECK(np <= nq * (1 + 1e-12));
        CHECK(nq <= bound * (1 + 1e-12));
        // against the long-double oracle
        CHECK(np == doctest::Approx(oracle::pnorm(x, p)).epsilon(1e-12));
    }
}

TEST_CASE("property: closed form is optimal and stationary") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0, 1);
    const std::pair<double, double> pq[] = {{2, 2}, {1, 2}, {2, 1}, {0.5, 3}};
    for (int trial = 0; trial < 100; ++trial) {
        const V a = random_coeffs(rng);
        const auto [p, q] = pq[trial % 4];
        const double total = 1 + 20 * u(rng);
        const auto best = allocate_general(a, total, p, q);
        CHECK(sum(best.n) == doctest::Approx(total).epsilon(1e-9));
        CHECK(best.variance == doctest::Approx(objective(a, best.n, p, q)).epsilon(1e-12));
        CHECK(allocation_objective(a, best.n, p, q) == doctest::Approx(best.variance).epsilon(1e-12));
        for (int s = 0; s < 1000; ++s) {
            V n(a.size());
            for (auto& v : n) v = -std::log(u(rng) + 1e-300);
            const double scale = total / sum(n);
            for (auto& v : n) v *= scale;
            CHECK(best.variance <= objective(a, n, p, q) * (1 + 1e-12));
        }
        double lo = INFINITY, hi = 0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double g = std::pow(std::fabs(a[j]), q) / std::pow(best.n[j], p + 1);
            lo = std::min(lo, g), hi = std::max(hi, g);
        }
        CHECK(hi - lo <= 1e-9 * hi);
    }
}

TEST_CASE("objective edge cases") {
    CHECK(std::isinf(allocation_objective(V{1, 1}, V{10, 0}, 2, 2)));
    CHECK(allocation_objective(V{1, 0}, V{10, 0}, 2, 2) == doctest::Approx(0.01));
    CHECK_THROWS_AS(allocation_objective(V{1}, V{1, 2}, 2, 2), Error);
}

TEST_CASE("integer rounding") {
    const V c{0.2, 0.3, 0.5};
    const auto a = local_allocation(c, 10);
    const auto r = round_allocation(a, c);
    CHECK(std::accumulate(r.n.begin(), r.n.end(), 0LL) == 10);
    CHECK(r.penalty >= -1e-15);
    V nd(r.n.begin(), r.n.end());
    CHECK(r.variance == doctest::Approx(objective(c, nd, 2, 2)).epsilon(1e-14));

    // exact halves: ties go to the lower index
    const auto tie = round_allocation(nonlocal_allocation(V{1, 1}, 3), V{1, 1});
    CHECK(tie.n == std::vector<long long>{2, 1});

    const auto exact = round_allocation(nonlocal_allocation(V{0.5, 0.5}, 10), V{0.5, 0.5});
    CHECK(exact.n == std::vector<long long>{5, 5});
    CHECK(exact.penalty == doctest::Approx(0.0).epsilon(1e-15));

    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 200; ++trial) {
        const V cc = random_coeffs(rng);
        const double total = 1 + static_cast<double>(rng() % 100);
        const auto al = local_classical_allocation(cc, total);
        const auto rr = round_allocation(al, cc);
        CHECK(std::accumulate(rr.n.begin(), rr.n.end(), 0LL) == static_cast<long long>(total));
        for (std::size_t j = 0; j < cc.size(); ++j) CHECK(std::abs(static_cast<double>(rr.n[j]) - al.n[j]) < 1.0);
    }
}

TEST_CASE("Monte Carlo examples") {
    const V half{0.5, 0.5}, n{5, 5};
    const auto q = monte_carlo_variance(half, n, 100000, 1, NoiseScaling::Quantum);
    CHECK(q.analytic_variance == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(std::abs(q.relative_deviation) < 0.05);
    CHECK(std::abs(q.empirical_variance - q.analytic_variance) <= 3 * q.standard_error);
    CHECK(q.trials == 100000);

    const auto cl = monte_carlo_variance(V{1, 1}, n, 100000, 2, NoiseScaling::Classical);
    CHECK(cl.analytic_variance == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(std::abs(cl.relative_deviation) < 0.05);
    CHECK(analytic_variance(half, n, NoiseScaling::Classical) == doctest::Approx(0.1).epsilon(1e-14));

    const auto single = monte_carlo_variance(V{1, 0, 0}, V{8, 0, 0}, 100000, 3, NoiseScaling::Quantum);
    CHECK(single.analytic_variance == doctest::Approx(1.0 / 64).epsilon(1e-14));
    CHECK(std::abs(single.relative_deviation) < 0.05);

    CHECK_THROWS_AS(monte_carlo_variance(half, n, 0, 1, NoiseScaling::Quantum), Error);
    CHECK_THROWS_AS(monte_carlo_variance(half, n, kMinMonteCarloTrials - 1, 1, NoiseScaling::Quantum), Error);
    CHECK_THROWS_AS(monte_carlo_variance(half, V{5, 0}, 100000, 1, NoiseScaling::Quantum), Error);
    CHECK_THROWS_AS(monte_carlo_variance(half, V{5}, 100000, 1, NoiseScaling::Quantum), Error);
}

TEST_CASE("property: Monte Carlo agrees with every strategy") {
    std::mt19937_64 rng(909);
    for (int trial = 0; trial < 6; ++trial) {
        const V c = random_coeffs(rng);
        for (auto s : {Strategy::NonlocalQuantum, Strategy::LocalQuantum, Strategy::LocalClassical}) {
            const auto a = allocate(s, c, 50);
            const auto scaling = s == Strategy::LocalClassical ? NoiseScaling::Classical : NoiseScaling::Quantum;
            const auto r = monte_carlo_variance(c, a.n, 100000, 1000 + trial, scaling);
            CHECK(std::abs(r.relative_deviation) < 0.05);
        }
    }
}

TEST_CASE("Monte Carlo is deterministic and thread independent") {
    const V c{0.3, -1.2, 0.7, 0.1}, n{2, 9, 4, 1};
    for (auto scaling : {NoiseScaling::Quantum, NoiseScaling::Classical}) {
        const auto a = monte_carlo_variance(c, n, 123457, 42, scaling);
        const auto b = monte_carlo_variance_serial(c, n, 123457, 42, scaling);
        const auto again = monte_carlo_variance(c, n, 123457, 42, scaling);
        CHECK(a.empirical_variance == b.empirical_variance);
        CHECK(a.empirical_variance == again.empirical_variance);
        CHECK(a.standard_error == b.standard_error);
        const auto other = monte_carlo_variance(c, n, 123457, 43, scaling);
        CHECK(other.empirical_variance != a.empirical_variance);
    }
}
