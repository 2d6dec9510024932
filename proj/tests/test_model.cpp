#include <doctest.h>

#include <cmath>
#include <limits>

#include "fieldest/error.hpp"
#include "fieldest/model.hpp"
#include "fieldest/scenario.hpp"
#include "oracles.hpp"

using namespace fieldest;
using MI = MultiIndex;

namespace {

std::vector<MI> orders_up_to_two(std::size_t m) {
    std::vector<MI> out;
    for (const auto& e : oracle::box_points(m, 2)) {
        int s = 0;
        for (int v : e) s += v;
        if (s <= 2) out.emplace_back(e);
    }
    return out;
}

double fd_oracle(const ModelFunction& f, const MI& zeta, const std::vector<double>& x) {
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x[0]));
    // second differences need a larger step for the same accuracy
    const double step = zeta.total_degree() >= 2 ? std::pow(std::numeric_limits<double>::epsilon(), 0.25) : h;
    return oracle::finite_difference([&](const std::vector<double>& p) { return f.eval(p); }, x,
                                     oracle::exps(zeta), step);
}

}  // namespace

TEST_CASE("evaluation examples") {
    const std::vector<double> x{3, 2}, y{3, 4};
    CHECK(ModelFunction::monomial(MI{2, 1}).eval(x) == 18.0);
    CHECK(ModelFunction::inverse_distance({0, 0}, 1).eval(y) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(ModelFunction::constant().eval(x) == 1.0);
    CHECK(ModelFunction::inverse_distance({0, 0}, 2).eval(y) == doctest::Approx(0.04).epsilon(1e-15));
    const auto s = ModelFunction::sinusoid({1.0, 2.0}, 0.3, basis::Sinusoid::Flavor::Cos);
    CHECK(s.eval(x) == doctest::Approx(std::cos(3.0 + 4.0 + 0.3)).epsilon(1e-15));
}

TEST_CASE("evaluation at a source is an error") {
    const auto f = ModelFunction::inverse_distance({0.5, 0.5}, 1);
    const std::vector<double> at{0.5, 0.5}, near{0.5, 0.5 + 1e-13};
    try {
        (void)f.eval(at);
        FAIL("expected SingularEvaluation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularEvaluation);
    }
    CHECK_THROWS_AS((void)f.eval(near), Error);
    CHECK_THROWS_AS((void)f.eval_derivative(MI{1, 0}, at), Error);
}

TEST_CASE("dimension mismatches are rejected") {
    const std::vector<double> p3{1, 2, 3};
    CHECK_THROWS_AS((void)ModelFunction::monomial(MI{1, 1}).eval(p3), Error);
    CHECK_THROWS_AS(ModelSpec(2, {ModelFunction::monomial(MI{1, 1, 1})}), Error);
    CHECK_THROWS_AS(ModelSpec(2, {}), Error);
    CHECK_THROWS_AS(ModelFunction::inverse_distance({0, 0}, -1.0), Error);
}

TEST_CASE("derivative examples") {
    const std::vector<double> x{3, 0}, y{0.7, -2.1};
    CHECK(ModelFunction::monomial(MI{2, 0}).eval_derivative(MI{1, 0}, x) == 6.0);
    CHECK(ModelFunction::monomial(MI{1, 1}).eval_derivative(MI{1, 1}, y) == 1.0);
    CHECK(ModelFunction::monomial(MI{1, 1}).eval_derivative(MI{2, 0}, y) == 0.0);
    const auto f = ModelFunction::inverse_distance({0.1, 0.2}, 1.5);
    CHECK(f.eval_derivative(MI{0, 0}, y) == f.eval(y));
    CHECK(ModelFunction::constant().eval_derivative(MI{1, 0}, y) == 0.0);
}

TEST_CASE("property: closed forms agree with finite differences") {
    const std::vector<ModelFunction> fs{
        ModelFunction::monomial(MI{3, 2}),
        ModelFunction::monomial(MI{0, 4}),
        ModelFunction::inverse_distance({0.5, -0.3}, 1.0),
        ModelFunction::inverse_distance({-1.0, 0.4}, 2.0),
        ModelFunction::inverse_distance({0.2, 0.2}, 0.5),
        ModelFunction::sinusoid({1.3, -0.7}, 0.4),
        ModelFunction::sinusoid({0.5, 2.0}, -1.0, basis::Sinusoid::Flavor::Cos),
        ModelFunction::constant(),
    };
    const std::vector<std::vector<double>> pts{{1.1, 0.9}, {-0.6, 1.7}, {2.3, -1.2}};
    for (const auto& f : fs) {
        for (const auto& x : pts) {
            for (const auto& z : orders_up_to_two(2)) {
                const double exact = f.eval_derivative(z, x);
                const double fd = fd_oracle(f, z, x);
                CHECK(std::abs(exact - fd) <= 1e-6 * std::max(1.0, std::abs(exact)));
            }
        }
    }
}

TEST_CASE("inverse distance in three dimensions, higher orders") {
    const auto f = ModelFunction::inverse_distance({0.25, 0.4330127019, -1.0}, 2.0);
    const std::vector<double> x{1.0, 0.0, 0.0};
    // third order against a difference of exact second derivatives
    const double h = 1e-5;
    auto xp = x, xm = x;
    xp[0] += h;
    xm[0] -= h;
    const double ref = (f.eval_derivative(MI{2, 0, 0}, xp) - f.eval_derivative(MI{2, 0, 0}, xm)) / (2 * h);
    CHECK(f.eval_derivative(MI{3, 0, 0}, x) == doctest::Approx(ref).epsilon(1e-5));
}

TEST_CASE("expression trees differentiate exactly") {
    // (x-1)^3 + (y-1)^3 built by the parser
    const auto f = parse_polynomial("(x-1)^3 + (y-1)^3", 2);
    const std::vector<double> p{0.3, 1.9};
    CHECK(f.eval(p) == doctest::Approx(std::pow(-0.7, 3) + std::pow(0.9, 3)).epsilon(1e-14));
    CHECK(f.eval_derivative(MI{1, 0}, p) == doctest::Approx(3 * 0.49).epsilon(1e-14));
    CHECK(f.eval_derivative(MI{0, 2}, p) == doctest::Approx(6 * 0.9).epsilon(1e-14));
    CHECK(f.eval_derivative(MI{3, 0}, p) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(f.eval_derivative(MI{1, 1}, p) == 0.0);
    CHECK(f.eval_derivative(MI{4, 0}, p) == 0.0);

    const auto g = ModelFunction::product({ModelFunction::coordinate(0), ModelFunction::inverse_distance({0, 0}, 1)});
    for (const auto& z : orders_up_to_two(2)) {
        const double fd = fd_oracle(g, z, p);
        CHECK(std::abs(g.eval_derivative(z, p) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("polynomial parser") {
    const std::vector<double> p{2.0, -1.0, 0.5};
    CHECK(parse_polynomial("x*y - 3*z^2 + 4/2", 3).eval(p) == doctest::Approx(-2.0 - 0.75 + 2.0));
    CHECK(parse_polynomial("-x1 + x2^0 + (x3)", 3).eval(p) == doctest::Approx(-2.0 + 1.0 + 0.5));
    CHECK(parse_polynomial("1.5e1", 1).eval(std::vector<double>{0.0}) == 15.0);
    CHECK_THROWS_AS(parse_polynomial("x +", 2), Error);
    CHECK_THROWS_AS(parse_polynomial("z", 2), Error);
    CHECK_THROWS_AS(parse_polynomial("x^y", 2), Error);
    CHECK_THROWS_AS(parse_polynomial("x/0", 2), Error);
    CHECK_THROWS_AS(parse_polynomial("(x", 2), Error);
}

TEST_CASE("monomial model spec follows the lower set order") {
    const auto l = simplex_lower_set(2, 2);
    const auto spec = ModelSpec::monomials(l);
    REQUIRE(spec.size() == l.size());
    const std::vector<double> p{2.0, 3.0};
    for (std::size_t k = 0; k < l.size(); ++k) CHECK(spec[k].eval(p) == l[k].monomial(p));
}
