#include <doctest.h>

#include "fieldest/error.hpp"
#include "fieldest/multiindex.hpp"
#include "oracles.hpp"

using namespace fieldest;
using MI = MultiIndex;

namespace {

LowerSet ls(std::vector<MI> v) { return LowerSet::from_elements(std::move(v)); }

}  // namespace

TEST_CASE("multi-index basics") {
    const MI a{2, 1};
    CHECK(a.total_degree() == 3);
    CHECK(a.max_degree() == 2);
    CHECK(a.factorial() == 2.0);
    CHECK(MI{1, 1}.precedes(a));
    CHECK_FALSE(MI{3, 0}.precedes(a));
    CHECK(a.minus(MI{1, 0}) == MI{1, 1});
    CHECK(a.plus_unit(1) == MI{2, 2});
    const std::vector<double> x{3.0, 2.0};
    CHECK(a.monomial(x) == 18.0);
    CHECK_THROWS_AS(MI({-1, 0}), Error);
}

TEST_CASE("canonical order is graded, descending lex within a degree") {
    const auto s = box_lower_set(2, 2);
    std::vector<MI> expect{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {2, 1}, {1, 2}, {2, 2}};
    CHECK(s.elements() == expect);
}

TEST_CASE("is_lower_set examples") {
    std::vector<MI> yes{{0, 0}, {1, 0}, {0, 1}};
    std::vector<MI> missing_zero{{1, 0}};
    std::vector<MI> empty;
    CHECK(is_lower_set(yes));
    CHECK_FALSE(is_lower_set(missing_zero));
    CHECK_FALSE(is_lower_set(empty));
    std::vector<MI> mixed{{0, 0}, {0}};
    CHECK_THROWS_AS(is_lower_set(mixed), Error);
    CHECK_THROWS_AS(LowerSet::from_elements(missing_zero), Error);
}

TEST_CASE("border examples") {
    CHECK(oracle::as_set(border(ls({{0, 0}, {1, 0}, {0, 1}}))) == std::set<oracle::Exps>{{1, 0}, {0, 1}});
    CHECK(oracle::as_set(border(ls({MI{0}}))) == std::set<oracle::Exps>{{0}});
    CHECK(oracle::as_set(border(box_lower_set(2, 4))) == std::set<oracle::Exps>{{4, 4}});
}

TEST_CASE("cover examples") {
    CHECK(oracle::as_set(cover(ls({{0, 0}, {1, 0}, {0, 1}}))) == std::set<oracle::Exps>{{2, 0}, {1, 1}, {0, 2}});
    CHECK(oracle::as_set(cover(ls({MI{0}, MI{1}, MI{2}}))) == std::set<oracle::Exps>{{3}});
    const auto c = cover(simplex_lower_set(2, 4));
    CHECK(c.size() == 6);
    for (const auto& a : c) CHECK(a.total_degree() == 5);
}

TEST_CASE("immediate successors contain the cover") {
    // {(0,0),(1,0)}: (1,1) is one step from (1,0) but not minimal outside the set
    const auto s = oracle::as_set(immediate_successors(ls({{0, 0}, {1, 0}})));
    CHECK(s == std::set<oracle::Exps>{{2, 0}, {0, 1}, {1, 1}});
    CHECK(immediate_successors(box_lower_set(2, 3)).size() == 8);
    CHECK(cover(box_lower_set(2, 3)).size() == 2);
}

TEST_CASE("generators") {
    CHECK(box_lower_set(2, 2).size() == 9);
    CHECK(box_lower_set(1, 4).elements() == std::vector<MI>{MI{0}, MI{1}, MI{2}, MI{3}, MI{4}});
    CHECK(box_lower_set(2, 4).size() == 25);
    CHECK(simplex_lower_set(2, 2).elements() == std::vector<MI>{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}});
    CHECK(simplex_lower_set(1, 3).size() == 4);
    CHECK(simplex_lower_set(3, 1).size() == 4);
    CHECK(simplex_lower_set(3, 4).size() == 35);
    try {
        (void)box_lower_set(3, 99, 1000);
        FAIL("expected a size-cap error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SizeCap);
    }
    CHECK_THROWS_AS((void)simplex_lower_set(4, 60, 1000), Error);
}

TEST_CASE("lower set membership and lookup") {
    const auto s = simplex_lower_set(2, 2);
    CHECK(s.contains(MI{1, 1}));
    CHECK_FALSE(s.contains(MI{2, 1}));
    CHECK(s.index_of(MI{2, 0}) == 3);
    CHECK(s.index_of(MI{3, 0}) == s.size());
}

TEST_CASE("property: border and cover agree with brute-force scans") {
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t m = 1 + trial % 4;
        const std::size_t size = 1 + rng() % 50;
        const auto s = oracle::random_lower_set(rng, m, size);
        const auto l = LowerSet::from_elements(oracle::to_multi(s));
        CHECK(is_lower_set(l.elements()));
        const auto b = oracle::as_set(border(l));
        const auto c = oracle::as_set(cover(l));
        CHECK(b == oracle::border(s));
        CHECK(c == oracle::cover(s));
        for (const auto& a : b) {
            CHECK(s.count(a));
            auto t = s;
            t.erase(a);
            if (!t.empty()) CHECK(oracle::downward_closed(t));
        }
        for (const auto& a : c) {
            CHECK_FALSE(s.count(a));
            auto t = s;
            t.insert(a);
            CHECK(oracle::downward_closed(t));
        }
    }
}

TEST_CASE("property: generated sets are lower sets") {
    for (std::size_t m = 1; m <= 3; ++m) {
        for (int k = 0; k <= 4; ++k) {
            CHECK(is_lower_set(box_lower_set(m, k).elements()));
            CHECK(is_lower_set(simplex_lower_set(m, k).elements()));
        }
    }
}
