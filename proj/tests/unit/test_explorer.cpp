#include <doctest.h>

#include <random>
#include <set>

#include "nearcrit/error.hpp"
#include "nearcrit/explorer.hpp"
#include "path_checks.hpp"

using namespace nearcrit;
using pathcheck::color_at;
using pathcheck::twelve_cell_domain;
using pathcheck::violations;

namespace {

HexCoord mirror(HexCoord h) { return {-h.a - h.b, h.b}; }

} // namespace

TEST_CASE("all-blue interior: path hugs the yellow boundary (hand fixture)") {
    std::vector<HexCoord> cells = {{-1, 0}, {0, 0}, {1, 0}, {2, 0}, {-2, 1}, {-1, 1}, {0, 1}, {1, 1}};
    HexDomain d = make_domain({10.0, 1.0}, cells);
    Configuration c(d.region, Color::Blue);
    ExplorationPath p = trace(d, c);
    std::vector<std::pair<HexCoord, HexCoord>> want = {
        {{0, -1}, {1, -1}}, {{0, 0}, {1, -1}}, {{1, 0}, {1, -1}},
        {{1, 0}, {2, -1}},  {{2, 0}, {2, -1}}, {{2, 0}, {3, -1}}};
    REQUIRE(p.size() == want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
        CHECK(p.steps[k].left == want[k].first);
        CHECK(p.steps[k].right == want[k].second);
    }
    CHECK(violations(d, c, p) == 0);
}

TEST_CASE("exhaustive: every coloring of a 12-cell domain gives a valid path") {
    HexDomain d = twelve_cell_domain();
    REQUIRE(d.size() == 12);
    int bad = 0;
    for (std::uint32_t m = 0; m < (1u << 12); ++m) {
        std::vector<std::uint8_t> blue(12);
        for (int i = 0; i < 12; ++i) blue[i] = m >> i & 1;
        Configuration c(d.region, blue);
        bad += violations(d, c, trace(d, c));
    }
    CHECK(bad == 0);
}

TEST_CASE("color swap plus reflection mirrors the path") {
    HexDomain d = build_domain({1.0, 1.0 / 32});
    for (std::uint32_t r = 0; r < 50; ++r) {
        Configuration c = sample_configuration(d, 0.5, 8, r);
        Configuration m(d.region, Color::Blue);
        for (std::size_t i = 0; i < d.size(); ++i) m.set(mirror(d.region->cell(i)), swap(c.color_at(i)));
        ExplorationPath p = trace(d, c), q = trace(d, m);
        REQUIRE(p.size() == q.size());
        bool same = true;
        for (std::size_t k = 0; k < p.size(); ++k)
            same = same && q.steps[k].left == mirror(p.steps[k].right) && q.steps[k].right == mirror(p.steps[k].left);
        CHECK(same);
    }
}

TEST_CASE("random paths satisfy the invariants and the sampled trace agrees") {
    HexDomain d = build_domain({1.0, 1.0 / 48});
    for (std::uint32_t r = 0; r < 100; ++r) {
        double p = 0.4 + 0.002 * r;
        Configuration c = sample_configuration(d, p, 31, r);
        ExplorationPath path = trace(d, c);
        CHECK(violations(d, c, path) == 0);
        ExplorationPath lazy = trace_sampled(d, p, 31, r);
        REQUIRE(lazy.size() == path.size());
        bool same = true;
        for (std::size_t k = 0; k < path.size(); ++k)
            same = same && lazy.steps[k].left == path.steps[k].left && lazy.steps[k].right == path.steps[k].right;
        CHECK(same);
    }
}

TEST_CASE("recoloring cells away from the path leaves it unchanged") {
    HexDomain d = build_domain({1.0, 1.0 / 32});
    std::mt19937 rng(3);
    for (std::uint32_t r = 0; r < 30; ++r) {
        Configuration c = sample_configuration(d, 0.5, 12, r);
        ExplorationPath p = trace(d, c);
        std::set<HexCoord> near;
        for (HexCoord h : path_cells(p, p.size()))
            for (HexCoord n : neighbors(h))
                for (HexCoord m : neighbors(n)) near.insert(m);
        Configuration e = c;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (!near.count(d.region->cell(i))) e.set(i, rng() & 1 ? Color::Blue : Color::Yellow);
        ExplorationPath q = trace(d, e);
        REQUIRE(q.size() == p.size());
        for (std::size_t k = 0; k < p.size(); ++k) CHECK(q.steps[k].head == p.steps[k].head);
    }
}

TEST_CASE("exit_time and initial_segment") {
    HexDomain d = build_domain({1.0, 1.0 / 32});
    Configuration c = sample_configuration(d, 0.5, 4);
    ExplorationPath p = trace(d, c);
    CHECK_THROWS_AS(exit_time(p, 0.0), Error);
    auto first = exit_time(p, 1e-6);
    REQUIRE(first);
    CHECK(*first <= 1);
    std::size_t prev = 0;
    for (double rho = 0.05; rho < 0.95; rho += 0.05) {
        auto k = exit_time(p, rho);
        REQUIRE(k);
        CHECK(*k >= prev);
        prev = *k;
    }
    // The walk stops as soon as it is within one mesh of the arc, unless it
    // ran into the jagged edge of the domain first.
    auto last = exit_time(p, 1.0 - 1.0 / 32);
    if (last) CHECK(*last == p.size() - 1);
    CHECK(norm(p.vertex(p.size() - 1)) > 1.0 - 3.0 / 32);
    CHECK(!exit_time(p, 1.0 + 1.0 / 32));
    try {
        initial_segment(p, 1.5);
        FAIL("expected NeverExits");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NeverExits);
    }
    ExplorationPath a = initial_segment(initial_segment(p, 0.6), 0.3), b = initial_segment(p, 0.3);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.steps[k].head == b.steps[k].head);
}

TEST_CASE("initial segments on the 12-cell domain") {
    HexDomain d = twelve_cell_domain();
    for (std::uint32_t m = 0; m < (1u << 12); m += 7) {
        std::vector<std::uint8_t> blue(12);
        for (int i = 0; i < 12; ++i) blue[i] = m >> i & 1;
        ExplorationPath p = trace(d, Configuration(d.region, blue));
        // Every prefix up to the first exit beyond a tiny radius has one step or two.
        ExplorationPath s = initial_segment(p, 1e-9);
        CHECK(s.size() <= 2);
        CHECK(s.steps[0].left == d.origin_edge.left);
    }
}

TEST_CASE("path CSV has one row per vertex plus the start") {
    HexDomain d = build_domain({1.0, 1.0 / 16});
    ExplorationPath p = trace(d, sample_configuration(d, 0.5, 1));
    std::string csv = path_to_csv(p);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == long(p.size()) + 2);
    CHECK(csv.rfind("step,x,y\n", 0) == 0);
}
