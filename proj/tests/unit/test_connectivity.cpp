#include <doctest.h>

#include <cmath>
#include <set>

#include "nearcrit/connectivity.hpp"
#include "nearcrit/error.hpp"
#include "oracles.hpp"

using namespace nearcrit;

namespace {

std::set<HexCoord> side_set(const DiscreteQuad& q, int s) { return {q.sides[s].begin(), q.sides[s].end()}; }

std::vector<std::uint8_t> bits(std::uint64_t m, std::size_t n) {
    std::vector<std::uint8_t> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = m >> i & 1;
    return b;
}

Configuration swapped(const Configuration& c) {
    std::vector<std::uint8_t> b(c.raw());
    for (auto& x : b) x = !x;
    return Configuration(c.region_ptr(), b);
}

double exact_crossing(const DiscreteQuad& q, double p) {
    const auto& cells = q.cells->cells();
    auto s0 = side_set(q, 0), s2 = side_set(q, 2);
    return oracle::enumerate(cells.size(), p, [&](std::uint64_t m) {
        return oracle::bfs_connects(oracle::blue_of(cells, m), s0, s2);
    });
}

} // namespace

TEST_CASE("rhombus quad sides") {
    DiscreteQuad q = rhombus_quad({0, 0}, 4, 3);
    CHECK(q.cells->size() == 12);
    CHECK(q.sides[0].size() == 3);
    CHECK(q.sides[1].size() == 4);
    CHECK(q.sides[2].size() == 3);
    CHECK(q.sides[3].size() == 4);
    CHECK_THROWS_AS(rhombus_quad({0, 0}, 0, 3), Error);
}

TEST_CASE("make_quad rejects holes, disconnected sets and bad arcs") {
    std::vector<HexCoord> ring;
    for (HexCoord d : kDirections) ring.push_back(d);
    auto any = [](HexCoord h) { return h.a < -1 ? 0 : h.a > 1 ? 2 : -1; };
    CHECK_THROWS_AS(make_quad(ring, any), Error);  // hole at the origin
    CHECK_THROWS_AS(make_quad({{0, 0}, {5, 0}}, any), Error);
    CHECK_THROWS_AS(make_quad({{0, 0}, {1, 0}}, [](HexCoord) { return 0; }), Error);  // no side 2
    // Side labels out of counter-clockwise order: 0 on the W, 1 on the E, 2 on the bottom.
    CHECK_THROWS_AS(make_quad(rhombus_quad({0, 0}, 3, 3).cells->cells(),
                              [](HexCoord h) {
                                  if (h.a == -1 && h.b >= 0 && h.b < 3) return 0;
                                  if (h.a == 3 && h.b >= 0 && h.b < 3) return 1;
                                  if (h.b == -1 && h.a >= 0 && h.a < 3) return 2;
                                  if (h.b == 3 && h.a >= 0 && h.a < 3) return 3;
                                  return -1;
                              }),
                    Error);
}

TEST_CASE("exhaustive: crossing matches brute-force BFS on a 4x4 rhombus") {
    DiscreteQuad q = rhombus_quad({2, 1}, 4, 4);
    const auto& cells = q.cells->cells();
    REQUIRE(cells.size() == 16);
    auto s0 = side_set(q, 0), s2 = side_set(q, 2);
    QuadIndex idx(q);
    int bad = 0;
    for (std::uint64_t m = 0; m < (1u << 16); ++m) {
        auto b = bits(m, 16);
        bool want = oracle::bfs_connects(oracle::blue_of(cells, m), s0, s2);
        bad += is_crossed(Configuration(q.cells, b), q) != want;
        bad += idx.crossed(b) != want;
    }
    CHECK(bad == 0);
}

TEST_CASE("exhaustive: blue W-E crossing iff no yellow S-N crossing") {
    DiscreteQuad q = rhombus_quad({0, 0}, 4, 4);
    // The same cells with the sides rotated: crossing now runs bottom to top.
    DiscreteQuad r = make_quad(q.cells->cells(), [](HexCoord h) {
        if (h.b == -1 && h.a >= 0 && h.a < 4) return 0;
        if (h.a == 4 && h.b >= 0 && h.b < 4) return 1;
        if (h.b == 4 && h.a >= 0 && h.a < 4) return 2;
        if (h.a == -1 && h.b >= 0 && h.b < 4) return 3;
        return -1;
    });
    int bad = 0;
    for (std::uint64_t m = 0; m < (1u << 16); ++m) {
        Configuration c(q.cells, bits(m, 16));
        bad += is_crossed(c, q) == is_crossed(swapped(c), r);
    }
    CHECK(bad == 0);
}

TEST_CASE("crossing thresholds agree with crossing at every p") {
    DiscreteQuad q = rhombus_quad({0, 0}, 6, 5);
    QuadIndex idx(q);
    for (std::uint32_t r = 0; r < 300; ++r) {
        CouplingField f = sample_coupling(q.cells, 41, r);
        double t = idx.threshold(f.values().data());
        for (double p : {0.2, 0.4, 0.5, 0.6, 0.8}) CHECK((t <= p) == idx.crossed(realize(f, p).raw()));
        CHECK(idx.crossed(realize(f, t).raw()));
        CHECK(!idx.crossed(realize(f, std::nextafter(t, 0.0)).raw()));
    }
}

TEST_CASE("3x3 rhombus: exact crossing probability against Monte Carlo") {
    DiscreteQuad q = rhombus_quad({0, 0}, 3, 3);
    for (double p : {0.5, 0.3}) {
        double exact = exact_crossing(q, p);
        Estimate e = crossing_probability(q, p, 100000, 12);
        CHECK(std::abs(e.estimate - exact) <= 3 * std::sqrt(exact * (1 - exact) / 1e5));
        CHECK(e.std_error == doctest::Approx(std::sqrt(e.estimate * (1 - e.estimate) / 1e5)));
    }
    // Self-duality makes the symmetric rhombus exactly fair.
    CHECK(exact_crossing(rhombus_quad({0, 0}, 4, 4), 0.5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("crossing: trivial configurations and monotonicity in p") {
    DiscreteQuad q = rectangle_quad(0, 0, 0.5, 0.5, 1.0 / 32);
    CHECK(is_crossed(Configuration(q.cells, Color::Blue), q));
    CHECK(!is_crossed(Configuration(q.cells, Color::Yellow), q));
    Estimate lo = crossing_probability(q, 0.45, 20000, 3), hi = crossing_probability(q, 0.55, 20000, 3);
    CHECK(lo.estimate < hi.estimate);
}

TEST_CASE("symmetric difference") {
    DiscreteQuad q = rectangle_quad(0, 0, 1, 1, 1.0 / 32);
    CHECK(symmetric_difference_probability(q, q, 0.5, 2000, 1).estimate == 0.0);
    double prev = 1.0;
    for (int k : {8, 4, 2, 1}) {
        Estimate e = symmetric_difference_probability(q, shrunk_square_quad(1, k, 1.0 / 32), 0.5, 4000, 9);
        CHECK(e.estimate <= prev);
        prev = e.estimate;
    }
}

TEST_CASE("slit quad is crossed with high probability") {
    const int n = 32;
    DiscreteQuad q = slit_quad(1.0, n, 1.0 / (4 * n));
    Estimate e = crossing_probability(q, 0.5, 2000, 5);
    CHECK(e.estimate > 0.9);
}

TEST_CASE("arm patterns") {
    CHECK(ArmPattern::parse("BYBY").str() == "BYBY");
    CHECK(ArmPattern::polychromatic_arms(6).str() == "poly6");
    CHECK_THROWS_AS(ArmPattern::parse("BXB"), Error);
    CHECK_THROWS_AS(ArmPattern::parse(""), Error);
    CHECK_THROWS_AS(ArmPattern::polychromatic_arms(1), Error);
    AnnulusGeometry g({{0, 1.0 / 32}, 2.0 / 32, 8.0 / 32, false}, 1.0 / 32);
    Configuration c = sample_configuration(g.region(), 0.5, 1);
    try {
        has_arms(c, g, ArmPattern::parse("BBY"));
        FAIL("mixed patterns are not supported");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidArgument);
    }
}

TEST_CASE("annulus geometry") {
    const double mesh = 1.0 / 16;
    AnnulusGeometry g({{0, mesh}, mesh, 3 * mesh, false}, mesh);
    CHECK(g.size() == 12);
    CHECK(g.inner_ring().size() == 6);
    CHECK_THROWS_AS(AnnulusGeometry({{0, 0}, mesh / 2, 1.0, false}, mesh), Error);
    AnnulusGeometry h({{0, 0}, 2 * mesh, 6 * mesh, true}, mesh);
    for (HexCoord c : h.region()->cells()) CHECK(c.b >= 0);
    // East to west along the inner boundary.
    const auto& ring = h.inner_ring();
    CHECK(hex_center(h.region()->cell(std::size_t(ring.front())), mesh).x > 0);
    CHECK(hex_center(h.region()->cell(std::size_t(ring.back())), mesh).x < 0);
}

TEST_CASE("exhaustive: arm events match the BFS oracle on the 12-cell annulus") {
    const double mesh = 1.0 / 16;
    AnnulusGeometry g({{0, mesh}, mesh, 3 * mesh, false}, mesh);
    oracle::AnnulusOracle o({0, mesh}, mesh, 3 * mesh, mesh, false);
    REQUIRE(o.cells.size() == g.size());
    const auto& cells = g.region()->cells();
    ArmDetector det(g);
    int bad = 0;
    double p4 = 0;
    for (std::uint64_t m = 0; m < (1u << 12); ++m) {
        auto b = bits(m, 12);
        auto blue = oracle::blue_of(cells, m);
        bool four = det.has_arms(b.data(), ArmPattern::parse("BYBY"));
        bad += four != o.alternating(blue, 4, 1);
        bad += det.has_arms(b.data(), ArmPattern::parse("BY")) != o.alternating(blue, 2, 1);
        bad += det.has_arms(b.data(), ArmPattern::parse("B")) != o.alternating(blue, 1, 1);
        p4 += four;
    }
    CHECK(bad == 0);
    p4 /= 4096;
    Estimate e = estimate_arm_probability(g, ArmPattern::parse("BYBY"), 0.5, 100000, 8);
    CHECK(std::abs(e.estimate - p4) <= 3 * std::sqrt(p4 * (1 - p4) / 1e5));
}

TEST_CASE("arm events match the oracle on random configurations, whole and half plane") {
    const double mesh = 1.0 / 32;
    struct Case {
        Point center;
        double inner, outer;
        bool half;
        std::vector<std::string> patterns;
    };
    std::vector<Case> cases = {{{0, mesh}, 2 * mesh, 8 * mesh, false, {"B", "BY", "BYBY"}},
                               {{0, 0}, 2 * mesh, 8 * mesh, true, {"B", "BY", "YB", "BYB", "YBY"}}};
    for (const Case& cs : cases) {
        AnnulusGeometry g({cs.center, cs.inner, cs.outer, cs.half}, mesh);
        oracle::AnnulusOracle o(cs.center, cs.inner, cs.outer, mesh, cs.half);
        REQUIRE(o.cells.size() == g.size());
        ArmDetector det(g);
        int bad = 0;
        for (std::uint32_t r = 0; r < 3000; ++r) {
            Configuration c = sample_configuration(g.region(), 0.5, 19, r);
            std::set<HexCoord> blue;
            for (std::size_t i = 0; i < c.size(); ++i)
                if (c.blue_at(i)) blue.insert(g.region()->cell(i));
            for (const std::string& s : cs.patterns)
                bad += det.has_arms(c.raw().data(), ArmPattern::parse(s)) !=
                       o.alternating(blue, s.size(), s[0] == 'B');
        }
        CHECK(bad == 0);
    }
}

TEST_CASE("exhaustive: half-plane annulus arms match the oracle") {
    const double mesh = 1.0 / 16;
    AnnulusGeometry g({{0, 0}, 2 * mesh, 3.5 * mesh, true}, mesh);
    oracle::AnnulusOracle o({0, 0}, 2 * mesh, 3.5 * mesh, mesh, true);
    REQUIRE(o.cells.size() == g.size());
    REQUIRE(g.size() <= 16);
    const auto& cells = g.region()->cells();
    ArmDetector det(g);
    int bad = 0;
    for (std::uint64_t m = 0; m < (std::uint64_t(1) << g.size()); ++m) {
        auto b = bits(m, g.size());
        auto blue = oracle::blue_of(cells, m);
        for (std::string s : {"BY", "YB", "BYB"})
            bad += det.has_arms(b.data(), ArmPattern::parse(s)) != o.alternating(blue, s.size(), s[0] == 'B');
    }
    CHECK(bad == 0);
}

TEST_CASE("arm events: subsumption and color-swap symmetry") {
    const double mesh = 1.0 / 32;
    AnnulusGeometry g({{0, mesh}, 2 * mesh, 12 * mesh, false}, mesh);
    AnnulusGeometry h({{0, 0}, 2 * mesh, 12 * mesh, true}, mesh);
    CHECK(has_arms(Configuration(g.region(), Color::Blue), g, ArmPattern::parse("B")));
    CHECK(!has_arms(Configuration(g.region(), Color::Blue), g, ArmPattern::parse("BY")));
    for (std::uint32_t r = 0; r < 2000; ++r) {
        Configuration c = sample_configuration(g.region(), 0.5, 4, r);
        bool four = has_arms(c, g, ArmPattern::parse("BYBY"));
        if (four) CHECK(has_arms(c, g, ArmPattern::parse("BY")));
        CHECK(four == has_arms(swapped(c), g, ArmPattern::parse("YBYB")));
        CHECK(has_arms(c, g, ArmPattern::parse("BY")) == has_arms(swapped(c), g, ArmPattern::parse("BY")));
        if (has_arms(c, g, ArmPattern::polychromatic_arms(4))) CHECK(has_arms(c, g, ArmPattern::polychromatic_arms(2)));
        if (four) CHECK(has_arms(c, g, ArmPattern::polychromatic_arms(4)));

        Configuration d = sample_configuration(h.region(), 0.5, 4, r);
        CHECK(has_arms(d, h, ArmPattern::parse("BYB")) == has_arms(swapped(d), h, ArmPattern::parse("YBY")));
        if (has_arms(d, h, ArmPattern::parse("BYB"))) CHECK(has_arms(d, h, ArmPattern::parse("BY")));
    }
}

TEST_CASE("arm probabilities decrease with the outer radius") {
    const double mesh = 1.0 / 32;
    double prev = 1.0;
    for (double outer : {4.0, 8.0, 16.0}) {
        AnnulusGeometry g({{0, mesh}, 2 * mesh, outer * mesh, false}, mesh);
        double e = estimate_arm_probability(g, ArmPattern::parse("BYBY"), 0.5, 4000, 2).estimate;
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("polychromatic six-arm probability decays faster than ratio^-2") {
    const double mesh = 1.0 / 64;
    std::vector<ScalePoint> pts;
    for (double k : {8.0, 16.0, 32.0}) {
        AnnulusGeometry g({{0, mesh}, 2 * mesh, 2 * k * mesh, false}, mesh);
        Estimate e = estimate_arm_probability(g, ArmPattern::polychromatic_arms(6), 0.5, 10000, 3);
        pts.push_back({k, e.estimate, e.std_error});
    }
    CHECK(fit_arm_exponent(pts).exponent > 2.0);
}

TEST_CASE("four-arm quasi-multiplicativity") {
    const double mesh = 1.0 / 64;
    auto a4 = [&](double in, double out) {
        AnnulusGeometry g({{0, mesh}, in * mesh, out * mesh, false}, mesh);
        return estimate_arm_probability(g, ArmPattern::parse("BYBY"), 0.5, 10000, 5).estimate;
    };
    double whole = a4(2, 32), a = a4(2, 8), b = a4(8, 32);
    CHECK(whole >= 0.1 * a * b);
}

TEST_CASE("exponent fit") {
    std::vector<ScalePoint> exact;
    for (double r : {2.0, 4.0, 8.0, 16.0}) exact.push_back({r, std::pow(r, -1.25)});
    ExponentFit f = fit_arm_exponent(exact);
    CHECK(std::abs(f.exponent - 1.25) < 1e-9);
    CHECK(std::abs(f.intercept) < 1e-9);
    try {
        fit_arm_exponent({exact[0], exact[1]});
        FAIL("expected InsufficientScales");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientScales);
    }
    std::vector<ScalePoint> weighted = {{2, 0.5, 0.01}, {4, 0.25, 0.01}, {8, 0.125, 0.01}};
    CHECK(fit_arm_exponent(weighted).exponent == doctest::Approx(1.0));
    CHECK(fit_arm_exponent(weighted).std_error > 0);
}
