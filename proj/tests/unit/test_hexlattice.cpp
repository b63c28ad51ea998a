#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include <json.hpp>

#include "nearcrit/error.hpp"
#include "nearcrit/hexlattice.hpp"
#include "oracles.hpp"

using namespace nearcrit;

TEST_CASE("neighbors come in E, NE, NW, W, SW, SE order") {
    auto n = neighbors({0, 0});
    std::array<HexCoord, 6> want = {HexCoord{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
    CHECK(n == want);
    auto m = neighbors({3, -2});
    for (int i = 0; i < 6; ++i) CHECK(m[i] == HexCoord{3 + want[i].a, -2 + want[i].b});
}

TEST_CASE("adjacency is symmetric and 6-regular") {
    for (int a = -4; a <= 4; ++a)
        for (int b = -4; b <= 4; ++b) {
            HexCoord h{a, b};
            std::set<HexCoord> distinct;
            for (HexCoord n : neighbors(h)) {
                distinct.insert(n);
                auto back = neighbors(n);
                CHECK(std::find(back.begin(), back.end(), h) != back.end());
            }
            CHECK(distinct.size() == 6);
        }
}

TEST_CASE("hex centers: anchoring and spacing") {
    const double mesh = 0.01;
    Point c = hex_center({0, 0}, mesh);
    CHECK(std::hypot(c.x, c.y) <= mesh * (1 + 1e-12));
    for (HexCoord n : neighbors({2, 5})) {
        Point p = hex_center({2, 5}, mesh), q = hex_center(n, mesh);
        CHECK(std::hypot(p.x - q.x, p.y - q.y) == doctest::Approx(std::sqrt(3.0) * mesh).epsilon(1e-12));
    }
}

TEST_CASE("nearest_cell inverts hex_center") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> d(-500, 500);
    for (int i = 0; i < 10000; ++i) {
        HexCoord h{d(rng), d(rng)};
        CHECK(nearest_cell(hex_center(h, 1.0 / 64), 1.0 / 64) == h);
    }
}

TEST_CASE("build_domain rejects coarse meshes") {
    CHECK_THROWS_AS(build_domain({1.0, 0.5}), Error);
    try {
        build_domain({1.0, 0.5});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateDomain);
    }
    HexDomain d = build_domain({1.0, 1.0 / 8});
    CHECK(d.size() > 0);
    CHECK(!d.boundary_blue.empty());
    CHECK(!d.boundary_yellow.empty());
}

TEST_CASE("build_domain matches the point-in-half-disc oracle") {
    const double r = 1.0, mesh = 1.0 / 64;
    HexDomain d = build_domain({r, mesh});
    // A hexagon lies in the closed half-disc iff its circumscribed disc does
    // on the arc side and its bottom vertex is on or above the axis.
    std::set<HexCoord> want;
    for (int b = 0; b < 200; ++b)
        for (int a = -200; a <= 200; ++a) {
            Point c = hex_center({a, b}, mesh);
            if (std::hypot(c.x, c.y) + mesh <= r + 1e-12 && c.y - mesh >= -1e-12) want.insert({a, b});
        }
    std::set<HexCoord> got(d.cells().begin(), d.cells().end());
    CHECK(got == want);
    double hex_area = 1.5 * std::sqrt(3.0) * mesh * mesh;
    double expected = M_PI / 2 * r * r / hex_area;
    CHECK(std::abs(double(d.size()) - expected) <= 0.1 * expected);
}

TEST_CASE("build_domain is deterministic and boundary colors split at the origin") {
    HexDomain a = build_domain({1.0, 1.0 / 32}), b = build_domain({1.0, 1.0 / 32});
    CHECK(a.cells() == b.cells());
    CHECK(a.boundary_blue == b.boundary_blue);
    for (HexCoord g : a.boundary_blue) {
        CHECK(g.b == -1);
        CHECK(hex_center(g, 1.0 / 32).x < 0);
        CHECK((a.region->contains(g + kDirections[1]) || a.region->contains(g + kDirections[2])));
        CHECK(a.boundary_color(g) == Color::Blue);
    }
    for (HexCoord g : a.boundary_yellow) {
        CHECK(hex_center(g, 1.0 / 32).x > 0);
        CHECK(a.boundary_color(g) == Color::Yellow);
    }
    CHECK(a.boundary_color(a.origin_edge.left) == Color::Blue);
    CHECK(a.boundary_color(a.origin_edge.right) == Color::Yellow);
    CHECK(adjacent(a.origin_edge.left, a.origin_edge.right));
}

TEST_CASE("cell count grows like (radius/mesh)^2") {
    double prev = 0;
    for (double mesh : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        double n = double(build_domain({1.0, mesh}).size());
        if (prev > 0) CHECK(n / prev == doctest::Approx(4.0).epsilon(0.15));
        prev = n;
    }
}

TEST_CASE("domain JSON dump") {
    HexDomain d = build_domain({1.0, 1.0 / 16});
    auto j = nlohmann::json::parse(domain_to_json(d));
    CHECK(j["cells"].get<std::size_t>() == d.size());
    CHECK(j["mesh"].get<double>() == 1.0 / 16);
    CHECK(j["boundary_blue"].get<std::size_t>() == d.boundary_blue.size());
}

TEST_CASE("boundary_ring around one hexagon lists its neighbors counter-clockwise") {
    auto inside = [](HexCoord h) { return h == HexCoord{0, 0}; };
    auto ring = boundary_ring(inside, {0, 0}, {1, 0});
    REQUIRE(ring.size() == 6);
    for (int i = 0; i < 6; ++i) CHECK(ring[i] == kDirections[i]);
}

TEST_CASE("HexRegion adjacency agrees with coordinates") {
    std::vector<HexCoord> cells;
    for (int a = -3; a <= 3; ++a)
        for (int b = 0; b <= 3; ++b)
            if ((a + b) % 3) cells.push_back({a, b});
    HexRegion reg(cells);
    for (std::size_t i = 0; i < reg.size(); ++i)
        for (int d = 0; d < 6; ++d) {
            HexCoord n = reg.cell(i) + kDirections[d];
            int j = reg.neighbor_indices(i)[d];
            CHECK((j >= 0) == (std::find(cells.begin(), cells.end(), n) != cells.end()));
            if (j >= 0) CHECK(reg.cell(std::size_t(j)) == n);
        }
}
