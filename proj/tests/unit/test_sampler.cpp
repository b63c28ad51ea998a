#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "nearcrit/connectivity.hpp"
#include "nearcrit/error.hpp"
#include "nearcrit/sampler.hpp"

using namespace nearcrit;

TEST_CASE("probability_open") {
    CHECK(probability_open({0.0, 1.0 / 8, 0.3}) == 0.5);
    const double mesh = 1.0 / 64, a4 = 0.02;
    double pl = probability_open({5.0, mesh, a4}), pm = probability_open({2.0, mesh, a4});
    CHECK(pl - pm == doctest::Approx(3.0 * mesh * mesh / a4).epsilon(1e-12));
    try {
        probability_open({1e6, 1.0 / 8, 0.1});
        FAIL("expected OutOfRange");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OutOfRange);
    }
    double prev = 0;
    for (double iota = -3; iota <= 3; iota += 0.5) {
        double p = probability_open({iota, mesh, a4});
        CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("sample_configuration: extremes, concentration, determinism") {
    HexDomain small = build_domain({1.0, 1.0 / 16});
    CHECK(sample_configuration(small, 1.0, 3).blue_count() == small.size());

    HexDomain big = build_domain({1.0, 1.0 / 420});
    REQUIRE(big.size() >= 100000);
    Configuration c = sample_configuration(big, 0.5, 11);
    double frac = double(c.blue_count()) / double(c.size());
    CHECK(frac >= 0.494);
    CHECK(frac <= 0.506);

    CHECK(sample_configuration(small, 0.5, 7, 3) == sample_configuration(small, 0.5, 7, 3));
    CHECK(!(sample_configuration(small, 0.5, 7, 3) == sample_configuration(small, 0.5, 7, 4)));
}

TEST_CASE("coupling field: realize at 0 and 1, closed inequality") {
    HexDomain d = build_domain({1.0, 1.0 / 16});
    CouplingField f = sample_coupling(d, 2);
    CHECK(realize(f, 0.0).blue_count() == 0);
    CHECK(realize(f, 1.0).blue_count() == d.size());
    CouplingField flat(d.region, std::vector<double>(d.size(), 0.3));
    CHECK(realize(flat, 0.3).blue_count() == d.size());
    CHECK(realize(flat, std::nextafter(0.3, 0.0)).blue_count() == 0);
}

TEST_CASE("realize has the binomial law (chi-squared against the exact pmf)") {
    std::vector<HexCoord> cells;
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 4; ++b) cells.push_back({a, b});
    auto region = std::make_shared<const HexRegion>(cells);
    REQUIRE(region->size() == 20);
    const double p = 0.4;
    const int draws = 10000;
    std::vector<int> count(21, 0);
    for (int i = 0; i < draws; ++i) count[realize(sample_coupling(region, 99, std::uint32_t(i)), p).blue_count()]++;
    boost::math::binomial_distribution<> bin(20, p);
    // Pool the two tails so every bin expects at least 5 draws.
    std::vector<double> expect(21);
    for (int k = 0; k <= 20; ++k) expect[k] = draws * boost::math::pdf(bin, k);
    int lo = 0, hi = 20;
    while (expect[lo] < 5) ++lo;
    while (expect[hi] < 5) --hi;
    double chi2 = 0;
    int bins = 0;
    for (int k = lo; k <= hi; ++k) {
        double o = 0, e = 0;
        for (int j = (k == lo ? 0 : k); j <= (k == hi ? 20 : k); ++j) o += count[j], e += expect[j];
        chi2 += (o - e) * (o - e) / e;
        ++bins;
    }
    boost::math::chi_squared_distribution<> dist(bins - 1);
    CHECK(chi2 < boost::math::quantile(dist, 0.999));
}

TEST_CASE("monotone coupling and switch census") {
    HexDomain d = build_domain({1.0, 1.0 / 16});
    for (std::uint32_t r = 0; r < 1000; ++r) {
        CouplingField f = sample_coupling(d, 17, r);
        Configuration lo = realize(f, 0.45), hi = realize(f, 0.55);
        std::size_t switched = 0;
        bool subset = true;
        for (std::size_t i = 0; i < d.size(); ++i) {
            subset = subset && (!lo.blue_at(i) || hi.blue_at(i));
            switched += f.u(i) > 0.45 && f.u(i) <= 0.55;
        }
        CHECK(subset);
        CHECK(switched == hi.blue_count() - lo.blue_count());
    }
}

TEST_CASE("increasing events stay true when p grows along the coupling") {
    DiscreteQuad q = rhombus_quad({0, 0}, 6, 6);
    for (std::uint32_t r = 0; r < 500; ++r) {
        CouplingField f = sample_coupling(q.cells, 23, r);
        bool prev = false;
        for (double p : {0.3, 0.4, 0.5, 0.6, 0.7}) {
            bool now = is_crossed(realize(f, p), q);
            CHECK((!prev || now));
            prev = now;
        }
    }
}
