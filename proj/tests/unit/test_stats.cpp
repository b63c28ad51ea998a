#include <doctest.h>

#include <cmath>

#include "nearcrit/stats.hpp"

using namespace nearcrit;

// Reference values from scipy.stats / statsmodels.

TEST_CASE("summary") {
    Summary s = summarize({1, 2, 3, 4});
    CHECK(s.n == 4);
    CHECK(s.mean == 2.5);
    CHECK(s.variance == doctest::Approx(5.0 / 3));
    CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 12)));
    CHECK(summarize({7}).variance == 0.0);
    CHECK(summarize({}).n == 0);
}

TEST_CASE("welch test") {
    std::vector<double> a = {1.2, 3.4, 2.2, 5.1, 0.3, 2.8}, b = {2.9, 4.4, 6.1, 3.8, 5.5, 7.0, 4.1};
    TestResult r = welch_test(a, b);
    CHECK(r.statistic == doctest::Approx(2.6566829100556717).epsilon(1e-10));
    CHECK(r.p_two_sided == doctest::Approx(0.02420745485795508).epsilon(1e-8));
    CHECK(r.p_greater == doctest::Approx(0.01210372742897754).epsilon(1e-8));
    TestResult flat = welch_test({0, 0, 0}, {0, 0});
    CHECK(flat.p_greater == 1.0);
    CHECK(flat.p_two_sided == 1.0);
    TestResult shifted = welch_test({0, 0, 0}, {1, 1});
    CHECK(shifted.p_greater == 0.0);
}

TEST_CASE("mann-whitney with ties") {
    std::vector<double> x = {1, 2, 2, 3, 5, 5, 5, 8}, y = {2, 4, 5, 6, 6, 9, 10};
    TestResult r = mann_whitney(x, y);
    CHECK(r.p_greater == doctest::Approx(0.056633811817006045).epsilon(1e-8));
    CHECK(r.p_two_sided == doctest::Approx(0.11326762363401209).epsilon(1e-8));
    CHECK(mann_whitney({1, 1}, {1, 1}).p_greater == 1.0);
}

TEST_CASE("two-proportion z test") {
    TestResult r = two_proportion_test(45, 210, 60, 200);
    CHECK(r.statistic == doctest::Approx(1.9875827308762817).epsilon(1e-10));
    CHECK(r.p_two_sided == doctest::Approx(0.04685785778310598).epsilon(1e-8));
    CHECK(r.p_greater == doctest::Approx(1 - 0.976571071108447).epsilon(1e-8));
    CHECK(two_proportion_test(0, 10, 0, 10).p_two_sided == 1.0);
}

TEST_CASE("mean above zero") {
    TestResult r = mean_above_zero({0.1, -0.2, 0.4, 0.3, 0.05});
    CHECK(r.statistic == doctest::Approx(1.245174170787497).epsilon(1e-10));
    CHECK(r.p_greater == doctest::Approx(0.10653386740485182).epsilon(1e-8));
    CHECK(mean_above_zero({0, 0, 0}).p_two_sided == 1.0);
    CHECK(mean_above_zero({0.5, 0.5}).p_greater == 0.0);
}
