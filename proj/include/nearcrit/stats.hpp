#pragma once

#include <cstdint>
#include <vector>

namespace nearcrit {

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased, 0 when n < 2
    double std_error = 0.0;
};

Summary summarize(const std::vector<double>& xs);

// One-sided tests report p-values for "second sample is larger".
struct TestResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_greater = 1.0;
    double p_two_sided = 1.0;
};

// Welch's unequal-variance t test of mean(b) - mean(a).
TestResult welch_test(const std::vector<double>& a, const std::vector<double>& b);

// Mann-Whitney U with the normal approximation and tie correction.
TestResult mann_whitney(const std::vector<double>& a, const std::vector<double>& b);

// Pooled two-proportion z test of k2/n2 - k1/n1.
TestResult two_proportion_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2);

// One-sample z statistic of the mean against zero with its one-sided p-value.
TestResult mean_above_zero(const std::vector<double>& xs);

} // namespace nearcrit
