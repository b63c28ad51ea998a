#include "nearcrit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace nearcrit {

namespace {

double normal_upper(double z) {
    boost::math::normal n;
    return boost::math::cdf(boost::math::complement(n, z));
}

TestResult from_normal(double z) {
    TestResult r;
    r.statistic = z;
    r.df = std::numeric_limits<double>::infinity();
    if (!std::isfinite(z)) {
        r.p_greater = z > 0 ? 0.0 : 1.0;
        r.p_two_sided = 0.0;
        return r;
    }
    r.p_greater = normal_upper(z);
    r.p_two_sided = std::min(1.0, 2 * normal_upper(std::abs(z)));
    return r;
}

} // namespace

Summary summarize(const std::vector<double>& xs) {
    Summary s;
    s.n = xs.size();
    if (s.n == 0) return s;
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(s.n);
    if (s.n < 2) return s;
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / double(s.n - 1);
    s.std_error = std::sqrt(s.variance / double(s.n));
    return s;
}

TestResult welch_test(const std::vector<double>& a, const std::vector<double>& b) {
    Summary sa = summarize(a), sb = summarize(b);
    TestResult r;
    if (sa.n < 2 || sb.n < 2) return r;
    double va = sa.variance / double(sa.n), vb = sb.variance / double(sb.n);
    double diff = sb.mean - sa.mean;
    if (va + vb == 0) {
        // Both samples constant: the difference is exact.
        r.statistic = diff == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
        r.p_greater = diff > 0 ? 0.0 : 1.0;
        r.p_two_sided = diff == 0 ? 1.0 : 0.0;
        return r;
    }
    r.statistic = diff / std::sqrt(va + vb);
    r.df = (va + vb) * (va + vb) /
           (va * va / double(sa.n - 1) + vb * vb / double(sb.n - 1));
    boost::math::students_t dist(r.df);
    r.p_greater = boost::math::cdf(boost::math::complement(dist, r.statistic));
    r.p_two_sided = std::min(1.0, 2 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic))));
    return r;
}

TestResult mann_whitney(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n1 = a.size(), n2 = b.size();
    TestResult r;
    if (n1 == 0 || n2 == 0) return r;
    std::vector<std::pair<double, int>> all;
    for (double x : a) all.push_back({x, 0});
    for (double x : b) all.push_back({x, 1});
    std::sort(all.begin(), all.end());
    const double n = double(n1 + n2);
    double rank_b = 0, tie_term = 0;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].first == all[i].first) ++j;
        double avg = 0.5 * double(i + 1 + j);
        double t = double(j - i);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k)
            if (all[k].second == 1) rank_b += avg;
        i = j;
    }
    double u = rank_b - double(n2) * double(n2 + 1) / 2;
    double mu = double(n1) * double(n2) / 2;
    double var = double(n1) * double(n2) / 12 * ((n + 1) - tie_term / (n * (n - 1)));
    if (var <= 0) {
        r.statistic = 0;
        return r;
    }
    r = from_normal((u - mu) / std::sqrt(var));
    return r;
}

TestResult two_proportion_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2, std::uint64_t n2) {
    TestResult r;
    if (n1 == 0 || n2 == 0) return r;
    double p1 = double(k1) / double(n1), p2 = double(k2) / double(n2);
    double pool = double(k1 + k2) / double(n1 + n2);
    double se = std::sqrt(pool * (1 - pool) * (1.0 / double(n1) + 1.0 / double(n2)));
    if (se == 0) {
        r.statistic = 0;
        return r;
    }
    return from_normal((p2 - p1) / se);
}

TestResult mean_above_zero(const std::vector<double>& xs) {
    Summary s = summarize(xs);
    TestResult r;
    if (s.n < 2) return r;
    if (s.std_error == 0) {
        r.statistic = s.mean == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), s.mean);
        r.p_greater = s.mean > 0 ? 0.0 : 1.0;
        r.p_two_sided = s.mean == 0 ? 1.0 : 0.0;
        return r;
    }
    r = from_normal(s.mean / s.std_error);
    return r;
}

} // namespace nearcrit
