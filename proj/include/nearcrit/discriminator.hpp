#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "nearcrit/connectivity.hpp"
#include "nearcrit/explorer.hpp"
#include "nearcrit/mesoscopic.hpp"
#include "nearcrit/stats.hpp"

namespace nearcrit {

// Exponents and sizes for the statistic. delta is the triangle size; M and the
// thresholds read it as a fraction of a unit domain radius.
struct StatisticParams {
    double delta = 1.0 / 8;
    double beta = 0.05;
    double alpha2_check = 0.2;
    double alpha4_hat = 1.3;
    std::uint64_t M = 0;  // 0: floor(delta^(-2 + alpha2_check + beta))
    std::uint64_t inner_samples = 500;

    // alpha2_check = 1/4 - beta, alpha4_hat = 5/4 + beta.
    static StatisticParams with_defaults(double delta, double beta = 0.05);

    // InvalidArgument unless 2 alpha4_hat - alpha2_check > 2, alpha2_check <= 1,
    // 0 < delta < 1, beta > 0 and inner_samples > 0.
    void validate() const;
    std::uint64_t good_cap() const;
    double upper_threshold() const { return std::pow(delta, -1 + alpha2_check / 2); }
    double lower_threshold() const { return 0.5 * std::pow(delta, alpha2_check - alpha4_hat + 2 * beta); }
};

// --- conditional very-good probabilities ------------------------------------

// Region d as a quad: arcs 0..3 as sides, crossed from arc 0 to arc 2.
// MalformedHit if the arcs do not form a quad.
DiscreteQuad region_quad(const HitContext& ctx);

// Crossing thresholds of region d for `inner_samples` fresh colorings of its
// cells. Sample s reads UniformStream(seed, replica, Inner, s), so estimates at
// different p share their random numbers.
std::vector<double> crossing_thresholds(const DiscreteQuad& quad, std::uint64_t inner_samples, std::uint64_t seed,
                                        std::uint32_t replica = 0);

// Fraction of thresholds <= p, with its binomial standard error.
Estimate probability_from_thresholds(const std::vector<double>& thresholds, double p);

Estimate conditional_vg_probability(const HitContext& ctx, double p, std::uint64_t inner_samples,
                                    std::uint64_t seed, std::uint32_t replica = 0);

// Region d is computed from the path prefix; only its cells are resampled, the
// path cells keep their colors from `config`.
Estimate conditional_vg_probability(const HexDomain& domain, const Configuration& config,
                                    const ExplorationPath& path, const TriangleCells& tri, double p,
                                    std::uint64_t inner_samples, std::uint64_t seed);

// --- the statistic ------------------------------------------------------------

struct TriangleRecord {
    std::size_t k = 0;         // 1-based position in hitting order
    std::size_t triangle = 0;  // grid index
    bool hit = false;
    bool good = false;
    bool malformed = false;    // good, but region d could not be built; not counted
    bool vg = false;
    double cond_prob = 0.0;
    double cond_std_error = 0.0;
    double increment = 0.0;
};

struct StatisticTrace {
    double sampled_p = std::numeric_limits<double>::quiet_NaN();  // law of the configuration, set by the sampler
    double conditioning_p = 0.0;  // law used for the conditional probabilities
    std::uint64_t M = 0;
    std::vector<TriangleRecord> records;  // hitting order, up to T_M
    std::size_t T_M = 0;
    std::size_t good_count = 0;
    double X_value = 0.0;
};

// inf{n : flags[0..n-1] has a true entries} (1-based), or flags.size() + 1.
std::size_t stopping_time(const std::vector<bool>& good_flags, std::uint64_t a);

// Sum over the first T_M triangles in hitting order of good * (vg - P[vg | prefix]),
// with P estimated at p_cond. Inner samples for grid triangle t use
// derive_seed(seed, t) and the given replica number.
StatisticTrace compute_X(const ExplorationPath& path, const TriangleGrid& grid, const StatisticParams& params,
                         double p_cond, std::uint64_t seed, std::uint32_t replica = 0);
// Same, after checking that `path` is the interface of `config`.
StatisticTrace compute_X(const Configuration& config, const ExplorationPath& path, const TriangleGrid& grid,
                         const StatisticParams& params, double p_cond, std::uint64_t seed,
                         std::uint32_t replica = 0);

// X with the conditional probabilities taken at the mu parameter, whatever law
// the configuration came from.
double compute_Z(const Configuration& config, const ExplorationPath& path, const TriangleGrid& grid,
                 const StatisticParams& params, double p_mu, std::uint64_t seed, std::uint32_t replica = 0);

// n_replicas traces sampled at p_sample and conditioned at p_cond. Replica i
// draws its configuration from UniformStream(seed, i) and its inner samples
// from derive_seed(seed, 1).
std::vector<StatisticTrace> sample_traces(const HexDomain& domain, const TriangleGrid& grid,
                                          const StatisticParams& params, double p_sample, double p_cond,
                                          std::uint64_t n_replicas, std::uint64_t seed);

struct MartingaleReport {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
    std::uint64_t M = 0;
    double mean_bound = 0.0;      // 3 sqrt(M/n)
    double variance_bound = 0.0;  // M (1 + 3/sqrt(n))
    bool mean_ok = false;
    bool variance_ok = false;
};

// MixedParameters unless every trace was sampled and conditioned at
// `sampled_at` with the same M.
MartingaleReport martingale_diagnostics(const std::vector<StatisticTrace>& traces, double sampled_at);

// --- conditional gap ------------------------------------------------------------

struct GapSample {
    std::uint32_t replica = 0;
    std::size_t triangle = 0;
    std::size_t region_size = 0;
    double prob_mu = 0.0;
    std::vector<double> prob_lambda;  // one per lambda
};

struct GapSummary {
    double lambda = 0.0;
    double p_lambda = 0.0;
    Summary gap;           // over samples of P^lambda - P^mu
    TestResult positive;   // one-sided z test of mean gap > 0
};

struct GapExperiment {
    double p_mu = 0.0;
    std::uint64_t replicas_used = 0;
    std::vector<GapSample> samples;
    std::vector<GapSummary> per_lambda;
};

struct GapConfig {
    double mu = 0.0;
    std::vector<double> lambdas;
    double delta = 1.0 / 8;
    double alpha4_unit = 1.0;
    std::uint64_t n_good_samples = 200;
    std::uint64_t inner_samples = 500;
    std::uint64_t max_replicas = 2'000'000;
    std::uint64_t seed = 1;
};

// Samples configurations at p^mu and, for the first n_good_samples good
// triangles in (replica, hitting) order, estimates P^iota[hc(d)] for mu and
// every lambda from one shared set of inner samples.
GapExperiment conditional_gap_experiment(const HexDomain& domain, const GapConfig& config);

// --- half-annulus census ------------------------------------------------------

struct AnnulusRecord {
    int j = 0;
    double inner = 0.0;  // r 2^(-j-1)
    double outer = 0.0;  // r 2^(-j)
    std::vector<std::size_t> triangles;  // grid indices of T_j
    std::size_t G = 0;
    std::size_t good_violations = 0;  // triangles with G'_j but not good
};

struct AnnulusCensus {
    double J = 0.0;
    std::vector<AnnulusRecord> annuli;
};

// J solving delta^beta = c5 (r 2^-J)^(2 - alpha2_check).
double census_depth(double delta, double radius, const StatisticParams& params, double c5 = 1.0);

// Precomputed cell sets for repeated censuses on one domain.
class AnnulusCensusPlan {
public:
    // DegenerateScale when some annulus j <= floor(J) holds no triangle.
    AnnulusCensusPlan(const HexDomain& domain, const TriangleGrid& grid, const StatisticParams& params);

    double J() const { return J_; }
    AnnulusCensus census(const Configuration& config) const;
    // G'_j(t) for one triangle of annulus slot `slot`.
    bool arms_event(const Configuration& config, std::size_t slot, std::size_t which) const;

private:
    struct TriangleMask {
        std::size_t triangle;
        std::vector<std::uint8_t> allowed;  // per domain cell
        std::vector<int> gate_b;            // domain indices of b-row gate cells
    };
    struct Slot {
        AnnulusRecord shape;
        std::vector<TriangleMask> masks;
        std::vector<std::uint8_t> blue_target, yellow_target;
    };
    const HexDomain* domain_;
    const TriangleGrid* grid_;
    double J_ = 0.0;
    std::vector<Slot> slots_;
};

AnnulusCensus count_good_in_annuli(const HexDomain& domain, const Configuration& config, const TriangleGrid& grid,
                                   const StatisticParams& params);

struct SecondMoment {
    int j = 0;
    std::size_t n = 0;
    double mean = 0.0;
    double second_moment = 0.0;
    double frequency_half_mean = 0.0;  // fraction of samples with G_j >= mean / 2
    double c7 = 0.0;                   // (E[G^2] - E[G]) / E[G]^2, 0 when E[G] = 0
};

// InvalidArgument with fewer than min_samples censuses.
std::vector<SecondMoment> second_moment_diagnostics(const std::vector<AnnulusCensus>& samples,
                                                    std::size_t min_samples = 100);

// --- separation ---------------------------------------------------------------

struct SeparationResult {
    double p_mu = 0.0;
    double p_lambda = 0.0;
    std::vector<StatisticTrace> under_mu;
    std::vector<StatisticTrace> under_lambda;
    double upper_threshold = 0.0;
    double lower_threshold = 0.0;
    double freq_mu_above_upper = 0.0;      // compare with delta^beta
    double freq_lambda_below_lower = 0.0;
    double tail_bound = 0.0;               // delta^beta
    TestResult welch;                      // lambda sample above mu sample
    TestResult mann_whitney;
};

// Z samples under p^mu and p^lambda (independent seeds), both conditioned at p^mu.
SeparationResult separation_experiment(const HexDomain& domain, double mu, double lambda, double alpha4_unit,
                                       const StatisticParams& params, std::uint64_t n_replicas,
                                       std::uint64_t seed);

std::vector<double> z_values(const std::vector<StatisticTrace>& traces);

} // namespace nearcrit
