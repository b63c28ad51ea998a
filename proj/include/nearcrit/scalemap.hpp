#pragma once

#include <cstdint>

#include "nearcrit/calibration.hpp"
#include "nearcrit/connectivity.hpp"
#include "nearcrit/stats.hpp"

namespace nearcrit {

struct ScaleParams {
    double s = 2.0;
    double mu = 0.0;
};

struct EffectiveParameter {
    double lambda = 0.0;            // mu * a4(s mesh) / (s^2 a4(mesh))
    double ratio = 0.0;             // lambda / mu, from the table alone
    double ratio_std_error = 0.0;   // delta method on the two calibration errors
    double limit_prediction = 0.0;  // mu * s^(-3/4)
};

// Parameter at mesh s * mesh whose open probability equals p^mu at `mesh`.
// MissingCalibration when the table lacks either mesh.
EffectiveParameter scaled_configuration_law(double mu, double mesh, double s, const CalibrationStore& table);

// Blowing a domain up by s keeps every cell index and multiplies mesh and radius.
HexDomain rescale_domain(const HexDomain& domain, double s);

enum class LambdaChoice { Table, Naive };

struct ScalingConsistency {
    double lambda = 0.0;
    double p_source = 0.0;  // p^mu at mesh
    double p_target = 0.0;  // p^lambda at s * mesh
    Estimate rescaled;      // crossings of the samples at mesh, viewed at s * mesh
    Estimate direct;        // crossings of samples drawn at s * mesh
    TestResult test;        // pooled two-proportion z test
};

// `quad` lives at mesh s * mesh; its cells are the images of the same cells at
// `mesh`, so the rescaled statistic is the crossing of those cells at p^mu.
ScalingConsistency scaling_consistency_experiment(const ScaleParams& sp, double mesh, const DiscreteQuad& quad,
                                                  const CalibrationStore& table, LambdaChoice choice,
                                                  std::uint64_t n_samples, std::uint64_t seed);

} // namespace nearcrit
