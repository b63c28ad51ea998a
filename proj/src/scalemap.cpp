#include "nearcrit/scalemap.hpp"

#include "nearcrit/error.hpp"
#include "nearcrit/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace nearcrit {

EffectiveParameter scaled_configuration_law(double mu, double mesh, double s, const CalibrationStore& table) {
    if (!(s > 0) || !(mesh > 0)) throw Error(ErrorKind::InvalidArgument, "scale and mesh must be positive");
    CalibrationRecord fine = table.require(mesh);
    CalibrationRecord coarse = table.require(s * mesh);
    EffectiveParameter out;
    out.ratio = coarse.alpha4_unit / (s * s * fine.alpha4_unit);
    out.lambda = mu * out.ratio;
    // Relative errors add in quadrature for a quotient of independent runs;
    // s = 1 divides an entry by itself.
    double rel = std::hypot(coarse.std_error / coarse.alpha4_unit, fine.std_error / fine.alpha4_unit);
    out.ratio_std_error = coarse.mesh == fine.mesh ? 0.0 : out.ratio * rel;
    out.limit_prediction = mu * std::pow(s, -0.75);
    return out;
}

HexDomain rescale_domain(const HexDomain& domain, double s) {
    if (!(s > 0)) throw Error(ErrorKind::InvalidArgument, "scale must be positive");
    HexDomain out = domain;
    out.spec.mesh *= s;
    out.spec.radius *= s;
    return out;
}

namespace {

Estimate crossing_frequency(const DiscreteQuad& quad, double p, std::uint64_t n, std::uint64_t seed) {
    std::vector<std::uint8_t> hit(n, 0);
    const auto& reg = *quad.cells;
    parallel_for_state(
        n, [&] { return QuadIndex(quad); },
        [&](QuadIndex& index, std::size_t i) {
            UniformStream stream(seed, std::uint32_t(i), StreamTag::Scale);
            std::vector<std::uint8_t> blue(reg.size());
            for (std::size_t c = 0; c < reg.size(); ++c) blue[c] = stream(reg.cell(c)) <= p;
            hit[i] = index.crossed(blue);
        });
    return binomial_estimate(std::uint64_t(std::count(hit.begin(), hit.end(), 1)), n);
}

} // namespace

ScalingConsistency scaling_consistency_experiment(const ScaleParams& sp, double mesh, const DiscreteQuad& quad,
                                                  const CalibrationStore& table, LambdaChoice choice,
                                                  std::uint64_t n_samples, std::uint64_t seed) {
    ScalingConsistency out;
    const double coarse = sp.s * mesh;
    out.lambda = choice == LambdaChoice::Table ? scaled_configuration_law(sp.mu, mesh, sp.s, table).lambda : sp.mu;
    out.p_source = probability_open({sp.mu, mesh, table.require(mesh).alpha4_unit});
    out.p_target = probability_open({out.lambda, coarse, table.require(coarse).alpha4_unit});
    out.rescaled = crossing_frequency(quad, out.p_source, n_samples, derive_seed(seed, 1));
    out.direct = crossing_frequency(quad, out.p_target, n_samples, derive_seed(seed, 2));
    out.test = two_proportion_test(out.rescaled.successes, out.rescaled.trials, out.direct.successes,
                                   out.direct.trials);
    return out;
}

} // namespace nearcrit
