#include "nearcrit/sampler.hpp"

#include "nearcrit/error.hpp"

#include <algorithm>
#include <numeric>

namespace nearcrit {

double probability_open(const NearCriticalParam& param) {
    if (!(param.mesh > 0) || !(param.alpha4_unit > 0))
        throw Error(ErrorKind::InvalidArgument, "mesh and alpha4_unit must be positive");
    double p = 0.5 + param.iota * param.mesh * param.mesh / param.alpha4_unit;
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::OutOfRange, "open probability outside (0,1)");
    return p;
}

Color Configuration::color(HexCoord h) const {
    int i = region_->index_of(h);
    if (i < 0) throw Error(ErrorKind::InvalidArgument, "cell outside configuration region");
    return color_at(std::size_t(i));
}

void Configuration::set(HexCoord h, Color c) {
    int i = region_->index_of(h);
    if (i < 0) throw Error(ErrorKind::InvalidArgument, "cell outside configuration region");
    set(std::size_t(i), c);
}

std::size_t Configuration::blue_count() const {
    return std::size_t(std::count(blue_.begin(), blue_.end(), std::uint8_t(1)));
}

CouplingField sample_coupling(const RegionPtr& region, std::uint64_t seed, std::uint32_t replica, StreamTag tag) {
    UniformStream stream(seed, replica, tag);
    std::vector<double> u(region->size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = stream(region->cell(i));
    return CouplingField(region, std::move(u));
}

CouplingField sample_coupling(const HexDomain& domain, std::uint64_t seed, std::uint32_t replica) {
    return sample_coupling(domain.region, seed, replica);
}

Configuration realize(const CouplingField& field, double p) {
    std::vector<std::uint8_t> blue(field.values().size());
    for (std::size_t i = 0; i < blue.size(); ++i) blue[i] = field.u(i) <= p;
    return Configuration(field.region_ptr(), std::move(blue));
}

Configuration sample_configuration(const RegionPtr& region, double p, std::uint64_t seed, std::uint32_t replica,
                                   StreamTag tag) {
    UniformStream stream(seed, replica, tag);
    std::vector<std::uint8_t> blue(region->size());
    for (std::size_t i = 0; i < blue.size(); ++i) blue[i] = stream(region->cell(i)) <= p;
    return Configuration(region, std::move(blue));
}

Configuration sample_configuration(const HexDomain& domain, double p, std::uint64_t seed, std::uint32_t replica) {
    return sample_configuration(domain.region, p, seed, replica);
}

} // namespace nearcrit
