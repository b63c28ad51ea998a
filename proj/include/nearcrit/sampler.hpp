#pragma once

#include <cstdint>
#include <vector>

#include "nearcrit/hexlattice.hpp"
#include "nearcrit/rng.hpp"

namespace nearcrit {

struct NearCriticalParam {
    double iota = 0.0;
    double mesh = 1.0 / 64;
    double alpha4_unit = 1.0;
};

// 1/2 + iota * mesh^2 / alpha4_unit; OutOfRange when the result leaves (0, 1).
double probability_open(const NearCriticalParam& param);

class Configuration {
public:
    Configuration() = default;
    Configuration(RegionPtr region, std::vector<std::uint8_t> blue)
        : region_(std::move(region)), blue_(std::move(blue)) {}
    Configuration(RegionPtr region, Color fill)
        : region_(std::move(region)), blue_(region_->size(), fill == Color::Blue) {}

    const HexRegion& region() const { return *region_; }
    const RegionPtr& region_ptr() const { return region_; }
    std::size_t size() const { return blue_.size(); }

    bool blue_at(std::size_t i) const { return blue_[i] != 0; }
    Color color_at(std::size_t i) const { return blue_[i] ? Color::Blue : Color::Yellow; }
    void set(std::size_t i, Color c) { blue_[i] = c == Color::Blue; }

    // Color of a region cell; throws for cells outside the region.
    Color color(HexCoord h) const;
    void set(HexCoord h, Color c);

    std::size_t blue_count() const;
    const std::vector<std::uint8_t>& raw() const { return blue_; }

    friend bool operator==(const Configuration& x, const Configuration& y) { return x.blue_ == y.blue_; }

private:
    RegionPtr region_;
    std::vector<std::uint8_t> blue_;
};

class CouplingField {
public:
    CouplingField() = default;
    CouplingField(RegionPtr region, std::vector<double> u) : region_(std::move(region)), u_(std::move(u)) {}

    const HexRegion& region() const { return *region_; }
    const RegionPtr& region_ptr() const { return region_; }
    double u(std::size_t i) const { return u_[i]; }
    const std::vector<double>& values() const { return u_; }

private:
    RegionPtr region_;
    std::vector<double> u_;
};

// Uniforms for every cell of `region`, keyed by cell coordinates, so two
// regions sharing a cell see the same value for it.
CouplingField sample_coupling(const RegionPtr& region, std::uint64_t seed, std::uint32_t replica = 0,
                              StreamTag tag = StreamTag::Configuration);
CouplingField sample_coupling(const HexDomain& domain, std::uint64_t seed, std::uint32_t replica = 0);

// Blue iff u <= p.
Configuration realize(const CouplingField& field, double p);

Configuration sample_configuration(const RegionPtr& region, double p, std::uint64_t seed,
                                   std::uint32_t replica = 0, StreamTag tag = StreamTag::Configuration);
Configuration sample_configuration(const HexDomain& domain, double p, std::uint64_t seed,
                                   std::uint32_t replica = 0);

} // namespace nearcrit
