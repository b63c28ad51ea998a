#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nearcrit/hexlattice.hpp"
#include "nearcrit/sampler.hpp"

namespace nearcrit {

// One directed lattice edge of the interface: `left` is blue, `right` is yellow,
// `head` is the endpoint the walk moves towards.
struct PathStep {
    HexCoord left;
    HexCoord right;
    LatticePoint head;
};

struct ExplorationPath {
    double mesh = 0.0;
    double radius = 0.0;
    LatticePoint start;           // tail of the origin edge, one mesh below 0
    std::vector<PathStep> steps;  // steps[0] is the origin edge

    std::size_t size() const { return steps.size(); }
    Point vertex(std::size_t k) const { return to_plane(steps[k].head, mesh); }
    std::vector<Point> vertices() const;
};

// Interface walk from the origin edge. Stops once the head vertex is within one
// mesh of the arc, or when the hexagon ahead is outside the domain.
ExplorationPath trace(const HexDomain& domain, const Configuration& config);

// The same walk with colors drawn only for the hexagons it visits. Equal to
// trace(domain, sample_configuration(domain, p, seed, replica)).
ExplorationPath trace_sampled(const HexDomain& domain, double p, std::uint64_t seed, std::uint32_t replica = 0);

// Least k with |vertex(k)| >= rho, nullopt if the path never gets that far.
std::optional<std::size_t> exit_time(const ExplorationPath& path, double rho);

// Steps [0, exit_time(rho)]; throws NeverExits when exit_time is empty.
ExplorationPath initial_segment(const ExplorationPath& path, double rho);

// Distinct hexagons touched by steps [0, last] (both sides of every edge).
std::vector<HexCoord> path_cells(const ExplorationPath& path, std::size_t last);

std::string path_to_csv(const ExplorationPath& path);

} // namespace nearcrit
