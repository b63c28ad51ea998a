#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nearcrit/hexlattice.hpp"
#include "nearcrit/sampler.hpp"

namespace nearcrit {

struct Estimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
};

// sqrt(p(1-p)/n) binomial estimate.
Estimate binomial_estimate(std::uint64_t successes, std::uint64_t trials);

// A hexagon region with four boundary arcs. Arcs are sequences of hexagons
// outside the region and adjacent to it, listed counter-clockwise. A crossing
// is a blue path of region cells from a cell next to side 0 to a cell next to
// side 2.
struct DiscreteQuad {
    RegionPtr cells;
    std::array<std::vector<HexCoord>, 4> sides;
};

// Builds a quad from a simply connected cell set. Every outside hexagon adjacent
// to the set is passed to `side_of`, which returns its arc (0..3) or -1 to leave
// it unassigned. Throws InvalidArgument if an arc is not contiguous along the
// boundary, arcs are out of counter-clockwise order, or side 0 or 2 is empty.
DiscreteQuad make_quad(std::vector<HexCoord> cells, const std::function<int(HexCoord)>& side_of);

// n1 x n2 rhombus spanned by the E and NE directions from `origin`; sides
// 0 and 2 are the W and E edges, sides 1 and 3 the bottom and top.
DiscreteQuad rhombus_quad(HexCoord origin, int n1, int n2);

// Hexagons with centers in [x0,x1] x [y0,y1].
DiscreteQuad rectangle_quad(double x0, double y0, double x1, double y1, double mesh);

// [0,s]^2 minus the slit (s/n, s] x (s/n, 2s/n); side 2 runs from (s,0) to (s,s)
// around the slit.
DiscreteQuad slit_quad(double s, int n, double mesh);

// The unit-style square [0,s]^2 with its right side moved in by k hexagon widths.
DiscreteQuad shrunk_square_quad(double s, int k, double mesh);

bool is_crossed(const Configuration& config, const DiscreteQuad& quad);

// Precomputed adjacency for repeated crossing queries on one quad.
class QuadIndex {
public:
    explicit QuadIndex(const DiscreteQuad& quad);
    const DiscreteQuad& quad() const { return *quad_; }
    std::size_t size() const { return quad_->cells->size(); }
    // blue[i] is the color of quad cell i.
    bool crossed(const std::vector<std::uint8_t>& blue) const;
    bool crossed(const std::uint8_t* blue) const;
    // With uniforms u[i], the quad is crossed at p (blue iff u <= p) exactly
    // when p >= threshold(u). Infinity if no crossing path exists.
    double threshold(const double* u) const;

private:
    const DiscreteQuad* quad_;
    std::vector<std::uint8_t> touch0_, touch2_;
    mutable std::vector<int> stack_;
    mutable std::vector<std::uint8_t> seen_;
};

Estimate crossing_probability(const DiscreteQuad& quad, double p, std::uint64_t n_samples, std::uint64_t seed);

Estimate symmetric_difference_probability(const DiscreteQuad& a, const DiscreteQuad& b, double p,
                                          std::uint64_t n_samples, std::uint64_t seed);

// --- arm events -----------------------------------------------------------

struct AnnulusSpec {
    Point center;
    double inner = 0.0;
    double outer = 0.0;
    bool half_plane = false;
};

struct ArmPattern {
    std::vector<Color> colors;
    // When set, the event is "colors.size() disjoint arms, not all of one color";
    // the listed colors are ignored.
    bool polychromatic = false;

    static ArmPattern parse(const std::string& letters);  // e.g. "BYBY"
    static ArmPattern polychromatic_arms(int k);
    std::size_t size() const { return colors.size(); }
    std::string str() const;
};

// Hexagonalized annulus: cells with center distance in [inner, outer] (and in
// rows b >= 0 for half-plane annuli), the hole inside it, and the inner
// boundary in counter-clockwise order.
class AnnulusGeometry {
public:
    AnnulusGeometry(const AnnulusSpec& spec, double mesh);

    const AnnulusSpec& spec() const { return spec_; }
    double mesh() const { return mesh_; }
    const RegionPtr& region() const { return region_; }
    std::size_t size() const { return region_->size(); }

    // Region indices of cells next to the hole, in counter-clockwise order
    // (east to west for half-plane annuli).
    const std::vector<int>& inner_ring() const { return inner_ring_; }
    bool touches_inner(std::size_t i) const { return inner_flag_[i] != 0; }
    bool touches_outer(std::size_t i) const { return outer_flag_[i] != 0; }

private:
    AnnulusSpec spec_;
    double mesh_;
    RegionPtr region_;
    std::vector<int> inner_ring_;
    std::vector<std::uint8_t> inner_flag_, outer_flag_;
};

// Arm detection on a coloring of the annulus cells (blue[i] for region index i).
class ArmDetector {
public:
    explicit ArmDetector(const AnnulusGeometry& geometry);
    bool has_arms(const std::uint8_t* blue, const ArmPattern& pattern);

    // Crossing clusters in inner-boundary order from the last call, with the
    // number of disjoint arms each can host (computed up to `cap`).
    struct Cluster {
        Color color;
        int capacity;
    };
    std::vector<Cluster> crossing_clusters(const std::uint8_t* blue, int cap);

private:
    int disjoint_arms(const std::uint8_t* blue, int root, int cap);

    const AnnulusGeometry& geo_;
    std::vector<int> parent_;
    std::vector<int> label_;
};

bool has_arms(const Configuration& config, const AnnulusGeometry& geometry, const ArmPattern& pattern);

Estimate estimate_arm_probability(const AnnulusGeometry& geometry, const ArmPattern& pattern, double p,
                                  std::uint64_t n_samples, std::uint64_t seed, StreamTag tag = StreamTag::Arms);

struct ScalePoint {
    double ratio = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;  // optional; 0 means unweighted
};

struct ExponentFit {
    double exponent = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
};

// Least-squares slope of -log(estimate) against log(ratio). Weighted by the
// delta-method variance when every point carries a positive std_error.
ExponentFit fit_arm_exponent(const std::vector<ScalePoint>& series);

} // namespace nearcrit
