#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "nearcrit/explorer.hpp"
#include "nearcrit/hexlattice.hpp"
#include "nearcrit/sampler.hpp"

namespace nearcrit {

// Equilateral triangle t with horizontal base [x0, x0 + size] at height y0,
// plus the gate rectangle r, its three horizontal lines l, m, b and the inner
// triangle t'. Proportions follow the usual picture: base 50, r = [22,28]x[0,12],
// m at height 6, t' with base [5,45] at height 6.
struct TriangleSpec {
    Point anchor;
    double size = 0.0;

    double x0() const { return anchor.x; }
    double y0() const { return anchor.y; }
    double gate_left() const { return anchor.x + 0.44 * size; }
    double gate_right() const { return anchor.x + 0.56 * size; }
    double l_height() const { return anchor.y; }
    double m_height() const { return anchor.y + 0.12 * size; }
    double b_height() const { return anchor.y + 0.24 * size; }
    Point apex() const;
    Point centroid() const;

    bool in_t(Point p) const;       // closed triangle
    bool in_r(Point p) const;       // open rectangle
    bool in_tprime(Point p) const;  // closed inner triangle
    Point tprime_right_corner() const;
    Point tprime_left_corner() const;
    Point tprime_apex() const;
};

// Per-hexagon membership bits for one triangle at a given mesh.
enum CellClass : std::uint8_t {
    kInT = 1,        // center in closed t
    kInR = 2,        // center in open r
    kGateL = 4,      // row just below r inside the gate columns (the line l)
    kGateM = 8,      // R row nearest to the line m
    kGateB = 16,     // row just above r inside the gate columns (the line b)
    kInTPrime = 32,  // center in closed t' and every neighbor's center in t
};

class TriangleCells {
public:
    TriangleCells() = default;
    TriangleCells(const TriangleSpec& spec, double mesh);

    const TriangleSpec& spec() const { return spec_; }
    double mesh() const { return mesh_; }
    std::uint8_t classify(HexCoord h) const;
    bool has(HexCoord h, std::uint8_t bits) const { return (classify(h) & bits) != 0; }

    // Hitting set for sigma: hexagons of t outside r and outside the l row.
    bool in_hit_set(HexCoord h) const {
        std::uint8_t c = classify(h);
        return (c & kInT) && !(c & (kInR | kGateL));
    }

    // All hexagons with a nonzero class, sorted.
    const std::vector<HexCoord>& cells() const { return cells_; }

private:
    TriangleSpec spec_;
    double mesh_ = 0.0;
    int amin_ = 0, bmin_ = 0, width_ = 0, height_ = 0;
    std::vector<std::uint8_t> box_;
    std::vector<HexCoord> cells_;
};

struct TriangleGrid {
    double delta = 0.0;
    double mesh = 0.0;
    std::vector<TriangleSpec> triangles;
    std::vector<TriangleCells> cells;

    std::size_t size() const { return triangles.size(); }
};

// Triangles of size delta centred on a triangular grid of spacing 4 delta, one
// grid site straight above the origin, kept when every point of the triangle
// is at distance >= delta from the boundary of the half-disc.
TriangleGrid build_grid(const HexDomain& domain, double delta);

// Grid restricted to explicit triangles (fixtures).
TriangleGrid make_grid(double mesh, std::vector<TriangleSpec> triangles);

struct HitInfo {
    std::optional<std::size_t> sigma;  // step index; empty means not hit
    bool good = false;

    // Serialized hitting time: the step index, or 1.0 when not hit.
    double serialized() const { return sigma ? double(*sigma) : 1.0; }
};

HitInfo hitting_time(const ExplorationPath& path, const TriangleCells& tri);
inline bool is_good(const ExplorationPath& path, const TriangleCells& tri) { return hitting_time(path, tri).good; }

// The four boundary arcs of region d, each a sequence of outside hexagons in
// counter-clockwise order: arc 0 from a1 to a0, arc 1 from a0 around the top to
// a2, arc 2 (blue path cells) from a2 to the gate, arc 3 (yellow path cells)
// from the gate to a1.
struct HitContext {
    std::size_t sigma = 0;
    bool good = false;
    HexCoord a0, a1, a2;
    std::vector<HexCoord> region_d;
    std::array<std::vector<HexCoord>, 4> arcs;
    // Path steps [0, sigma] as a cell set, with colors.
    std::vector<HexCoord> prefix_cells;
};

// Throws MalformedHit if the triangle is not good or the arcs cannot be located.
HitContext compute_region(const ExplorationPath& path, const TriangleCells& tri);
// Also checks the prefix colors against `config` (InvalidArgument on mismatch).
HitContext compute_region(const ExplorationPath& path, const TriangleCells& tri, const HexDomain& domain,
                          const Configuration& config);

// After sigma, does the walk reach arc 0 before arc 1?
bool is_very_good(const ExplorationPath& path, const HitContext& ctx);
bool is_very_good(const ExplorationPath& path, const TriangleCells& tri, const HexDomain& domain,
                  const Configuration& config);

// Stable order by hitting time; triangles that are not hit keep grid order at the end.
std::vector<std::size_t> order_by_hitting(const std::vector<HitInfo>& hits);
std::vector<HitInfo> hit_all(const ExplorationPath& path, const TriangleGrid& grid);

} // namespace nearcrit
