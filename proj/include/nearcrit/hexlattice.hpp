#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nearcrit {

// Axial coordinates of a hexagon (a triangular-lattice site). Hexagons are
// pointy-top; hex (a, b) has its center at mesh * (sqrt(3) * (a + b/2), 1 + 1.5 b),
// so hex (0, 0) sits directly above the origin with its bottom vertex at 0.
struct HexCoord {
    int a = 0;
    int b = 0;

    friend constexpr bool operator==(HexCoord, HexCoord) = default;
    friend constexpr auto operator<=>(HexCoord, HexCoord) = default;
};

constexpr HexCoord operator+(HexCoord x, HexCoord y) { return {x.a + y.a, x.b + y.b}; }
constexpr HexCoord operator-(HexCoord x, HexCoord y) { return {x.a - y.a, x.b - y.b}; }

struct HexCoordHash {
    std::size_t operator()(HexCoord h) const noexcept {
        std::uint64_t k = (std::uint64_t(std::uint32_t(h.a)) << 32) | std::uint32_t(h.b);
        k ^= k >> 33;
        k *= 0xff51afd7ed558ccdULL;
        k ^= k >> 33;
        return std::size_t(k);
    }
};

// E, NE, NW, W, SW, SE: counter-clockwise starting east.
inline constexpr std::array<HexCoord, 6> kDirections = {
    HexCoord{1, 0}, HexCoord{0, 1}, HexCoord{-1, 1}, HexCoord{-1, 0}, HexCoord{0, -1}, HexCoord{1, -1}};

std::array<HexCoord, 6> neighbors(HexCoord h);

// Index of d in kDirections, or -1 if h and h + d are not adjacent.
int direction_index(HexCoord d);

inline bool adjacent(HexCoord x, HexCoord y) { return direction_index(y - x) >= 0; }

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double norm(Point p);

// Exact lattice positions. Units: x in sqrt(3)*mesh/2, y in mesh/2. Both hex
// centers and hexagon vertices have integer coordinates in this frame.
struct LatticePoint {
    int x = 0;
    int y = 0;

    friend constexpr bool operator==(LatticePoint, LatticePoint) = default;
    friend constexpr auto operator<=>(LatticePoint, LatticePoint) = default;
};

constexpr LatticePoint lattice_center(HexCoord h) { return {2 * h.a + h.b, 2 + 3 * h.b}; }

// The vertex shared by three mutually adjacent hexagons.
LatticePoint shared_vertex(HexCoord h1, HexCoord h2, HexCoord h3);

Point to_plane(LatticePoint v, double mesh);

// Squared Euclidean norm in units of (mesh/2)^2.
constexpr std::int64_t lattice_norm2(LatticePoint v) {
    return 3 * std::int64_t(v.x) * v.x + std::int64_t(v.y) * v.y;
}

struct DomainSpec {
    double radius = 1.0;
    double mesh = 1.0 / 64;
};

Point hex_center(HexCoord h, double mesh);
inline Point hex_center(HexCoord h, const DomainSpec& spec) { return hex_center(h, spec.mesh); }

// Hexagon whose closed cell contains p (ties resolved deterministically).
HexCoord nearest_cell(Point p, double mesh);

// A finite set of hexagons with O(1) lookup and precomputed adjacency.
class HexRegion {
public:
    HexRegion() = default;
    explicit HexRegion(std::vector<HexCoord> cells);

    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }
    const std::vector<HexCoord>& cells() const { return cells_; }
    HexCoord cell(std::size_t i) const { return cells_[i]; }

    // -1 when h is not in the region.
    int index_of(HexCoord h) const;
    bool contains(HexCoord h) const { return index_of(h) >= 0; }

    // Indices of the 6 neighbors in direction order, -1 for neighbors outside.
    const std::array<int, 6>& neighbor_indices(std::size_t i) const { return adj_[i]; }

private:
    std::vector<HexCoord> cells_;
    std::vector<std::array<int, 6>> adj_;
    int amin_ = 0, bmin_ = 0, width_ = 0, height_ = 0;
    std::vector<int> lookup_;
};

using RegionPtr = std::shared_ptr<const HexRegion>;

enum class Color : std::uint8_t { Yellow = 0, Blue = 1 };

inline Color swap(Color c) { return c == Color::Blue ? Color::Yellow : Color::Blue; }

// The directed lattice edge at the origin: blue hexagon on its left, yellow on its right.
struct DirectedEdge {
    HexCoord left;
    HexCoord right;

    friend constexpr bool operator==(DirectedEdge, DirectedEdge) = default;
};

struct HexDomain {
    DomainSpec spec;
    RegionPtr region;
    // Row b = -1 hexagons below the real axis that touch a domain cell. They are
    // not domain cells; they carry the fixed boundary colors.
    std::vector<HexCoord> boundary_blue;
    std::vector<HexCoord> boundary_yellow;
    DirectedEdge origin_edge;

    const std::vector<HexCoord>& cells() const { return region->cells(); }
    std::size_t size() const { return region->size(); }

    // Boundary color of a row -1 hexagon; nullopt for anything else.
    std::optional<Color> boundary_color(HexCoord h) const;
};

// Hexagons contained in the closed half-disc: |center| + mesh <= radius and b >= 0.
HexDomain build_domain(const DomainSpec& spec);

// Same construction without the degeneracy check; used for tiny test fixtures.
HexDomain build_domain_unchecked(const DomainSpec& spec);

// Domain with an explicit cell set (rows b >= 0). Boundary rows are derived.
HexDomain make_domain(const DomainSpec& spec, std::vector<HexCoord> cells);

std::string domain_to_json(const HexDomain& domain);

// Walks counter-clockwise around the connected component of `inside` that
// contains `start`, returning the outside hexagons adjacent to it in order
// (a hexagon can appear more than once where the boundary pinches). The first
// returned hexagon is `first_outside`, which must be adjacent to `start`.
std::vector<HexCoord> boundary_ring(const std::function<bool(HexCoord)>& inside, HexCoord start,
                                    HexCoord first_outside);

} // namespace nearcrit
