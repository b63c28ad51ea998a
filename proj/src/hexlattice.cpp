#include "nearcrit/hexlattice.hpp"

#include "nearcrit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace nearcrit {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateDomain: return "DegenerateDomain";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::InsufficientScales: return "InsufficientScales";
    case ErrorKind::DegenerateScale: return "DegenerateScale";
    case ErrorKind::MalformedHit: return "MalformedHit";
    case ErrorKind::MixedParameters: return "MixedParameters";
    case ErrorKind::MissingCalibration: return "MissingCalibration";
    case ErrorKind::UnknownKind: return "UnknownKind";
    case ErrorKind::NeverExits: return "NeverExits";
    }
    return "Unknown";
}

std::array<HexCoord, 6> neighbors(HexCoord h) {
    std::array<HexCoord, 6> out;
    for (int i = 0; i < 6; ++i) out[i] = h + kDirections[i];
    return out;
}

int direction_index(HexCoord d) {
    for (int i = 0; i < 6; ++i)
        if (kDirections[i] == d) return i;
    return -1;
}

double norm(Point p) { return std::hypot(p.x, p.y); }

LatticePoint shared_vertex(HexCoord h1, HexCoord h2, HexCoord h3) {
    LatticePoint c1 = lattice_center(h1), c2 = lattice_center(h2), c3 = lattice_center(h3);
    return {(c1.x + c2.x + c3.x) / 3, (c1.y + c2.y + c3.y) / 3};
}

Point to_plane(LatticePoint v, double mesh) {
    return {v.x * (std::sqrt(3.0) * 0.5 * mesh), v.y * (0.5 * mesh)};
}

Point hex_center(HexCoord h, double mesh) { return to_plane(lattice_center(h), mesh); }

HexCoord nearest_cell(Point p, double mesh) {
    // Fractional cube coordinates, then the usual cube rounding.
    double fb = (p.y / mesh - 1.0) / 1.5;
    double fa = p.x / (std::sqrt(3.0) * mesh) - 0.5 * fb;
    double fc = -fa - fb;
    double ra = std::round(fa), rb = std::round(fb), rc = std::round(fc);
    double da = std::abs(ra - fa), db = std::abs(rb - fb), dc = std::abs(rc - fc);
    if (da > db && da > dc)
        ra = -rb - rc;
    else if (db > dc)
        rb = -ra - rc;
    return {int(ra), int(rb)};
}

HexRegion::HexRegion(std::vector<HexCoord> cells) : cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end(),
              [](HexCoord x, HexCoord y) { return x.b != y.b ? x.b < y.b : x.a < y.a; });
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    if (cells_.empty()) return;
    int amax = std::numeric_limits<int>::min(), bmax = amax;
    amin_ = bmin_ = std::numeric_limits<int>::max();
    for (HexCoord h : cells_) {
        amin_ = std::min(amin_, h.a);
        amax = std::max(amax, h.a);
        bmin_ = std::min(bmin_, h.b);
        bmax = std::max(bmax, h.b);
    }
    width_ = amax - amin_ + 1;
    height_ = bmax - bmin_ + 1;
    lookup_.assign(std::size_t(width_) * height_, -1);
    for (std::size_t i = 0; i < cells_.size(); ++i)
        lookup_[std::size_t(cells_[i].b - bmin_) * width_ + (cells_[i].a - amin_)] = int(i);
    adj_.resize(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i)
        for (int d = 0; d < 6; ++d) adj_[i][d] = index_of(cells_[i] + kDirections[d]);
}

int HexRegion::index_of(HexCoord h) const {
    int da = h.a - amin_, db = h.b - bmin_;
    if (da < 0 || db < 0 || da >= width_ || db >= height_) return -1;
    return lookup_[std::size_t(db) * width_ + da];
}

std::optional<Color> HexDomain::boundary_color(HexCoord h) const {
    if (h.b != -1) return std::nullopt;
    // Row -1 hexagons touching the domain are exactly the SW/SE neighbors of row 0 cells.
    if (!region->contains(h + kDirections[1]) && !region->contains(h + kDirections[2])) return std::nullopt;
    return lattice_center(h).x < 0 ? Color::Blue : Color::Yellow;
}

HexDomain make_domain(const DomainSpec& spec, std::vector<HexCoord> cells) {
    HexDomain d;
    d.spec = spec;
    for (HexCoord h : cells)
        if (h.b < 0) throw Error(ErrorKind::InvalidArgument, "domain cells must lie in rows b >= 0");
    d.region = std::make_shared<HexRegion>(std::move(cells));
    if (!d.region->contains({0, 0}))
        throw Error(ErrorKind::InvalidArgument, "domain must contain the hexagon above the origin");
    std::vector<HexCoord> ghosts;
    for (HexCoord h : d.region->cells()) {
        if (h.b != 0) continue;
        ghosts.push_back(h + kDirections[4]);
        ghosts.push_back(h + kDirections[5]);
    }
    std::sort(ghosts.begin(), ghosts.end());
    ghosts.erase(std::unique(ghosts.begin(), ghosts.end()), ghosts.end());
    for (HexCoord g : ghosts)
        (lattice_center(g).x < 0 ? d.boundary_blue : d.boundary_yellow).push_back(g);
    d.origin_edge = {{0, -1}, {1, -1}};
    return d;
}

HexDomain build_domain_unchecked(const DomainSpec& spec) {
    if (!(spec.mesh > 0) || !(spec.radius > spec.mesh))
        throw Error(ErrorKind::InvalidArgument, "need 0 < mesh < radius");
    const double rho = spec.radius / spec.mesh;
    // 3X^2 + Y^2 <= 4 (rho - 1)^2 in lattice units; small slack makes the test
    // robust to rho being the rounding of an exact ratio.
    const double bound = 4.0 * (rho - 1.0) * (rho - 1.0) * (1.0 + 1e-12);
    std::vector<HexCoord> cells;
    for (int b = 0;; ++b) {
        double y = 2.0 + 3.0 * b;
        if (y * y > bound) break;
        double xmax = std::sqrt((bound - y * y) / 3.0);
        int alo = int(std::ceil((-xmax - b) / 2.0));
        int ahi = int(std::floor((xmax - b) / 2.0));
        for (int a = alo; a <= ahi; ++a) cells.push_back({a, b});
    }
    return make_domain(spec, std::move(cells));
}

HexDomain build_domain(const DomainSpec& spec) {
    if (!(spec.mesh > 0) || !(spec.radius > 0))
        throw Error(ErrorKind::InvalidArgument, "radius and mesh must be positive");
    if (spec.mesh / spec.radius > 0.125)
        throw Error(ErrorKind::DegenerateDomain, "mesh/radius must be at most 1/8");
    return build_domain_unchecked(spec);
}

std::string domain_to_json(const HexDomain& domain) {
    nlohmann::ordered_json j;
    j["radius"] = domain.spec.radius;
    j["mesh"] = domain.spec.mesh;
    j["cells"] = domain.size();
    j["boundary_blue"] = domain.boundary_blue.size();
    j["boundary_yellow"] = domain.boundary_yellow.size();
    j["origin_edge"] = {{domain.origin_edge.left.a, domain.origin_edge.left.b},
                        {domain.origin_edge.right.a, domain.origin_edge.right.b}};
    return j.dump();
}

std::vector<HexCoord> boundary_ring(const std::function<bool(HexCoord)>& inside, HexCoord start,
                                    HexCoord first_outside) {
    if (!adjacent(start, first_outside) || !inside(start) || inside(first_outside))
        throw Error(ErrorKind::InvalidArgument, "boundary_ring needs an inside/outside adjacent pair");
    std::vector<HexCoord> ring{first_outside};
    HexCoord l = start, r = first_outside;
    do {
        int i = direction_index(r - l);
        HexCoord ahead = l + kDirections[(i + 1) % 6];
        if (inside(ahead)) {
            l = ahead;
        } else {
            r = ahead;
            ring.push_back(r);
        }
    } while (!(l == start && r == first_outside));
    if (ring.size() > 1 && ring.back() == ring.front()) ring.pop_back();
    return ring;
}

} // namespace nearcrit
