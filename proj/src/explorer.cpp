#include "nearcrit/explorer.hpp"

#include "nearcrit/error.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

namespace nearcrit {

std::vector<Point> ExplorationPath::vertices() const {
    std::vector<Point> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(to_plane(s.head, mesh));
    return out;
}

namespace {

// -1 absent, 0 yellow, 1 blue.
int color_of(const HexDomain& domain, const Configuration& config, HexCoord h) {
    int i = domain.region->index_of(h);
    if (i >= 0) return config.blue_at(std::size_t(i)) ? 1 : 0;
    auto c = domain.boundary_color(h);
    if (!c) return -1;
    return *c == Color::Blue ? 1 : 0;
}

// The walk itself; color(h) returns -1 absent, 0 yellow, 1 blue.
template <class ColorFn>
ExplorationPath walk(const HexDomain& domain, ColorFn&& color) {
    ExplorationPath path;
    path.mesh = domain.spec.mesh;
    path.radius = domain.spec.radius;

    const double rho = domain.spec.radius / domain.spec.mesh;
    const double stop2 = 4.0 * (rho - 1.0) * (rho - 1.0);

    HexCoord l = domain.origin_edge.left, r = domain.origin_edge.right;
    int dir = direction_index(r - l);
    path.start = shared_vertex(l, r, l + kDirections[(dir + 5) % 6]);
    // Every directed edge is used at most once, so this bound is never reached
    // unless the walk rule is broken.
    const std::size_t max_steps = 6 * (domain.size() + domain.boundary_blue.size() + domain.boundary_yellow.size()) + 8;

    for (;;) {
        HexCoord ahead = l + kDirections[(dir + 1) % 6];
        path.steps.push_back({l, r, shared_vertex(l, r, ahead)});
        if (double(lattice_norm2(path.steps.back().head)) >= stop2) break;
        int c = color(ahead);
        if (c < 0) break;
        if (c == 1) {
            l = ahead;
        } else {
            r = ahead;
        }
        dir = direction_index(r - l);
        if (path.steps.size() > max_steps) throw std::logic_error("exploration walk did not terminate");
    }
    return path;
}

} // namespace

ExplorationPath trace(const HexDomain& domain, const Configuration& config) {
    if (config.region_ptr() != domain.region && config.size() != domain.size())
        throw Error(ErrorKind::InvalidArgument, "configuration does not belong to the domain");
    return walk(domain, [&](HexCoord h) { return color_of(domain, config, h); });
}

ExplorationPath trace_sampled(const HexDomain& domain, double p, std::uint64_t seed, std::uint32_t replica) {
    UniformStream stream(seed, replica, StreamTag::Configuration);
    return walk(domain, [&](HexCoord h) {
        if (domain.region->contains(h)) return stream(h) <= p ? 1 : 0;
        auto c = domain.boundary_color(h);
        if (!c) return -1;
        return *c == Color::Blue ? 1 : 0;
    });
}

std::optional<std::size_t> exit_time(const ExplorationPath& path, double rho) {
    if (!(rho > 0)) throw Error(ErrorKind::InvalidArgument, "exit radius must be positive");
    const double bound = 4.0 * (rho / path.mesh) * (rho / path.mesh);
    for (std::size_t k = 0; k < path.steps.size(); ++k)
        if (double(lattice_norm2(path.steps[k].head)) >= bound * (1.0 - 1e-12)) return k;
    return std::nullopt;
}

ExplorationPath initial_segment(const ExplorationPath& path, double rho) {
    auto k = exit_time(path, rho);
    if (!k) throw Error(ErrorKind::NeverExits, "path never reaches the requested radius");
    ExplorationPath out = path;
    out.steps.resize(*k + 1);
    return out;
}

std::vector<HexCoord> path_cells(const ExplorationPath& path, std::size_t last) {
    std::unordered_set<HexCoord, HexCoordHash> seen;
    std::vector<HexCoord> out;
    for (std::size_t k = 0; k <= last && k < path.steps.size(); ++k)
        for (HexCoord h : {path.steps[k].left, path.steps[k].right})
            if (seen.insert(h).second) out.push_back(h);
    return out;
}

std::string path_to_csv(const ExplorationPath& path) {
    std::string out = "step,x,y\n";
    char buf[96];
    Point s = to_plane(path.start, path.mesh);
    std::snprintf(buf, sizeof buf, "-1,%.17g,%.17g\n", s.x, s.y);
    out += buf;
    for (std::size_t k = 0; k < path.steps.size(); ++k) {
        Point v = path.vertex(k);
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k, v.x, v.y);
        out += buf;
    }
    return out;
}

} // namespace nearcrit
