#include "nearcrit/mesoscopic.hpp"

#include "nearcrit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace nearcrit {

namespace {

const double kSqrt3 = std::sqrt(3.0);

// Closed triangle with horizontal base [x0, x0 + w] at height y0 pointing up.
bool in_upward_triangle(Point p, double x0, double y0, double w) {
    if (p.y < y0) return false;
    double h = p.y - y0;
    return p.x >= x0 + h / kSqrt3 && p.x <= x0 + w - h / kSqrt3;
}

} // namespace

Point TriangleSpec::apex() const { return {anchor.x + 0.5 * size, anchor.y + 0.5 * kSqrt3 * size}; }

Point TriangleSpec::centroid() const { return {anchor.x + 0.5 * size, anchor.y + size / (2 * kSqrt3)}; }

bool TriangleSpec::in_t(Point p) const { return in_upward_triangle(p, anchor.x, anchor.y, size); }

bool TriangleSpec::in_r(Point p) const {
    return p.x > gate_left() && p.x < gate_right() && p.y > l_height() && p.y < b_height();
}

bool TriangleSpec::in_tprime(Point p) const {
    return in_upward_triangle(p, anchor.x + 0.1 * size, m_height(), 0.8 * size);
}

Point TriangleSpec::tprime_right_corner() const { return {anchor.x + 0.9 * size, m_height()}; }
Point TriangleSpec::tprime_left_corner() const { return {anchor.x + 0.1 * size, m_height()}; }
Point TriangleSpec::tprime_apex() const { return {anchor.x + 0.5 * size, m_height() + 0.4 * kSqrt3 * size}; }

TriangleCells::TriangleCells(const TriangleSpec& spec, double mesh) : spec_(spec), mesh_(mesh) {
    const double pad = 3 * mesh;
    HexCoord lo = nearest_cell({spec.x0() - pad, spec.y0() - pad}, mesh);
    HexCoord hi = nearest_cell({spec.x0() + spec.size + pad, spec.apex().y + pad}, mesh);
    bmin_ = lo.b - 1;
    height_ = hi.b + 1 - bmin_ + 1;
    // Axial a shifts with b; cover the parallelogram hull of the box.
    amin_ = std::min(lo.a, nearest_cell({spec.x0() - pad, spec.apex().y + pad}, mesh).a) - 2;
    int amax = std::max(hi.a, nearest_cell({spec.x0() + spec.size + pad, spec.y0() - pad}, mesh).a) + 2;
    width_ = amax - amin_ + 1;
    box_.assign(std::size_t(width_) * height_, 0);

    // R row nearest to m, computed from the row heights of the gate columns.
    const double eta = mesh;
    auto row_height = [eta](int b) { return eta * (1.0 + 1.5 * b); };
    int m_row = std::numeric_limits<int>::min();
    double best = std::numeric_limits<double>::infinity();
    for (int b = bmin_; b < bmin_ + height_; ++b) {
        double y = row_height(b);
        if (y <= spec.l_height() || y >= spec.b_height()) continue;
        double d = std::abs(y - spec.m_height());
        if (d < best) best = d, m_row = b;
    }

    for (int b = bmin_; b < bmin_ + height_; ++b) {
        for (int a = amin_; a < amin_ + width_; ++a) {
            HexCoord h{a, b};
            Point c = hex_center(h, mesh);
            std::uint8_t cls = 0;
            if (spec.in_t(c)) cls |= kInT;
            if (spec.in_r(c)) cls |= kInR;
            if (spec.in_tprime(c)) cls |= kInTPrime;
            bool column = c.x > spec.gate_left() && c.x < spec.gate_right();
            if (column) {
                if (c.y <= spec.l_height() && c.y > spec.l_height() - 1.5 * eta) cls |= kGateL;
                if (c.y >= spec.b_height() && c.y < spec.b_height() + 1.5 * eta) cls |= kGateB;
                if ((cls & kInR) && b == m_row) cls |= kGateM;
            }
            box_[std::size_t(b - bmin_) * width_ + (a - amin_)] = cls;
        }
    }
    // Keep t' one hexagon away from the outside of t: a t' cell may not touch a
    // hexagon whose center is outside t, so the path before sigma (which stays
    // out of t except through r) cannot touch t' from the side.
    std::vector<HexCoord> drop;
    for (int b = bmin_; b < bmin_ + height_; ++b)
        for (int a = amin_; a < amin_ + width_; ++a) {
            HexCoord h{a, b};
            if (!(classify(h) & kInTPrime)) continue;
            for (HexCoord n : neighbors(h))
                if (!(classify(n) & kInT)) {
                    drop.push_back(h);
                    break;
                }
        }
    for (HexCoord h : drop) box_[std::size_t(h.b - bmin_) * width_ + (h.a - amin_)] &= std::uint8_t(~kInTPrime);
    for (int b = bmin_; b < bmin_ + height_; ++b)
        for (int a = amin_; a < amin_ + width_; ++a)
            if (classify({a, b})) cells_.push_back({a, b});
    std::sort(cells_.begin(), cells_.end());
}

std::uint8_t TriangleCells::classify(HexCoord h) const {
    int da = h.a - amin_, db = h.b - bmin_;
    if (da < 0 || db < 0 || da >= width_ || db >= height_) return 0;
    return box_[std::size_t(db) * width_ + da];
}

TriangleGrid make_grid(double mesh, std::vector<TriangleSpec> triangles) {
    TriangleGrid grid;
    grid.mesh = mesh;
    grid.delta = triangles.empty() ? 0.0 : triangles.front().size;
    grid.triangles = std::move(triangles);
    for (const auto& t : grid.triangles) grid.cells.emplace_back(t, mesh);
    return grid;
}

TriangleGrid build_grid(const HexDomain& domain, double delta) {
    const double r = domain.spec.radius, eta = domain.spec.mesh;
    const double tol = 1e-12;
    if (!(delta > 0) || eta > delta / 16 * (1 + tol) || delta / 16 > r / 64 * (1 + tol))
        throw Error(ErrorKind::DegenerateScale, "need mesh <= delta/16 <= radius/64");
    std::vector<TriangleSpec> tris;
    const double spacing = 4 * delta;
    const double row = spacing * kSqrt3 / 2;
    const double y_first = delta + delta / (2 * kSqrt3);  // centroid height with base at y = delta
    const int imax = int(std::ceil(r / spacing)) + 1;
    for (int j = 0; y_first + j * row < r; ++j) {
        for (int i = -imax; i <= imax; ++i) {
            Point c{i * spacing + (j % 2 ? spacing / 2 : 0.0), y_first + j * row};
            TriangleSpec t{{c.x - delta / 2, c.y - delta / (2 * kSqrt3)}, delta};
            Point v[3] = {t.anchor, {t.anchor.x + delta, t.anchor.y}, t.apex()};
            bool ok = t.anchor.y >= delta * (1 - tol);
            for (Point p : v) ok = ok && norm(p) <= (r - delta) * (1 + tol);
            if (ok) tris.push_back(t);
        }
    }
    TriangleGrid grid = make_grid(eta, std::move(tris));
    grid.delta = delta;
    return grid;
}

HitInfo hitting_time(const ExplorationPath& path, const TriangleCells& tri) {
    HitInfo info;
    bool seen_m = false;
    for (std::size_t k = 0; k < path.steps.size(); ++k) {
        bool other = false, gate_b = false, late_l = false, m = false;
        for (HexCoord h : {path.steps[k].left, path.steps[k].right}) {
            std::uint8_t c = tri.classify(h);
            if (!c) continue;
            if ((c & kGateB)) gate_b = true;
            else if ((c & kInT) && !(c & (kInR | kGateL))) other = true;
            if ((c & kGateL) && seen_m) late_l = true;
            if (c & kGateM) m = true;
        }
        if (other || gate_b || late_l) {
            info.sigma = k;
            info.good = gate_b && !other && !late_l;
            return info;
        }
        seen_m = seen_m || m;
    }
    return info;
}

HitContext compute_region(const ExplorationPath& path, const TriangleCells& tri) {
    HitInfo hit = hitting_time(path, tri);
    if (!hit.good) throw Error(ErrorKind::MalformedHit, "triangle is not good");
    HitContext ctx;
    ctx.sigma = *hit.sigma;
    ctx.good = true;

    // Path cells up to sigma with their colors (left blue, right yellow).
    std::unordered_map<HexCoord, Color, HexCoordHash> prefix;
    for (std::size_t k = 0; k <= ctx.sigma; ++k) {
        prefix.emplace(path.steps[k].left, Color::Blue);
        prefix.emplace(path.steps[k].right, Color::Yellow);
    }
    ctx.prefix_cells = path_cells(path, ctx.sigma);
    auto in_prefix = [&](HexCoord h) { return prefix.count(h) != 0; };

    // Top cell of t': highest row, then closest to the apex.
    const double apex_x = tri.spec().apex().x;
    std::optional<HexCoord> top;
    for (HexCoord h : tri.cells()) {
        if (!tri.has(h, kInTPrime)) continue;
        if (!top || h.b > top->b ||
            (h.b == top->b && std::abs(hex_center(h, tri.mesh()).x - apex_x) <
                                  std::abs(hex_center(*top, tri.mesh()).x - apex_x)))
            top = h;
    }
    if (!top) throw Error(ErrorKind::MalformedHit, "t' has no hexagons at this mesh");
    if (in_prefix(*top)) throw Error(ErrorKind::MalformedHit, "path reached the top of t' before sigma");

    // Main component of t' minus the path.
    std::unordered_set<HexCoord, HexCoordHash> region{*top};
    std::vector<HexCoord> stack{*top};
    while (!stack.empty()) {
        HexCoord h = stack.back();
        stack.pop_back();
        for (HexCoord n : neighbors(h))
            if (tri.has(n, kInTPrime) && !in_prefix(n) && region.insert(n).second) stack.push_back(n);
    }
    const std::unordered_set<HexCoord, HexCoordHash> main = region;

    // Pockets of r below t' that are walled in by the path and the main part.
    std::unordered_set<HexCoord, HexCoordHash> visited;
    for (HexCoord h : tri.cells()) {
        std::uint8_t c = tri.classify(h);
        if (!(c & kInR) || (c & kInTPrime) || in_prefix(h) || visited.count(h)) continue;
        std::vector<HexCoord> comp{h};
        visited.insert(h);
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (HexCoord n : neighbors(comp[i])) {
                std::uint8_t cn = tri.classify(n);
                if ((cn & kInR) && !(cn & kInTPrime) && !in_prefix(n) && visited.insert(n).second) comp.push_back(n);
            }
        std::unordered_set<HexCoord, HexCoordHash> in_comp(comp.begin(), comp.end());
        bool enclosed = true, touches = false;
        for (HexCoord x : comp)
            for (HexCoord n : neighbors(x)) {
                if (main.count(n)) touches = true;
                else if (!in_prefix(n) && !in_comp.count(n)) enclosed = false;
            }
        if (enclosed && touches) region.insert(comp.begin(), comp.end());
    }
    ctx.region_d.assign(region.begin(), region.end());
    std::sort(ctx.region_d.begin(), ctx.region_d.end());

    // Boundary ring, counter-clockwise from above the top cell. It must read:
    // outside cells, then blue path cells, then yellow path cells.
    auto in_d = [&](HexCoord h) { return region.count(h) != 0; };
    std::vector<HexCoord> ring = boundary_ring(in_d, *top, *top + kDirections[1]);
    auto kind = [&](HexCoord h) {
        auto it = prefix.find(h);
        if (it == prefix.end()) return 0;
        return it->second == Color::Blue ? 1 : 2;
    };
    const std::size_t n = ring.size();
    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i)
        if (kind(ring[i]) == 0 && kind(ring[(i + n - 1) % n]) == 2) {
            start = i;
            break;
        }
    if (start == n) throw Error(ErrorKind::MalformedHit, "region boundary has no yellow-to-outside transition");
    std::rotate(ring.begin(), ring.begin() + std::ptrdiff_t(start), ring.end());
    std::size_t i = 0;
    std::size_t n_out = 0, n_blue = 0;
    while (i < n && kind(ring[i]) == 0) ++i;
    n_out = i;
    while (i < n && kind(ring[i]) == 1) ++i;
    n_blue = i - n_out;
    while (i < n && kind(ring[i]) == 2) ++i;
    if (i != n || n_blue == 0 || n_out == 0)
        throw Error(ErrorKind::MalformedHit, "region boundary is not outside/blue/yellow");

    // a0: outside cell nearest the right corner of t'.
    const Point corner = tri.spec().tprime_right_corner();
    std::size_t i0 = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n_out; ++j) {
        Point c = hex_center(ring[j], tri.mesh());
        double d = std::hypot(c.x - corner.x, c.y - corner.y);
        if (d < best) best = d, i0 = j;
    }
    if (i0 + 1 >= n_out) throw Error(ErrorKind::MalformedHit, "no boundary beyond the right corner of t'");
    ctx.a0 = ring[i0];

    std::unordered_map<HexCoord, int, HexCoordHash> arc_of;
    for (std::size_t j = 0; j < n; ++j) {
        int arc = j <= i0 ? 0 : j < n_out ? 1 : j < n_out + n_blue ? 2 : 3;
        auto [it, fresh] = arc_of.emplace(ring[j], arc);
        if (fresh) ctx.arcs[arc].push_back(ring[j]);
        else if (it->second != arc) throw Error(ErrorKind::MalformedHit, "a boundary hexagon lies on two arcs");
    }

    // a1, a2: right-most and left-most path cells on the m row.
    std::optional<HexCoord> a1, a2;
    for (HexCoord h : ctx.prefix_cells) {
        if (!tri.has(h, kGateM)) continue;
        if (!a1 || h.a > a1->a) a1 = h;
        if (!a2 || h.a < a2->a) a2 = h;
    }
    if (!a1) throw Error(ErrorKind::MalformedHit, "path never crossed the m row");
    ctx.a1 = *a1;
    ctx.a2 = *a2;
    return ctx;
}

HitContext compute_region(const ExplorationPath& path, const TriangleCells& tri, const HexDomain& domain,
                          const Configuration& config) {
    HitContext ctx = compute_region(path, tri);
    for (std::size_t k = 0; k <= ctx.sigma; ++k) {
        for (auto [h, want] : {std::pair{path.steps[k].left, Color::Blue}, std::pair{path.steps[k].right, Color::Yellow}}) {
            int i = domain.region->index_of(h);
            std::optional<Color> c = i >= 0 ? std::optional<Color>(config.color_at(std::size_t(i))) : domain.boundary_color(h);
            if (c != want) throw Error(ErrorKind::InvalidArgument, "path does not match the configuration");
        }
    }
    return ctx;
}

bool is_very_good(const ExplorationPath& path, const HitContext& ctx) {
    if (!ctx.good) return false;
    std::unordered_set<HexCoord, HexCoordHash> arc0(ctx.arcs[0].begin(), ctx.arcs[0].end());
    std::unordered_set<HexCoord, HexCoordHash> arc1(ctx.arcs[1].begin(), ctx.arcs[1].end());
    for (std::size_t k = ctx.sigma + 1; k < path.steps.size(); ++k) {
        HexCoord l = path.steps[k].left, r = path.steps[k].right;
        if (arc0.count(l) || arc0.count(r)) return true;
        if (arc1.count(l) || arc1.count(r)) return false;
    }
    return false;
}

bool is_very_good(const ExplorationPath& path, const TriangleCells& tri, const HexDomain& domain,
                  const Configuration& config) {
    return is_very_good(path, compute_region(path, tri, domain, config));
}

std::vector<HitInfo> hit_all(const ExplorationPath& path, const TriangleGrid& grid) {
    std::vector<HitInfo> out;
    out.reserve(grid.size());
    for (const auto& tc : grid.cells) out.push_back(hitting_time(path, tc));
    return out;
}

std::vector<std::size_t> order_by_hitting(const std::vector<HitInfo>& hits) {
    std::vector<std::size_t> order(hits.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const auto& hx = hits[x].sigma;
        const auto& hy = hits[y].sigma;
        if (hx && hy) return *hx < *hy;
        return hx.has_value() && !hy.has_value();
    });
    return order;
}

} // namespace nearcrit
