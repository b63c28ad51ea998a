#include "nearcrit/connectivity.hpp"

#include "nearcrit/error.hpp"
#include "nearcrit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_set>

namespace nearcrit {

namespace {

const double kSqrt3 = std::sqrt(3.0);

// Cells whose centers fall in the axis-aligned box, row by row.
template <class Keep>
std::vector<HexCoord> cells_in_box(double x0, double y0, double x1, double y1, double mesh, Keep&& keep) {
    std::vector<HexCoord> out;
    int b0 = int(std::floor((y0 / mesh - 1.0) / 1.5)) - 1;
    int b1 = int(std::ceil((y1 / mesh - 1.0) / 1.5)) + 1;
    for (int b = b0; b <= b1; ++b) {
        int a0 = int(std::floor(x0 / (kSqrt3 * mesh) - 0.5 * b)) - 1;
        int a1 = int(std::ceil(x1 / (kSqrt3 * mesh) - 0.5 * b)) + 1;
        for (int a = a0; a <= a1; ++a) {
            HexCoord h{a, b};
            if (keep(h, hex_center(h, mesh))) out.push_back(h);
        }
    }
    return out;
}

} // namespace

Estimate binomial_estimate(std::uint64_t successes, std::uint64_t trials) {
    Estimate e;
    e.successes = successes;
    e.trials = trials;
    if (trials == 0) return e;
    e.estimate = double(successes) / double(trials);
    e.std_error = std::sqrt(e.estimate * (1 - e.estimate) / double(trials));
    return e;
}

// --- quads ----------------------------------------------------------------

DiscreteQuad make_quad(std::vector<HexCoord> cells, const std::function<int(HexCoord)>& side_of) {
    if (cells.empty()) throw Error(ErrorKind::InvalidArgument, "empty quad");
    auto region = std::make_shared<const HexRegion>(std::move(cells));
    auto inside = [&](HexCoord h) { return region->contains(h); };

    // Start the ring from the lowest-then-leftmost cell, whose SW neighbor is outside.
    HexCoord start = region->cell(0);
    std::vector<HexCoord> ring = boundary_ring(inside, start, start + kDirections[4]);

    std::unordered_set<HexCoord, HexCoordHash> exterior;
    for (std::size_t i = 0; i < region->size(); ++i)
        for (HexCoord n : neighbors(region->cell(i)))
            if (!inside(n)) exterior.insert(n);
    std::unordered_set<HexCoord, HexCoordHash> on_ring(ring.begin(), ring.end());
    if (on_ring.size() != exterior.size()) throw Error(ErrorKind::InvalidArgument, "quad is not simply connected");
    // Connectivity: flood fill from the start cell.
    {
        std::vector<std::uint8_t> seen(region->size(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : region->neighbor_indices(std::size_t(v)))
                if (w >= 0 && !seen[w]) seen[w] = 1, ++count, stack.push_back(w);
        }
        if (count != region->size()) throw Error(ErrorKind::InvalidArgument, "quad is not connected");
    }

    // Labelled positions along the ring; labels must form the runs 0,1,2,3 in
    // cyclic order (1 and 3 may be empty).
    std::vector<int> labels(ring.size());
    for (std::size_t i = 0; i < ring.size(); ++i) {
        labels[i] = side_of(ring[i]);
        if (labels[i] < -1 || labels[i] > 3) throw Error(ErrorKind::InvalidArgument, "side label out of range");
    }
    // A cell seen twice at a pinch must carry one label; only labelled entries matter.
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < ring.size(); ++i)
        if (labels[i] >= 0) pos.push_back(i);
    if (pos.empty()) throw Error(ErrorKind::InvalidArgument, "quad has no sides");
    // Rotate so the labelled sequence starts at a run boundary.
    std::size_t first = 0;
    for (std::size_t j = 0; j < pos.size(); ++j) {
        int prev = labels[pos[(j + pos.size() - 1) % pos.size()]];
        if (labels[pos[j]] != prev) {
            first = j;
            break;
        }
    }
    std::vector<int> runs;
    DiscreteQuad quad;
    quad.cells = region;
    std::array<std::unordered_set<HexCoord, HexCoordHash>, 4> added;
    for (std::size_t j = 0; j < pos.size(); ++j) {
        std::size_t i = pos[(first + j) % pos.size()];
        int s = labels[i];
        if (runs.empty() || runs.back() != s) runs.push_back(s);
        if (added[s].insert(ring[i]).second) quad.sides[s].push_back(ring[i]);
    }
    if (runs.size() > 1 && runs.front() == runs.back()) runs.pop_back();
    // Each side is one run, and the runs appear in increasing cyclic order.
    std::vector<int> sorted = runs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error(ErrorKind::InvalidArgument, "quad side is not a contiguous arc");
    auto zero = std::find(runs.begin(), runs.end(), 0);
    std::rotate(runs.begin(), zero == runs.end() ? runs.begin() : zero, runs.end());
    if (!std::is_sorted(runs.begin(), runs.end()))
        throw Error(ErrorKind::InvalidArgument, "quad sides are not in counter-clockwise order");
    if (quad.sides[0].empty() || quad.sides[2].empty())
        throw Error(ErrorKind::InvalidArgument, "quad needs nonempty sides 0 and 2");
    // Sides 0 and 2 must not touch each other's cells.
    for (HexCoord h : quad.sides[0])
        if (added[2].count(h)) throw Error(ErrorKind::InvalidArgument, "quad sides overlap");
    return quad;
}

DiscreteQuad rhombus_quad(HexCoord origin, int n1, int n2) {
    if (n1 < 1 || n2 < 1) throw Error(ErrorKind::InvalidArgument, "rhombus sides must be positive");
    std::vector<HexCoord> cells;
    for (int b = 0; b < n2; ++b)
        for (int a = 0; a < n1; ++a) cells.push_back(origin + HexCoord{a, b});
    return make_quad(std::move(cells), [=](HexCoord h) {
        HexCoord d = h - origin;
        if (d.a == -1 && d.b >= 0 && d.b < n2) return 0;
        if (d.b == -1 && d.a >= 0 && d.a < n1) return 1;
        if (d.a == n1 && d.b >= 0 && d.b < n2) return 2;
        if (d.b == n2 && d.a >= 0 && d.a < n1) return 3;
        return -1;  // the two obtuse corners
    });
}

DiscreteQuad rectangle_quad(double x0, double y0, double x1, double y1, double mesh) {
    if (!(x1 > x0) || !(y1 > y0) || !(mesh > 0)) throw Error(ErrorKind::InvalidArgument, "bad rectangle");
    auto in = [=](Point c) { return c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1; };
    auto cells = cells_in_box(x0, y0, x1, y1, mesh, [&](HexCoord, Point c) { return in(c); });
    return make_quad(std::move(cells), [=](HexCoord h) {
        Point c = hex_center(h, mesh);
        if (c.y < y0) return 1;
        if (c.y > y1) return 3;
        return c.x < x0 ? 0 : 2;
    });
}

DiscreteQuad slit_quad(double s, int n, double mesh) {
    if (n < 3 || !(s > 0) || !(mesh > 0)) throw Error(ErrorKind::InvalidArgument, "bad slit quad");
    const double w = s / n;
    auto in_slit = [=](Point c) { return c.x > w && c.y > w && c.y < 2 * w; };
    auto in_square = [=](Point c) { return c.x >= 0 && c.x <= s && c.y >= 0 && c.y <= s; };
    auto cells = cells_in_box(0, 0, s, s, mesh, [&](HexCoord, Point c) { return in_square(c) && !in_slit(c); });
    return make_quad(std::move(cells), [=](HexCoord h) {
        Point c = hex_center(h, mesh);
        if (c.y < 0) return 1;
        if (c.y > s) return 3;
        if (c.x < 0) return 0;
        return 2;  // right side and the three walls of the slit
    });
}

DiscreteQuad shrunk_square_quad(double s, int k, double mesh) {
    if (k < 0) throw Error(ErrorKind::InvalidArgument, "negative shrinkage");
    return rectangle_quad(0, 0, s - k * kSqrt3 * mesh, s, mesh);
}

QuadIndex::QuadIndex(const DiscreteQuad& quad) : quad_(&quad) {
    const auto& reg = *quad.cells;
    touch0_.assign(reg.size(), 0);
    touch2_.assign(reg.size(), 0);
    for (int s : {0, 2})
        for (HexCoord h : quad.sides[s])
            for (HexCoord n : neighbors(h)) {
                int i = reg.index_of(n);
                if (i >= 0) (s == 0 ? touch0_ : touch2_)[i] = 1;
            }
    seen_.assign(reg.size(), 0);
}

bool QuadIndex::crossed(const std::vector<std::uint8_t>& blue) const { return crossed(blue.data()); }

bool QuadIndex::crossed(const std::uint8_t* blue) const {
    const auto& reg = *quad_->cells;
    std::fill(seen_.begin(), seen_.end(), 0);
    stack_.clear();
    for (std::size_t i = 0; i < reg.size(); ++i)
        if (touch0_[i] && blue[i]) {
            if (touch2_[i]) return true;
            seen_[i] = 1;
            stack_.push_back(int(i));
        }
    while (!stack_.empty()) {
        int v = stack_.back();
        stack_.pop_back();
        for (int w : reg.neighbor_indices(std::size_t(v))) {
            if (w < 0 || seen_[w] || !blue[w]) continue;
            if (touch2_[w]) return true;
            seen_[w] = 1;
            stack_.push_back(w);
        }
    }
    return false;
}

double QuadIndex::threshold(const double* u) const {
    // Dijkstra with max in place of +: the smallest achievable maximum of u
    // along a side-0 to side-2 path.
    const auto& reg = *quad_->cells;
    std::vector<double> best(reg.size(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    for (std::size_t i = 0; i < reg.size(); ++i)
        if (touch0_[i]) {
            best[i] = u[i];
            queue.push({u[i], int(i)});
        }
    while (!queue.empty()) {
        auto [d, v] = queue.top();
        queue.pop();
        if (d > best[v]) continue;
        if (touch2_[v]) return d;
        for (int w : reg.neighbor_indices(std::size_t(v))) {
            if (w < 0) continue;
            double nd = std::max(d, u[w]);
            if (nd < best[w]) {
                best[w] = nd;
                queue.push({nd, w});
            }
        }
    }
    return std::numeric_limits<double>::infinity();
}

bool is_crossed(const Configuration& config, const DiscreteQuad& quad) {
    const auto& reg = *quad.cells;
    std::vector<std::uint8_t> blue(reg.size());
    if (config.region_ptr() == quad.cells) {
        blue = config.raw();
    } else {
        for (std::size_t i = 0; i < reg.size(); ++i) blue[i] = config.color(reg.cell(i)) == Color::Blue;
    }
    return QuadIndex(quad).crossed(blue);
}

namespace {

std::vector<std::uint8_t> sample_blue(const HexRegion& reg, double p, const UniformStream& stream) {
    std::vector<std::uint8_t> blue(reg.size());
    for (std::size_t i = 0; i < reg.size(); ++i) blue[i] = stream(reg.cell(i)) <= p;
    return blue;
}

} // namespace

Estimate crossing_probability(const DiscreteQuad& quad, double p, std::uint64_t n_samples, std::uint64_t seed) {
    if (!(p > 0 && p < 1)) throw Error(ErrorKind::InvalidArgument, "p must lie in (0,1)");
    std::vector<std::uint8_t> hit(n_samples, 0);
    parallel_for_state(
        n_samples, [&] { return QuadIndex(quad); },
        [&](QuadIndex& index, std::size_t i) {
            UniformStream stream(seed, std::uint32_t(i), StreamTag::Quad);
            hit[i] = index.crossed(sample_blue(*quad.cells, p, stream));
        });
    return binomial_estimate(std::uint64_t(std::count(hit.begin(), hit.end(), 1)), n_samples);
}

Estimate symmetric_difference_probability(const DiscreteQuad& a, const DiscreteQuad& b, double p,
                                          std::uint64_t n_samples, std::uint64_t seed) {
    if (!(p > 0 && p < 1)) throw Error(ErrorKind::InvalidArgument, "p must lie in (0,1)");
    std::vector<std::uint8_t> diff(n_samples, 0);
    struct Pair {
        QuadIndex ia, ib;
    };
    parallel_for_state(
        n_samples, [&] { return Pair{QuadIndex(a), QuadIndex(b)}; },
        [&](Pair& pair, std::size_t i) {
            // Uniforms are keyed by cell, so shared cells get the same color in both quads.
            UniformStream stream(seed, std::uint32_t(i), StreamTag::Quad);
            bool ca = pair.ia.crossed(sample_blue(*a.cells, p, stream));
            bool cb = pair.ib.crossed(sample_blue(*b.cells, p, stream));
            diff[i] = ca != cb;
        });
    return binomial_estimate(std::uint64_t(std::count(diff.begin(), diff.end(), 1)), n_samples);
}

// --- arms -----------------------------------------------------------------

ArmPattern ArmPattern::parse(const std::string& letters) {
    ArmPattern p;
    for (char c : letters) {
        if (c == 'B' || c == 'b') p.colors.push_back(Color::Blue);
        else if (c == 'Y' || c == 'y') p.colors.push_back(Color::Yellow);
        else throw Error(ErrorKind::InvalidArgument, "arm pattern letters must be B or Y");
    }
    if (p.colors.empty()) throw Error(ErrorKind::InvalidArgument, "empty arm pattern");
    return p;
}

ArmPattern ArmPattern::polychromatic_arms(int k) {
    if (k < 2) throw Error(ErrorKind::InvalidArgument, "polychromatic pattern needs at least two arms");
    ArmPattern p;
    p.colors.assign(std::size_t(k), Color::Blue);
    p.polychromatic = true;
    return p;
}

std::string ArmPattern::str() const {
    if (polychromatic) return "poly" + std::to_string(colors.size());
    std::string s;
    for (Color c : colors) s += c == Color::Blue ? 'B' : 'Y';
    return s;
}

AnnulusGeometry::AnnulusGeometry(const AnnulusSpec& spec, double mesh) : spec_(spec), mesh_(mesh) {
    if (!(mesh > 0) || !(spec.inner >= mesh) || !(spec.outer > spec.inner))
        throw Error(ErrorKind::InvalidArgument, "annulus needs mesh <= inner < outer");
    const Point c0 = spec.center;
    auto dist = [&](HexCoord h) {
        Point c = hex_center(h, mesh);
        return std::hypot(c.x - c0.x, c.y - c0.y);
    };
    auto allowed = [&](HexCoord h) { return !spec.half_plane || h.b >= 0; };
    auto in_hole = [&](HexCoord h) { return allowed(h) && dist(h) < spec.inner; };
    auto beyond = [&](HexCoord h) { return allowed(h) && dist(h) > spec.outer; };

    const double pad = spec.outer + 3 * mesh;
    auto cells = cells_in_box(c0.x - pad, c0.y - pad, c0.x + pad, c0.y + pad, mesh, [&](HexCoord h, Point) {
        if (!allowed(h)) return false;
        double d = dist(h);
        return d >= spec.inner && d <= spec.outer;
    });
    region_ = std::make_shared<const HexRegion>(std::move(cells));
    inner_flag_.assign(region_->size(), 0);
    outer_flag_.assign(region_->size(), 0);
    HexCoord hole_cell{0, 0};
    bool have_hole = false;
    for (std::size_t i = 0; i < region_->size(); ++i) {
        for (HexCoord n : neighbors(region_->cell(i))) {
            if (in_hole(n)) {
                inner_flag_[i] = 1;
                if (!have_hole) hole_cell = n, have_hole = true;
            }
            if (beyond(n)) outer_flag_[i] = 1;
        }
    }
    if (!have_hole) throw Error(ErrorKind::InvalidArgument, "annulus hole contains no hexagon");

    // Walk to the east edge of the hole, then around it.
    while (in_hole(hole_cell + kDirections[0])) hole_cell = hole_cell + kDirections[0];
    std::vector<HexCoord> ring = boundary_ring(in_hole, hole_cell, hole_cell + kDirections[0]);
    std::size_t shift = 0;
    if (spec.half_plane) {
        // Start after the stretch below the real axis, so the order runs east to west.
        for (std::size_t i = 0; i < ring.size(); ++i)
            if (ring[i].b < 0) {
                shift = i;
                while (ring[(shift + 1) % ring.size()].b < 0 && shift + 1 < i + ring.size()) ++shift;
                break;
            }
    }
    std::unordered_set<HexCoord, HexCoordHash> hole_seen;
    for (std::size_t j = 0; j < ring.size(); ++j) {
        HexCoord h = ring[(shift + j) % ring.size()];
        int idx = region_->index_of(h);
        if (idx >= 0) inner_ring_.push_back(idx);
        else if (allowed(h) && !in_hole(h))
            throw Error(ErrorKind::InvalidArgument, "annulus is too thin around its hole");
    }
    // A disconnected hole would leave inner-boundary cells off the ring.
    std::vector<std::uint8_t> on_ring(region_->size(), 0);
    for (int i : inner_ring_) on_ring[i] = 1;
    for (std::size_t i = 0; i < region_->size(); ++i)
        if (inner_flag_[i] && !on_ring[i]) throw Error(ErrorKind::InvalidArgument, "annulus hole is not connected");
}

ArmDetector::ArmDetector(const AnnulusGeometry& geometry) : geo_(geometry) {}

std::vector<ArmDetector::Cluster> ArmDetector::crossing_clusters(const std::uint8_t* blue, int cap) {
    const auto& reg = *geo_.region();
    const std::size_t n = reg.size();
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), 0);
    auto find = [&](int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nb = reg.neighbor_indices(i);
        for (int d : {0, 1, 2}) {
            int j = nb[d];
            if (j < 0 || blue[i] != blue[j]) continue;
            int x = find(int(i)), y = find(j);
            if (x != y) parent_[std::max(x, y)] = std::min(x, y);
        }
    }
    // label_: bit 1 touches inner, bit 2 touches outer.
    label_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        int r = find(int(i));
        if (geo_.touches_inner(i)) label_[r] |= 1;
        if (geo_.touches_outer(i)) label_[r] |= 2;
    }
    std::vector<int> seq;
    for (int i : geo_.inner_ring()) {
        int r = find(i);
        if (label_[r] != 3) continue;
        if (seq.empty() || seq.back() != r) seq.push_back(r);
    }
    if (!geo_.spec().half_plane && seq.size() > 1 && seq.front() == seq.back()) seq.pop_back();
    std::vector<Cluster> out;
    out.reserve(seq.size());
    for (int r : seq)
        out.push_back({blue[r] ? Color::Blue : Color::Yellow, cap > 1 ? disjoint_arms(blue, r, cap) : 1});
    return out;
}

// Vertex-disjoint inner-to-outer paths inside the cluster of `root`, up to cap:
// unit-capacity augmenting paths on the graph with every cell split in two.
int ArmDetector::disjoint_arms(const std::uint8_t*, int root, int cap) {
    const auto& reg = *geo_.region();
    const int n = int(reg.size());
    auto find = [&](int x) {
        while (parent_[x] != x) x = parent_[x];
        return x;
    };
    std::vector<int> local(std::size_t(n), -1);
    std::vector<int> member;
    for (int i = 0; i < n; ++i)
        if (find(i) == root) local[i] = int(member.size()), member.push_back(i);
    const int m = int(member.size());
    // Nodes: 2k = in, 2k+1 = out, 2m = source, 2m+1 = sink.
    const int src = 2 * m, snk = 2 * m + 1;
    struct Edge {
        int to, cap;
    };
    std::vector<Edge> edges;
    std::vector<std::vector<int>> adj(std::size_t(2 * m + 2));
    auto add = [&](int u, int v) {
        adj[u].push_back(int(edges.size()));
        edges.push_back({v, 1});
        adj[v].push_back(int(edges.size()));
        edges.push_back({u, 0});
    };
    for (int k = 0; k < m; ++k) {
        int v = member[k];
        add(2 * k, 2 * k + 1);
        if (geo_.touches_inner(std::size_t(v))) add(src, 2 * k);
        if (geo_.touches_outer(std::size_t(v))) add(2 * k + 1, snk);
        for (int w : reg.neighbor_indices(std::size_t(v)))
            if (w >= 0 && local[w] >= 0) add(2 * k + 1, 2 * local[w]);
    }
    int flow = 0;
    std::vector<int> via(adj.size());
    std::vector<int> queue;
    while (flow < cap) {
        std::fill(via.begin(), via.end(), -1);
        queue.assign(1, src);
        via[src] = -2;
        for (std::size_t qi = 0; qi < queue.size() && via[snk] == -1; ++qi) {
            int u = queue[qi];
            for (int e : adj[u]) {
                if (edges[e].cap == 0 || via[edges[e].to] != -1) continue;
                via[edges[e].to] = e;
                queue.push_back(edges[e].to);
            }
        }
        if (via[snk] == -1) break;
        for (int v = snk; v != src;) {
            int e = via[v];
            edges[e].cap -= 1;
            edges[e ^ 1].cap += 1;
            v = edges[e ^ 1].to;
        }
        ++flow;
    }
    return flow;
}

bool ArmDetector::has_arms(const std::uint8_t* blue, const ArmPattern& pattern) {
    const std::size_t k = pattern.size();
    if (k == 0) throw Error(ErrorKind::InvalidArgument, "empty arm pattern");
    const bool half = geo_.spec().half_plane;
    bool alternating = !pattern.polychromatic;
    for (std::size_t i = 1; i < k && alternating; ++i) alternating = pattern.colors[i] != pattern.colors[i - 1];
    if (!half && k > 1 && alternating) alternating = pattern.colors[0] != pattern.colors[k - 1];
    bool mono = !pattern.polychromatic &&
                std::all_of(pattern.colors.begin(), pattern.colors.end(),
                            [&](Color c) { return c == pattern.colors[0]; });

    if (alternating) {
        // Crossing clusters met along the inner boundary alternate in color, and
        // consecutive picks of opposite colors are separated, so a greedy
        // subsequence match decides the event.
        auto seq = crossing_clusters(blue, 1);
        const std::size_t s = seq.size();
        if (s < k) return false;
        for (std::size_t start = 0; start < (half ? 1 : s); ++start) {
            std::size_t j = 0;
            for (std::size_t t = 0; t < s && j < k; ++t)
                if (seq[(start + t) % s].color == pattern.colors[j]) ++j;
            if (j == k) return true;
        }
        return false;
    }
    if (mono || pattern.polychromatic) {
        crossing_clusters(blue, 1);
        // Disjoint arms from different clusters never meet, so capacities add.
        int total[2] = {0, 0};
        std::unordered_set<int> done;
        for (int i : geo_.inner_ring()) {
            int r = i;
            while (parent_[r] != r) r = parent_[r];
            if (label_[r] != 3 || !done.insert(r).second) continue;
            Color c = blue[r] ? Color::Blue : Color::Yellow;
            if (mono && c != pattern.colors[0]) continue;
            total[int(c)] += disjoint_arms(blue, r, int(k));
        }
        if (mono) return total[int(pattern.colors[0])] >= int(k);
        return total[0] >= 1 && total[1] >= 1 && total[0] + total[1] >= int(k);
    }
    throw Error(ErrorKind::InvalidArgument,
                "arm pattern must be alternating, monochromatic or polychromatic: " + pattern.str());
}

bool has_arms(const Configuration& config, const AnnulusGeometry& geometry, const ArmPattern& pattern) {
    const auto& reg = *geometry.region();
    std::vector<std::uint8_t> blue(reg.size());
    if (config.region_ptr() == geometry.region()) {
        blue = config.raw();
    } else {
        for (std::size_t i = 0; i < reg.size(); ++i) blue[i] = config.color(reg.cell(i)) == Color::Blue;
    }
    ArmDetector det(geometry);
    return det.has_arms(blue.data(), pattern);
}

Estimate estimate_arm_probability(const AnnulusGeometry& geometry, const ArmPattern& pattern, double p,
                                  std::uint64_t n_samples, std::uint64_t seed, StreamTag tag) {
    if (!(p > 0 && p < 1)) throw Error(ErrorKind::InvalidArgument, "p must lie in (0,1)");
    std::vector<std::uint8_t> hit(n_samples, 0);
    const auto& reg = *geometry.region();
    parallel_for_state(
        n_samples, [&] { return ArmDetector(geometry); },
        [&](ArmDetector& det, std::size_t i) {
            UniformStream stream(seed, std::uint32_t(i), tag);
            hit[i] = det.has_arms(sample_blue(reg, p, stream).data(), pattern);
        });
    return binomial_estimate(std::uint64_t(std::count(hit.begin(), hit.end(), 1)), n_samples);
}

ExponentFit fit_arm_exponent(const std::vector<ScalePoint>& series) {
    if (series.size() < 3) throw Error(ErrorKind::InsufficientScales, "need at least three scales");
    bool weighted = true;
    for (const auto& s : series) {
        if (!(s.ratio > 0) || !(s.estimate > 0))
            throw Error(ErrorKind::InvalidArgument, "ratios and estimates must be positive");
        weighted = weighted && s.std_error > 0;
    }
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : series) {
        double x = std::log(s.ratio), y = -std::log(s.estimate);
        // Delta method: Var(log p) ~ (se/p)^2.
        double w = weighted ? 1.0 / std::pow(s.std_error / s.estimate, 2) : 1.0;
        sw += w, sx += w * x, sy += w * y, sxx += w * x * x, sxy += w * x * y;
    }
    double det = sw * sxx - sx * sx;
    if (!(std::abs(det) > 1e-300)) throw Error(ErrorKind::InsufficientScales, "scales are not distinct");
    ExponentFit fit;
    fit.exponent = (sw * sxy - sx * sy) / det;
    fit.intercept = (sxx * sy - sx * sxy) / det;
    if (weighted) {
        fit.std_error = std::sqrt(sw / det);
    } else if (series.size() > 2) {
        double rss = 0;
        for (const auto& s : series) {
            double r = -std::log(s.estimate) - fit.intercept - fit.exponent * std::log(s.ratio);
            rss += r * r;
        }
        fit.std_error = std::sqrt(rss / double(series.size() - 2) * sw / det);
    }
    return fit;
}

} // namespace nearcrit
