#pragma once

#include <set>

#include "nearcrit/explorer.hpp"
#include "nearcrit/mesoscopic.hpp"
#include "nearcrit/sampler.hpp"

// A single triangle straddling the imaginary axis. Below the triangle and in
// its gate the colors are forced (blue iff x < 0), so the interface climbs the
// axis, passes the gate and is always good; everything else is random.
// Gate cells that end up in region d are left random: the path never reveals
// them before the hit, and keeping them free makes region d a product
// measure given the prefix.
struct Corridor {
    double mesh = 1.0 / 256;
    double delta = 32.0 / 256;
    nearcrit::HexDomain domain = nearcrit::build_domain({1.0, mesh});
    nearcrit::TriangleSpec spec{{-delta / 2, delta / 2}, delta};
    nearcrit::TriangleCells cells{spec, mesh};
    std::set<nearcrit::HexCoord> released;

    Corridor() {
        nearcrit::Configuration c = sample(0.5, 0, 0);
        nearcrit::HitContext ctx = nearcrit::compute_region(nearcrit::trace(domain, c), cells);
        for (nearcrit::HexCoord h : ctx.region_d)
            if (forced(h)) released.insert(h);
    }

    bool forced(nearcrit::HexCoord h) const {
        if (released.count(h)) return false;
        return nearcrit::hex_center(h, mesh).y < spec.y0() || cells.has(h, nearcrit::kInR | nearcrit::kGateL);
    }

    nearcrit::Color forced_color(nearcrit::HexCoord h) const {
        return nearcrit::hex_center(h, mesh).x < 0 ? nearcrit::Color::Blue : nearcrit::Color::Yellow;
    }

    nearcrit::Configuration sample(double p, std::uint64_t seed, std::uint32_t replica) const {
        nearcrit::Configuration c = nearcrit::sample_configuration(domain, p, seed, replica);
        for (std::size_t i = 0; i < domain.size(); ++i) {
            nearcrit::HexCoord h = domain.region->cell(i);
            if (forced(h)) c.set(i, forced_color(h));
        }
        return c;
    }
};

#include <algorithm>
#include <map>
#include <optional>

// A good corridor sample with region d painted yellow except for a few free
// cells: a shortest chain of region cells from arc 0 to arc 2, padded with
// neighbours. Every coloring of the free cells keeps the path prefix, so the
// very-good event can be checked exhaustively.
struct SmallRegion {
    nearcrit::Configuration base;
    nearcrit::HitContext ctx;
    std::vector<nearcrit::HexCoord> free;
};

inline std::optional<SmallRegion> small_region(const Corridor& cor, std::uint64_t seed, std::uint32_t replica,
                                               std::size_t n_free) {
    using namespace nearcrit;
    SmallRegion out;
    out.base = cor.sample(0.5, seed, replica);
    out.ctx = compute_region(trace(cor.domain, out.base), cor.cells, cor.domain, out.base);
    std::set<HexCoord> region(out.ctx.region_d.begin(), out.ctx.region_d.end());
    auto next_to = [&](HexCoord h, int arc) {
        for (HexCoord n : neighbors(h))
            if (std::find(out.ctx.arcs[arc].begin(), out.ctx.arcs[arc].end(), n) != out.ctx.arcs[arc].end())
                return true;
        return false;
    };
    std::map<HexCoord, HexCoord> parent;
    std::vector<HexCoord> queue;
    for (HexCoord h : out.ctx.region_d)
        if (next_to(h, 0)) parent[h] = h, queue.push_back(h);
    std::optional<HexCoord> end;
    for (std::size_t i = 0; i < queue.size() && !end; ++i) {
        if (next_to(queue[i], 2)) end = queue[i];
        for (HexCoord n : neighbors(queue[i]))
            if (region.count(n) && !parent.count(n)) parent[n] = queue[i], queue.push_back(n);
    }
    if (!end) return std::nullopt;
    std::vector<HexCoord> chain{*end};
    while (parent[chain.back()] != chain.back()) chain.push_back(parent[chain.back()]);
    if (chain.size() > n_free) return std::nullopt;
    std::set<HexCoord> chosen(chain.begin(), chain.end());
    out.free = chain;
    for (std::size_t i = 0; i < out.free.size() && out.free.size() < n_free; ++i)
        for (HexCoord n : neighbors(out.free[i]))
            if (out.free.size() < n_free && region.count(n) && chosen.insert(n).second) out.free.push_back(n);
    for (HexCoord h : out.ctx.region_d) out.base.set(h, Color::Yellow);
    return out;
}
