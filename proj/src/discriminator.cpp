#include "nearcrit/discriminator.hpp"

#include "nearcrit/error.hpp"
#include "nearcrit/parallel.hpp"
#include "nearcrit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace nearcrit {

StatisticParams StatisticParams::with_defaults(double delta, double beta) {
    StatisticParams p;
    p.delta = delta;
    p.beta = beta;
    p.alpha2_check = 0.25 - beta;
    p.alpha4_hat = 1.25 + beta;
    return p;
}

void StatisticParams::validate() const {
    if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidArgument, "delta must lie in (0,1)");
    if (!(beta > 0)) throw Error(ErrorKind::InvalidArgument, "beta must be positive");
    if (!(alpha2_check <= 1)) throw Error(ErrorKind::InvalidArgument, "alpha2_check must be at most 1");
    if (!(2 * alpha4_hat - alpha2_check > 2))
        throw Error(ErrorKind::InvalidArgument, "need 2 alpha4_hat - alpha2_check > 2");
    if (inner_samples == 0 || inner_samples >= (1u << 24))
        throw Error(ErrorKind::InvalidArgument, "inner_samples must lie in [1, 2^24)");
    if (good_cap() == 0) throw Error(ErrorKind::InvalidArgument, "M must be at least 1");
}

std::uint64_t StatisticParams::good_cap() const {
    if (M) return M;
    // Small slack so exact powers are not floored one below.
    return std::uint64_t(std::floor(std::pow(delta, -2 + alpha2_check + beta) * (1 + 1e-12)));
}

// --- conditional probabilities ---------------------------------------------------

DiscreteQuad region_quad(const HitContext& ctx) {
    std::unordered_map<HexCoord, int, HexCoordHash> arc_of;
    for (int a = 0; a < 4; ++a)
        for (HexCoord h : ctx.arcs[a]) arc_of.emplace(h, a);
    try {
        return make_quad(ctx.region_d, [&](HexCoord h) {
            auto it = arc_of.find(h);
            return it == arc_of.end() ? -1 : it->second;
        });
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InvalidArgument) throw;
        throw Error(ErrorKind::MalformedHit, std::string("region d is not a quad: ") + e.what());
    }
}

std::vector<double> crossing_thresholds(const DiscreteQuad& quad, std::uint64_t inner_samples, std::uint64_t seed,
                                        std::uint32_t replica) {
    if (inner_samples >= (1u << 24)) throw Error(ErrorKind::InvalidArgument, "too many inner samples");
    QuadIndex index(quad);
    const auto& reg = *quad.cells;
    std::vector<double> u(reg.size()), out(inner_samples);
    for (std::uint64_t s = 0; s < inner_samples; ++s) {
        UniformStream stream(seed, replica, StreamTag::Inner, std::uint32_t(s));
        for (std::size_t i = 0; i < reg.size(); ++i) u[i] = stream(reg.cell(i));
        out[s] = index.threshold(u.data());
    }
    return out;
}

Estimate probability_from_thresholds(const std::vector<double>& thresholds, double p) {
    std::uint64_t k = 0;
    for (double t : thresholds) k += t <= p;
    return binomial_estimate(k, thresholds.size());
}

Estimate conditional_vg_probability(const HitContext& ctx, double p, std::uint64_t inner_samples,
                                    std::uint64_t seed, std::uint32_t replica) {
    if (!ctx.good) throw Error(ErrorKind::InvalidArgument, "triangle is not good");
    DiscreteQuad quad = region_quad(ctx);
    return probability_from_thresholds(crossing_thresholds(quad, inner_samples, seed, replica), p);
}

Estimate conditional_vg_probability(const HexDomain& domain, const Configuration& config,
                                    const ExplorationPath& path, const TriangleCells& tri, double p,
                                    std::uint64_t inner_samples, std::uint64_t seed) {
    return conditional_vg_probability(compute_region(path, tri, domain, config), p, inner_samples, seed);
}

// --- X and Z -----------------------------------------------------------------

std::size_t stopping_time(const std::vector<bool>& good_flags, std::uint64_t a) {
    if (a == 0) return 0;
    std::uint64_t count = 0;
    for (std::size_t n = 0; n < good_flags.size(); ++n)
        if (good_flags[n] && ++count >= a) return n + 1;
    return good_flags.size() + 1;
}

StatisticTrace compute_X(const ExplorationPath& path, const TriangleGrid& grid, const StatisticParams& params,
                         double p_cond, std::uint64_t seed, std::uint32_t replica) {
    params.validate();
    StatisticTrace tr;
    tr.conditioning_p = p_cond;
    tr.M = params.good_cap();
    std::vector<HitInfo> hits = hit_all(path, grid);
    std::vector<std::size_t> order = order_by_hitting(hits);
    tr.T_M = order.size() + 1;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t t = order[k];
        TriangleRecord rec;
        rec.k = k + 1;
        rec.triangle = t;
        rec.hit = hits[t].sigma.has_value();
        rec.good = hits[t].good;
        if (rec.good) {
            try {
                HitContext ctx = compute_region(path, grid.cells[t]);
                DiscreteQuad quad = region_quad(ctx);
                rec.vg = is_very_good(path, ctx);
                Estimate e = probability_from_thresholds(
                    crossing_thresholds(quad, params.inner_samples, derive_seed(seed, t), replica), p_cond);
                rec.cond_prob = e.estimate;
                rec.cond_std_error = e.std_error;
                rec.increment = (rec.vg ? 1.0 : 0.0) - rec.cond_prob;
                ++tr.good_count;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::MalformedHit) throw;
                rec.malformed = true;
            }
        }
        tr.X_value += rec.increment;
        tr.records.push_back(rec);
        if (tr.good_count == tr.M) {
            tr.T_M = k + 1;
            break;
        }
    }
    return tr;
}

StatisticTrace compute_X(const Configuration& config, const ExplorationPath& path, const TriangleGrid& grid,
                         const StatisticParams& params, double p_cond, std::uint64_t seed, std::uint32_t replica) {
    const HexRegion& reg = config.region();
    for (const auto& s : path.steps) {
        int l = reg.index_of(s.left), r = reg.index_of(s.right);
        if ((l >= 0 && !config.blue_at(std::size_t(l))) || (r >= 0 && config.blue_at(std::size_t(r))))
            throw Error(ErrorKind::InvalidArgument, "path is not the interface of this configuration");
    }
    return compute_X(path, grid, params, p_cond, seed, replica);
}

double compute_Z(const Configuration& config, const ExplorationPath& path, const TriangleGrid& grid,
                 const StatisticParams& params, double p_mu, std::uint64_t seed, std::uint32_t replica) {
    return compute_X(config, path, grid, params, p_mu, seed, replica).X_value;
}

std::vector<StatisticTrace> sample_traces(const HexDomain& domain, const TriangleGrid& grid,
                                          const StatisticParams& params, double p_sample, double p_cond,
                                          std::uint64_t n_replicas, std::uint64_t seed) {
    params.validate();
    std::vector<StatisticTrace> out(n_replicas);
    const std::uint64_t inner_seed = derive_seed(seed, 1);
    parallel_for(n_replicas, [&](std::size_t i) {
        ExplorationPath path = trace_sampled(domain, p_sample, seed, std::uint32_t(i));
        out[i] = compute_X(path, grid, params, p_cond, inner_seed, std::uint32_t(i));
        out[i].sampled_p = p_sample;
    });
    return out;
}

MartingaleReport martingale_diagnostics(const std::vector<StatisticTrace>& traces, double sampled_at) {
    MartingaleReport rep;
    rep.n = traces.size();
    if (traces.empty()) return rep;
    rep.M = traces.front().M;
    std::vector<double> xs;
    for (const auto& t : traces) {
        if (t.sampled_p != sampled_at || t.conditioning_p != sampled_at || t.M != rep.M)
            throw Error(ErrorKind::MixedParameters, "traces were not all sampled and conditioned at one parameter");
        xs.push_back(t.X_value);
    }
    Summary s = summarize(xs);
    rep.mean = s.mean;
    rep.variance = s.variance;
    const double n = double(rep.n);
    rep.mean_bound = 3 * std::sqrt(double(rep.M) / n);
    rep.variance_bound = double(rep.M) * (1 + 3 / std::sqrt(n));
    rep.mean_ok = std::abs(rep.mean) <= rep.mean_bound;
    rep.variance_ok = rep.variance <= rep.variance_bound;
    return rep;
}

// --- conditional gap -------------------------------------------------------------

GapExperiment conditional_gap_experiment(const HexDomain& domain, const GapConfig& cfg) {
    if (cfg.lambdas.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one lambda");
    for (double l : cfg.lambdas)
        if (l < cfg.mu) throw Error(ErrorKind::InvalidArgument, "every lambda must be at least mu");
    if (cfg.inner_samples == 0 || cfg.inner_samples >= (1u << 24))
        throw Error(ErrorKind::InvalidArgument, "inner_samples must lie in [1, 2^24)");
    const double mesh = domain.spec.mesh;
    GapExperiment out;
    out.p_mu = probability_open({cfg.mu, mesh, cfg.alpha4_unit});
    std::vector<double> p_lambda;
    for (double l : cfg.lambdas) p_lambda.push_back(probability_open({l, mesh, cfg.alpha4_unit}));
    TriangleGrid grid = build_grid(domain, cfg.delta);
    const std::uint64_t inner_seed = derive_seed(cfg.seed, 1);

    const std::uint64_t batch = 1024;
    for (std::uint64_t start = 0; out.samples.size() < cfg.n_good_samples && start < cfg.max_replicas;
         start += batch) {
        const std::uint64_t m = std::min(batch, cfg.max_replicas - start);
        std::vector<std::vector<GapSample>> found(m);
        parallel_for(m, [&](std::size_t i) {
            const auto r = std::uint32_t(start + i);
            ExplorationPath path = trace_sampled(domain, out.p_mu, cfg.seed, r);
            std::vector<HitInfo> hits = hit_all(path, grid);
            for (std::size_t t : order_by_hitting(hits)) {
                if (!hits[t].good) continue;
                try {
                    HitContext ctx = compute_region(path, grid.cells[t]);
                    DiscreteQuad quad = region_quad(ctx);
                    auto thr = crossing_thresholds(quad, cfg.inner_samples, derive_seed(inner_seed, t), r);
                    GapSample g;
                    g.replica = r;
                    g.triangle = t;
                    g.region_size = ctx.region_d.size();
                    g.prob_mu = probability_from_thresholds(thr, out.p_mu).estimate;
                    for (double p : p_lambda) g.prob_lambda.push_back(probability_from_thresholds(thr, p).estimate);
                    found[i].push_back(std::move(g));
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::MalformedHit) throw;
                }
            }
        });
        for (std::uint64_t i = 0; i < m && out.samples.size() < cfg.n_good_samples; ++i) {
            for (auto& g : found[i]) {
                if (out.samples.size() == cfg.n_good_samples) break;
                out.samples.push_back(std::move(g));
            }
            out.replicas_used = start + i + 1;
        }
    }
    for (std::size_t j = 0; j < cfg.lambdas.size(); ++j) {
        GapSummary gs;
        gs.lambda = cfg.lambdas[j];
        gs.p_lambda = p_lambda[j];
        std::vector<double> gaps;
        for (const auto& g : out.samples) gaps.push_back(g.prob_lambda[j] - g.prob_mu);
        gs.gap = summarize(gaps);
        gs.positive = mean_above_zero(gaps);
        out.per_lambda.push_back(gs);
    }
    return out;
}

// --- half-annulus census ------------------------------------------------------

double census_depth(double delta, double radius, const StatisticParams& params, double c5) {
    if (!(delta > 0) || !(radius > 0) || !(c5 > 0)) throw Error(ErrorKind::InvalidArgument, "bad census scale");
    return std::log2(radius) - (params.beta * std::log2(delta) - std::log2(c5)) / (2 - params.alpha2_check);
}

namespace {

double segment_distance(Point p, Point a, Point b) {
    double dx = b.x - a.x, dy = b.y - a.y;
    double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy);
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(a.x + t * dx - p.x, a.y + t * dy - p.y);
}

// Distance from the origin to the closed triangle.
double distance_to_origin(const TriangleSpec& t) {
    if (t.in_t({0, 0})) return 0.0;
    Point v[3] = {t.anchor, {t.anchor.x + t.size, t.anchor.y}, t.apex()};
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) d = std::min(d, segment_distance({0, 0}, v[i], v[(i + 1) % 3]));
    return d;
}

} // namespace

AnnulusCensusPlan::AnnulusCensusPlan(const HexDomain& domain, const TriangleGrid& grid,
                                     const StatisticParams& params)
    : domain_(&domain), grid_(&grid) {
    const double r = domain.spec.radius;
    J_ = census_depth(grid.delta, r, params);
    if (J_ < 0) throw Error(ErrorKind::DegenerateScale, "no half-annulus at this delta");
    const auto& reg = *domain.region;
    const double mesh = domain.spec.mesh;
    for (int j = 0; j <= int(std::floor(J_)); ++j) {
        Slot slot;
        slot.shape.j = j;
        slot.shape.outer = r * std::ldexp(1.0, -j);
        slot.shape.inner = slot.shape.outer / 2;
        const double clearance = r * std::ldexp(1.0, -j - 3);
        for (std::size_t t = 0; t < grid.size(); ++t) {
            const TriangleSpec& ts = grid.triangles[t];
            Point v[3] = {ts.anchor, {ts.anchor.x + ts.size, ts.anchor.y}, ts.apex()};
            double far = 0;
            for (Point p : v) far = std::max(far, norm(p));
            if (far <= slot.shape.outer - clearance && distance_to_origin(ts) >= slot.shape.inner + clearance &&
                ts.anchor.y >= clearance)
                slot.shape.triangles.push_back(t);
        }
        if (slot.shape.triangles.empty())
            throw Error(ErrorKind::DegenerateScale, "half-annulus " + std::to_string(j) + " holds no triangle");

        std::vector<std::uint8_t> in_b(reg.size(), 0);
        slot.blue_target.assign(reg.size(), 0);
        slot.yellow_target.assign(reg.size(), 0);
        for (std::size_t i = 0; i < reg.size(); ++i) {
            Point c = hex_center(reg.cell(i), mesh);
            double d = norm(c);
            in_b[i] = d >= slot.shape.inner && d <= slot.shape.outer;
            if (in_b[i] && reg.cell(i).b == 0) (c.x < 0 ? slot.blue_target : slot.yellow_target)[i] = 1;
        }
        for (std::size_t t : slot.shape.triangles) {
            const TriangleSpec& ts = grid.triangles[t];
            const TriangleCells& tc = grid.cells[t];
            TriangleMask mask{t, in_b, {}};
            // Above the base line and within the triangle's columns, only the
            // gate is open: the arms have to leave through r.
            for (std::size_t i = 0; i < reg.size(); ++i) {
                Point c = hex_center(reg.cell(i), mesh);
                std::uint8_t cls = tc.classify(reg.cell(i));
                if (cls & kGateB) mask.gate_b.push_back(int(i));
                bool gate = cls & (kInR | kGateL | kGateB);
                if (!gate && c.x >= ts.x0() && c.x <= ts.x0() + ts.size && c.y >= ts.y0()) mask.allowed[i] = 0;
            }
            slot.masks.push_back(std::move(mask));
        }
        slots_.push_back(std::move(slot));
    }
}

bool AnnulusCensusPlan::arms_event(const Configuration& config, std::size_t slot, std::size_t which) const {
    const Slot& s = slots_[slot];
    const TriangleMask& mask = s.masks[which];
    const auto& reg = *domain_->region;
    auto arm = [&](bool blue, const std::vector<std::uint8_t>& target) {
        std::vector<std::uint8_t> seen(reg.size(), 0);
        std::vector<int> stack;
        for (int i : mask.gate_b)
            if (mask.allowed[i] && config.blue_at(std::size_t(i)) == blue) seen[i] = 1, stack.push_back(i);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (target[v]) return true;
            for (int w : reg.neighbor_indices(std::size_t(v)))
                if (w >= 0 && !seen[w] && mask.allowed[w] && config.blue_at(std::size_t(w)) == blue)
                    seen[w] = 1, stack.push_back(w);
        }
        return false;
    };
    return arm(true, s.blue_target) && arm(false, s.yellow_target);
}

AnnulusCensus AnnulusCensusPlan::census(const Configuration& config) const {
    if (config.size() != domain_->size()) throw Error(ErrorKind::InvalidArgument, "configuration does not fit the domain");
    AnnulusCensus out;
    out.J = J_;
    ExplorationPath path = trace(*domain_, config);
    for (std::size_t s = 0; s < slots_.size(); ++s) {
        AnnulusRecord rec = slots_[s].shape;
        for (std::size_t k = 0; k < slots_[s].masks.size(); ++k) {
            if (!arms_event(config, s, k)) continue;
            ++rec.G;
            if (!is_good(path, grid_->cells[slots_[s].masks[k].triangle])) ++rec.good_violations;
        }
        out.annuli.push_back(std::move(rec));
    }
    return out;
}

AnnulusCensus count_good_in_annuli(const HexDomain& domain, const Configuration& config, const TriangleGrid& grid,
                                   const StatisticParams& params) {
    return AnnulusCensusPlan(domain, grid, params).census(config);
}

std::vector<SecondMoment> second_moment_diagnostics(const std::vector<AnnulusCensus>& samples,
                                                    std::size_t min_samples) {
    if (samples.size() < std::max<std::size_t>(min_samples, 1))
        throw Error(ErrorKind::InvalidArgument, "too few census samples");
    const std::size_t nj = samples.front().annuli.size();
    std::vector<SecondMoment> out;
    for (std::size_t j = 0; j < nj; ++j) {
        SecondMoment m;
        m.j = samples.front().annuli[j].j;
        m.n = samples.size();
        for (const auto& c : samples) {
            if (c.annuli.size() != nj) throw Error(ErrorKind::InvalidArgument, "censuses cover different annuli");
            double g = double(c.annuli[j].G);
            m.mean += g;
            m.second_moment += g * g;
        }
        m.mean /= double(m.n);
        m.second_moment /= double(m.n);
        std::size_t hit = 0;
        for (const auto& c : samples) hit += double(c.annuli[j].G) >= m.mean / 2;
        m.frequency_half_mean = double(hit) / double(m.n);
        m.c7 = m.mean > 0 ? (m.second_moment - m.mean) / (m.mean * m.mean) : 0.0;
        out.push_back(m);
    }
    return out;
}

// --- separation ---------------------------------------------------------------

std::vector<double> z_values(const std::vector<StatisticTrace>& traces) {
    std::vector<double> z;
    z.reserve(traces.size());
    for (const auto& t : traces) z.push_back(t.X_value);
    return z;
}

SeparationResult separation_experiment(const HexDomain& domain, double mu, double lambda, double alpha4_unit,
                                       const StatisticParams& params, std::uint64_t n_replicas,
                                       std::uint64_t seed) {
    if (lambda < mu) throw Error(ErrorKind::InvalidArgument, "need mu <= lambda");
    params.validate();
    SeparationResult out;
    const double mesh = domain.spec.mesh;
    out.p_mu = probability_open({mu, mesh, alpha4_unit});
    out.p_lambda = probability_open({lambda, mesh, alpha4_unit});
    TriangleGrid grid = build_grid(domain, params.delta);
    out.under_mu = sample_traces(domain, grid, params, out.p_mu, out.p_mu, n_replicas, derive_seed(seed, 10));
    out.under_lambda = sample_traces(domain, grid, params, out.p_lambda, out.p_mu, n_replicas, derive_seed(seed, 11));
    out.upper_threshold = params.upper_threshold();
    out.lower_threshold = params.lower_threshold();
    out.tail_bound = std::pow(params.delta, params.beta);
    std::vector<double> zm = z_values(out.under_mu), zl = z_values(out.under_lambda);
    if (n_replicas > 0) {
        out.freq_mu_above_upper =
            double(std::count_if(zm.begin(), zm.end(), [&](double z) { return z >= out.upper_threshold; })) /
            double(n_replicas);
        out.freq_lambda_below_lower =
            double(std::count_if(zl.begin(), zl.end(), [&](double z) { return z <= out.lower_threshold; })) /
            double(n_replicas);
    }
    out.welch = welch_test(zm, zl);
    out.mann_whitney = mann_whitney(zm, zl);
    return out;
}

} // namespace nearcrit
