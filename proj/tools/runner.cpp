#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nearcrit/calibration.hpp"
#include "nearcrit/connectivity.hpp"
#include "nearcrit/discriminator.hpp"
#include "nearcrit/error.hpp"
#include "nearcrit/explorer.hpp"
#include "nearcrit/parallel.hpp"
#include "nearcrit/scalemap.hpp"

#ifndef NEARCRIT_VERSION
#define NEARCRIT_VERSION "unknown"
#endif

namespace nearcrit::cli {

namespace {

const std::vector<std::string> kSubcommands = {"calibrate", "arms",    "trace",    "quad-stability",
                                               "separate",  "annuli",  "scalemap", "emit-plots"};
const std::vector<std::string> kKinds = {"exponent-fit", "z-histogram", "annulus-census"};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
    double v = parse_number(text);
    if (!(v >= 0) || v != std::floor(v) || v > 9e18) throw ConfigError(key + " must be a non-negative integer");
    return std::uint64_t(v);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_number(item));
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key + " must be true or false");
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
    return h;
}

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json to_json(const Estimate& e) {
    return {{"estimate", e.estimate}, {"std_error", e.std_error}, {"successes", e.successes}, {"trials", e.trials}};
}

Json to_json(const TestResult& t) {
    return {{"statistic", t.statistic}, {"df", t.df}, {"p_greater", t.p_greater}, {"p_two_sided", t.p_two_sided}};
}

CalibrationStore open_store() { return CalibrationStore(CalibrationStore::default_path()); }

// Open probability for iota at mesh; needs a calibration unless iota is 0.
double open_probability(double iota, double mesh) {
    if (iota == 0.0) return 0.5;
    return probability_open({iota, mesh, open_store().require(mesh).alpha4_unit});
}

std::vector<Json> run_calibrate(const RunConfig& c) {
    CalibrationRecord r = calibrate_alpha4_unit({c.radius, c.mesh}, c.samples, c.seed);
    CalibrationStore store = open_store();
    store.put(r);
    store.save();
    return {{{"type", "calibration"},
             {"mesh", r.mesh},
             {"alpha4_unit", r.alpha4_unit},
             {"std_error", r.std_error},
             {"successes", r.successes},
             {"n_samples", r.n_samples},
             {"seed", r.seed}}};
}

std::vector<Json> run_arms(const RunConfig& c) {
    std::vector<double> meshes = c.meshes.empty() ? std::vector<double>{c.mesh} : c.meshes;
    ArmPattern pattern = ArmPattern::parse(c.pattern);
    std::vector<Json> out;
    std::vector<ScalePoint> series;
    for (std::size_t i = 0; i < meshes.size(); ++i) {
        double m = meshes[i];
        AnnulusSpec spec{hex_center(HexCoord{0, 0}, m), c.inner * m, c.radius, c.half_plane};
        AnnulusGeometry g(spec, m);
        Estimate e = estimate_arm_probability(g, pattern, open_probability(c.mu, m), c.samples, derive_seed(c.seed, i));
        double ratio = spec.outer / spec.inner;
        series.push_back({ratio, e.estimate, e.std_error});
        out.push_back({{"type", "scale"},
                       {"pattern", pattern.str()},
                       {"half_plane", c.half_plane},
                       {"mesh", m},
                       {"ratio", ratio},
                       {"cells", g.size()},
                       {"estimate", e.estimate},
                       {"std_error", e.std_error},
                       {"successes", e.successes},
                       {"trials", e.trials}});
    }
    if (series.size() >= 3) {
        bool positive = std::all_of(series.begin(), series.end(), [](auto& p) { return p.estimate > 0; });
        Json fit = {{"type", "fit"}, {"pattern", pattern.str()}, {"half_plane", c.half_plane}};
        if (positive) {
            ExponentFit f = fit_arm_exponent(series);
            fit["exponent"] = f.exponent;
            fit["std_error"] = f.std_error;
            fit["intercept"] = f.intercept;
        } else {
            fit["exponent"] = nullptr;  // some scale saw no arms
        }
        out.push_back(fit);
    }
    return out;
}

std::vector<Json> run_trace(const RunConfig& c) {
    HexDomain domain = build_domain({c.radius, c.mesh});
    double p = open_probability(c.mu, c.mesh);
    std::vector<Json> out(c.samples);
    parallel_for(c.samples, [&](std::size_t i) {
        ExplorationPath path = trace_sampled(domain, p, c.seed, std::uint32_t(i));
        Point end = path.vertex(path.size() - 1);
        auto half = exit_time(path, 0.5 * c.radius);
        out[i] = {{"type", "replica"},
                  {"replica", i},
                  {"steps", path.size()},
                  {"end", {end.x, end.y}},
                  {"exit_half", half ? Json(*half) : Json(nullptr)}};
    });
    Json summary = {{"type", "summary"}, {"p", p}, {"replicas", c.samples}};
    out.push_back(summary);
    return out;
}

std::vector<Json> run_quad_stability(const RunConfig& c) {
    bool slit = c.family == "slit";
    std::vector<double> steps = c.steps;
    if (steps.empty()) steps = slit ? std::vector<double>{16, 32, 64} : std::vector<double>{8, 4, 2, 1};
    std::vector<Json> out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        int step = int(steps[i]);
        double mesh = slit ? c.radius / (4 * step) : c.mesh;
        double p = open_probability(c.mu, mesh);
        DiscreteQuad square = rectangle_quad(0, 0, c.radius, c.radius, mesh);
        DiscreteQuad other = slit ? slit_quad(c.radius, step, mesh) : shrunk_square_quad(c.radius, step, mesh);
        std::uint64_t seed = derive_seed(c.seed, i);
        out.push_back({{"type", "point"},
                       {"family", c.family},
                       {"step", step},
                       {"mesh", mesh},
                       {"symmetric_difference", to_json(symmetric_difference_probability(square, other, p, c.samples, seed))},
                       {"crossing_square", to_json(crossing_probability(square, p, c.samples, seed))},
                       {"crossing_perturbed", to_json(crossing_probability(other, p, c.samples, seed))}});
    }
    return out;
}

StatisticParams statistic_params(const RunConfig& c) {
    StatisticParams params = StatisticParams::with_defaults(c.delta, c.beta);
    params.inner_samples = c.inner_samples;
    return params;
}

std::vector<Json> run_separate(const RunConfig& c) {
    double a4 = open_store().require(c.mesh).alpha4_unit;
    HexDomain domain = build_domain({c.radius, c.mesh});
    StatisticParams params = statistic_params(c);
    SeparationResult r = separation_experiment(domain, c.mu, c.lambda, a4, params, c.samples, c.seed);
    std::vector<Json> out;
    for (auto* traces : {&r.under_mu, &r.under_lambda}) {
        const char* law = traces == &r.under_mu ? "mu" : "lambda";
        for (std::size_t i = 0; i < traces->size(); ++i) {
            const StatisticTrace& t = (*traces)[i];
            out.push_back({{"type", "replica"},
                           {"law", law},
                           {"replica", i},
                           {"Z", t.X_value},
                           {"T_M", t.T_M},
                           {"good", t.good_count}});
        }
    }
    out.push_back({{"type", "summary"},
                   {"alpha4_unit", a4},
                   {"p_mu", r.p_mu},
                   {"p_lambda", r.p_lambda},
                   {"M", params.good_cap()},
                   {"upper_threshold", r.upper_threshold},
                   {"lower_threshold", r.lower_threshold},
                   {"freq_mu_above_upper", r.freq_mu_above_upper},
                   {"freq_lambda_below_lower", r.freq_lambda_below_lower},
                   {"tail_bound", r.tail_bound},
                   {"welch", to_json(r.welch)},
                   {"mann_whitney", to_json(r.mann_whitney)}});
    return out;
}

std::vector<Json> run_annuli(const RunConfig& c) {
    HexDomain domain = build_domain({c.radius, c.mesh});
    StatisticParams params = statistic_params(c);
    TriangleGrid grid = build_grid(domain, c.delta);
    AnnulusCensusPlan plan(domain, grid, params);
    double p = open_probability(c.mu, c.mesh);
    std::vector<AnnulusCensus> censuses(c.samples);
    parallel_for(c.samples, [&](std::size_t i) {
        censuses[i] = plan.census(sample_configuration(domain, p, c.seed, std::uint32_t(i)));
    });
    std::vector<Json> out;
    for (std::size_t i = 0; i < censuses.size(); ++i) {
        Json G = Json::array(), bad = Json::array();
        for (const auto& a : censuses[i].annuli) {
            G.push_back(a.G);
            bad.push_back(a.good_violations);
        }
        out.push_back({{"type", "replica"}, {"replica", i}, {"G", G}, {"violations", bad}});
    }
    Json moments = Json::array();
    for (const SecondMoment& m : second_moment_diagnostics(censuses, 1))
        moments.push_back({{"j", m.j},
                           {"n", m.n},
                           {"mean", m.mean},
                           {"second_moment", m.second_moment},
                           {"frequency_half_mean", m.frequency_half_mean},
                           {"c7", m.c7}});
    Json triangles = Json::array();
    if (!censuses.empty())
        for (const auto& a : censuses[0].annuli) triangles.push_back(a.triangles.size());
    out.push_back({{"type", "summary"},
                   {"p", p},
                   {"J", plan.J()},
                   {"triangles", triangles},
                   {"moments", moments}});
    return out;
}

std::vector<Json> run_scalemap(const RunConfig& c) {
    CalibrationStore store = open_store();
    // The same cells at both meshes: the target quad is the source blown up by s.
    DiscreteQuad quad = rectangle_quad(0, 0, c.s * c.radius, c.s * c.radius / 2, c.s * c.mesh);
    LambdaChoice choice = c.choice == "naive" ? LambdaChoice::Naive : LambdaChoice::Table;
    ScalingConsistency r = scaling_consistency_experiment({c.s, c.mu}, c.mesh, quad, store, choice, c.samples, c.seed);
    EffectiveParameter e = scaled_configuration_law(c.mu, c.mesh, c.s, store);
    return {{{"type", "summary"},
             {"choice", c.choice},
             {"lambda", r.lambda},
             {"table_ratio", e.ratio},
             {"table_ratio_std_error", e.ratio_std_error},
             {"limit_ratio", std::pow(c.s, -0.75)},
             {"p_source", r.p_source},
             {"p_target", r.p_target},
             {"rescaled", to_json(r.rescaled)},
             {"direct", to_json(r.direct)},
             {"test", to_json(r.test)}}};
}

std::vector<Json> run_emit_plots(const RunConfig& c) {
    std::string csv = emit_plot_data(read_lines(c.input), c.kind, c.bins);
    std::size_t rows = std::count(csv.begin(), csv.end(), '\n');
    return {{{"type", "plot"}, {"kind", c.kind}, {"rows", rows == 0 ? 0 : rows - 1}, {"csv", csv}}};
}

} // namespace

double parse_number(const std::string& text) {
    std::string t = trim(text);
    auto slash = t.find('/');
    try {
        std::size_t used = 0;
        if (slash != std::string::npos) {
            double a = parse_number(t.substr(0, slash)), b = parse_number(t.substr(slash + 1));
            if (b == 0) throw ConfigError("division by zero in " + t);
            return a / b;
        }
        double v = std::stod(t, &used);
        if (used != t.size()) throw ConfigError("not a number: " + t);
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("not a number: " + t);
    }
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "mesh",      "radius", "mu",   "lambda", "delta", "beta",   "samples", "inner_samples", "seed",
        "output",    "pattern", "half_plane", "meshes", "inner", "family", "steps", "s",       "choice",
        "kind",      "input",  "bins", "workers"};
    return keys;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
    std::string v = trim(raw);
    if (key == "mesh") mesh = parse_number(v);
    else if (key == "radius") radius = parse_number(v);
    else if (key == "mu") mu = parse_number(v);
    else if (key == "lambda") lambda = parse_number(v);
    else if (key == "delta") delta = parse_number(v);
    else if (key == "beta") beta = parse_number(v);
    else if (key == "samples") samples = parse_count(key, v);
    else if (key == "inner_samples") inner_samples = parse_count(key, v);
    else if (key == "seed") seed = parse_count(key, v);
    else if (key == "output") output = v;
    else if (key == "pattern") pattern = v;
    else if (key == "half_plane") half_plane = parse_bool(key, v);
    else if (key == "meshes") meshes = parse_list(v);
    else if (key == "inner") inner = parse_number(v);
    else if (key == "family") family = v;
    else if (key == "steps") steps = parse_list(v);
    else if (key == "s") s = parse_number(v);
    else if (key == "choice") choice = v;
    else if (key == "kind") kind = v;
    else if (key == "input") input = v;
    else if (key == "bins") bins = parse_count(key, v);
    else if (key == "workers") workers = unsigned(parse_count(key, v));
    else throw ConfigError("unknown key: " + key);
}

void RunConfig::load_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config " + file.string());
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(file.string() + ":" + std::to_string(n) + ": expected key = value");
        set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

void RunConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    require(std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) != kSubcommands.end(),
            "unknown subcommand: " + subcommand);
    if (subcommand == "emit-plots") {
        if (std::find(kKinds.begin(), kKinds.end(), kind) == kKinds.end())
            throw Error(ErrorKind::UnknownKind, "unknown plot kind: " + kind);
        require(!input.empty(), "emit-plots needs input");
        require(bins > 0, "bins must be positive");
        return;
    }
    require(mesh > 0 && radius > 0 && mesh < radius, "need 0 < mesh < radius");
    require(samples > 0, "samples must be positive");
    require(std::isfinite(mu) && std::isfinite(lambda), "mu and lambda must be finite");
    if (subcommand == "calibrate") require(samples >= 100, "calibration needs at least 100 samples");
    if (subcommand == "arms") {
        try {
            ArmPattern::parse(pattern);
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        require(inner >= 1, "inner is in mesh units and must be >= 1");
        for (double m : meshes) require(m > 0 && inner * m < radius, "every mesh needs inner * mesh < radius");
    }
    if (subcommand == "quad-stability") {
        require(family == "shrink" || family == "slit", "family must be shrink or slit");
        for (double k : steps) {
            require(k == std::floor(k) && k >= 0, "steps must be non-negative integers");
            if (family == "slit") require(k >= 3, "slit steps need n >= 3");
        }
    }
    if (subcommand == "separate" || subcommand == "annuli") {
        require(mesh <= delta / 16 && delta <= radius / 4, "need mesh <= delta/16 and delta <= radius/4");
        require(mu <= lambda || subcommand == "annuli", "need mu <= lambda");
        require(inner_samples > 0, "inner_samples must be positive");
        try {
            StatisticParams p = StatisticParams::with_defaults(delta, beta);
            p.inner_samples = inner_samples;
            p.validate();
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
    }
    if (subcommand == "scalemap") {
        require(s > 0, "s must be positive");
        require(choice == "table" || choice == "naive", "choice must be table or naive");
    }
}

Json RunConfig::echo() const {
    auto list = [](const std::vector<double>& xs) {
        Json a = Json::array();
        for (double x : xs) a.push_back(x);
        return a;
    };
    return {{"subcommand", subcommand},
            {"mesh", mesh},
            {"radius", radius},
            {"mu", mu},
            {"lambda", lambda},
            {"delta", delta},
            {"beta", beta},
            {"samples", samples},
            {"inner_samples", inner_samples},
            {"seed", seed},
            {"pattern", pattern},
            {"half_plane", half_plane},
            {"meshes", list(meshes)},
            {"inner", inner},
            {"family", family},
            {"steps", list(steps)},
            {"s", s},
            {"choice", choice},
            {"kind", kind},
            {"input", input},
            {"bins", bins}};
}

std::vector<Json> run(const RunConfig& config) {
    config.validate();
    std::vector<Json> body;
    const std::string& sub = config.subcommand;
    if (sub == "calibrate") body = run_calibrate(config);
    else if (sub == "arms") body = run_arms(config);
    else if (sub == "trace") body = run_trace(config);
    else if (sub == "quad-stability") body = run_quad_stability(config);
    else if (sub == "separate") body = run_separate(config);
    else if (sub == "annuli") body = run_annuli(config);
    else if (sub == "scalemap") body = run_scalemap(config);
    else body = run_emit_plots(config);

    Json echo = config.echo();
    char id[17];
    std::snprintf(id, sizeof id, "%016llx", static_cast<unsigned long long>(fnv1a(echo.dump())));
    std::vector<Json> lines;
    lines.push_back(
        {{"type", "run"}, {"run_id", id}, {"version", NEARCRIT_VERSION}, {"seed", config.seed}, {"config", echo}});
    for (auto& j : body) lines.push_back(std::move(j));
    return lines;
}

void write_text(const RunConfig& config, const std::string& text, std::ostream& out) {
    if (config.output.empty()) {
        out << text;
        return;
    }
    std::filesystem::path path(config.output);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream file(path);
    if (!file) throw ConfigError("cannot write " + config.output);
    file << text;
}

void write_lines(const RunConfig& config, const std::vector<Json>& lines, std::ostream& out) {
    std::string text;
    for (const auto& j : lines) text += j.dump() + "\n";
    write_text(config, text, out);
}

std::vector<Json> read_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read results " + file.string());
    std::vector<Json> out;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        try {
            out.push_back(Json::parse(line));
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("malformed JSON line in " + file.string());
        }
    }
    return out;
}

std::string emit_plot_data(const std::vector<Json>& results, const std::string& kind, std::uint64_t bins) {
    std::ostringstream csv;
    auto type_is = [](const Json& j, const char* t) { return j.is_object() && j.value("type", "") == t; };
    if (kind == "exponent-fit") {
        // Columns: arm pattern, half-plane flag, mesh, outer/inner ratio, estimate and its
        // standard error, and the fitted exponent of that pattern (empty without a fit).
        csv << "pattern,half_plane,mesh,ratio,estimate,std_error,exponent\n";
        for (const Json& j : results) {
            if (!type_is(j, "scale")) continue;
            std::string exponent;
            for (const Json& f : results)
                if (type_is(f, "fit") && f["pattern"] == j["pattern"] && f["half_plane"] == j["half_plane"] &&
                    f["exponent"].is_number())
                    exponent = number(f["exponent"].get<double>());
            csv << j["pattern"].get<std::string>() << ',' << (j["half_plane"].get<bool>() ? 1 : 0) << ','
                << number(j["mesh"]) << ',' << number(j["ratio"]) << ',' << number(j["estimate"]) << ','
                << number(j["std_error"]) << ',' << exponent << '\n';
        }
    } else if (kind == "z-histogram") {
        // Columns: law (mu or lambda), bin index, bin edges, count. Bins span the
        // pooled range; the last bin is closed.
        csv << "law,bin,lo,hi,count\n";
        std::map<std::string, std::vector<double>> z;
        for (const Json& j : results)
            if (type_is(j, "replica") && j.contains("Z")) z[j["law"].get<std::string>()].push_back(j["Z"]);
        double lo = INFINITY, hi = -INFINITY;
        for (auto& [law, xs] : z)
            for (double x : xs) lo = std::min(lo, x), hi = std::max(hi, x);
        if (!z.empty() && hi <= lo) hi = lo + 1;
        double width = (hi - lo) / double(bins);
        for (auto& [law, xs] : z) {
            std::vector<std::uint64_t> count(bins, 0);
            for (double x : xs) count[std::min<std::uint64_t>(bins - 1, std::uint64_t((x - lo) / width))]++;
            for (std::uint64_t b = 0; b < bins; ++b)
                csv << law << ',' << b << ',' << number(lo + b * width) << ',' << number(lo + (b + 1) * width) << ','
                    << count[b] << '\n';
        }
    } else if (kind == "annulus-census") {
        // Columns: replica, annulus index j, good-triangle count G_j, and the number of
        // arm events seen without a good triangle.
        csv << "replica,j,G,violations\n";
        for (const Json& j : results) {
            if (!type_is(j, "replica") || !j.contains("G")) continue;
            for (std::size_t k = 0; k < j["G"].size(); ++k)
                csv << j["replica"].get<std::uint64_t>() << ',' << k << ',' << j["G"][k].get<std::uint64_t>()
                    << ',' << j["violations"][k].get<std::uint64_t>() << '\n';
        }
    } else {
        throw Error(ErrorKind::UnknownKind, "unknown plot kind: " + kind);
    }
    return csv.str();
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 1;
    if (auto* err = dynamic_cast<const Error*>(&e)) {
        if (err->kind() == ErrorKind::MissingCalibration) return 2;
        if (err->kind() == ErrorKind::UnknownKind) return 1;
    }
    return 3;
}

} // namespace nearcrit::cli
