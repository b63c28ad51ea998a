#include "nearcrit/calibration.hpp"

#include "nearcrit/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

namespace nearcrit {

AnnulusSpec calibration_annulus(const DomainSpec& spec) {
    return {hex_center(HexCoord{0, 0}, spec.mesh), spec.mesh, spec.radius, false};
}

CalibrationRecord calibrate_alpha4_unit(const DomainSpec& spec, std::uint64_t n_samples, std::uint64_t seed) {
    if (n_samples < 100) throw Error(ErrorKind::InvalidArgument, "calibration needs at least 100 samples");
    AnnulusGeometry geometry(calibration_annulus(spec), spec.mesh);
    Estimate e = estimate_arm_probability(geometry, ArmPattern::parse("BYBY"), 0.5, n_samples, seed,
                                          StreamTag::Calibration);
    return {spec.mesh, e.estimate, e.std_error, e.successes, e.trials, seed};
}

namespace {

bool same_mesh(double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(std::abs(x), std::abs(y)); }

std::string mesh_key(double mesh) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", mesh);
    return buf;
}

} // namespace

CalibrationStore::CalibrationStore(std::filesystem::path file) : file_(std::move(file)) {
    std::ifstream in(file_);
    if (!in) return;
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorKind::InvalidArgument, "calibration store " + file_.string() + " is not valid JSON");
    }
    for (auto& [key, v] : j.items()) {
        CalibrationRecord r;
        r.mesh = std::stod(key);
        r.alpha4_unit = v.at("alpha4_unit").get<double>();
        r.std_error = v.at("std_error").get<double>();
        r.successes = v.value("successes", std::uint64_t(0));
        r.n_samples = v.at("n_samples").get<std::uint64_t>();
        r.seed = v.at("seed").get<std::uint64_t>();
        records_.push_back(r);
    }
    std::sort(records_.begin(), records_.end(), [](auto& x, auto& y) { return x.mesh < y.mesh; });
}

std::filesystem::path CalibrationStore::default_path() {
    const char* dir = std::getenv("NEARCRIT_CAL_DIR");
    std::filesystem::path base = dir && *dir ? std::filesystem::path(dir) : std::filesystem::path("calibration");
    return base / "alpha4.json";
}

std::optional<CalibrationRecord> CalibrationStore::find(double mesh) const {
    for (const auto& r : records_)
        if (same_mesh(r.mesh, mesh)) return r;
    return std::nullopt;
}

CalibrationRecord CalibrationStore::require(double mesh) const {
    auto r = find(mesh);
    if (!r) throw Error(ErrorKind::MissingCalibration, "no alpha4 calibration for mesh " + mesh_key(mesh));
    return *r;
}

void CalibrationStore::put(const CalibrationRecord& record) {
    if (!(record.mesh > 0) || !(record.alpha4_unit > 0))
        throw Error(ErrorKind::InvalidArgument, "calibration needs a positive mesh and estimate");
    auto it = std::find_if(records_.begin(), records_.end(), [&](auto& r) { return same_mesh(r.mesh, record.mesh); });
    if (it != records_.end()) *it = record;
    else records_.push_back(record);
    std::sort(records_.begin(), records_.end(), [](auto& x, auto& y) { return x.mesh < y.mesh; });
}

void CalibrationStore::save() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& r : records_)
        j[mesh_key(r.mesh)] = {{"alpha4_unit", r.alpha4_unit}, {"std_error", r.std_error},
                               {"successes", r.successes},     {"n_samples", r.n_samples},
                               {"seed", r.seed}};
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
    // Write then rename so a crash never leaves a truncated store.
    std::filesystem::path tmp = file_;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, file_);
}

} // namespace nearcrit
