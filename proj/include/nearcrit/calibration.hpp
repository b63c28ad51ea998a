#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "nearcrit/connectivity.hpp"
#include "nearcrit/hexlattice.hpp"

namespace nearcrit {

struct CalibrationRecord {
    double mesh = 0.0;
    double alpha4_unit = 0.0;
    double std_error = 0.0;
    std::uint64_t successes = 0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

// Whole-plane annulus around hex (0,0): the hole is that single hexagon and
// the outer radius is the domain radius.
AnnulusSpec calibration_annulus(const DomainSpec& spec);

// Four alternating arms at p = 1/2 across the calibration annulus.
// InvalidArgument when n_samples < 100.
CalibrationRecord calibrate_alpha4_unit(const DomainSpec& spec, std::uint64_t n_samples, std::uint64_t seed);

// JSON file mapping mesh -> record. Meshes match up to a relative 1e-9.
class CalibrationStore {
public:
    explicit CalibrationStore(std::filesystem::path file);

    // $NEARCRIT_CAL_DIR/alpha4.json, or ./calibration/alpha4.json when unset.
    static std::filesystem::path default_path();

    const std::filesystem::path& path() const { return file_; }
    const std::vector<CalibrationRecord>& records() const { return records_; }

    std::optional<CalibrationRecord> find(double mesh) const;
    // MissingCalibration when there is no entry for `mesh`.
    CalibrationRecord require(double mesh) const;

    // Replaces any entry for the same mesh.
    void put(const CalibrationRecord& record);
    void save() const;

private:
    std::filesystem::path file_;
    std::vector<CalibrationRecord> records_;
};

} // namespace nearcrit
