#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace nearcrit::cli {

using Json = nlohmann::ordered_json;

// Bad keys, unparsable values or values outside a module's preconditions.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string subcommand;
    double mesh = 1.0 / 64;
    double radius = 1.0;
    double mu = 0.0;
    double lambda = 5.0;
    double delta = 1.0 / 8;
    double beta = 0.05;
    std::uint64_t samples = 1000;
    std::uint64_t inner_samples = 500;
    std::uint64_t seed = 1;
    std::string output;  // empty: stdout

    // arms
    std::string pattern = "BYBY";
    bool half_plane = false;
    std::vector<double> meshes;  // empty: just `mesh`
    double inner = 1.0;          // hole radius in mesh units
    // quad-stability: shrink takes k in hexagon widths, slit takes n
    std::string family = "shrink";
    std::vector<double> steps;
    // scalemap
    double s = 2.0;
    std::string choice = "table";
    // emit-plots
    std::string kind;
    std::string input;
    std::uint64_t bins = 20;

    // Not echoed: results must not depend on it.
    unsigned workers = 0;

    // Sets one key; ConfigError for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    // key = value lines, '#' starts a comment.
    void load_file(const std::filesystem::path& file);
    // ConfigError unless the subcommand's preconditions hold.
    void validate() const;
    Json echo() const;
};

// Accepts decimals and fractions such as 1/64.
double parse_number(const std::string& text);

// Every key accepted by RunConfig::set.
const std::vector<std::string>& config_keys();

// Runs one config after validating it. Returns the JSON lines in output order;
// the first is the run record. Calibration also updates the store; emit-plots
// returns the CSV inside a single plot record.
std::vector<Json> run(const RunConfig& config);

// Writes `text` to config.output, or to `out` when no output is set.
void write_text(const RunConfig& config, const std::string& text, std::ostream& out);
// Writes `lines` to config.output (or `out` when empty), one object per line.
void write_lines(const RunConfig& config, const std::vector<Json>& lines, std::ostream& out);

std::vector<Json> read_lines(const std::filesystem::path& file);

// Tidy CSV for one plot kind: exponent-fit, z-histogram or annulus-census.
// UnknownKind otherwise.
std::string emit_plot_data(const std::vector<Json>& results, const std::string& kind, std::uint64_t bins = 20);

// Process exit code for an exception escaping run().
int exit_code_for(const std::exception& e);

} // namespace nearcrit::cli
