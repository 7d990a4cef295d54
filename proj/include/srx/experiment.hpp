#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "srx/link.hpp"

namespace srx {

/// Invalid configuration or usage; maps to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 1;
inline constexpr int exit_verification = 2;

inline constexpr int config_schema_version = 1;

/// "4" or "1..8"; every value must lie in [1, 16].
std::vector<int> parse_m_range(const std::string& text);

struct ExperimentConfig {
    SchemeConfig base;
    /// Unset: 2^m for REFERENCE_PPM, 16 for PASSIVE_PATTERN.
    std::optional<int> ppm_order;
    /// Unset: max(M, 2^m).
    std::optional<int> guard_bins;
    std::vector<double> sweep_mean_photons;
    std::vector<int> sweep_m;
    std::vector<double> sweep_phase_sigma;
    std::uint64_t n_trials = 100000;
    std::uint64_t master_seed = 1;
    unsigned threads = 0;
    std::string out_csv;
    std::string out_json;

    /// Cartesian product in the order m, sigma, N_s (N_s varies fastest).
    std::vector<SchemeConfig> expand() const;
};

/// Parses and validates a simulate config. Unknown keys are rejected.
ExperimentConfig parse_experiment(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::string& path);

struct CommandOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
};

/// Builds and exhaustively checks active and passive chains for each m.
/// Returns the JSON report; report["passed"] tells whether everything held.
nlohmann::ordered_json run_verify(const std::vector<int>& ms, double tolerance = 1e-10, unsigned threads = 0);
void validate_verify_json(const nlohmann::json& j);

/// Runs every sweep point, flushing one CSV row per point and printing a
/// summary line to `log`. Writes the JSON mirror at the end.
std::vector<LinkReport> run_simulate(ExperimentConfig cfg, const CommandOverrides& overrides, std::ostream& log);

/// Rows for REFERENCE_PPM (order ppm_order), ACTIVE_HADAMARD (m) and
/// PASSIVE_PATTERN (m, default framing with ppm_order offsets).
std::vector<ParRow> default_par_table(int m, int ppm_order, std::optional<std::int64_t> common_frame);
void write_par_csv(std::ostream& os, const std::vector<ParRow>& rows);

/// Writes `text` to `path`, throwing std::runtime_error with the path on failure.
void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

} // namespace srx
