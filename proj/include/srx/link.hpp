#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "srx/active_receiver.hpp"
#include "srx/channel.hpp"
#include "srx/passive_receiver.hpp"

namespace srx {

enum class Scheme { active_hadamard, passive_pattern, reference_ppm };

const char* to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct SchemeConfig {
    Scheme scheme = Scheme::active_hadamard;
    /// Receiver depth for the active and passive schemes.
    int m = 4;
    /// PPM order of REFERENCE_PPM. The passive scheme takes it from `frame`.
    int ppm_order = 16;
    /// Mean received photons per symbol, N_s. Transmitted energy is N_s / eta.
    double mean_photons = 1.0;
    FrameConfig frame;
    ChannelParams channel;
    DetectorMode mode = DetectorMode::summed;
};

/// Transmit alphabet, receiver, detection gate and position map for one
/// configuration. Construction validates the configuration.
class LinkModel {
public:
    explicit LinkModel(SchemeConfig cfg);

    const SchemeConfig& config() const { return cfg_; }
    std::size_t alphabet_size() const { return alphabet_size_; }
    /// Transmitted field of a symbol. Hadamard codewords are generated on demand.
    FieldState transmitted(std::size_t symbol) const;
    /// Receiver output for a received field (identity for REFERENCE_PPM).
    FieldState receive(const FieldState& in) const;
    const DetectionWindow& window() const { return positions_.window; }
    const PositionMap& positions() const { return positions_; }
    /// Bins per transmitted symbol frame.
    std::int64_t frame_length() const { return frame_len_; }
    /// Peak-to-average power of the transmitted symbol over frame_length().
    double peak_to_average() const;

    struct Trial {
        int sent;
        DecodeOutcome outcome;
    };
    /// One full encode -> channel -> receiver -> detect -> decode pass on the
    /// stream (master_seed, trial).
    Trial run_trial(std::uint64_t master_seed, std::uint64_t trial) const;

private:
    std::vector<double> cell_means(std::size_t symbol, RngStream& rng) const;

    SchemeConfig cfg_;
    std::size_t alphabet_size_ = 0;
    Amplitude bpsk_alpha_{};
    std::vector<FieldState> alphabet_; // passive and reference schemes
    ActiveChain active_;
    PassiveChain passive_;
    PositionMap positions_;
    std::int64_t frame_len_ = 0;
    FieldState unit_symbol_;
    // Per-symbol cell means, filled when the channel has no randomness.
    std::vector<std::vector<double>> cached_means_;
};

/// Sparse (input, output) count table. Ordered, so sums over it do not
/// depend on how partial tables were merged.
struct JointCounts {
    std::size_t n_inputs = 0;
    std::size_t n_outputs = 0;
    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> cells;

    void add(std::size_t x, std::size_t y, std::uint64_t count = 1);
    std::uint64_t at(std::size_t x, std::size_t y) const;
    std::uint64_t total() const;
    void merge(const JointCounts& other);
};

struct LinkReport {
    Scheme scheme{};
    int m = 0;
    int alphabet = 0;
    double mean_photons = 0.0;
    std::uint64_t n_trials = 0;
    std::uint64_t seed = 0;

    double correct_rate = 0.0;
    double symbol_error_rate = 0.0;
    double erasure_rate = 0.0;
    double invalid_rate = 0.0;
    double se_correct = 0.0;
    double se_symbol_error = 0.0;
    double se_erasure = 0.0;
    double se_invalid = 0.0;

    double mi_bits = 0.0;
    double pie_bits_per_photon = 0.0;
    double par = 0.0;
    std::int64_t frame_len = 0;

    /// Output letters: y < alphabet is a decoded symbol, y = alphabet is an
    /// erasure, y = alphabet + 1 is invalid.
    JointCounts joint;
};

/// Monte Carlo link simulation with uniform inputs. Trials are distributed
/// over `threads` workers (0 = hardware concurrency); the report depends only
/// on (cfg, n_trials, master_seed).
LinkReport run_trials(const SchemeConfig& cfg, std::uint64_t n_trials, std::uint64_t master_seed,
                      unsigned threads = 0);

/// Plug-in mutual information in bits of a joint count table.
double plugin_mutual_information(const JointCounts& joint);

/// (1 - exp(-N_s)) * log2(M): ideal direct-detection PPM erasure channel.
double analytic_ppm_mi(int ppm_order, double mean_photons);

struct ParRow {
    Scheme scheme{};
    int m = 0;
    int alphabet = 0;
    std::int64_t frame_len = 0;
    double par = 0.0;
};

/// PAR of each scheme's transmitted symbol, over its own frame or over
/// `common_frame` bins when given.
std::vector<ParRow> compare_par(const std::vector<SchemeConfig>& cfgs, std::optional<std::int64_t> common_frame = {});

/// %.17g
std::string format_double(double x);

void write_report_csv_header(std::ostream& os);
void write_report_csv_row(std::ostream& os, const LinkReport& r);
nlohmann::ordered_json to_json(const LinkReport& r);

/// Schema checks for emitted report files; throw std::invalid_argument.
void validate_report_csv(const std::string& text);
void validate_report_json(const nlohmann::json& j);

} // namespace srx
