#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "srx/field.hpp"
#include "srx/rng.hpp"

namespace srx {

struct ChannelParams {
    double transmissivity = 1.0;    // power transmissivity in [0, 1]
    double phase_noise_sigma = 0.0; // radians, i.i.d. per bin
    double visibility = 1.0;        // interference contrast in [0, 1]
    double dark_mean = 0.0;         // mean dark counts per bin per detector
    std::vector<double> delay_phase_errors; // forwarded to the receiver chain

    void validate() const;
};

/// Mode A: one detector summing both polarizations. Mode B: a
/// polarization-resolving detector pair.
enum class DetectorMode { summed, resolved };

/// Gate of detected bins [start_bin, start_bin + n_bins).
struct DetectionWindow {
    std::int64_t start_bin = 0;
    std::int64_t n_bins = 0;
    DetectorMode mode = DetectorMode::summed;

    std::size_t cells_per_bin() const { return mode == DetectorMode::resolved ? 2 : 1; }
    std::size_t n_cells() const { return static_cast<std::size_t>(n_bins) * cells_per_bin(); }
    std::size_t cell_index(std::int64_t bin, Pol pol = Pol::H) const;
    std::int64_t cell_bin(std::size_t cell) const;
    /// Polarization of a cell in resolved mode; meaningless when summed.
    Pol cell_pol(std::size_t cell) const;
    bool contains(std::int64_t bin) const { return bin >= start_bin && bin < start_bin + n_bins; }
};

struct DetectionRecord {
    DetectionWindow window;
    std::vector<std::uint32_t> counts; // one entry per window cell

    std::uint64_t total() const;
    std::uint32_t count(std::int64_t bin, Pol pol = Pol::H) const;
};

/// Scales amplitudes by sqrt(eta) and applies a Gaussian phase per bin,
/// shared by both polarizations. No random draws when sigma is zero.
FieldState apply_channel(const FieldState& state, const ChannelParams& params, RngStream& rng);

/// Mean count per window cell before dark counts: v * mu + (1 - v) * mu_leak,
/// where mu_leak spreads the in-window energy uniformly over all cells.
std::vector<double> signal_means(const FieldState& state, const DetectionWindow& window, double visibility);

/// Poisson photocounts on every window cell. Energy outside the window is
/// not detected.
DetectionRecord detect(const FieldState& state, const DetectionWindow& window, const ChannelParams& params,
                       RngStream& rng);
/// Same, from precomputed signal_means.
DetectionRecord detect_means(const std::vector<double>& means, const DetectionWindow& window, double dark_mean,
                             RngStream& rng);

/// Window cell -> symbol index, or -1 for cells that carry no symbol.
struct PositionMap {
    DetectionWindow window;
    std::vector<int> symbol_of_cell;

    /// Throws if two cells map to the same symbol.
    void check_injective() const;
};

struct DecodeOutcome {
    enum class Kind { symbol, erasure, invalid };
    Kind kind = Kind::erasure;
    int symbol = -1;

    static DecodeOutcome erasure() { return {Kind::erasure, -1}; }
    static DecodeOutcome invalid() { return {Kind::invalid, -1}; }
    static DecodeOutcome of(int s) { return {Kind::symbol, s}; }
    bool operator==(const DecodeOutcome&) const = default;
};

/// Erasure when nothing fired; otherwise the brightest cell, ties broken
/// uniformly from rng.
DecodeOutcome decode(const DetectionRecord& record, const PositionMap& map, RngStream& rng);

/// Debug dump, columns trial,bin,pol,count. Summed-mode rows use pol "HV".
void write_detection_csv(std::ostream& os, std::uint64_t trial, const DetectionRecord& record,
                         bool header = false);

} // namespace srx
