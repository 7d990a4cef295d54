#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "srx/field.hpp"

namespace srx {

struct PassiveModuleSpec {
    int delay = 1;
    PolTransform wave_transform = PolTransform::waveplate();
    double phase_error = 0.0;
};

/// m delay-then-waveplate modules with delays 2^{m-1}, ..., 1.
struct PassiveChain {
    int m = 0;
    std::vector<PassiveModuleSpec> modules;

    /// Sum of delays: output bin of a pattern starting at bin 0.
    std::int64_t latency() const { return (std::int64_t{1} << m) - 1; }
};

PassiveChain build_passive_chain(int m);
/// One phase error per module, in chain order.
void set_phase_errors(PassiveChain& chain, const std::vector<double>& errors);

FieldState propagate_passive(const FieldState& state, const PassiveChain& chain);

struct PatternSymbol {
    FieldState pattern;
    std::int64_t arrival_offset = 0;
    Pol output_pol = Pol::H;
    std::int64_t predicted_output_bin = 0;
};

/// Reverse-propagates a single output pulse of energy |alpha_total|^2 through
/// the ideal chain. The pattern occupies bins [0, 2^m).
PatternSymbol derive_pattern(int m, Pol output_pol, Amplitude alpha_total);

struct FrameConfig {
    int ppm_order = 16;
    int guard_bins = 16;
    bool polarization_doubling = false;

    int frame_length() const { return ppm_order + guard_bins; }
    /// Fraction of the frame during which the transmitter may emit.
    double power_usage_factor() const { return static_cast<double>(ppm_order) / frame_length(); }
};

/// guard_bins = max(M, 2^m).
FrameConfig default_frame(int m, int ppm_order);
void validate_frame(const FrameConfig& frame, int m);

/// Symbols 0..M-1 are the base pattern shifted by k; with doubling, symbols
/// M..2M-1 are the orthogonal-output pattern shifted by k - M.
std::vector<PatternSymbol> build_symbol_alphabet(int m, const FrameConfig& frame, Amplitude alpha_total,
                                                 Pol base_pol = Pol::H);

/// Peak per-bin power over mean power in a frame of frame_len bins.
double peak_to_average(const FieldState& field, std::int64_t frame_len);

nlohmann::ordered_json pattern_to_json(const PatternSymbol& symbol, int m);
/// Checks the pattern export schema and rebuilds the symbol (arrival offset 0).
PatternSymbol pattern_from_json(const nlohmann::json& j);

} // namespace srx
