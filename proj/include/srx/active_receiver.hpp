#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "srx/field.hpp"
#include "srx/hadamard.hpp"

namespace srx {

class RegionOverlap : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ConcentrationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One active module: polarization switch, H delay, waveplate, H delay.
struct ActiveModuleSpec {
    int delay = 1;
    SwitchSchedule schedule;
    PolTransform wave_transform = PolTransform::waveplate();
    double phase_error_first = 0.0;
    double phase_error_second = 0.0;
};

struct ActiveChain {
    int m = 0;
    std::vector<ActiveModuleSpec> modules;
    /// Output bin of codeword bits = position_offset + bits.
    std::int64_t position_offset = 0;
    /// Output polarization per codeword, as tracked by the synthesis.
    std::vector<Pol> output_pols;
};

FieldState apply_active_module(const FieldState& state, const ActiveModuleSpec& spec);

/// Builds the m-module chain with delays 2^{m-1}, ..., 1. Schedules depend on
/// m only; each live region is switched so that its earlier half is H (the
/// delayed arm) and its later half is V.
ActiveChain synthesize_schedules(int m);

/// Sets per-delay-line phase errors, ordered (module 0 first, module 0
/// second, module 1 first, ...). Size must be 2*m.
void set_phase_errors(ActiveChain& chain, const std::vector<double>& errors);

FieldState propagate_active(const FieldState& input, const ActiveChain& chain);
FieldState propagate_active(const Codeword& c, Amplitude alpha, const ActiveChain& chain);

struct ConcentrationReport {
    double max_leakage = 0.0;
    /// Brightest output bin per codeword, indexed by bits.
    std::vector<std::int64_t> positions;
    bool injective = false;
    bool affine = false;
};

/// Propagates every codeword at alpha = 1 and measures the energy fraction
/// outside position_offset + bits. Codewords are fanned out over `threads`
/// workers (0 = hardware concurrency).
ConcentrationReport measure_concentration(const ActiveChain& chain, unsigned threads = 0);

/// measure_concentration, throwing ConcentrationFailure when leakage exceeds
/// tolerance or the position map is not bits -> offset + bits.
ConcentrationReport verify_concentration(const ActiveChain& chain, double tolerance, unsigned threads = 0);

nlohmann::ordered_json to_json(const ActiveChain& chain);

} // namespace srx
