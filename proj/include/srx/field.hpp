#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace srx {

using Amplitude = std::complex<double>;

enum class Pol : int { H = 0, V = 1 };

inline Pol orthogonal(Pol p) { return p == Pol::H ? Pol::V : Pol::H; }
const char* to_string(Pol p);
Pol parse_pol(const std::string& s);

/// (H, V) amplitude pair of one time bin.
struct Jones {
    Amplitude h{};
    Amplitude v{};

    Amplitude& operator[](Pol p) { return p == Pol::H ? h : v; }
    const Amplitude& operator[](Pol p) const { return p == Pol::H ? h : v; }

    double power() const { return std::norm(h) + std::norm(v); }
    bool is_zero() const { return h == Amplitude{} && v == Amplitude{}; }
};

class NonUnitaryTransform : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Time-binned dual-polarization coherent field. Bin spacing is one unit;
/// amplitudes are in sqrt(photons). Storage is dense over
/// [start_bin, start_bin + size()), trimmed so that the first and last
/// stored bins are nonzero. The empty state has no bins and start_bin 0.
class FieldState {
public:
    FieldState() = default;
    FieldState(std::int64_t start_bin, std::vector<Jones> bins);

    static FieldState pulse(std::int64_t bin, Pol pol, Amplitude amp);

    std::int64_t start_bin() const { return start_; }
    std::int64_t end_bin() const { return start_ + static_cast<std::int64_t>(bins_.size()); }
    std::size_t size() const { return bins_.size(); }
    bool empty() const { return bins_.empty(); }

    std::span<const Jones> bins() const { return bins_; }

    /// Amplitudes at absolute bin t; zero outside the stored window.
    Jones at(std::int64_t t) const;
    double power_at(std::int64_t t) const { return at(t).power(); }

    FieldState& operator+=(const FieldState& other);
    FieldState& operator*=(Amplitude scale);

private:
    void normalize_window();

    std::int64_t start_ = 0;
    std::vector<Jones> bins_;
};

FieldState operator+(FieldState a, const FieldState& b);
FieldState operator*(Amplitude scale, FieldState x);

/// 2x2 unitary acting on (H, V) column vectors, row-major.
class PolTransform {
public:
    using Matrix = std::array<std::array<Amplitude, 2>, 2>;

    static constexpr double unitarity_tolerance = 1e-12;

    explicit PolTransform(const Matrix& u);

    static PolTransform identity();
    /// Waveplate stage R = (1/sqrt 2)[[1, -1], [1, 1]]: maps the +45 diagonal
    /// to V and the -45 diagonal to H.
    static PolTransform waveplate();

    const Matrix& matrix() const { return u_; }
    PolTransform adjoint() const;
    Jones apply(const Jones& in) const;

private:
    Matrix u_;
};

enum class SwitchAction { identity, swap };

/// Per-bin polarization switch pattern. Bins not listed are IDENTITY.
class SwitchSchedule {
public:
    SwitchSchedule() = default;
    explicit SwitchSchedule(std::vector<std::int64_t> swap_bins);

    void set(std::int64_t bin, SwitchAction action);
    SwitchAction at(std::int64_t bin) const;

    /// Sorted, unique.
    const std::vector<std::int64_t>& swap_bins() const { return swaps_; }
    bool empty() const { return swaps_.empty(); }

    SwitchSchedule shifted(std::int64_t delta) const;

    bool operator==(const SwitchSchedule&) const = default;

private:
    std::vector<std::int64_t> swaps_;
};

FieldState apply_uniform(const FieldState& state, const PolTransform& t);
FieldState apply_schedule(const FieldState& state, const SwitchSchedule& s);

/// Delays the H component by delay_bins (>= 1) with phase factor exp(i*phase).
FieldState apply_pol_delay(const FieldState& state, int delay_bins, double phase);
/// Inverse of apply_pol_delay: moves H earlier by advance_bins with phase factor exp(i*phase).
FieldState apply_pol_advance(const FieldState& state, int advance_bins, double phase);

double total_energy(const FieldState& state);
FieldState shift(const FieldState& state, std::int64_t delta);
/// Sum over bins of conj(a) * b, both polarizations.
Amplitude overlap(const FieldState& a, const FieldState& b);

nlohmann::ordered_json to_json(const FieldState& state);
FieldState field_from_json(const nlohmann::json& j);

} // namespace srx
