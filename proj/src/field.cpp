#include "srx/field.hpp"

#include <algorithm>
#include <cmath>

namespace srx {

const char* to_string(Pol p) { return p == Pol::H ? "H" : "V"; }

Pol parse_pol(const std::string& s)
{
    if (s == "H") return Pol::H;
    if (s == "V") return Pol::V;
    throw std::invalid_argument("polarization must be H or V, got '" + s + "'");
}

//
// FieldState
//

FieldState::FieldState(std::int64_t start_bin, std::vector<Jones> bins)
    : start_(start_bin), bins_(std::move(bins))
{
    for (const auto& b : bins_) {
        if (!std::isfinite(b.h.real()) || !std::isfinite(b.h.imag()) ||
            !std::isfinite(b.v.real()) || !std::isfinite(b.v.imag()))
            throw std::invalid_argument("FieldState: non-finite amplitude");
    }
    normalize_window();
}

FieldState FieldState::pulse(std::int64_t bin, Pol pol, Amplitude amp)
{
    Jones j;
    j[pol] = amp;
    return FieldState(bin, {j});
}

Jones FieldState::at(std::int64_t t) const
{
    if (t < start_ || t >= end_bin()) return {};
    return bins_[static_cast<std::size_t>(t - start_)];
}

void FieldState::normalize_window()
{
    auto first = std::find_if(bins_.begin(), bins_.end(), [](const Jones& j) { return !j.is_zero(); });
    if (first == bins_.end()) {
        bins_.clear();
        start_ = 0;
        return;
    }
    auto last = std::find_if(bins_.rbegin(), bins_.rend(), [](const Jones& j) { return !j.is_zero(); }).base();
    start_ += first - bins_.begin();
    bins_.erase(last, bins_.end());
    bins_.erase(bins_.begin(), first);
}

FieldState& FieldState::operator+=(const FieldState& other)
{
    if (other.empty()) return *this;
    if (empty()) {
        *this = other;
        return *this;
    }
    const auto lo = std::min(start_, other.start_);
    const auto hi = std::max(end_bin(), other.end_bin());
    std::vector<Jones> out(static_cast<std::size_t>(hi - lo));
    for (std::int64_t t = lo; t < hi; ++t) {
        const auto a = at(t);
        const auto b = other.at(t);
        out[static_cast<std::size_t>(t - lo)] = {a.h + b.h, a.v + b.v};
    }
    *this = FieldState(lo, std::move(out));
    return *this;
}

FieldState& FieldState::operator*=(Amplitude scale)
{
    for (auto& b : bins_) {
        b.h *= scale;
        b.v *= scale;
    }
    normalize_window();
    return *this;
}

FieldState operator+(FieldState a, const FieldState& b) { return a += b; }

FieldState operator*(Amplitude scale, FieldState x) { return x *= scale; }

//
// PolTransform
//

PolTransform::PolTransform(const Matrix& u) : u_(u)
{
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            Amplitude s = std::conj(u_[0][r]) * u_[0][c] + std::conj(u_[1][r]) * u_[1][c];
            const Amplitude expect = r == c ? 1.0 : 0.0;
            if (std::abs(s.real() - expect.real()) > unitarity_tolerance ||
                std::abs(s.imag() - expect.imag()) > unitarity_tolerance)
                throw NonUnitaryTransform("PolTransform: matrix is not unitary");
        }
    }
}

PolTransform PolTransform::identity() { return PolTransform({{{1.0, 0.0}, {0.0, 1.0}}}); }

PolTransform PolTransform::waveplate()
{
    const double s = 1.0 / std::sqrt(2.0);
    return PolTransform({{{s, -s}, {s, s}}});
}

PolTransform PolTransform::adjoint() const
{
    return PolTransform({{{std::conj(u_[0][0]), std::conj(u_[1][0])},
                          {std::conj(u_[0][1]), std::conj(u_[1][1])}}});
}

Jones PolTransform::apply(const Jones& in) const
{
    return {u_[0][0] * in.h + u_[0][1] * in.v, u_[1][0] * in.h + u_[1][1] * in.v};
}

//
// SwitchSchedule
//

SwitchSchedule::SwitchSchedule(std::vector<std::int64_t> swap_bins) : swaps_(std::move(swap_bins))
{
    std::sort(swaps_.begin(), swaps_.end());
    swaps_.erase(std::unique(swaps_.begin(), swaps_.end()), swaps_.end());
}

void SwitchSchedule::set(std::int64_t bin, SwitchAction action)
{
    auto it = std::lower_bound(swaps_.begin(), swaps_.end(), bin);
    const bool present = it != swaps_.end() && *it == bin;
    if (action == SwitchAction::swap && !present)
        swaps_.insert(it, bin);
    else if (action == SwitchAction::identity && present)
        swaps_.erase(it);
}

SwitchAction SwitchSchedule::at(std::int64_t bin) const
{
    return std::binary_search(swaps_.begin(), swaps_.end(), bin) ? SwitchAction::swap
                                                                  : SwitchAction::identity;
}

SwitchSchedule SwitchSchedule::shifted(std::int64_t delta) const
{
    SwitchSchedule out;
    out.swaps_.reserve(swaps_.size());
    for (auto b : swaps_) out.swaps_.push_back(b + delta);
    return out;
}

//
// Elements
//

FieldState apply_uniform(const FieldState& state, const PolTransform& t)
{
    std::vector<Jones> out(state.bins().begin(), state.bins().end());
    for (auto& b : out) b = t.apply(b);
    return FieldState(state.start_bin(), std::move(out));
}

FieldState apply_schedule(const FieldState& state, const SwitchSchedule& s)
{
    if (state.empty()) return state;
    std::vector<Jones> out(state.bins().begin(), state.bins().end());
    const auto& swaps = s.swap_bins();
    auto it = std::lower_bound(swaps.begin(), swaps.end(), state.start_bin());
    for (; it != swaps.end() && *it < state.end_bin(); ++it) {
        auto& b = out[static_cast<std::size_t>(*it - state.start_bin())];
        std::swap(b.h, b.v);
    }
    return FieldState(state.start_bin(), std::move(out));
}

namespace {

// Moves the H component by `offset` bins (either sign), multiplying by exp(i*phase).
FieldState move_h(const FieldState& state, std::int64_t offset, double phase)
{
    if (state.empty()) return state;
    const Amplitude factor = std::polar(1.0, phase);
    const auto lo = std::min(state.start_bin(), state.start_bin() + offset);
    const auto hi = std::max(state.end_bin(), state.end_bin() + offset);
    std::vector<Jones> out(static_cast<std::size_t>(hi - lo));
    for (std::int64_t t = state.start_bin(); t < state.end_bin(); ++t) {
        const auto& in = state.bins()[static_cast<std::size_t>(t - state.start_bin())];
        out[static_cast<std::size_t>(t - lo)].v = in.v;
        out[static_cast<std::size_t>(t + offset - lo)].h = in.h * factor;
    }
    return FieldState(lo, std::move(out));
}

} // namespace

FieldState apply_pol_delay(const FieldState& state, int delay_bins, double phase)
{
    if (delay_bins < 1) throw std::invalid_argument("apply_pol_delay: delay must be >= 1 bin");
    return move_h(state, delay_bins, phase);
}

FieldState apply_pol_advance(const FieldState& state, int advance_bins, double phase)
{
    if (advance_bins < 1) throw std::invalid_argument("apply_pol_advance: advance must be >= 1 bin");
    return move_h(state, -static_cast<std::int64_t>(advance_bins), phase);
}

double total_energy(const FieldState& state)
{
    double e = 0.0;
    for (const auto& b : state.bins()) e += b.power();
    return e;
}

FieldState shift(const FieldState& state, std::int64_t delta)
{
    if (state.empty()) return state;
    return FieldState(state.start_bin() + delta, {state.bins().begin(), state.bins().end()});
}

Amplitude overlap(const FieldState& a, const FieldState& b)
{
    Amplitude s{};
    for (std::int64_t t = std::max(a.start_bin(), b.start_bin()); t < std::min(a.end_bin(), b.end_bin()); ++t) {
        const auto x = a.at(t);
        const auto y = b.at(t);
        s += std::conj(x.h) * y.h + std::conj(x.v) * y.v;
    }
    return s;
}

nlohmann::ordered_json to_json(const FieldState& state)
{
    nlohmann::ordered_json j;
    j["start_bin"] = state.start_bin();
    auto bins = nlohmann::ordered_json::array();
    for (std::int64_t t = state.start_bin(); t < state.end_bin(); ++t) {
        const auto b = state.at(t);
        if (b.is_zero()) continue;
        bins.push_back({{"t", t},
                        {"h", {b.h.real(), b.h.imag()}},
                        {"v", {b.v.real(), b.v.imag()}}});
    }
    j["bins"] = std::move(bins);
    return j;
}

FieldState field_from_json(const nlohmann::json& j)
{
    const auto& bins = j.at("bins");
    if (bins.empty()) return {};
    std::int64_t lo = bins.front().at("t").get<std::int64_t>();
    std::int64_t hi = lo;
    for (const auto& b : bins) {
        const auto t = b.at("t").get<std::int64_t>();
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    std::vector<Jones> out(static_cast<std::size_t>(hi - lo + 1));
    for (const auto& b : bins) {
        auto& dst = out[static_cast<std::size_t>(b.at("t").get<std::int64_t>() - lo)];
        const auto& h = b.at("h");
        const auto& v = b.at("v");
        dst.h = {h.at(0).get<double>(), h.at(1).get<double>()};
        dst.v = {v.at(0).get<double>(), v.at(1).get<double>()};
    }
    return FieldState(lo, std::move(out));
}

} // namespace srx
