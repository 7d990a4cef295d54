#include "srx/channel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace srx {

void ChannelParams::validate() const
{
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_unit(transmissivity)) throw std::invalid_argument("channel: transmissivity must be in [0, 1]");
    if (!(phase_noise_sigma >= 0.0) || !std::isfinite(phase_noise_sigma))
        throw std::invalid_argument("channel: phase_noise_sigma must be finite and >= 0");
    if (!in_unit(visibility)) throw std::invalid_argument("channel: visibility must be in [0, 1]");
    if (!(dark_mean >= 0.0) || !std::isfinite(dark_mean))
        throw std::invalid_argument("channel: dark_mean must be finite and >= 0");
    for (double e : delay_phase_errors)
        if (!std::isfinite(e)) throw std::invalid_argument("channel: delay phase errors must be finite");
}

std::size_t DetectionWindow::cell_index(std::int64_t bin, Pol pol) const
{
    const auto rel = static_cast<std::size_t>(bin - start_bin);
    return mode == DetectorMode::resolved ? 2 * rel + static_cast<std::size_t>(pol) : rel;
}

std::int64_t DetectionWindow::cell_bin(std::size_t cell) const
{
    return start_bin + static_cast<std::int64_t>(cell / cells_per_bin());
}

Pol DetectionWindow::cell_pol(std::size_t cell) const
{
    return mode == DetectorMode::resolved ? static_cast<Pol>(cell % 2) : Pol::H;
}

std::uint64_t DetectionRecord::total() const
{
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
}

std::uint32_t DetectionRecord::count(std::int64_t bin, Pol pol) const
{
    if (!window.contains(bin)) return 0;
    return counts[window.cell_index(bin, pol)];
}

FieldState apply_channel(const FieldState& state, const ChannelParams& params, RngStream& rng)
{
    const double scale = std::sqrt(params.transmissivity);
    std::vector<Jones> out(state.bins().begin(), state.bins().end());
    if (params.phase_noise_sigma > 0.0) {
        std::normal_distribution<double> phase(0.0, params.phase_noise_sigma);
        for (auto& b : out) {
            const auto f = std::polar(scale, phase(rng));
            b.h *= f;
            b.v *= f;
        }
    } else {
        for (auto& b : out) {
            b.h *= scale;
            b.v *= scale;
        }
    }
    return FieldState(state.start_bin(), std::move(out));
}

std::vector<double> signal_means(const FieldState& state, const DetectionWindow& window, double visibility)
{
    std::vector<double> mu(window.n_cells(), 0.0);
    double in_window = 0.0;
    const auto lo = std::max(state.start_bin(), window.start_bin);
    const auto hi = std::min(state.end_bin(), window.start_bin + window.n_bins);
    for (auto t = lo; t < hi; ++t) {
        const auto b = state.at(t);
        if (window.mode == DetectorMode::resolved) {
            mu[window.cell_index(t, Pol::H)] = std::norm(b.h);
            mu[window.cell_index(t, Pol::V)] = std::norm(b.v);
        } else {
            mu[window.cell_index(t)] = b.power();
        }
        in_window += b.power();
    }
    if (visibility < 1.0 && !mu.empty()) {
        const double leak = in_window / static_cast<double>(mu.size());
        for (auto& x : mu) x = visibility * x + (1.0 - visibility) * leak;
    }
    return mu;
}

DetectionRecord detect_means(const std::vector<double>& means, const DetectionWindow& window, double dark_mean,
                             RngStream& rng)
{
    if (means.size() != window.n_cells()) throw std::invalid_argument("detect: means do not match window");
    DetectionRecord rec{window, std::vector<std::uint32_t>(means.size(), 0)};
    for (std::size_t i = 0; i < means.size(); ++i) {
        const double mean = means[i] + dark_mean;
        if (mean <= 0.0) continue;
        std::poisson_distribution<std::uint32_t> counts(mean);
        rec.counts[i] = counts(rng);
    }
    return rec;
}

DetectionRecord detect(const FieldState& state, const DetectionWindow& window, const ChannelParams& params,
                       RngStream& rng)
{
    return detect_means(signal_means(state, window, params.visibility), window, params.dark_mean, rng);
}

void PositionMap::check_injective() const
{
    if (symbol_of_cell.size() != window.n_cells())
        throw std::invalid_argument("position map: size does not match detection window");
    std::vector<int> seen;
    for (int s : symbol_of_cell)
        if (s >= 0) seen.push_back(s);
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw std::invalid_argument("position map: two cells map to the same symbol");
}

DecodeOutcome decode(const DetectionRecord& record, const PositionMap& map, RngStream& rng)
{
    std::uint32_t best = 0;
    std::size_t n_best = 0;
    std::size_t pick = 0;
    for (std::size_t i = 0; i < record.counts.size(); ++i) {
        const auto c = record.counts[i];
        if (c == 0 || c < best) continue;
        if (c > best) {
            best = c;
            n_best = 0;
        }
        // Reservoir sampling over the running set of maxima.
        ++n_best;
        if (n_best == 1 || std::uniform_int_distribution<std::size_t>(0, n_best - 1)(rng) == 0) pick = i;
    }
    if (best == 0) return DecodeOutcome::erasure();
    const int s = map.symbol_of_cell.at(pick);
    return s >= 0 ? DecodeOutcome::of(s) : DecodeOutcome::invalid();
}

void write_detection_csv(std::ostream& os, std::uint64_t trial, const DetectionRecord& record, bool header)
{
    if (header) os << "trial,bin,pol,count\n";
    const auto& w = record.window;
    for (std::size_t i = 0; i < record.counts.size(); ++i) {
        const char* pol = w.mode == DetectorMode::resolved ? to_string(w.cell_pol(i)) : "HV";
        os << trial << ',' << w.cell_bin(i) << ',' << pol << ',' << record.counts[i] << '\n';
    }
}

} // namespace srx
