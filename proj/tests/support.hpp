#pragma once

#include <cmath>
#include <random>

#include "srx/field.hpp"

namespace srx::testing {

inline FieldState random_state(std::mt19937_64& gen, int max_bins = 12, std::int64_t max_start = 5)
{
    std::uniform_int_distribution<int> len(1, max_bins);
    std::uniform_int_distribution<std::int64_t> start(-max_start, max_start);
    std::normal_distribution<double> amp(0.0, 1.0);
    std::vector<Jones> bins(static_cast<std::size_t>(len(gen)));
    for (auto& b : bins) b = {{amp(gen), amp(gen)}, {amp(gen), amp(gen)}};
    return FieldState(start(gen), std::move(bins));
}

inline Amplitude random_scalar(std::mt19937_64& gen)
{
    std::normal_distribution<double> amp(0.0, 1.0);
    return {amp(gen), amp(gen)};
}

/// Largest amplitude difference over the union of both windows.
inline double max_abs_diff(const FieldState& a, const FieldState& b)
{
    const auto lo = std::min(a.start_bin(), b.start_bin());
    const auto hi = std::max(a.end_bin(), b.end_bin());
    double d = 0.0;
    for (auto t = lo; t < hi; ++t) {
        d = std::max(d, std::abs(a.at(t).h - b.at(t).h));
        d = std::max(d, std::abs(a.at(t).v - b.at(t).v));
    }
    return d;
}

} // namespace srx::testing
