#include "srx/active_receiver.hpp"

#include <algorithm>
#include <thread>

namespace srx {

FieldState apply_active_module(const FieldState& state, const ActiveModuleSpec& spec)
{
    auto s = apply_schedule(state, spec.schedule);
    s = apply_pol_delay(s, spec.delay, spec.phase_error_first);
    s = apply_uniform(s, spec.wave_transform);
    return apply_pol_delay(s, spec.delay, spec.phase_error_second);
}

namespace {

// Contiguous run of bins occupied by every codeword sharing a prefix of
// already-consumed bits. The polarization is uniform across the run.
struct Region {
    std::int64_t start;
    std::int64_t length;
    Pol pol;
};

void check_disjoint(std::vector<Region> regions)
{
    std::sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) { return a.start < b.start; });
    for (std::size_t i = 1; i < regions.size(); ++i) {
        if (regions[i].start < regions[i - 1].start + regions[i - 1].length)
            throw RegionOverlap("schedule synthesis: regions at bins " + std::to_string(regions[i - 1].start) +
                                " and " + std::to_string(regions[i].start) + " intersect");
    }
}

} // namespace

ActiveChain synthesize_schedules(int m)
{
    if (m < 1 || m > max_codeword_order)
        throw std::invalid_argument("synthesize_schedules: m must be in [1, 16], got " + std::to_string(m));

    ActiveChain chain;
    chain.m = m;
    // Index into `regions` is the prefix value: bits consumed so far, most
    // significant first.
    std::vector<Region> regions{{0, std::int64_t{1} << m, Pol::V}};

    for (int k = m - 1; k >= 0; --k) {
        const std::int64_t delay = std::int64_t{1} << k;
        std::vector<std::int64_t> swaps;
        std::vector<Region> next;
        next.reserve(regions.size() * 2);
        for (const auto& r : regions) {
            // Earlier half must be H, later half V.
            if (r.pol != Pol::H)
                for (std::int64_t t = r.start; t < r.start + delay; ++t) swaps.push_back(t);
            if (r.pol != Pol::V)
                for (std::int64_t t = r.start + delay; t < r.start + 2 * delay; ++t) swaps.push_back(t);
            // After delay + waveplate: equal signs give V (bit 0), stays put;
            // opposite signs give H (bit 1), delayed once more.
            next.push_back({r.start + delay, delay, Pol::V});
            next.push_back({r.start + 2 * delay, delay, Pol::H});
        }
        check_disjoint(next);
        regions = std::move(next);

        ActiveModuleSpec spec;
        spec.delay = static_cast<int>(delay);
        spec.schedule = SwitchSchedule(std::move(swaps));
        chain.modules.push_back(std::move(spec));
    }

    chain.position_offset = regions.front().start;
    chain.output_pols.reserve(regions.size());
    for (std::size_t bits = 0; bits < regions.size(); ++bits) {
        if (regions[bits].start != chain.position_offset + static_cast<std::int64_t>(bits))
            throw RegionOverlap("schedule synthesis: final positions are not offset + bits");
        chain.output_pols.push_back(regions[bits].pol);
    }
    return chain;
}

void set_phase_errors(ActiveChain& chain, const std::vector<double>& errors)
{
    if (errors.size() != 2 * chain.modules.size())
        throw std::invalid_argument("active chain needs " + std::to_string(2 * chain.modules.size()) +
                                    " delay phase errors, got " + std::to_string(errors.size()));
    for (std::size_t i = 0; i < chain.modules.size(); ++i) {
        chain.modules[i].phase_error_first = errors[2 * i];
        chain.modules[i].phase_error_second = errors[2 * i + 1];
    }
}

FieldState propagate_active(const FieldState& input, const ActiveChain& chain)
{
    FieldState s = input;
    for (const auto& mod : chain.modules) s = apply_active_module(s, mod);
    return s;
}

FieldState propagate_active(const Codeword& c, Amplitude alpha, const ActiveChain& chain)
{
    if (c.m() != chain.m)
        throw std::invalid_argument("propagate_active: codeword m=" + std::to_string(c.m()) +
                                    " does not match chain m=" + std::to_string(chain.m));
    return propagate_active(encode_bpsk(c, alpha), chain);
}

ConcentrationReport measure_concentration(const ActiveChain& chain, unsigned threads)
{
    const std::size_t n = std::size_t{1} << chain.m;
    std::vector<double> leakage(n);
    std::vector<std::int64_t> positions(n);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t bits = begin; bits < end; ++bits) {
            const auto out = propagate_active(Codeword(chain.m, static_cast<std::uint32_t>(bits)), 1.0, chain);
            const double total = total_energy(out);
            const double in_bin = out.power_at(chain.position_offset + static_cast<std::int64_t>(bits));
            leakage[bits] = total > 0.0 ? 1.0 - in_bin / total : 1.0;
            std::int64_t best = out.start_bin();
            for (auto t = out.start_bin(); t < out.end_bin(); ++t)
                if (out.power_at(t) > out.power_at(best)) best = t;
            positions[bits] = best;
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned i = 0; i < threads; ++i) {
            const auto b = std::min(n, i * chunk);
            const auto e = std::min(n, b + chunk);
            pool.emplace_back(work, b, e);
        }
    }

    ConcentrationReport report;
    report.max_leakage = *std::max_element(leakage.begin(), leakage.end());
    report.affine = true;
    for (std::size_t bits = 0; bits < n; ++bits)
        if (positions[bits] != positions[0] + static_cast<std::int64_t>(bits)) report.affine = false;
    auto sorted = positions;
    std::sort(sorted.begin(), sorted.end());
    report.injective = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    report.positions = std::move(positions);
    return report;
}

ConcentrationReport verify_concentration(const ActiveChain& chain, double tolerance, unsigned threads)
{
    auto report = measure_concentration(chain, threads);
    if (report.max_leakage > tolerance)
        throw ConcentrationFailure("m=" + std::to_string(chain.m) + ": max leakage " +
                                   std::to_string(report.max_leakage) + " exceeds tolerance");
    if (!report.injective || !report.affine || report.positions[0] != chain.position_offset)
        throw ConcentrationFailure("m=" + std::to_string(chain.m) + ": position map is not offset + bits");
    return report;
}

nlohmann::ordered_json to_json(const ActiveChain& chain)
{
    nlohmann::ordered_json j;
    j["m"] = chain.m;
    j["position_offset"] = chain.position_offset;
    auto mods = nlohmann::ordered_json::array();
    for (const auto& mod : chain.modules) {
        nlohmann::ordered_json mj;
        mj["delay_T"] = mod.delay;
        mj["swap_bins"] = mod.schedule.swap_bins();
        mods.push_back(std::move(mj));
    }
    j["modules"] = std::move(mods);
    return j;
}

} // namespace srx
