#include "srx/passive_receiver.hpp"

#include <algorithm>
#include <string>

#include "srx/hadamard.hpp"

namespace srx {

PassiveChain build_passive_chain(int m)
{
    if (m < 1 || m > max_codeword_order)
        throw std::invalid_argument("build_passive_chain: m must be in [1, 16], got " + std::to_string(m));
    PassiveChain chain;
    chain.m = m;
    for (int k = m - 1; k >= 0; --k) {
        PassiveModuleSpec spec;
        spec.delay = 1 << k;
        chain.modules.push_back(spec);
    }
    return chain;
}

void set_phase_errors(PassiveChain& chain, const std::vector<double>& errors)
{
    if (errors.size() != chain.modules.size())
        throw std::invalid_argument("passive chain needs " + std::to_string(chain.modules.size()) +
                                    " delay phase errors, got " + std::to_string(errors.size()));
    for (std::size_t i = 0; i < errors.size(); ++i) chain.modules[i].phase_error = errors[i];
}

FieldState propagate_passive(const FieldState& state, const PassiveChain& chain)
{
    FieldState s = state;
    for (const auto& mod : chain.modules) {
        s = apply_pol_delay(s, mod.delay, mod.phase_error);
        s = apply_uniform(s, mod.wave_transform);
    }
    return s;
}

PatternSymbol derive_pattern(int m, Pol output_pol, Amplitude alpha_total)
{
    const auto chain = build_passive_chain(m);
    PatternSymbol sym;
    sym.output_pol = output_pol;
    sym.predicted_output_bin = chain.latency();

    FieldState s = FieldState::pulse(chain.latency(), output_pol, alpha_total);
    for (auto it = chain.modules.rbegin(); it != chain.modules.rend(); ++it) {
        s = apply_uniform(s, it->wave_transform.adjoint());
        s = apply_pol_advance(s, it->delay, 0.0);
    }
    sym.pattern = std::move(s);
    return sym;
}

FrameConfig default_frame(int m, int ppm_order)
{
    return {ppm_order, std::max(ppm_order, 1 << m), false};
}

void validate_frame(const FrameConfig& frame, int m)
{
    if (frame.ppm_order < 2)
        throw std::invalid_argument("frame: PPM order must be >= 2, got " + std::to_string(frame.ppm_order));
    if (frame.guard_bins < (1 << m))
        throw std::invalid_argument("frame: guard_bins " + std::to_string(frame.guard_bins) +
                                    " is shorter than the pattern length " + std::to_string(1 << m));
}

std::vector<PatternSymbol> build_symbol_alphabet(int m, const FrameConfig& frame, Amplitude alpha_total,
                                                 Pol base_pol)
{
    validate_frame(frame, m);
    const auto base = derive_pattern(m, base_pol, alpha_total);
    std::vector<PatternSymbol> out;
    const int n_pols = frame.polarization_doubling ? 2 : 1;
    out.reserve(static_cast<std::size_t>(frame.ppm_order * n_pols));
    for (int p = 0; p < n_pols; ++p) {
        const auto proto = p == 0 ? base : derive_pattern(m, orthogonal(base_pol), alpha_total);
        for (int k = 0; k < frame.ppm_order; ++k) {
            PatternSymbol sym;
            sym.pattern = shift(proto.pattern, k);
            sym.arrival_offset = k;
            sym.output_pol = proto.output_pol;
            sym.predicted_output_bin = proto.predicted_output_bin + k;
            out.push_back(std::move(sym));
        }
    }
    return out;
}

double peak_to_average(const FieldState& field, std::int64_t frame_len)
{
    if (frame_len < 1) throw std::invalid_argument("peak_to_average: frame length must be positive");
    const double e = total_energy(field);
    if (!(e > 0.0)) throw std::invalid_argument("peak_to_average: field carries no energy");
    double peak = 0.0;
    for (const auto& b : field.bins()) peak = std::max(peak, b.power());
    return peak * static_cast<double>(frame_len) / e;
}

nlohmann::ordered_json pattern_to_json(const PatternSymbol& symbol, int m)
{
    nlohmann::ordered_json j;
    j["m"] = m;
    j["output_pol"] = to_string(symbol.output_pol);
    auto bins = nlohmann::ordered_json::array();
    const auto& p = symbol.pattern;
    for (auto t = p.start_bin(); t < p.end_bin(); ++t) {
        const auto b = p.at(t);
        for (Pol pol : {Pol::H, Pol::V}) {
            if (b[pol] == Amplitude{}) continue;
            nlohmann::ordered_json bj;
            bj["t"] = t;
            bj["pol"] = to_string(pol);
            bj["re"] = b[pol].real();
            bj["im"] = b[pol].imag();
            bins.push_back(std::move(bj));
        }
    }
    j["bins"] = std::move(bins);
    return j;
}

PatternSymbol pattern_from_json(const nlohmann::json& j)
{
    static const std::vector<std::string> keys{"m", "output_pol", "bins"};
    for (const auto& [k, _] : j.items())
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw std::invalid_argument("pattern: unknown key '" + k + "'");
    const int m = j.at("m").get<int>();
    const auto chain = build_passive_chain(m);
    PatternSymbol sym;
    sym.output_pol = parse_pol(j.at("output_pol").get<std::string>());
    sym.predicted_output_bin = chain.latency();

    const auto n = std::int64_t{1} << m;
    std::vector<Jones> bins(static_cast<std::size_t>(n));
    std::int64_t last_t = -1;
    for (const auto& b : j.at("bins")) {
        const auto t = b.at("t").get<std::int64_t>();
        if (t < 0 || t >= n) throw std::invalid_argument("pattern: bin " + std::to_string(t) + " outside [0, 2^m)");
        if (t < last_t) throw std::invalid_argument("pattern: bins not sorted by t");
        last_t = t;
        bins[static_cast<std::size_t>(t)][parse_pol(b.at("pol").get<std::string>())] =
            Amplitude{b.at("re").get<double>(), b.at("im").get<double>()};
    }
    sym.pattern = FieldState(0, std::move(bins));
    return sym;
}

} // namespace srx
