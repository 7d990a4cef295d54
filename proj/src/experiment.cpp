#include "srx/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "srx/hadamard.hpp"

namespace srx {

std::vector<int> parse_m_range(const std::string& text)
{
    auto parse_int = [&](const std::string& s) {
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(s, &pos);
        } catch (const std::exception&) {
            throw ConfigError("bad --m value '" + text + "'");
        }
        if (pos != s.size()) throw ConfigError("bad --m value '" + text + "'");
        if (v < 1 || v > max_codeword_order) throw ConfigError("--m values must lie in [1, 16], got " + s);
        return v;
    };
    const auto dots = text.find("..");
    if (dots == std::string::npos) return {parse_int(text)};
    const int lo = parse_int(text.substr(0, dots));
    const int hi = parse_int(text.substr(dots + 2));
    if (lo > hi) throw ConfigError("empty --m range '" + text + "'");
    std::vector<int> out;
    for (int m = lo; m <= hi; ++m) out.push_back(m);
    return out;
}

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, _] : j.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <typename T>
T get(const nlohmann::json& j, const char* key, const std::string& where)
{
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(where + ": key '" + key + "' has the wrong type");
    }
}

DetectorMode parse_mode(const std::string& s)
{
    if (s == "A") return DetectorMode::summed;
    if (s == "B") return DetectorMode::resolved;
    throw ConfigError("detector_mode must be A or B, got '" + s + "'");
}

std::string json_path_for(const std::string& csv)
{
    const auto slash = csv.find_last_of('/');
    const auto dot = csv.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return csv + ".json";
    return csv.substr(0, dot) + ".json";
}

} // namespace

std::vector<SchemeConfig> ExperimentConfig::expand() const
{
    const auto ms = sweep_m.empty() ? std::vector<int>{base.m} : sweep_m;
    const auto sigmas = sweep_phase_sigma.empty() ? std::vector<double>{base.channel.phase_noise_sigma}
                                                  : sweep_phase_sigma;
    const auto ns = sweep_mean_photons.empty() ? std::vector<double>{base.mean_photons} : sweep_mean_photons;
    std::vector<SchemeConfig> out;
    for (int m : ms) {
        for (double sigma : sigmas) {
            for (double n : ns) {
                SchemeConfig c = base;
                c.m = m;
                c.channel.phase_noise_sigma = sigma;
                c.mean_photons = n;
                if (c.scheme == Scheme::reference_ppm) {
                    c.ppm_order = ppm_order.value_or(1 << m);
                } else if (c.scheme == Scheme::passive_pattern) {
                    c.frame.ppm_order = ppm_order.value_or(16);
                    c.frame.guard_bins = guard_bins.value_or(std::max(c.frame.ppm_order, 1 << m));
                }
                out.push_back(c);
            }
        }
    }
    return out;
}

ExperimentConfig parse_experiment(const nlohmann::json& j)
{
    const std::string where = "config";
    reject_unknown(j, {"schema_version", "scheme", "m", "M", "guard_bins", "polarization_doubling", "N_s",
                       "detector_mode", "channel", "sweep", "n_trials", "master_seed", "threads", "out", "json_out"},
                   where);
    if (!j.contains("schema_version")) throw ConfigError("config: missing schema_version");
    if (get<int>(j, "schema_version", where) != config_schema_version)
        throw ConfigError("config: unsupported schema_version");
    if (!j.contains("scheme")) throw ConfigError("config: missing scheme");

    ExperimentConfig cfg;
    try {
        cfg.base.scheme = parse_scheme(get<std::string>(j, "scheme", where));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (j.contains("m")) cfg.base.m = get<int>(j, "m", where);
    if (j.contains("M")) cfg.ppm_order = get<int>(j, "M", where);
    if (j.contains("guard_bins")) cfg.guard_bins = get<int>(j, "guard_bins", where);
    if (j.contains("polarization_doubling"))
        cfg.base.frame.polarization_doubling = get<bool>(j, "polarization_doubling", where);
    if (j.contains("N_s")) cfg.base.mean_photons = get<double>(j, "N_s", where);
    if (j.contains("detector_mode")) cfg.base.mode = parse_mode(get<std::string>(j, "detector_mode", where));
    if (j.contains("n_trials")) cfg.n_trials = get<std::uint64_t>(j, "n_trials", where);
    if (j.contains("master_seed")) cfg.master_seed = get<std::uint64_t>(j, "master_seed", where);
    if (j.contains("threads")) cfg.threads = get<unsigned>(j, "threads", where);
    if (j.contains("out")) cfg.out_csv = get<std::string>(j, "out", where);
    if (j.contains("json_out")) cfg.out_json = get<std::string>(j, "json_out", where);

    if (j.contains("channel")) {
        const auto& c = j.at("channel");
        const std::string cw = "config.channel";
        reject_unknown(c, {"transmissivity", "phase_noise_sigma", "visibility", "dark_mean", "delay_phase_errors"}, cw);
        auto& ch = cfg.base.channel;
        if (c.contains("transmissivity")) ch.transmissivity = get<double>(c, "transmissivity", cw);
        if (c.contains("phase_noise_sigma")) ch.phase_noise_sigma = get<double>(c, "phase_noise_sigma", cw);
        if (c.contains("visibility")) ch.visibility = get<double>(c, "visibility", cw);
        if (c.contains("dark_mean")) ch.dark_mean = get<double>(c, "dark_mean", cw);
        if (c.contains("delay_phase_errors"))
            ch.delay_phase_errors = get<std::vector<double>>(c, "delay_phase_errors", cw);
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        const std::string sw = "config.sweep";
        reject_unknown(s, {"N_s", "m", "phase_noise_sigma"}, sw);
        if (s.contains("N_s")) cfg.sweep_mean_photons = get<std::vector<double>>(s, "N_s", sw);
        if (s.contains("m")) cfg.sweep_m = get<std::vector<int>>(s, "m", sw);
        if (s.contains("phase_noise_sigma")) cfg.sweep_phase_sigma = get<std::vector<double>>(s, "phase_noise_sigma", sw);
    }

    if (cfg.n_trials < 1) throw ConfigError("config: n_trials must be >= 1");
    if (cfg.base.scheme == Scheme::active_hadamard && cfg.ppm_order)
        throw ConfigError("config: ACTIVE_HADAMARD takes its order from m, not M");
    for (int m : cfg.sweep_m.empty() ? std::vector<int>{cfg.base.m} : cfg.sweep_m)
        if (m < 1 || m > max_codeword_order) throw ConfigError("config: m must be in [1, 16]");
    for (const auto& point : cfg.expand()) {
        try {
            LinkModel probe(point);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_experiment(const std::string& path)
{
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_experiment(j);
}

nlohmann::ordered_json run_verify(const std::vector<int>& ms, double tolerance, unsigned threads)
{
    nlohmann::ordered_json report;
    report["schema_version"] = config_schema_version;
    report["tolerance"] = tolerance;
    auto results = nlohmann::ordered_json::array();
    bool all_ok = true;

    for (int m : ms) {
        if (m < 1 || m > max_codeword_order) throw ConfigError("verify: m must be in [1, 16]");
        nlohmann::ordered_json r;
        r["m"] = m;
        bool ok = true;

        const auto chain = synthesize_schedules(m);
        const auto conc = measure_concentration(chain, threads);
        std::vector<int> delays;
        for (const auto& mod : chain.modules) delays.push_back(mod.delay);
        r["modules"] = chain.modules.size();
        r["delays"] = delays;
        r["position_offset"] = chain.position_offset;
        r["active_max_leakage"] = conc.max_leakage;
        const bool positions_ok = conc.affine && conc.injective && conc.positions.front() == chain.position_offset;
        r["positions_affine"] = positions_ok;
        ok = ok && conc.max_leakage <= tolerance && positions_ok && chain.modules.size() == static_cast<std::size_t>(m);

        auto passive = nlohmann::ordered_json::array();
        const auto pchain = build_passive_chain(m);
        const double bin_energy = 1.0 / static_cast<double>(std::int64_t{1} << m);
        for (Pol pol : {Pol::H, Pol::V}) {
            const auto sym = derive_pattern(m, pol, 1.0);
            double dev = 0.0;
            bool rectilinear = sym.pattern.size() == (std::size_t{1} << m);
            for (const auto& b : sym.pattern.bins()) {
                dev = std::max(dev, std::abs(b.power() - bin_energy));
                rectilinear = rectilinear && (b.h == Amplitude{}) != (b.v == Amplitude{});
            }
            const auto out = propagate_passive(sym.pattern, pchain);
            double best = 0.0;
            std::int64_t best_bin = 0;
            Pol best_pol = Pol::H;
            for (auto t = out.start_bin(); t < out.end_bin(); ++t)
                for (Pol p : {Pol::H, Pol::V})
                    if (std::norm(out.at(t)[p]) > best) {
                        best = std::norm(out.at(t)[p]);
                        best_bin = t;
                        best_pol = p;
                    }
            const double leak = 1.0 - best / total_energy(out);
            nlohmann::ordered_json pj;
            pj["output_pol"] = to_string(pol);
            pj["max_leakage"] = leak;
            pj["output_bin"] = best_bin;
            pj["pattern_bins"] = sym.pattern.size();
            pj["pattern_energy_deviation"] = dev;
            passive.push_back(std::move(pj));
            ok = ok && leak <= tolerance && dev <= 1e-12 && rectilinear && best_pol == pol &&
                 best_bin == sym.predicted_output_bin;
        }
        r["passive"] = std::move(passive);
        r["passed"] = ok;
        all_ok = all_ok && ok;
        results.push_back(std::move(r));
    }
    report["results"] = std::move(results);
    report["passed"] = all_ok;
    return report;
}

void validate_verify_json(const nlohmann::json& j)
{
    auto fail = [](const std::string& why) { throw std::invalid_argument("verify report: " + why); };
    if (!j.is_object()) fail("expected an object");
    for (const char* k : {"schema_version", "tolerance", "results", "passed"})
        if (!j.contains(k)) fail(std::string("missing '") + k + "'");
    if (j.size() != 4) fail("unexpected keys");
    if (!j.at("results").is_array()) fail("results must be an array");
    for (const auto& r : j.at("results")) {
        for (const char* k : {"m", "modules", "delays", "position_offset", "active_max_leakage", "positions_affine",
                              "passive", "passed"})
            if (!r.contains(k)) fail(std::string("result missing '") + k + "'");
        if (r.at("delays").size() != r.at("modules").get<std::size_t>()) fail("delays do not match module count");
        if (r.at("passive").size() != 2) fail("expected two passive entries");
    }
}

std::vector<LinkReport> run_simulate(ExperimentConfig cfg, const CommandOverrides& overrides, std::ostream& log)
{
    if (overrides.seed) cfg.master_seed = *overrides.seed;
    if (overrides.trials) cfg.n_trials = *overrides.trials;
    if (overrides.out) {
        cfg.out_csv = *overrides.out;
        cfg.out_json.clear();
    }
    if (overrides.threads) cfg.threads = *overrides.threads;
    if (cfg.n_trials < 1) throw ConfigError("simulate: n_trials must be >= 1");
    if (cfg.out_csv.empty()) throw ConfigError("simulate: no output path (set \"out\" or --out)");
    if (cfg.out_json.empty()) cfg.out_json = json_path_for(cfg.out_csv);

    const auto points = cfg.expand();
    for (const auto& p : points) {
        try {
            LinkModel probe(p);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("simulate: ") + e.what());
        }
    }

    std::ofstream csv(cfg.out_csv, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open '" + cfg.out_csv + "' for writing");
    write_report_csv_header(csv);
    csv.flush();

    std::vector<LinkReport> reports;
    auto mirror = nlohmann::ordered_json::array();
    for (const auto& p : points) {
        auto r = run_trials(p, cfg.n_trials, cfg.master_seed, cfg.threads);
        write_report_csv_row(csv, r);
        csv.flush();
        log << to_string(r.scheme) << " m=" << r.m << " M=" << r.alphabet << " N_s=" << r.mean_photons
            << " sigma=" << p.channel.phase_noise_sigma << ": erasure=" << r.erasure_rate
            << " ser=" << r.symbol_error_rate << " invalid=" << r.invalid_rate << " mi=" << r.mi_bits
            << " bits pie=" << r.pie_bits_per_photon << '\n';
        mirror.push_back(to_json(r));
        reports.push_back(std::move(r));
    }
    if (!csv) throw std::runtime_error("write to '" + cfg.out_csv + "' failed");
    write_file(cfg.out_json, mirror.dump(2) + "\n");
    return reports;
}

std::vector<ParRow> default_par_table(int m, int ppm_order, std::optional<std::int64_t> common_frame)
{
    SchemeConfig ref;
    ref.scheme = Scheme::reference_ppm;
    ref.ppm_order = ppm_order;
    SchemeConfig act;
    act.scheme = Scheme::active_hadamard;
    act.m = m;
    SchemeConfig pas;
    pas.scheme = Scheme::passive_pattern;
    pas.m = m;
    pas.frame = default_frame(m, ppm_order);
    return compare_par({ref, act, pas}, common_frame);
}

void write_par_csv(std::ostream& os, const std::vector<ParRow>& rows)
{
    os << "scheme,m,M,frame_len,par\n";
    for (const auto& r : rows)
        os << to_string(r.scheme) << ',' << r.m << ',' << r.alphabet << ',' << r.frame_len << ','
           << format_double(r.par) << '\n';
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    f.close();
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace srx
