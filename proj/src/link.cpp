#include "srx/link.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "srx/hadamard.hpp"

namespace srx {

const char* to_string(Scheme s)
{
    switch (s) {
    case Scheme::active_hadamard: return "ACTIVE_HADAMARD";
    case Scheme::passive_pattern: return "PASSIVE_PATTERN";
    case Scheme::reference_ppm: return "REFERENCE_PPM";
    }
    return "?";
}

Scheme parse_scheme(const std::string& s)
{
    for (auto v : {Scheme::active_hadamard, Scheme::passive_pattern, Scheme::reference_ppm})
        if (s == to_string(v)) return v;
    throw std::invalid_argument("unknown scheme '" + s + "'");
}

namespace {

// Upper bound on cached per-symbol cell means (doubles).
constexpr std::size_t max_cached_cells = std::size_t{1} << 24;

} // namespace

LinkModel::LinkModel(SchemeConfig cfg) : cfg_(std::move(cfg))
{
    cfg_.channel.validate();
    if (!std::isfinite(cfg_.mean_photons) || cfg_.mean_photons < 0.0)
        throw std::invalid_argument("link: N_s must be finite and >= 0");
    const double eta = cfg_.channel.transmissivity;
    if (eta == 0.0 && cfg_.mean_photons > 0.0)
        throw std::invalid_argument("link: N_s > 0 is unreachable with zero transmissivity");
    const double tx_energy = eta > 0.0 ? cfg_.mean_photons / eta : 0.0;
    const auto& errors = cfg_.channel.delay_phase_errors;

    DetectionWindow window;
    window.mode = cfg_.mode;
    std::vector<std::pair<std::int64_t, Pol>> symbol_cells;

    switch (cfg_.scheme) {
    case Scheme::active_hadamard: {
        active_ = synthesize_schedules(cfg_.m);
        if (!errors.empty()) set_phase_errors(active_, errors);
        const std::size_t n = std::size_t{1} << cfg_.m;
        bpsk_alpha_ = std::sqrt(tx_energy / static_cast<double>(n));
        alphabet_size_ = n;
        for (std::size_t k = 0; k < n; ++k) {
            symbol_cells.emplace_back(active_.position_offset + static_cast<std::int64_t>(k), active_.output_pols[k]);
        }
        frame_len_ = static_cast<std::int64_t>(n);
        window.start_bin = active_.position_offset;
        window.n_bins = frame_len_;
        unit_symbol_ = encode_bpsk(Codeword(cfg_.m, 0), 1.0);
        break;
    }
    case Scheme::passive_pattern: {
        validate_frame(cfg_.frame, cfg_.m);
        if (cfg_.frame.polarization_doubling && cfg_.mode == DetectorMode::summed)
            throw std::invalid_argument("link: polarization doubling needs the polarization-resolving detector");
        passive_ = build_passive_chain(cfg_.m);
        if (!errors.empty()) set_phase_errors(passive_, errors);
        for (auto& sym : build_symbol_alphabet(cfg_.m, cfg_.frame, std::sqrt(tx_energy))) {
            symbol_cells.emplace_back(sym.predicted_output_bin, sym.output_pol);
            alphabet_.push_back(std::move(sym.pattern));
        }
        frame_len_ = cfg_.frame.frame_length();
        window.start_bin = passive_.latency();
        window.n_bins = frame_len_;
        unit_symbol_ = derive_pattern(cfg_.m, Pol::H, 1.0).pattern;
        break;
    }
    case Scheme::reference_ppm: {
        if (cfg_.ppm_order < 2) throw std::invalid_argument("link: PPM order must be >= 2");
        if (!errors.empty()) throw std::invalid_argument("link: REFERENCE_PPM has no delay lines");
        const Amplitude amp = std::sqrt(tx_energy);
        for (int k = 0; k < cfg_.ppm_order; ++k) {
            alphabet_.push_back(FieldState::pulse(k, Pol::V, amp));
            symbol_cells.emplace_back(k, Pol::V);
        }
        frame_len_ = cfg_.ppm_order;
        window.start_bin = 0;
        window.n_bins = frame_len_;
        unit_symbol_ = FieldState::pulse(0, Pol::V, 1.0);
        break;
    }
    }

    if (cfg_.scheme != Scheme::active_hadamard) alphabet_size_ = alphabet_.size();
    positions_.window = window;
    positions_.symbol_of_cell.assign(window.n_cells(), -1);
    for (std::size_t k = 0; k < symbol_cells.size(); ++k)
        positions_.symbol_of_cell[window.cell_index(symbol_cells[k].first, symbol_cells[k].second)] =
            static_cast<int>(k);
    positions_.check_injective();

    if (cfg_.channel.phase_noise_sigma == 0.0 && alphabet_size_ * window.n_cells() <= max_cached_cells) {
        RngStream unused(0, 0);
        cached_means_.reserve(alphabet_size_);
        for (std::size_t k = 0; k < alphabet_size_; ++k) cached_means_.push_back(cell_means(k, unused));
    }
}

FieldState LinkModel::transmitted(std::size_t symbol) const
{
    if (symbol >= alphabet_size_) throw std::out_of_range("link: symbol index out of range");
    if (cfg_.scheme == Scheme::active_hadamard)
        return encode_bpsk(Codeword(cfg_.m, static_cast<std::uint32_t>(symbol)), bpsk_alpha_);
    return alphabet_[symbol];
}

FieldState LinkModel::receive(const FieldState& in) const
{
    switch (cfg_.scheme) {
    case Scheme::active_hadamard: return propagate_active(in, active_);
    case Scheme::passive_pattern: return propagate_passive(in, passive_);
    case Scheme::reference_ppm: return in;
    }
    return in;
}

double LinkModel::peak_to_average() const { return srx::peak_to_average(unit_symbol_, frame_len_); }

std::vector<double> LinkModel::cell_means(std::size_t symbol, RngStream& rng) const
{
    const auto rx = receive(apply_channel(transmitted(symbol), cfg_.channel, rng));
    return signal_means(rx, positions_.window, cfg_.channel.visibility);
}

LinkModel::Trial LinkModel::run_trial(std::uint64_t master_seed, std::uint64_t trial) const
{
    RngStream rng(master_seed, trial);
    const auto sent = std::uniform_int_distribution<std::size_t>(0, alphabet_size_ - 1)(rng);
    const auto rec = cached_means_.empty()
                         ? detect_means(cell_means(sent, rng), positions_.window, cfg_.channel.dark_mean, rng)
                         : detect_means(cached_means_[sent], positions_.window, cfg_.channel.dark_mean, rng);
    return {static_cast<int>(sent), decode(rec, positions_, rng)};
}

void JointCounts::add(std::size_t x, std::size_t y, std::uint64_t count)
{
    if (x >= n_inputs || y >= n_outputs) throw std::out_of_range("joint counts: cell out of range");
    if (count) cells[{x, y}] += count;
}

std::uint64_t JointCounts::at(std::size_t x, std::size_t y) const
{
    const auto it = cells.find({x, y});
    return it == cells.end() ? 0 : it->second;
}

std::uint64_t JointCounts::total() const
{
    std::uint64_t n = 0;
    for (const auto& [_, c] : cells) n += c;
    return n;
}

void JointCounts::merge(const JointCounts& other)
{
    for (const auto& [xy, c] : other.cells) add(xy.first, xy.second, c);
}

double plugin_mutual_information(const JointCounts& joint)
{
    std::map<std::size_t, double> row, col;
    double n = 0.0;
    for (const auto& [xy, c] : joint.cells) {
        row[xy.first] += static_cast<double>(c);
        col[xy.second] += static_cast<double>(c);
        n += static_cast<double>(c);
    }
    if (n == 0.0) return 0.0;
    double mi = 0.0;
    for (const auto& [xy, cnt] : joint.cells) {
        const auto c = static_cast<double>(cnt);
        mi += c / n * std::log2(c * n / (row[xy.first] * col[xy.second]));
    }
    return std::max(0.0, mi);
}

double analytic_ppm_mi(int ppm_order, double mean_photons)
{
    if (ppm_order < 2) throw std::invalid_argument("analytic_ppm_mi: M must be >= 2");
    if (!(mean_photons >= 0.0)) throw std::invalid_argument("analytic_ppm_mi: N_s must be >= 0");
    return -std::expm1(-mean_photons) * std::log2(static_cast<double>(ppm_order));
}

LinkReport run_trials(const SchemeConfig& cfg, std::uint64_t n_trials, std::uint64_t master_seed, unsigned threads)
{
    if (n_trials < 1) throw std::invalid_argument("run_trials: need at least one trial");
    const LinkModel model(cfg);
    const std::size_t a = model.alphabet_size();
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n_trials));
    std::vector<JointCounts> partial(threads, JointCounts{a, a + 2, {}});
    {
        std::vector<std::jthread> pool;
        const std::uint64_t chunk = (n_trials + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                auto& table = partial[w];
                const auto begin = std::min(n_trials, w * chunk);
                const auto end = std::min(n_trials, begin + chunk);
                for (auto t = begin; t < end; ++t) {
                    const auto [sent, out] = model.run_trial(master_seed, t);
                    std::size_t y = a + 1;
                    if (out.kind == DecodeOutcome::Kind::symbol)
                        y = static_cast<std::size_t>(out.symbol);
                    else if (out.kind == DecodeOutcome::Kind::erasure)
                        y = a;
                    table.add(static_cast<std::size_t>(sent), y);
                }
            });
        }
    }

    LinkReport r;
    r.scheme = cfg.scheme;
    r.m = cfg.scheme == Scheme::reference_ppm ? 0 : cfg.m;
    r.alphabet = static_cast<int>(a);
    r.mean_photons = cfg.mean_photons;
    r.n_trials = n_trials;
    r.seed = master_seed;
    r.joint = JointCounts{a, a + 2, {}};
    for (const auto& t : partial) r.joint.merge(t);

    std::uint64_t correct = 0, wrong = 0, erased = 0, invalid = 0;
    for (const auto& [xy, c] : r.joint.cells) {
        const auto [x, y] = xy;
        if (y == a)
            erased += c;
        else if (y == a + 1)
            invalid += c;
        else
            (x == y ? correct : wrong) += c;
    }
    const auto n = static_cast<double>(n_trials);
    auto se = [n](double p) { return std::sqrt(p * (1.0 - p) / n); };
    r.correct_rate = static_cast<double>(correct) / n;
    r.symbol_error_rate = static_cast<double>(wrong) / n;
    r.erasure_rate = static_cast<double>(erased) / n;
    r.invalid_rate = static_cast<double>(invalid) / n;
    r.se_correct = se(r.correct_rate);
    r.se_symbol_error = se(r.symbol_error_rate);
    r.se_erasure = se(r.erasure_rate);
    r.se_invalid = se(r.invalid_rate);

    r.mi_bits = plugin_mutual_information(r.joint);
    r.pie_bits_per_photon = cfg.mean_photons > 0.0 ? r.mi_bits / cfg.mean_photons : 0.0;
    r.par = model.peak_to_average();
    r.frame_len = model.frame_length();
    return r;
}

std::vector<ParRow> compare_par(const std::vector<SchemeConfig>& cfgs, std::optional<std::int64_t> common_frame)
{
    if (cfgs.empty()) throw std::invalid_argument("compare_par: no configurations");
    std::vector<ParRow> rows;
    for (auto cfg : cfgs) {
        cfg.mean_photons = 1.0;
        cfg.channel = ChannelParams{};
        const LinkModel model(cfg);
        ParRow row;
        row.scheme = cfg.scheme;
        row.m = cfg.scheme == Scheme::reference_ppm ? 0 : cfg.m;
        row.alphabet = static_cast<int>(model.alphabet_size());
        row.frame_len = common_frame.value_or(model.frame_length());
        row.par = srx::peak_to_average(model.transmitted(0), row.frame_len);
        rows.push_back(row);
    }
    return rows;
}

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

const char* const csv_header = "scheme,m,M,N_s,n_trials,ser,erasure,invalid,mi_bits,pie,par,seed";

} // namespace

void write_report_csv_header(std::ostream& os) { os << csv_header << '\n'; }

void write_report_csv_row(std::ostream& os, const LinkReport& r)
{
    os << to_string(r.scheme) << ',' << r.m << ',' << r.alphabet << ',' << format_double(r.mean_photons) << ','
       << r.n_trials << ',' << format_double(r.symbol_error_rate) << ',' << format_double(r.erasure_rate) << ','
       << format_double(r.invalid_rate) << ',' << format_double(r.mi_bits) << ','
       << format_double(r.pie_bits_per_photon) << ',' << format_double(r.par) << ',' << r.seed << '\n';
}

nlohmann::ordered_json to_json(const LinkReport& r)
{
    nlohmann::ordered_json j;
    j["scheme"] = to_string(r.scheme);
    j["m"] = r.m;
    j["M"] = r.alphabet;
    j["N_s"] = r.mean_photons;
    j["n_trials"] = r.n_trials;
    j["seed"] = r.seed;
    j["frame_len"] = r.frame_len;
    j["correct"] = {{"rate", r.correct_rate}, {"se", r.se_correct}};
    j["ser"] = {{"rate", r.symbol_error_rate}, {"se", r.se_symbol_error}};
    j["erasure"] = {{"rate", r.erasure_rate}, {"se", r.se_erasure}};
    j["invalid"] = {{"rate", r.invalid_rate}, {"se", r.se_invalid}};
    j["mi_bits"] = r.mi_bits;
    j["pie"] = r.pie_bits_per_photon;
    j["par"] = r.par;
    return j;
}

void validate_report_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != csv_header)
        throw std::invalid_argument("report csv: bad header");
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        std::vector<std::string> cols;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
        if (cols.size() != 12) throw std::invalid_argument("report csv: row " + std::to_string(row) + " has wrong arity");
        parse_scheme(cols[0]);
        std::size_t pos = 0;
        for (int i : {1, 2, 4, 11}) {
            std::stoull(cols[static_cast<std::size_t>(i)], &pos);
            if (pos != cols[static_cast<std::size_t>(i)].size())
                throw std::invalid_argument("report csv: row " + std::to_string(row) + " bad integer");
        }
        for (int i : {3, 5, 6, 7, 8, 9, 10}) {
            const double v = std::stod(cols[static_cast<std::size_t>(i)], &pos);
            if (pos != cols[static_cast<std::size_t>(i)].size() || !std::isfinite(v))
                throw std::invalid_argument("report csv: row " + std::to_string(row) + " bad number");
        }
        for (int i : {5, 6, 7}) {
            const double v = std::stod(cols[static_cast<std::size_t>(i)]);
            if (v < 0.0 || v > 1.0) throw std::invalid_argument("report csv: rate outside [0, 1]");
        }
    }
    if (row == 0) throw std::invalid_argument("report csv: no rows");
}

void validate_report_json(const nlohmann::json& j)
{
    static const std::vector<std::string> keys{"scheme", "m",       "M",       "N_s",     "n_trials",
                                               "seed",   "frame_len", "correct", "ser",     "erasure",
                                               "invalid", "mi_bits",  "pie",     "par"};
    if (!j.is_array() || j.empty()) throw std::invalid_argument("report json: expected a non-empty array");
    for (const auto& r : j) {
        for (const auto& k : keys)
            if (!r.contains(k)) throw std::invalid_argument("report json: missing key '" + k + "'");
        if (r.size() != keys.size()) throw std::invalid_argument("report json: unexpected keys");
        parse_scheme(r.at("scheme").get<std::string>());
        double total = 0.0;
        for (const char* k : {"correct", "ser", "erasure", "invalid"}) {
            const double p = r.at(k).at("rate").get<double>();
            if (p < 0.0 || p > 1.0 || r.at(k).at("se").get<double>() < 0.0)
                throw std::invalid_argument(std::string("report json: bad rate for ") + k);
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("report json: rates do not sum to 1");
        const double mi = r.at("mi_bits").get<double>();
        if (mi < 0.0 || mi > std::log2(r.at("M").get<double>()) + 1e-12)
            throw std::invalid_argument("report json: mutual information out of range");
    }
}

} // namespace srx
