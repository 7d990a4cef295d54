// Command-line front end: chain verification, pattern export, Monte Carlo
// link sweeps and peak-to-average tables.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "srx/experiment.hpp"
#include "srx/passive_receiver.hpp"

namespace {

int cmd_verify(const std::string& m_text, const std::optional<std::string>& out, unsigned threads)
{
    const auto ms = srx::parse_m_range(m_text);
    const auto report = srx::run_verify(ms, 1e-10, threads);
    const auto text = report.dump(2) + "\n";
    if (out)
        srx::write_file(*out, text);
    else
        std::cout << text;
    for (const auto& r : report["results"])
        std::cerr << "m=" << r["m"].get<int>() << " modules=" << r["modules"].get<int>()
                  << " leakage=" << r["active_max_leakage"].get<double>()
                  << (r["passed"].get<bool>() ? " ok" : " FAILED") << '\n';
    return report["passed"].get<bool>() ? srx::exit_ok : srx::exit_verification;
}

int cmd_pattern(const std::string& m_text, const std::string& pol_text, const std::optional<std::string>& out)
{
    const auto ms = srx::parse_m_range(m_text);
    if (ms.size() != 1) throw srx::ConfigError("pattern takes a single --m value");
    srx::Pol pol;
    try {
        pol = srx::parse_pol(pol_text);
    } catch (const std::invalid_argument& e) {
        throw srx::ConfigError(e.what());
    }
    const auto sym = srx::derive_pattern(ms.front(), pol, 1.0);
    const auto text = srx::pattern_to_json(sym, ms.front()).dump(2) + "\n";
    if (out)
        srx::write_file(*out, text);
    else
        std::cout << text;
    return srx::exit_ok;
}

int cmd_simulate(const std::string& config_path, const srx::CommandOverrides& overrides)
{
    auto cfg = srx::load_experiment(config_path);
    srx::run_simulate(std::move(cfg), overrides, std::cout);
    return srx::exit_ok;
}

int cmd_par_table(const std::string& m_text, int ppm_order, std::optional<std::int64_t> frame,
                  const std::optional<std::string>& out)
{
    const auto ms = srx::parse_m_range(m_text);
    if (ms.size() != 1) throw srx::ConfigError("par-table takes a single --m value");
    if (ppm_order < 2) throw srx::ConfigError("--ppm-order must be >= 2");
    if (frame && *frame < 1) throw srx::ConfigError("--frame must be positive");
    std::vector<srx::ParRow> rows;
    try {
        rows = srx::default_par_table(ms.front(), ppm_order, frame);
    } catch (const std::invalid_argument& e) {
        throw srx::ConfigError(e.what());
    }
    std::ostringstream ss;
    srx::write_par_csv(ss, rows);
    if (out)
        srx::write_file(*out, ss.str());
    else
        std::cout << ss.str();
    return srx::exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Structured optical receiver simulator"};
    app.require_subcommand(1);

    std::string m_text = "1..8";
    std::string pol_text = "H";
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<unsigned> threads;
    int ppm_order = 16;
    std::optional<std::int64_t> frame;

    auto* verify = app.add_subcommand("verify", "Exhaustively check active and passive chains");
    verify->add_option("--m", m_text, "m value or range lo..hi")->capture_default_str();
    verify->add_option("--out", out, "JSON report path (default stdout)");
    verify->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* pattern = app.add_subcommand("pattern", "Export a passive-receiver transmit pattern");
    pattern->add_option("--m", m_text, "Receiver depth")->required();
    pattern->add_option("--pol", pol_text, "Output polarization H or V")->capture_default_str();
    pattern->add_option("--out", out, "Pattern JSON path (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo link sweep");
    simulate->add_option("--config", config_path, "Experiment JSON")->required();
    simulate->add_option("--seed", seed, "Override master_seed");
    simulate->add_option("--trials", trials, "Override n_trials");
    simulate->add_option("--out", out, "Override CSV output path");
    simulate->add_option("--threads", threads, "Override worker threads");

    auto* par = app.add_subcommand("par-table", "Peak-to-average power comparison");
    par->add_option("--m", m_text, "Receiver depth")->capture_default_str();
    par->add_option("--ppm-order", ppm_order, "PPM order M")->capture_default_str();
    par->add_option("--frame", frame, "Common frame length in bins");
    par->add_option("--out", out, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? srx::exit_ok : srx::exit_config;
    }

    try {
        if (*verify) return cmd_verify(verify->count("--m") ? m_text : "1..8", out, threads.value_or(0));
        if (*pattern) return cmd_pattern(m_text, pol_text, out);
        if (*simulate) return cmd_simulate(config_path, {seed, trials, out, threads});
        if (*par) return cmd_par_table(par->count("--m") ? m_text : "3", ppm_order, frame, out);
    } catch (const srx::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return srx::exit_config;
    } catch (const srx::RegionOverlap& e) {
        std::cerr << "verification failed: " << e.what() << '\n';
        return srx::exit_verification;
    } catch (const srx::ConcentrationFailure& e) {
        std::cerr << "verification failed: " << e.what() << '\n';
        return srx::exit_verification;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return srx::exit_config;
    }
    return srx::exit_config;
}
