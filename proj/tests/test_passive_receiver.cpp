#include <doctest.h>

#include <cmath>
#include <random>

#include "srx/hadamard.hpp"
#include "srx/passive_receiver.hpp"
#include "support.hpp"

using namespace srx;
using srx::testing::max_abs_diff;

namespace {

const double inv_r2 = 1.0 / std::sqrt(2.0);

struct Peak {
    std::int64_t bin = 0;
    Pol pol = Pol::H;
    double energy = 0.0;
};

Peak brightest_cell(const FieldState& s)
{
    Peak p;
    for (auto t = s.start_bin(); t < s.end_bin(); ++t)
        for (Pol pol : {Pol::H, Pol::V})
            if (std::norm(s.at(t)[pol]) > p.energy) p = {t, pol, std::norm(s.at(t)[pol])};
    return p;
}

} // namespace

TEST_CASE("m=1 pattern by hand")
{
    const auto h = derive_pattern(1, Pol::H, 1.0);
    CHECK(h.pattern.start_bin() == 0);
    CHECK(h.pattern.size() == 2);
    CHECK(std::abs(h.pattern.at(0).h - inv_r2) < 1e-15);
    CHECK(std::abs(h.pattern.at(0).v) == 0.0);
    CHECK(std::abs(h.pattern.at(1).v + inv_r2) < 1e-15);
    CHECK(std::abs(h.pattern.at(1).h) == 0.0);
    CHECK(h.predicted_output_bin == 1);

    const auto v = derive_pattern(1, Pol::V, 1.0);
    CHECK(std::abs(v.pattern.at(0).h - inv_r2) < 1e-15);
    CHECK(std::abs(v.pattern.at(1).v - inv_r2) < 1e-15);
}

TEST_CASE("forward propagation of the m=1 pattern")
{
    const FieldState p(0, {Jones{inv_r2, 0.0}, Jones{0.0, -inv_r2}});
    const auto out = propagate_passive(p, build_passive_chain(1));
    CHECK(out.start_bin() == 1);
    CHECK(out.size() == 1);
    CHECK(std::abs(out.at(1).h - 1.0) < 1e-15);
    CHECK(std::abs(out.at(1).v) < 1e-15);
    CHECK(propagate_passive(FieldState{}, build_passive_chain(1)).empty());
}

TEST_CASE("shifted pattern shifts the output pulse")
{
    const auto chain = build_passive_chain(3);
    const auto p = derive_pattern(3, Pol::V, 1.0).pattern;
    for (std::int64_t d : {-5, 0, 1, 9}) {
        const auto out = propagate_passive(shift(p, d), chain);
        CHECK(max_abs_diff(out, shift(propagate_passive(p, chain), d)) <= 1e-12);
        const auto peak = brightest_cell(out);
        CHECK(peak.bin == chain.latency() + d);
    }
}

TEST_CASE("m=3 pattern: eight bins of one eighth the energy")
{
    const auto s = derive_pattern(3, Pol::H, 1.0);
    CHECK(s.pattern.size() == 8);
    for (const auto& b : s.pattern.bins()) {
        CHECK(std::abs(b.power() - 0.125) <= 1e-12);
        CHECK((b.h == Amplitude{}) != (b.v == Amplitude{}));
    }
}

TEST_CASE("round trip and equal-power property, m = 1..8")
{
    for (int m = 1; m <= 8; ++m) {
        const auto chain = build_passive_chain(m);
        CHECK(chain.modules.size() == static_cast<std::size_t>(m));
        for (Pol pol : {Pol::H, Pol::V}) {
            const Amplitude alpha{1.5, -0.5};
            const double energy = std::norm(alpha);
            const auto sym = derive_pattern(m, pol, alpha);
            CHECK(sym.pattern.start_bin() == 0);
            CHECK(sym.pattern.size() == (std::size_t{1} << m));
            for (const auto& b : sym.pattern.bins()) {
                CHECK(std::abs(b.power() - energy / static_cast<double>(1 << m)) <= 1e-12);
                CHECK((b.h == Amplitude{}) != (b.v == Amplitude{}));
            }
            const auto out = propagate_passive(sym.pattern, chain);
            const auto peak = brightest_cell(out);
            CHECK(peak.pol == pol);
            CHECK(peak.bin == sym.predicted_output_bin);
            CHECK(peak.energy >= (1.0 - 1e-10) * energy);
        }
    }
}

TEST_CASE("frame validation and defaults")
{
    CHECK(default_frame(3, 16).guard_bins == 16);
    CHECK(default_frame(5, 16).guard_bins == 32);
    CHECK_THROWS_AS(validate_frame({16, 7, false}, 3), std::invalid_argument);
    CHECK_THROWS_AS(validate_frame({1, 8, false}, 3), std::invalid_argument);
    CHECK_NOTHROW(validate_frame({16, 8, false}, 3));
    CHECK(FrameConfig{16, 16, false}.power_usage_factor() == 0.5);
}

TEST_CASE("symbol alphabet")
{
    SUBCASE("16 offsets without doubling")
    {
        const auto syms = build_symbol_alphabet(3, default_frame(3, 16), 1.0);
        REQUIRE(syms.size() == 16);
        for (int k = 0; k < 16; ++k) {
            const auto& s = syms[static_cast<std::size_t>(k)];
            CHECK(s.arrival_offset == k);
            CHECK(s.pattern.start_bin() == k);
            CHECK(s.pattern.size() == 8);
            CHECK(s.predicted_output_bin == 7 + k);
            for (const auto& b : s.pattern.bins()) CHECK(std::abs(b.power() - 0.125) <= 1e-12);
        }
    }
    SUBCASE("polarization doubling")
    {
        auto frame = default_frame(3, 16);
        frame.polarization_doubling = true;
        const auto syms = build_symbol_alphabet(3, frame, 1.0);
        REQUIRE(syms.size() == 32);
        for (int k = 0; k < 16; ++k) {
            CHECK(syms[static_cast<std::size_t>(k)].output_pol == Pol::H);
            CHECK(syms[static_cast<std::size_t>(k + 16)].output_pol == Pol::V);
            CHECK(syms[static_cast<std::size_t>(k + 16)].predicted_output_bin == 7 + k);
        }
    }
    SUBCASE("short guard rejected")
    {
        CHECK_THROWS_AS(build_symbol_alphabet(3, {16, 4, false}, 1.0), std::invalid_argument);
    }
}

TEST_CASE("output bin is affine in the arrival offset")
{
    const auto chain = build_passive_chain(4);
    const auto syms = build_symbol_alphabet(4, default_frame(4, 16), 1.0);
    for (const auto& s : syms) CHECK(brightest_cell(propagate_passive(s.pattern, chain)).bin == 15 + s.arrival_offset);
}

TEST_CASE("adjacent frames do not overlap when guard >= pattern length")
{
    for (int m = 1; m <= 5; ++m) {
        const FrameConfig frame{8, 1 << m, false};
        const auto syms = build_symbol_alphabet(m, frame, 1.0);
        for (const auto& a : syms)
            for (const auto& b : syms) {
                const auto next = shift(b.pattern, frame.frame_length());
                CHECK(a.pattern.end_bin() <= next.start_bin());
            }
    }
}

TEST_CASE("peak_to_average")
{
    CHECK(peak_to_average(FieldState::pulse(3, Pol::V, 2.0), 16) == doctest::Approx(16.0));
    CHECK(peak_to_average(encode_bpsk(Codeword(4, 7), 0.5), 16) == doctest::Approx(1.0).epsilon(1e-14));
    const double pattern = peak_to_average(derive_pattern(3, Pol::H, 1.0).pattern, 16);
    const double ppm = peak_to_average(FieldState::pulse(0, Pol::V, 1.0), 16);
    CHECK(std::abs(pattern / ppm - 0.125) <= 1e-12);
    CHECK_THROWS_AS(peak_to_average(FieldState{}, 16), std::invalid_argument);
}

TEST_CASE("pattern JSON export")
{
    const auto sym = derive_pattern(1, Pol::H, 1.0);
    const auto j = pattern_to_json(sym, 1);
    CHECK(j.dump() == R"({"m":1,"output_pol":"H","bins":[{"t":0,"pol":"H","re":0.7071067811865475,"im":0.0},)"
                      R"({"t":1,"pol":"V","re":-0.7071067811865475,"im":0.0}]})");
    for (int m = 1; m <= 6; ++m)
        for (Pol pol : {Pol::H, Pol::V}) {
            const auto s = derive_pattern(m, pol, 1.0);
            const auto back = pattern_from_json(nlohmann::json::parse(pattern_to_json(s, m).dump()));
            CHECK(back.output_pol == pol);
            CHECK(max_abs_diff(back.pattern, s.pattern) == 0.0);
        }
    auto bad = nlohmann::json::parse(j.dump());
    bad["extra"] = 1;
    CHECK_THROWS_AS(pattern_from_json(bad), std::invalid_argument);
}
