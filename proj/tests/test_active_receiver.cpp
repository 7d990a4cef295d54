#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "srx/active_receiver.hpp"
#include "support.hpp"

using namespace srx;
using srx::testing::max_abs_diff;

TEST_CASE("m=1 module by hand")
{
    const auto chain = synthesize_schedules(1);
    REQUIRE(chain.modules.size() == 1);
    CHECK(chain.modules[0].delay == 1);
    CHECK(chain.modules[0].schedule.swap_bins() == std::vector<std::int64_t>{0});

    // V(+1,+1) -> swap bin 0 -> H at 0, V at 1 -> delay H: bin 1 = (1, 1)
    // -> R -> (0, sqrt2) -> stays in bin 1.
    const auto plus = apply_active_module(encode_bpsk(Codeword(1, 0), 1.0), chain.modules[0]);
    CHECK(plus.start_bin() == 1);
    CHECK(plus.size() == 1);
    CHECK(std::abs(plus.at(1).v - std::sqrt(2.0)) < 1e-15);
    CHECK(total_energy(plus) == doctest::Approx(2.0));

    // V(+1,-1) -> bin 1 = (1, -1) -> R -> (sqrt2, 0) -> delayed to bin 2.
    const auto minus = apply_active_module(encode_bpsk(Codeword(1, 1), 1.0), chain.modules[0]);
    CHECK(minus.start_bin() == 2);
    CHECK(minus.size() == 1);
    CHECK(std::abs(minus.at(2).h - std::sqrt(2.0)) < 1e-15);

    CHECK(apply_active_module(FieldState{}, chain.modules[0]).empty());
    CHECK(chain.position_offset == 1);
}

TEST_CASE("m=2 schedules by hand region tracking")
{
    const auto chain = synthesize_schedules(2);
    REQUIRE(chain.modules.size() == 2);
    CHECK(chain.modules[0].delay == 2);
    CHECK(chain.modules[0].schedule.swap_bins() == std::vector<std::int64_t>{0, 1});
    CHECK(chain.modules[1].delay == 1);
    // One bin in each of the regions [2,4) and [4,6).
    CHECK(chain.modules[1].schedule.swap_bins() == std::vector<std::int64_t>{2, 5});
    CHECK(chain.position_offset == 3);
}

TEST_CASE("module count and delays, m = 1..16")
{
    for (int m = 1; m <= 16; ++m) {
        const auto chain = synthesize_schedules(m);
        REQUIRE(chain.modules.size() == static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) CHECK(chain.modules[static_cast<std::size_t>(i)].delay == (1 << (m - 1 - i)));
        CHECK(chain.position_offset == (std::int64_t{1} << m) - 1);
    }
    CHECK_THROWS_AS(synthesize_schedules(0), std::invalid_argument);
    CHECK_THROWS_AS(synthesize_schedules(17), std::invalid_argument);
}

TEST_CASE("propagate_active examples, m=3")
{
    const auto chain = synthesize_schedules(3);
    const auto c = chain.position_offset;

    const auto out5 = propagate_active(Codeword(3, 0b101), 1.0, chain);
    CHECK(out5.power_at(c + 5) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(total_energy(out5) == doctest::Approx(8.0).epsilon(1e-12));

    const auto out0 = propagate_active(Codeword(3, 0), 1.0, chain);
    CHECK(out0.power_at(c) == doctest::Approx(8.0).epsilon(1e-12));

    CHECK(propagate_active(Codeword(3, 6), 0.0, chain).empty());
    CHECK_THROWS_AS(propagate_active(Codeword(2, 0), 1.0, chain), std::invalid_argument);
}

TEST_CASE("exhaustive concentration, m = 1..8")
{
    for (int m = 1; m <= 8; ++m) {
        const auto chain = synthesize_schedules(m);
        const auto report = verify_concentration(chain, 1e-10);
        CHECK(report.max_leakage <= 1e-10);
        CHECK(report.affine);
        CHECK(report.injective);
        for (std::size_t b = 0; b < report.positions.size(); ++b)
            CHECK(report.positions[b] == chain.position_offset + static_cast<std::int64_t>(b));
    }
}

TEST_CASE("output polarization is definite and matches the synthesis")
{
    for (int m = 1; m <= 6; ++m) {
        const auto chain = synthesize_schedules(m);
        for (std::uint32_t b = 0; b < (1u << m); ++b) {
            const auto out = propagate_active(Codeword(m, b), 1.0, chain);
            const auto cell = out.at(chain.position_offset + b);
            const Pol p = chain.output_pols[b];
            CHECK(std::norm(cell[p]) == doctest::Approx(double(1u << m)).epsilon(1e-12));
            CHECK(std::norm(cell[orthogonal(p)]) < 1e-20);
        }
    }
}

TEST_CASE("pi phase error on the last module misroutes the pulse")
{
    auto chain = synthesize_schedules(1);
    chain.modules.back().phase_error_first = std::numbers::pi;
    const auto report = measure_concentration(chain);
    CHECK(report.max_leakage == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(verify_concentration(chain, 1e-10), ConcentrationFailure);
}

TEST_CASE("energy conservation with random phase errors")
{
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> phase(-3.0, 3.0);
    for (int m = 1; m <= 6; ++m) {
        auto chain = synthesize_schedules(m);
        std::vector<double> errs(2 * static_cast<std::size_t>(m));
        for (auto& e : errs) e = phase(gen);
        set_phase_errors(chain, errs);
        for (std::uint32_t b = 0; b < (1u << m); b += 3) {
            const auto out = propagate_active(Codeword(m, b), {0.6, 0.2}, chain);
            const double expect = (1u << m) * 0.4;
            CHECK(std::abs(total_energy(out) - expect) <= 1e-12 * expect);
        }
    }
    auto chain = synthesize_schedules(2);
    CHECK_THROWS_AS(set_phase_errors(chain, {0.1}), std::invalid_argument);
}

TEST_CASE("chain is linear")
{
    std::mt19937_64 gen(22);
    for (int m = 1; m <= 6; ++m) {
        const auto chain = synthesize_schedules(m);
        std::uniform_int_distribution<std::uint32_t> pick(0, (1u << m) - 1);
        for (int i = 0; i < 10; ++i) {
            const auto x = encode_bpsk(Codeword(m, pick(gen)), 1.0);
            const auto y = encode_bpsk(Codeword(m, pick(gen)), 1.0);
            const auto a = srx::testing::random_scalar(gen);
            const auto b = srx::testing::random_scalar(gen);
            const auto lhs = propagate_active(a * x + b * y, chain);
            const auto rhs = a * propagate_active(x, chain) + b * propagate_active(y, chain);
            CHECK(max_abs_diff(lhs, rhs) <= 1e-12);
        }
    }
}

TEST_CASE("schedules depend on m only")
{
    for (int m = 1; m <= 8; ++m) {
        const auto a = synthesize_schedules(m);
        const auto b = synthesize_schedules(m);
        for (std::size_t i = 0; i < a.modules.size(); ++i)
            CHECK(a.modules[i].schedule == b.modules[i].schedule);
    }
}

TEST_CASE("concentration verdict independent of thread count")
{
    const auto chain = synthesize_schedules(6);
    const auto one = measure_concentration(chain, 1);
    const auto many = measure_concentration(chain, 5);
    CHECK(one.max_leakage == many.max_leakage);
    CHECK(one.positions == many.positions);
}

TEST_CASE("chain JSON matches the golden file")
{
    std::ifstream f(SRX_GOLDEN_DIR "/active_chain_m3.json");
    REQUIRE(f);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(to_json(synthesize_schedules(3)).dump() + "\n" == ss.str());
    CHECK(to_json(synthesize_schedules(2)).dump() ==
          R"({"m":2,"position_offset":3,"modules":[{"delay_T":2,"swap_bins":[0,1]},{"delay_T":1,"swap_bins":[2,5]}]})");
}
