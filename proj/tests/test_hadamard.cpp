#include <doctest.h>

#include <vector>

#include "srx/hadamard.hpp"

using namespace srx;

namespace {

// H_{2n} = [[H_n, H_n], [H_n, -H_n]], starting from H_1 = [1]. Row r of the
// doubled matrix is the bit string of r with the new bit as MSB.
std::vector<std::vector<int>> sylvester(int m)
{
    std::vector<std::vector<int>> h{{1}};
    for (int k = 0; k < m; ++k) {
        const auto n = h.size();
        std::vector<std::vector<int>> d(2 * n, std::vector<int>(2 * n));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                d[r][c] = h[r][c];
                d[r][c + n] = h[r][c];
                d[r + n][c] = h[r][c];
                d[r + n][c + n] = -h[r][c];
            }
        h = std::move(d);
    }
    return h;
}

} // namespace

TEST_CASE("codeword validation")
{
    CHECK_THROWS_AS(Codeword(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(Codeword(17, 0), std::invalid_argument);
    CHECK_THROWS_AS(Codeword(3, 8), std::invalid_argument);
    CHECK_NOTHROW(Codeword(16, 65535));
    CHECK(to_string(Codeword(3, 5)) == "101");
    CHECK(to_string(Codeword(4, 1)) == "0001");
}

TEST_CASE("codeword_signs")
{
    CHECK(codeword_signs(Codeword(3, 0b000)) == std::vector<int>{1, 1, 1, 1, 1, 1, 1, 1});
    CHECK(codeword_signs(Codeword(3, 0b100)) == std::vector<int>{1, 1, 1, 1, -1, -1, -1, -1});
    CHECK(codeword_signs(Codeword(1, 1)) == std::vector<int>{1, -1});
}

TEST_CASE("rows match the Sylvester construction for m <= 6")
{
    for (int m = 1; m <= 6; ++m) {
        const auto h = sylvester(m);
        for (std::uint32_t b = 0; b < h.size(); ++b) CHECK(codeword_signs(Codeword(m, b)) == h[b]);
    }
}

TEST_CASE("orthogonality by brute-force dot products, m <= 6")
{
    for (int m = 1; m <= 6; ++m) {
        const std::uint32_t n = 1u << m;
        for (std::uint32_t a = 0; a < n; ++a) {
            const auto sa = codeword_signs(Codeword(m, a));
            for (std::uint32_t b = 0; b < n; ++b) {
                const auto sb = codeword_signs(Codeword(m, b));
                long dot = 0;
                for (std::uint32_t t = 0; t < n; ++t) dot += sa[t] * sb[t];
                CHECK(dot == (a == b ? static_cast<long>(n) : 0));
            }
        }
    }
}

TEST_CASE("encode_bpsk")
{
    SUBCASE("all-plus row")
    {
        const auto s = encode_bpsk(Codeword(3, 0), 1.0);
        CHECK(s.start_bin() == 0);
        CHECK(s.size() == 8);
        CHECK(total_energy(s) == doctest::Approx(8.0));
        for (std::int64_t t = 0; t < 8; ++t) {
            CHECK(s.at(t).v == Amplitude(1.0));
            CHECK(s.at(t).h == Amplitude(0.0));
        }
    }
    SUBCASE("m=1, b0=1 gives (+1, -1)")
    {
        const auto s = encode_bpsk(Codeword(1, 1), 1.0);
        CHECK(s.at(0).v == Amplitude(1.0));
        CHECK(s.at(1).v == Amplitude(-1.0));
    }
    SUBCASE("zero amplitude")
    {
        CHECK(encode_bpsk(Codeword(4, 9), 0.0).empty());
    }
    SUBCASE("uniform power over the span")
    {
        const Amplitude alpha{0.3, -0.4};
        for (std::uint32_t b = 0; b < 32; ++b) {
            const auto s = encode_bpsk(Codeword(5, b), alpha);
            CHECK(s.size() == 32);
            for (const auto& bin : s.bins()) CHECK(bin.power() == doctest::Approx(std::norm(alpha)).epsilon(1e-15));
        }
    }
}

TEST_CASE("decode_position")
{
    CHECK(decode_position(11, 3, 11).bits() == 0);
    CHECK(decode_position(16, 3, 11).bits() == 0b101);
    CHECK_THROWS_AS(decode_position(11 + 8, 3, 11), NotASymbol);
    CHECK_THROWS_AS(decode_position(10, 3, 11), NotASymbol);
    for (int m = 1; m <= 10; ++m)
        for (std::uint32_t b = 0; b < (1u << m); ++b) {
            std::int64_t position = 0;
            for (int k = 0; k < m; ++k) position += static_cast<std::int64_t>((b >> k) & 1u) << k;
            CHECK(decode_position(position - 3, m, -3) == Codeword(m, b));
        }
}
