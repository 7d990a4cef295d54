#include "srx/hadamard.hpp"

#include <bit>

namespace srx {

Codeword::Codeword(int m, std::uint32_t bits) : m_(m), bits_(bits)
{
    if (m < 1 || m > max_codeword_order)
        throw std::invalid_argument("Codeword: m must be in [1, 16], got " + std::to_string(m));
    if (bits >= (std::uint32_t{1} << m))
        throw std::invalid_argument("Codeword: bits out of range for m=" + std::to_string(m));
}

std::string to_string(const Codeword& c)
{
    std::string s(static_cast<std::size_t>(c.m()), '0');
    for (int k = 0; k < c.m(); ++k)
        if ((c.bits() >> k) & 1u) s[static_cast<std::size_t>(c.m() - 1 - k)] = '1';
    return s;
}

std::vector<int> codeword_signs(const Codeword& c)
{
    std::vector<int> s(c.length());
    for (std::uint32_t t = 0; t < s.size(); ++t)
        s[t] = (std::popcount(c.bits() & t) & 1) ? -1 : 1;
    return s;
}

FieldState encode_bpsk(const Codeword& c, Amplitude alpha)
{
    const auto signs = codeword_signs(c);
    std::vector<Jones> bins(signs.size());
    for (std::size_t t = 0; t < signs.size(); ++t) bins[t].v = static_cast<double>(signs[t]) * alpha;
    return FieldState(0, std::move(bins));
}

Codeword decode_position(std::int64_t bin, int m, std::int64_t offset)
{
    if (m < 1 || m > max_codeword_order)
        throw std::invalid_argument("decode_position: m must be in [1, 16]");
    const auto rel = bin - offset;
    if (rel < 0 || rel >= (std::int64_t{1} << m))
        throw NotASymbol("bin " + std::to_string(bin) + " is outside the symbol range of offset " +
                         std::to_string(offset) + ", m=" + std::to_string(m));
    return Codeword(m, static_cast<std::uint32_t>(rel));
}

} // namespace srx
