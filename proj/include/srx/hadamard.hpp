#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "srx/field.hpp"

namespace srx {

inline constexpr int max_codeword_order = 16;

class NotASymbol : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Row of the 2^m Sylvester Hadamard matrix, labelled by the bit string
/// b_{m-1}...b_1 b_0. Bit k set means the two halves at hierarchy level k
/// carry opposite signs.
class Codeword {
public:
    Codeword(int m, std::uint32_t bits);

    int m() const { return m_; }
    std::uint32_t bits() const { return bits_; }
    std::size_t length() const { return std::size_t{1} << m_; }

    bool operator==(const Codeword&) const = default;

private:
    int m_;
    std::uint32_t bits_;
};

/// MSB-first binary rendering, e.g. Codeword(3, 5) -> "101".
std::string to_string(const Codeword& c);

/// s_t = (-1)^popcount(bits & t), t in [0, 2^m).
std::vector<int> codeword_signs(const Codeword& c);

/// V-polarized pulse train, amplitude s_t * alpha in bin t.
FieldState encode_bpsk(const Codeword& c, Amplitude alpha);

/// Inverse of the output position formula bin = offset + sum b_k 2^k.
Codeword decode_position(std::int64_t bin, int m, std::int64_t offset);

} // namespace srx
