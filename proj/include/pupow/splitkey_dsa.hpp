#pragma once

#include <memory>
#include <string>

#include "pupow/codec.hpp"
#include "pupow/problem.hpp"
#include "pupow/regexdiff.hpp"

namespace pupow::dsa {

inline constexpr std::uint16_t kVanityDsaTag = 5;

struct Params {
    BigInt p;  // prime modulus
    BigInt q;  // prime order of the subgroup, q | p-1
    BigInt g;  // generator of the order-q subgroup

    /// Byte width of serialized group elements: ceil(bitlen(p) / 8).
    std::size_t element_width() const;
    /// Characters in the base32 text of a serialized element.
    int text_length() const;
};

/// Validates primality (deterministic Miller-Rabin at desk scale), q | p-1,
/// g != 1 and g^q = 1 (mod p).
Params gen_params(const BigInt& p, const BigInt& q, const BigInt& g);

/// Exhaustively testable toy group.
Params small_params();     // (23, 11, 4)
/// 256-bit safe-prime group, q = (p-1)/2, g = 4.
Params realistic_params();

struct KeyHalf {
    BigInt x0;  // secret; never serialized into proposals
    BigInt y0;  // public: g^x0 mod p
};

/// y0 = g^x0 mod p; requires 1 <= x0 <= q-1.
KeyHalf puzzler_setup(const Params& params, const BigInt& x0);

BigInt hash_to_exponent(const Params& params, const Digest256& h);

/// Canonical regex-match target: base32 of the element's big-endian bytes,
/// left-padded to element_width().
std::string element_text(const Params& params, const BigInt& y);

struct CheckOut {
    BigInt y;
    bool matched = false;
};

/// y = y0 * g^(h mod q) mod p; matched iff element_text(y) is accepted by
/// the pattern. Requires y0 in the order-q subgroup.
CheckOut miner_check(const Params& params, const BigInt& y0, const Digest256& h,
                     const regexdiff::Dfa& pattern);

struct SolvedKey {
    BigInt x;  // (x0 + h) mod q, with 0 remapped to q
    BigInt y;  // g^x mod p
};

/// x = (x0 + h mod q) mod q. Asserts g^x = y0 * g^h (mod p) before returning.
SolvedKey recover_private(const Params& params, const BigInt& x0, const Digest256& h);

// Proposal params: u16 element byte width, then big-endian fixed-width
// p || q || g || y0.
Bytes encode_vanity_params(const Params& params, const BigInt& y0);
void decode_vanity_params(ByteSpan blob, Params& params, BigInt& y0);

std::shared_ptr<const ProblemType> make_vanity_type();

}  // namespace pupow::dsa
