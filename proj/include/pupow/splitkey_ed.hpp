#pragma once

#include <array>
#include <memory>
#include <string>

#include "pupow/codec.hpp"
#include "pupow/problem.hpp"
#include "pupow/regexdiff.hpp"

namespace pupow::ed {

inline constexpr std::uint16_t kVanityEdTag = 6;
inline constexpr std::uint8_t kOnionVersion = 3;

// ---------------------------------------------------------------------------
// Curve group: twisted Edwards -x^2 + y^2 = 1 + d x^2 y^2 over GF(2^255-19),
// extended coordinates, unified (complete) addition.
// ---------------------------------------------------------------------------

struct Point {
    BigInt x, y, z, t;
};

Point identity_point();
const Point& base_point();
Point point_add(const Point& p, const Point& q);
bool point_equal(const Point& p, const Point& q);

/// Scalars are plain integers; no clamping happens here.
Point scalar_mul(const BigInt& s, const Point& p);
/// Windowed fixed-base multiplication; the table is built once and immutable.
Point scalar_mul_base(const BigInt& s);

std::array<std::uint8_t, 32> encode_point(const Point& p);
/// Throws Errc::invalid_proposal for encodings that are not curve points.
Point decode_point(ByteSpan data);

// ---------------------------------------------------------------------------
// Seed expansion and the split-key bit discipline
// ---------------------------------------------------------------------------

struct PrunedScalarHalf {
    std::array<std::uint8_t, 32> l0{};          // pruned left half of the seed digest
    BigInt s0;                                  // little-endian reading of l0
    std::array<std::uint8_t, 32> right_half{};  // kept for completing the key later
};

/// SHA-512 the seed, take the left half, then prune: clear the low three bits
/// of byte 0, clear bits 7 and 5 of byte 31, set bit 6 of byte 31. The extra
/// bit-5 clear reserves headroom so adding a masked hash can never carry into
/// the fixed top bits.
PrunedScalarHalf seed_expand_prune(ByteSpan seed);

/// Validate an externally supplied left half against the pruning discipline.
PrunedScalarHalf pruned_half_from_bytes(const std::array<std::uint8_t, 32>& l0,
                                        const std::array<std::uint8_t, 32>& right_half);

/// Block-header hash with bits 0..26 and 229..255 cleared, as a little-endian
/// integer.
BigInt mask_hash(const Digest256& h);

// ---------------------------------------------------------------------------
// Onion addresses
// ---------------------------------------------------------------------------

struct OnionAddress {
    std::string text;  // 56 base32 chars + ".onion"
    std::array<std::uint8_t, 32> pubkey{};
    std::array<std::uint8_t, 2> checksum{};
    std::uint8_t version = kOnionVersion;

    std::string_view body() const { return std::string_view(text).substr(0, 56); }
};

OnionAddress onion_address(const Point& a, std::uint8_t version = kOnionVersion);
OnionAddress onion_address(const std::array<std::uint8_t, 32>& pubkey,
                           std::uint8_t version = kOnionVersion);

// ---------------------------------------------------------------------------
// Mining and recovery
// ---------------------------------------------------------------------------

struct MinerResult {
    Point a;
    OnionAddress address;
    bool matched = false;
};

/// A = A0 + [mask_hash(h)]B; matched iff the 56-character address body is
/// accepted by the pattern.
MinerResult miner_check_ed(const Point& a0, const Digest256& h, const regexdiff::Dfa& pattern);

struct RecoveredKey {
    BigInt s;                                   // s0 + h', plain integer addition
    std::array<std::uint8_t, 32> left_half{};   // little-endian s
    std::array<std::uint8_t, 32> right_half{};
    Point a;
    OnionAddress address;
};

/// s = s0 + h'. Asserts the standard pruning invariants still hold and that
/// [s]B equals A0 + [h']B before returning the completed key material.
RecoveredKey recover_scalar(const PrunedScalarHalf& half, const Digest256& h);

std::shared_ptr<const ProblemType> make_vanity_type();

}  // namespace pupow::ed
