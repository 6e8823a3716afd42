#include "pupow/splitkey_ed.hpp"

#include <cstring>

namespace pupow::ed {

namespace {

const BigInt& field_prime() {
    static const BigInt p = (BigInt(1) << 255) - 19;
    return p;
}

BigInt fmod(const BigInt& v) {
    BigInt r = v % field_prime();
    if (r < 0) r += field_prime();
    return r;
}

BigInt fmul(const BigInt& a, const BigInt& b) { return (a * b) % field_prime(); }

BigInt fpow(const BigInt& base, const BigInt& exp) {
    return boost::multiprecision::powm(base, exp, field_prime());
}

BigInt finv(const BigInt& a) { return fpow(a, field_prime() - 2); }

const BigInt& curve_d() {
    // -121665/121666 mod p
    static const BigInt d = fmod(BigInt(-121665) * finv(121666));
    return d;
}

const BigInt& curve_2d() {
    static const BigInt d2 = fmod(curve_d() * 2);
    return d2;
}

const BigInt& sqrt_minus_one() {
    static const BigInt s = fpow(2, (field_prime() - 1) / 4);
    return s;
}

}  // namespace

Point identity_point() { return Point{0, 1, 1, 0}; }

const Point& base_point() {
    static const Point b = [] {
        BigInt by = fmod(BigInt(4) * finv(5));
        BigInt bx(
            "15112221349535400772501151409588531511454012693041857206046113283949847762202");
        return Point{bx, by, 1, fmul(bx, by)};
    }();
    return b;
}

// add-2008-hwcd-3: complete for a = -1 twisted Edwards curves, so the same
// formula serves addition, doubling and the identity.
Point point_add(const Point& p, const Point& q) {
    BigInt a = fmul(fmod(p.y - p.x), fmod(q.y - q.x));
    BigInt b = fmul(fmod(p.y + p.x), fmod(q.y + q.x));
    BigInt c = fmul(fmul(p.t, curve_2d()), q.t);
    BigInt d = fmul(fmod(p.z * 2), q.z);
    BigInt e = fmod(b - a);
    BigInt f = fmod(d - c);
    BigInt g = fmod(d + c);
    BigInt h = fmod(b + a);
    return Point{fmul(e, f), fmul(g, h), fmul(f, g), fmul(e, h)};
}

bool point_equal(const Point& p, const Point& q) {
    return fmod(fmul(p.x, q.z) - fmul(q.x, p.z)) == 0 &&
           fmod(fmul(p.y, q.z) - fmul(q.y, p.z)) == 0;
}

Point scalar_mul(const BigInt& s, const Point& p) {
    if (s < 0) {
        throw Error(Errc::range, "scalar must be nonnegative");
    }
    Point r = identity_point();
    if (s == 0) return r;
    for (int i = static_cast<int>(boost::multiprecision::msb(s)); i >= 0; --i) {
        r = point_add(r, r);
        if (boost::multiprecision::bit_test(s, i)) {
            r = point_add(r, p);
        }
    }
    return r;
}

Point scalar_mul_base(const BigInt& s) {
    // table[w][v] = [v * 16^w] B, so a 256-bit scalar costs 64 additions.
    static const auto table = [] {
        std::vector<std::array<Point, 16>> t(64);
        Point step = base_point();
        for (int w = 0; w < 64; ++w) {
            t[w][0] = identity_point();
            for (int v = 1; v < 16; ++v) {
                t[w][v] = point_add(t[w][v - 1], step);
            }
            step = point_add(t[w][15], step);  // 16 * 16^w = 16^(w+1)
        }
        return t;
    }();

    if (s < 0) {
        throw Error(Errc::range, "scalar must be nonnegative");
    }
    if (s >> 256 != 0) {
        return scalar_mul(s, base_point());
    }
    Point r = identity_point();
    BigInt v = s;
    for (int w = 0; w < 64 && v != 0; ++w) {
        unsigned nib = static_cast<unsigned>(v & 0xf);
        if (nib) r = point_add(r, table[w][nib]);
        v >>= 4;
    }
    return r;
}

std::array<std::uint8_t, 32> encode_point(const Point& p) {
    BigInt zinv = finv(p.z);
    BigInt x = fmul(p.x, zinv);
    BigInt y = fmul(p.y, zinv);
    Bytes le = le_bytes(y, 32);
    std::array<std::uint8_t, 32> out{};
    std::memcpy(out.data(), le.data(), 32);
    if (boost::multiprecision::bit_test(x, 0)) {
        out[31] |= 0x80;
    }
    return out;
}

Point decode_point(ByteSpan data) {
    if (data.size() != 32) {
        throw Error(Errc::invalid_proposal, "point encoding must be 32 bytes");
    }
    Bytes le(data.begin(), data.end());
    bool sign = (le[31] & 0x80) != 0;
    le[31] &= 0x7f;
    BigInt y = 0;
    import_bits(y, le.begin(), le.end(), 8, /*msv_first=*/false);
    if (y >= field_prime()) {
        throw Error(Errc::invalid_proposal, "point y coordinate is not canonical");
    }
    BigInt y2 = fmul(y, y);
    BigInt u = fmod(y2 - 1);
    BigInt v = fmod(fmul(curve_d(), y2) + 1);
    BigInt x2 = fmul(u, finv(v));
    BigInt x = fpow(x2, (field_prime() + 3) / 8);
    if (fmod(fmul(x, x) - x2) != 0) {
        x = fmul(x, sqrt_minus_one());
    }
    if (fmod(fmul(x, x) - x2) != 0) {
        throw Error(Errc::invalid_proposal, "encoding is not a curve point");
    }
    if (x == 0 && sign) {
        throw Error(Errc::invalid_proposal, "invalid sign bit for x = 0");
    }
    if (boost::multiprecision::bit_test(x, 0) != sign) {
        x = fmod(-x);
    }
    return Point{x, y, 1, fmul(x, y)};
}

// ---------------------------------------------------------------------------
// Seed expansion and masking
// ---------------------------------------------------------------------------

namespace {

void check_pruned(const std::array<std::uint8_t, 32>& l0, bool require_spare_bit) {
    if (l0[0] & 0x07) {
        throw Error(Errc::invalid_proposal, "low three bits of byte 0 must be clear");
    }
    if (l0[31] & 0x80) {
        throw Error(Errc::invalid_proposal, "top bit of byte 31 must be clear");
    }
    if (!(l0[31] & 0x40)) {
        throw Error(Errc::invalid_proposal, "second-highest bit of byte 31 must be set");
    }
    if (require_spare_bit && (l0[31] & 0x20)) {
        throw Error(Errc::invalid_proposal, "bit 5 of byte 31 must be clear in a key half");
    }
}

BigInt le_value(const std::array<std::uint8_t, 32>& buf) {
    BigInt v = 0;
    import_bits(v, buf.begin(), buf.end(), 8, /*msv_first=*/false);
    return v;
}

}  // namespace

PrunedScalarHalf seed_expand_prune(ByteSpan seed) {
    Digest512 digest = hash512(seed);
    PrunedScalarHalf half;
    std::memcpy(half.l0.data(), digest.bytes.data(), 32);
    std::memcpy(half.right_half.data(), digest.bytes.data() + 32, 32);
    half.l0[0] &= 0xf8;   // clear the low three bits
    half.l0[31] &= 0x7f;  // clear the top bit
    half.l0[31] |= 0x40;  // set the second-highest bit
    half.l0[31] &= 0xdf;  // clear bit 5: carry headroom for s0 + h'
    half.s0 = le_value(half.l0);
    return half;
}

PrunedScalarHalf pruned_half_from_bytes(const std::array<std::uint8_t, 32>& l0,
                                        const std::array<std::uint8_t, 32>& right_half) {
    check_pruned(l0, /*require_spare_bit=*/true);
    PrunedScalarHalf half;
    half.l0 = l0;
    half.right_half = right_half;
    half.s0 = le_value(l0);
    return half;
}

BigInt mask_hash(const Digest256& h) {
    // Clear the 27 low and 27 high bits of the little-endian value, leaving
    // bits 27..228.
    static const BigInt mask = ((BigInt(1) << 229) - 1) & ~((BigInt(1) << 27) - 1);
    return le_scalar(h) & mask;
}

// ---------------------------------------------------------------------------
// Onion addresses
// ---------------------------------------------------------------------------

OnionAddress onion_address(const std::array<std::uint8_t, 32>& pubkey, std::uint8_t version) {
    static constexpr std::string_view kChecksumPrefix = ".onion checksum";
    Bytes checksum_input(kChecksumPrefix.begin(), kChecksumPrefix.end());
    checksum_input.insert(checksum_input.end(), pubkey.begin(), pubkey.end());
    checksum_input.push_back(version);
    Digest256 c = pupow::sha3_256(as_span(checksum_input));

    OnionAddress addr;
    addr.pubkey = pubkey;
    addr.checksum = {c.bytes[0], c.bytes[1]};
    addr.version = version;

    Bytes packed(pubkey.begin(), pubkey.end());
    packed.push_back(addr.checksum[0]);
    packed.push_back(addr.checksum[1]);
    packed.push_back(version);
    addr.text = base32_encode(as_span(packed)) + ".onion";
    return addr;
}

OnionAddress onion_address(const Point& a, std::uint8_t version) {
    return onion_address(encode_point(a), version);
}

// ---------------------------------------------------------------------------
// Mining and recovery
// ---------------------------------------------------------------------------

MinerResult miner_check_ed(const Point& a0, const Digest256& h, const regexdiff::Dfa& pattern) {
    Point a = point_add(a0, scalar_mul_base(mask_hash(h)));
    OnionAddress addr = onion_address(a);
    bool matched = pattern.accepts(addr.body());
    return MinerResult{a, std::move(addr), matched};
}

RecoveredKey recover_scalar(const PrunedScalarHalf& half, const Digest256& h) {
    check_pruned(half.l0, /*require_spare_bit=*/true);
    BigInt hp = mask_hash(h);
    BigInt s = half.s0 + hp;

    // The masked hash leaves the pruned low bits untouched and cannot carry
    // into bit 254, so the standard pruning shape must survive the addition.
    bool ok = (s & 7) == 0 && boost::multiprecision::bit_test(s, 254) && (s >> 255) == 0;
    if (!ok) {
        throw Error(Errc::internal, "carry overflow: s = s0 + h' violates pruning invariants");
    }

    RecoveredKey out;
    out.s = s;
    Bytes le = le_bytes(s, 32);
    std::memcpy(out.left_half.data(), le.data(), 32);
    out.right_half = half.right_half;
    out.a = scalar_mul_base(s);

    Point expected = point_add(scalar_mul_base(half.s0), scalar_mul_base(hp));
    if (!point_equal(out.a, expected)) {
        throw Error(Errc::internal, "[s]B does not match A0 + [h']B");
    }
    out.address = onion_address(out.a);
    return out;
}

// ---------------------------------------------------------------------------
// ProblemType adapter
// ---------------------------------------------------------------------------

namespace {

class VanityEdType final : public ProblemType {
public:
    std::uint16_t tag() const override { return kVanityEdTag; }
    std::string name() const override { return "vanity-ed25519"; }

    void validate_proposal(const ProblemProposal& p) const override {
        if (p.public_params.size() != 32) {
            throw Error(Errc::invalid_proposal, "vanity-ed25519 params must be a 32-byte point");
        }
        decode_point(as_span(p.public_params));
        regexdiff::compile_cached(p.target_regex);
    }

    double difficulty(const ProblemProposal& p) const override {
        auto dfa = regexdiff::compile_cached(p.target_regex);
        return regexdiff::difficulty_bits(*dfa, 56);
    }

    CheckResult check(const Digest256& h, const ProblemProposal& p) const override {
        Point a0 = decode_point(as_span(p.public_params));
        auto dfa = regexdiff::compile_cached(p.target_regex);
        return {miner_check_ed(a0, h, *dfa).matched, false};
    }
};

}  // namespace

std::shared_ptr<const ProblemType> make_vanity_type() {
    return std::make_shared<VanityEdType>();
}

}  // namespace pupow::ed
