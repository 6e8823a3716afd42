#include "pupow/splitkey_dsa.hpp"

#include <algorithm>
#include <cmath>

namespace pupow::dsa {

namespace {

using boost::multiprecision::powm;

// Deterministic Miller-Rabin. The fixed base set decides correctly for all
// n < 3.3e24; beyond that it is a high-confidence probabilistic test, which
// is all the desk-scale presets need.
bool is_prime(const BigInt& n) {
    if (n < 2) return false;
    for (int small : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n == small) return true;
        if (n % small == 0) return false;
    }
    BigInt d = n - 1;
    unsigned r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    for (int base : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        BigInt x = powm(BigInt(base), d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (unsigned i = 1; i < r; ++i) {
            x = (x * x) % n;
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

Bytes be_bytes(const BigInt& value, std::size_t len) {
    Bytes le = le_bytes(value, len);
    std::reverse(le.begin(), le.end());
    return le;
}

BigInt be_scalar(ByteSpan data) {
    BigInt v = 0;
    for (std::uint8_t b : data) v = (v << 8) | b;
    return v;
}

}  // namespace

std::size_t Params::element_width() const {
    return (boost::multiprecision::msb(p) + 1 + 7) / 8;
}

int Params::text_length() const {
    return static_cast<int>((element_width() * 8 + 4) / 5);
}

Params gen_params(const BigInt& p, const BigInt& q, const BigInt& g) {
    if (!is_prime(p)) {
        throw Error(Errc::invalid_proposal, "p is not prime");
    }
    if (!is_prime(q)) {
        throw Error(Errc::invalid_proposal, "q is not prime");
    }
    if ((p - 1) % q != 0) {
        throw Error(Errc::invalid_proposal, "q does not divide p-1");
    }
    if (g <= 1 || g >= p) {
        throw Error(Errc::invalid_proposal, "generator must lie in {2..p-1} and not be trivial");
    }
    if (powm(g, q, p) != 1) {
        throw Error(Errc::invalid_proposal, "g^q != 1 (mod p): g does not generate the order-q "
                                            "subgroup");
    }
    return Params{p, q, g};
}

Params small_params() { return gen_params(23, 11, 4); }

Params realistic_params() {
    // 256-bit safe prime, q = (p-1)/2, g = 2^((p-1)/q) = 4.
    BigInt p("0xc1bb77736557d74e0f7402388c98bc06d12bc24e0901bb1d653019ad548f482b");
    return gen_params(p, (p - 1) / 2, 4);
}

KeyHalf puzzler_setup(const Params& params, const BigInt& x0) {
    if (x0 < 1 || x0 > params.q - 1) {
        throw Error(Errc::range, "secret half must lie in {1..q-1}");
    }
    return KeyHalf{x0, powm(params.g, x0, params.p)};
}

BigInt hash_to_exponent(const Params& params, const Digest256& h) {
    return le_scalar(h) % params.q;
}

std::string element_text(const Params& params, const BigInt& y) {
    Bytes be = be_bytes(y, params.element_width());
    return base32_encode(as_span(be));
}

CheckOut miner_check(const Params& params, const BigInt& y0, const Digest256& h,
                     const regexdiff::Dfa& pattern) {
    if (y0 < 1 || y0 >= params.p || powm(y0, params.q, params.p) != 1) {
        throw Error(Errc::invalid_proposal, "y0 is not in the order-q subgroup");
    }
    BigInt e = hash_to_exponent(params, h);
    BigInt y = (y0 * powm(params.g, e, params.p)) % params.p;
    return CheckOut{y, pattern.accepts(element_text(params, y))};
}

SolvedKey recover_private(const Params& params, const BigInt& x0, const Digest256& h) {
    if (x0 < 1 || x0 > params.q - 1) {
        throw Error(Errc::range, "secret half must lie in {1..q-1}");
    }
    BigInt e = hash_to_exponent(params, h);
    BigInt x = (x0 + e) % params.q;
    if (x == 0) {
        // g^q = g^0 = 1; remap to q to stay inside the declared keyspace.
        x = params.q;
    }
    BigInt y = powm(params.g, x, params.p);
    BigInt expected = (powm(params.g, x0, params.p) * powm(params.g, e, params.p)) % params.p;
    if (y != expected) {
        throw Error(Errc::internal, "recovered key does not reproduce y0 * g^h");
    }
    return SolvedKey{x, y};
}

// ---------------------------------------------------------------------------
// Proposal params codec
// ---------------------------------------------------------------------------

Bytes encode_vanity_params(const Params& params, const BigInt& y0) {
    std::size_t w = params.element_width();
    ByteWriter writer;
    writer.u16(static_cast<std::uint16_t>(w));
    writer.raw(as_span(be_bytes(params.p, w)));
    writer.raw(as_span(be_bytes(params.q, w)));
    writer.raw(as_span(be_bytes(params.g, w)));
    writer.raw(as_span(be_bytes(y0, w)));
    return writer.take();
}

void decode_vanity_params(ByteSpan blob, Params& params, BigInt& y0) {
    ByteReader r(blob);
    std::size_t w = r.u16();
    if (w == 0) {
        throw Error(Errc::invalid_proposal, "element width must be positive");
    }
    params.p = be_scalar(as_span(r.raw(w)));
    params.q = be_scalar(as_span(r.raw(w)));
    params.g = be_scalar(as_span(r.raw(w)));
    y0 = be_scalar(as_span(r.raw(w)));
    if (!r.done()) {
        throw Error(Errc::invalid_proposal, "trailing bytes in vanity-dsa params");
    }
}

// ---------------------------------------------------------------------------
// ProblemType adapter
// ---------------------------------------------------------------------------

namespace {

class VanityDsaType final : public ProblemType {
public:
    std::uint16_t tag() const override { return kVanityDsaTag; }
    std::string name() const override { return "vanity-dsa"; }

    void validate_proposal(const ProblemProposal& p) const override {
        Params params;
        BigInt y0;
        decode_vanity_params(as_span(p.public_params), params, y0);
        gen_params(params.p, params.q, params.g);
        if (y0 < 1 || y0 >= params.p ||
            boost::multiprecision::powm(y0, params.q, params.p) != 1) {
            throw Error(Errc::invalid_proposal, "y0 is not in the order-q subgroup");
        }
        regexdiff::compile_cached(p.target_regex);
    }

    double difficulty(const ProblemProposal& p) const override {
        Params params;
        BigInt y0;
        decode_vanity_params(as_span(p.public_params), params, y0);
        auto dfa = regexdiff::compile_cached(p.target_regex);
        return regexdiff::difficulty_bits(*dfa, params.text_length());
    }

    CheckResult check(const Digest256& h, const ProblemProposal& p) const override {
        Params params;
        BigInt y0;
        decode_vanity_params(as_span(p.public_params), params, y0);
        auto dfa = regexdiff::compile_cached(p.target_regex);
        return {miner_check(params, y0, h, *dfa).matched, false};
    }
};

}  // namespace

std::shared_ptr<const ProblemType> make_vanity_type() {
    return std::make_shared<VanityDsaType>();
}

}  // namespace pupow::dsa
