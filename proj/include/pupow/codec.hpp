#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace pupow {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;
using BigInt = boost::multiprecision::cpp_int;
using AccountId = std::array<std::uint8_t, 32>;

enum class Errc {
    length,
    range,
    parse,
    unsupported_construct,
    alphabet,
    capacity,
    invalid_proposal,
    degenerate_proposal,
    config,
    dimension,
    internal,
    io,
    corrupt,
    insufficient_funds,
    unknown_type,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

struct Digest256 {
    std::array<std::uint8_t, 32> bytes{};
    auto operator<=>(const Digest256&) const = default;
};

struct Digest512 {
    std::array<std::uint8_t, 64> bytes{};
    auto operator<=>(const Digest512&) const = default;
};

inline ByteSpan as_span(const Digest256& d) { return ByteSpan(d.bytes.data(), d.bytes.size()); }
inline ByteSpan as_span(const Digest512& d) { return ByteSpan(d.bytes.data(), d.bytes.size()); }
inline ByteSpan as_span(const Bytes& b) { return ByteSpan(b.data(), b.size()); }
inline ByteSpan as_span(std::string_view s) {
    return ByteSpan(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

Digest256 hash256(ByteSpan data);
Digest512 hash512(ByteSpan data);
Digest256 sha3_256(ByteSpan data);

inline Digest256 hash256(std::string_view s) { return hash256(as_span(s)); }
inline Digest512 hash512(std::string_view s) { return hash512(as_span(s)); }

/// RFC 4648 base32, lowercase a-z2-7, no padding.
std::string base32_encode(ByteSpan data);

/// Interpret exactly 32 bytes as a little-endian unsigned integer.
BigInt le_scalar(ByteSpan data);
inline BigInt le_scalar(const Digest256& d) { return le_scalar(as_span(d)); }

/// Inverse of le_scalar for values < 2^(8*len).
Bytes le_bytes(const BigInt& value, std::size_t len);

std::string to_hex(ByteSpan data);
Bytes from_hex(std::string_view hex);
Digest256 digest_from_hex(std::string_view hex);

// ---------------------------------------------------------------------------
// Canonical block header
//
// Fixed-width little-endian layout, in order:
//   version u32 | prevhash 32 | tx_merkle_root 32 | problem_merkle_root 32 |
//   problem_hash 32 | difficulty_millibits u64 | timestamp u64 | nonce u64
// ---------------------------------------------------------------------------

struct BlockHeader {
    std::uint32_t version = 1;
    Digest256 prevhash;
    Digest256 tx_merkle_root;
    Digest256 problem_merkle_root;
    Digest256 problem_hash;
    std::uint64_t difficulty_millibits = 0;
    std::uint64_t timestamp = 0;
    std::uint64_t nonce = 0;

    double difficulty_bits() const { return static_cast<double>(difficulty_millibits) / 1000.0; }
    auto operator<=>(const BlockHeader&) const = default;
};

inline constexpr std::size_t kHeaderSize = 156;
inline constexpr std::size_t kHeaderTimestampOffset = 140;
inline constexpr std::size_t kHeaderNonceOffset = 148;

using HeaderBytes = std::array<std::uint8_t, kHeaderSize>;

HeaderBytes header_bytes(const BlockHeader& header);
BlockHeader header_decode(ByteSpan data);
Digest256 header_hash(const BlockHeader& header);

/// Difficulty in bits rounded to nearest millibit. Rejects negative or
/// non-finite input.
std::uint64_t to_millibits(double bits);

// ---------------------------------------------------------------------------
// Canonical binary encoding helpers
// ---------------------------------------------------------------------------

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void raw(ByteSpan data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
    void digest(const Digest256& d) { raw(as_span(d)); }
    void account(const AccountId& a) { raw(ByteSpan(a.data(), a.size())); }
    void str(std::string_view s);

    const Bytes& bytes() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

class ByteReader {
public:
    explicit ByteReader(ByteSpan data) : data_(data) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    Bytes raw(std::size_t n);
    Digest256 digest();
    AccountId account();
    std::string str();

    bool done() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n);
    ByteSpan data_;
    std::size_t pos_ = 0;
};

}  // namespace pupow

template <>
struct std::hash<pupow::Digest256> {
    std::size_t operator()(const pupow::Digest256& d) const noexcept {
        std::size_t h;
        static_assert(sizeof(h) <= 32);
        std::memcpy(&h, d.bytes.data(), sizeof(h));
        return h;
    }
};
