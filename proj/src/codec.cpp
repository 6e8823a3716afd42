#include "pupow/codec.hpp"

#include <cmath>
#include <cstring>

#include <openssl/evp.h>

namespace pupow {

namespace {

void evp_digest(const EVP_MD* md, ByteSpan data, std::uint8_t* out, unsigned out_len) {
    unsigned got = 0;
    if (EVP_Digest(data.data(), data.size(), out, &got, md, nullptr) != 1 || got != out_len) {
        throw Error(Errc::internal, "digest computation failed");
    }
}

}  // namespace

Digest256 hash256(ByteSpan data) {
    Digest256 out;
    evp_digest(EVP_sha256(), data, out.bytes.data(), 32);
    return out;
}

Digest512 hash512(ByteSpan data) {
    Digest512 out;
    evp_digest(EVP_sha512(), data, out.bytes.data(), 64);
    return out;
}

Digest256 sha3_256(ByteSpan data) {
    Digest256 out;
    evp_digest(EVP_sha3_256(), data, out.bytes.data(), 32);
    return out;
}

std::string base32_encode(ByteSpan data) {
    static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz234567";
    std::string out;
    out.reserve((data.size() * 8 + 4) / 5);
    std::uint32_t acc = 0;
    int bits = 0;
    for (std::uint8_t byte : data) {
        acc = (acc << 8) | byte;
        bits += 8;
        while (bits >= 5) {
            bits -= 5;
            out.push_back(kAlphabet[(acc >> bits) & 0x1f]);
        }
    }
    if (bits > 0) {
        out.push_back(kAlphabet[(acc << (5 - bits)) & 0x1f]);
    }
    return out;
}

BigInt le_scalar(ByteSpan data) {
    if (data.size() != 32) {
        throw Error(Errc::length, "le_scalar requires exactly 32 bytes, got " +
                                      std::to_string(data.size()));
    }
    BigInt v;
    import_bits(v, data.begin(), data.end(), 8, /*msv_first=*/false);
    return v;
}

Bytes le_bytes(const BigInt& value, std::size_t len) {
    if (value < 0 || (value >> (8 * len)) != 0) {
        throw Error(Errc::range, "value does not fit in " + std::to_string(len) + " bytes");
    }
    Bytes out;
    if (value != 0) {
        export_bits(value, std::back_inserter(out), 8, /*msv_first=*/false);
    }
    out.resize(len, 0);
    return out;
}

std::string to_hex(ByteSpan data) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xf]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) {
        throw Error(Errc::parse, "hex string has odd length");
    }
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]);
        int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            throw Error(Errc::parse, "invalid hex character at position " + std::to_string(i));
        }
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

Digest256 digest_from_hex(std::string_view hex) {
    Bytes raw = from_hex(hex);
    if (raw.size() != 32) {
        throw Error(Errc::length, "digest hex must decode to 32 bytes");
    }
    Digest256 d;
    std::memcpy(d.bytes.data(), raw.data(), 32);
    return d;
}

namespace {

void put_u32(std::uint8_t* p, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void put_u64(std::uint8_t* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace

HeaderBytes header_bytes(const BlockHeader& h) {
    HeaderBytes out;
    std::uint8_t* p = out.data();
    put_u32(p, h.version);
    std::memcpy(p + 4, h.prevhash.bytes.data(), 32);
    std::memcpy(p + 36, h.tx_merkle_root.bytes.data(), 32);
    std::memcpy(p + 68, h.problem_merkle_root.bytes.data(), 32);
    std::memcpy(p + 100, h.problem_hash.bytes.data(), 32);
    put_u64(p + 132, h.difficulty_millibits);
    put_u64(p + kHeaderTimestampOffset, h.timestamp);
    put_u64(p + kHeaderNonceOffset, h.nonce);
    return out;
}

BlockHeader header_decode(ByteSpan data) {
    if (data.size() != kHeaderSize) {
        throw Error(Errc::length, "header must be exactly " + std::to_string(kHeaderSize) +
                                      " bytes, got " + std::to_string(data.size()));
    }
    BlockHeader h;
    const std::uint8_t* p = data.data();
    h.version = get_u32(p);
    std::memcpy(h.prevhash.bytes.data(), p + 4, 32);
    std::memcpy(h.tx_merkle_root.bytes.data(), p + 36, 32);
    std::memcpy(h.problem_merkle_root.bytes.data(), p + 68, 32);
    std::memcpy(h.problem_hash.bytes.data(), p + 100, 32);
    h.difficulty_millibits = get_u64(p + 132);
    h.timestamp = get_u64(p + kHeaderTimestampOffset);
    h.nonce = get_u64(p + kHeaderNonceOffset);
    return h;
}

Digest256 header_hash(const BlockHeader& header) {
    HeaderBytes raw = header_bytes(header);
    return hash256(ByteSpan(raw.data(), raw.size()));
}

std::uint64_t to_millibits(double bits) {
    if (!std::isfinite(bits) || bits < 0.0) {
        throw Error(Errc::range, "difficulty must be a finite nonnegative number of bits");
    }
    return static_cast<std::uint64_t>(std::llround(bits * 1000.0));
}

void ByteWriter::u16(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v));
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
}

void ByteWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(as_span(s));
}

void ByteReader::need(std::size_t n) {
    if (data_.size() - pos_ < n) {
        throw Error(Errc::corrupt, "record truncated: need " + std::to_string(n) +
                                       " bytes, have " + std::to_string(data_.size() - pos_));
    }
}

std::uint8_t ByteReader::u8() {
    need(1);
    return data_[pos_++];
}

std::uint16_t ByteReader::u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = get_u32(data_.data() + pos_);
    pos_ += 4;
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    std::uint64_t v = get_u64(data_.data() + pos_);
    pos_ += 8;
    return v;
}

Bytes ByteReader::raw(std::size_t n) {
    need(n);
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return out;
}

Digest256 ByteReader::digest() {
    need(32);
    Digest256 d;
    std::memcpy(d.bytes.data(), data_.data() + pos_, 32);
    pos_ += 32;
    return d;
}

AccountId ByteReader::account() {
    need(32);
    AccountId a;
    std::memcpy(a.data(), data_.data() + pos_, 32);
    pos_ += 32;
    return a;
}

std::string ByteReader::str() {
    std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
}

}  // namespace pupow
