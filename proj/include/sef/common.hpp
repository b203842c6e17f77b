#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sef {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// Error hierarchy. The C API maps each class onto a status code, so keep the
// set small and stable.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IntegrityError : public Error {
public:
    using Error::Error;
};

class EmptyPayload : public Error {
public:
    EmptyPayload() : Error("merkle root of an empty transaction list") {}
};

class NoValidChain : public Error {
public:
    NoValidChain() : Error("no candidate header-chain is valid") {}
};

class NotFinalizedError : public Error {
public:
    using Error::Error;
};

class InsufficientDroplets : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Big-endian helpers shared by every on-disk and wire format.
inline void put_u16(Bytes& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_u32(Bytes& out, std::uint32_t v)
{
    for (int shift = 24; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>(v >> shift));
}

inline void put_u64(Bytes& out, std::uint64_t v)
{
    for (int shift = 56; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>(v >> shift));
}

inline std::uint64_t get_be(ByteView in, std::size_t width)
{
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i)
        v = (v << 8) | in[i];
    return v;
}

// Bounds-checked sequential reader over a byte buffer. Running off the end
// throws ParseError.
class Reader {
public:
    explicit Reader(ByteView data) : data_(data) {}

    std::size_t remaining() const { return data_.size() - pos_; }
    std::size_t position() const { return pos_; }
    bool done() const { return pos_ == data_.size(); }

    ByteView take(std::size_t n)
    {
        if (n > remaining())
            throw ParseError("truncated input: wanted " + std::to_string(n) + " bytes, have " +
                             std::to_string(remaining()));
        ByteView out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    std::uint16_t u16() { return static_cast<std::uint16_t>(get_be(take(2), 2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get_be(take(4), 4)); }
    std::uint64_t u64() { return get_be(take(8), 8); }

private:
    ByteView data_;
    std::size_t pos_ = 0;
};

Bytes read_file(const std::string& path);
void write_file(const std::string& path, ByteView data);

} // namespace sef
