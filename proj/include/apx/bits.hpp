#ifndef APX_BITS_HPP
#define APX_BITS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace apx {

// Bit strings are vectors of 0/1 bytes. Position i of the string is bit i+1
// of a circuit input; the last element is the "rightmost" bit.
using Bits = std::vector<uint8_t>;

inline std::string to_string(const Bits& b) {
    std::string s;
    s.reserve(b.size());
    for (uint8_t v : b) s.push_back(v ? '1' : '0');
    return s;
}

inline Bits bits_from_string(std::string_view s) {
    Bits b;
    b.reserve(s.size());
    for (char c : s) {
        if (c == '0') b.push_back(0);
        else if (c == '1') b.push_back(1);
        else throw std::invalid_argument("bit string may contain only 0/1");
    }
    return b;
}

// Interprets bit i (1-based) as weight 2^(i-1), so the rightmost bit is the
// most significant one. Matches the threshold-circuit encoding.
inline uint64_t bits_to_index(const Bits& b) {
    uint64_t v = 0;
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b[i]) v |= (uint64_t{1} << i);
    return v;
}

inline Bits index_to_bits(uint64_t v, std::size_t n) {
    Bits b(n, 0);
    for (std::size_t i = 0; i < n; ++i) b[i] = (v >> i) & 1;
    return b;
}

inline Bits concat(const Bits& a, const Bits& b) {
    Bits r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

inline Bits xor_bits(const Bits& a, const Bits& b) {
    if (a.size() != b.size()) throw std::invalid_argument("xor: length mismatch");
    Bits r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] ^ b[i];
    return r;
}

inline std::size_t hamming_weight(const Bits& b) {
    std::size_t w = 0;
    for (uint8_t v : b) w += v;
    return w;
}

// Minimal bit-level writer/reader used by the compact circuit encoding and
// the compressor tuple packing.
class BitWriter {
public:
    void put(int bit) { bits_.push_back(static_cast<uint8_t>(bit & 1)); }
    void put_bits(uint64_t value, std::size_t width) {
        for (std::size_t i = 0; i < width; ++i) put(static_cast<int>((value >> (width - 1 - i)) & 1));
    }
    // Elias gamma code for v >= 1.
    void put_gamma(uint64_t v) {
        if (v == 0) throw std::invalid_argument("gamma code needs v >= 1");
        std::size_t len = 0;
        for (uint64_t t = v; t > 1; t >>= 1) ++len;
        for (std::size_t i = 0; i < len; ++i) put(0);
        put_bits(v, len + 1);
    }
    const Bits& bits() const { return bits_; }
    std::size_t size() const { return bits_.size(); }

private:
    Bits bits_;
};

class BitReader {
public:
    explicit BitReader(const Bits& bits) : bits_(bits) {}
    int get() {
        if (pos_ >= bits_.size()) throw std::out_of_range("bit stream exhausted");
        return bits_[pos_++];
    }
    uint64_t get_bits(std::size_t width) {
        uint64_t v = 0;
        for (std::size_t i = 0; i < width; ++i) v = (v << 1) | static_cast<uint64_t>(get());
        return v;
    }
    uint64_t get_gamma() {
        std::size_t len = 0;
        while (get() == 0) ++len;
        uint64_t v = 1;
        for (std::size_t i = 0; i < len; ++i) v = (v << 1) | static_cast<uint64_t>(get());
        return v;
    }
    std::size_t position() const { return pos_; }

private:
    const Bits& bits_;
    std::size_t pos_ = 0;
};

inline std::size_t ceil_log2(uint64_t v) {
    std::size_t r = 0;
    uint64_t p = 1;
    while (p < v) { p <<= 1; ++r; }
    return r;
}

} // namespace apx

#endif
