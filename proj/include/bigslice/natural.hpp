#pragma once
// natural.hpp - Arbitrary-precision unsigned integers as little-endian
// vectors of 64-bit limbs, plus the primitive add/sub/shift/compare layer.
//
// Representation: value = sum limbs[i] * B^i with B = 2^64. Canonical form:
// the most significant stored limb is nonzero, or the vector is empty (zero).
// Every operation returns canonical values. Naturals are immutable after
// construction and safe to share across threads.

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bigslice/limb_ops.hpp"

namespace bigslice {

// sub() underflow is distinct from other domain errors so callers that want
// signed-aware behaviour can use sub_signed instead of catching broadly.
class underflow_error : public std::domain_error {
public:
    underflow_error() : std::domain_error("natural subtraction underflow") {}
};

class parse_error : public std::invalid_argument {
public:
    explicit parse_error(const std::string& what) : std::invalid_argument(what) {}
};

class zero_divisor_error : public std::domain_error {
public:
    zero_divisor_error() : std::domain_error("division by zero") {}
};

class Natural {
public:
    Natural() = default;

    static Natural from_limbs(std::vector<limb> limbs) {
        limbs.resize(detail::trimmed_size(limbs.data(), limbs.size()));
        Natural n;
        n.limbs_ = std::move(limbs);
        return n;
    }

    static Natural from_limb_span(std::span<const limb> limbs) {
        return from_limbs(std::vector<limb>(limbs.begin(), limbs.end()));
    }

    static Natural from_u64(limb v) {
        Natural n;
        if (v != 0) n.limbs_.push_back(v);
        return n;
    }

    // 2^bit.
    static Natural power_of_two(std::size_t bit) {
        std::vector<limb> l(bit / 64 + 1, 0);
        l.back() = limb{1} << (bit % 64);
        return from_limbs(std::move(l));
    }

    static Natural from_decimal(std::string_view text);
    std::string to_decimal() const;

    std::span<const limb> limbs() const { return limbs_; }
    std::size_t size() const { return limbs_.size(); }
    bool is_zero() const { return limbs_.empty(); }

    // Limb at position i, zero beyond the stored length.
    limb limb_at(std::size_t i) const { return i < limbs_.size() ? limbs_[i] : 0; }

    std::size_t bit_length() const {
        if (limbs_.empty()) return 0;
        return 64 * limbs_.size() - static_cast<std::size_t>(detail::clz64(limbs_.back()));
    }

    bool bit(std::size_t i) const {
        return (limb_at(i / 64) >> (i % 64)) & 1;
    }

    // 64 bits of the value starting at bit position pos (zero padded above).
    limb bits_at(std::size_t pos) const {
        std::size_t d = pos / 64;
        unsigned off = static_cast<unsigned>(pos % 64);
        limb lo = limb_at(d);
        if (off == 0) return lo;
        return (lo >> off) | (limb_at(d + 1) << (64 - off));
    }

    bool is_power_of_two() const {
        if (limbs_.empty()) return false;
        if ((limbs_.back() & (limbs_.back() - 1)) != 0) return false;
        for (std::size_t i = 0; i + 1 < limbs_.size(); i++) {
            if (limbs_[i] != 0) return false;
        }
        return true;
    }

    friend bool operator==(const Natural& a, const Natural& b) = default;

private:
    std::vector<limb> limbs_;
};

inline std::strong_ordering compare(const Natural& a, const Natural& b) {
    int c = detail::cmp(a.limbs().data(), a.size(), b.limbs().data(), b.size());
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

inline std::strong_ordering operator<=>(const Natural& a, const Natural& b) {
    return compare(a, b);
}

inline Natural add(const Natural& a, const Natural& b) {
    const Natural& lo = a.size() < b.size() ? a : b;
    const Natural& hi = a.size() < b.size() ? b : a;
    std::vector<limb> r(hi.size() + 1);
    limb carry = detail::add(r.data(), hi.limbs().data(), hi.size(),
                             lo.limbs().data(), lo.size());
    r[hi.size()] = carry;
    return Natural::from_limbs(std::move(r));
}

inline Natural sub(const Natural& a, const Natural& b) {
    if (compare(a, b) == std::strong_ordering::less) throw underflow_error();
    std::vector<limb> r(a.size());
    limb borrow = detail::sub(r.data(), a.limbs().data(), a.size(),
                              b.limbs().data(), b.size());
    (void)borrow;
    assert(borrow == 0);
    return Natural::from_limbs(std::move(r));
}

// |a - b| and whether a < b.
inline std::pair<Natural, bool> sub_signed(const Natural& a, const Natural& b) {
    auto order = compare(a, b);
    if (order == std::strong_ordering::less) return {sub(b, a), true};
    return {sub(a, b), false};
}

inline Natural shift_left_bits(const Natural& a, std::size_t n) {
    if (a.is_zero() || n == 0) return a;
    std::size_t limb_shift = n / 64;
    unsigned bit_shift = static_cast<unsigned>(n % 64);
    std::vector<limb> r(a.size() + limb_shift + 1, 0);
    detail::copy_limbs(r.data() + limb_shift, a.limbs().data(), a.size());
    if (bit_shift != 0) {
        r[limb_shift + a.size()] =
            detail::lshift(r.data() + limb_shift, r.data() + limb_shift, a.size(), bit_shift);
    }
    return Natural::from_limbs(std::move(r));
}

inline Natural shift_right_bits(const Natural& a, std::size_t n) {
    if (a.is_zero() || n == 0) return a;
    std::size_t limb_shift = n / 64;
    unsigned bit_shift = static_cast<unsigned>(n % 64);
    if (limb_shift >= a.size()) return Natural();
    std::vector<limb> r(a.limbs().begin() + static_cast<std::ptrdiff_t>(limb_shift),
                        a.limbs().end());
    if (bit_shift != 0) detail::rshift(r.data(), r.data(), r.size(), bit_shift);
    return Natural::from_limbs(std::move(r));
}

// Zero bits above the top set bit of the top limb, 0..63.
inline unsigned leading_zero_bits(const Natural& a) {
    if (a.is_zero()) throw std::domain_error("leading_zero_bits of zero");
    return static_cast<unsigned>(detail::clz64(a.limbs().back()));
}

// Branch-free form of: x >= threshold + 1 ? 0 : x - threshold, everything in
// wrapping uint64 arithmetic. The mask -(x >= threshold+1) is all-ones
// exactly when the zero arm is selected.
inline std::uint64_t branch_free_select(std::uint64_t x, std::uint64_t threshold) {
    std::uint64_t mask = 0 - static_cast<std::uint64_t>(x >= threshold + 1);
    return ~mask & (x - threshold);
}

// ---------------------------------------------------------------------------
// Decimal I/O. Chunked base 10^19 so each chunk is one limb worth of work.

namespace detail {

inline constexpr limb kPow10_19 = 10000000000000000000ULL;

// q[0..n) = a[0..n) / d, returns remainder.
inline limb divrem_1(limb* q, const limb* a, std::size_t n, limb d) {
    assert(d != 0);
    limb rem = 0;
    for (std::size_t i = n; i-- > 0;) {
        uint128 num = (static_cast<uint128>(rem) << 64) | a[i];
        q[i] = static_cast<limb>(num / d);
        rem = static_cast<limb>(num % d);
    }
    return rem;
}

} // namespace detail

inline Natural Natural::from_decimal(std::string_view text) {
    if (text.empty()) throw parse_error("empty decimal string");
    for (char c : text) {
        if (c < '0' || c > '9') throw parse_error("invalid character in decimal string");
    }
    std::vector<limb> acc;
    acc.reserve(text.size() / 19 + 1);
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t take = text.size() - pos;
        std::size_t first = (take % 19 == 0) ? 19 : take % 19;
        limb chunk = 0;
        limb scale = 1;
        for (std::size_t i = 0; i < first; i++) {
            chunk = chunk * 10 + static_cast<limb>(text[pos + i] - '0');
            scale *= 10;
        }
        pos += first;
        limb carry = detail::mul_1(acc.data(), acc.data(), acc.size(), scale);
        if (carry != 0) acc.push_back(carry);
        carry = detail::add_1(acc.data(), acc.data(), acc.size(), chunk);
        if (carry != 0) acc.push_back(carry);
    }
    return Natural::from_limbs(std::move(acc));
}

inline std::string Natural::to_decimal() const {
    if (is_zero()) return "0";
    std::vector<limb> work(limbs_);
    std::string out;
    std::vector<limb> rems;
    std::size_t n = work.size();
    while (n > 0) {
        rems.push_back(detail::divrem_1(work.data(), work.data(), n, detail::kPow10_19));
        n = detail::trimmed_size(work.data(), n);
    }
    // Most significant chunk unpadded, the rest zero padded to 19 digits.
    out = std::to_string(rems.back());
    for (std::size_t i = rems.size() - 1; i-- > 0;) {
        std::string part = std::to_string(rems[i]);
        out.append(19 - part.size(), '0');
        out += part;
    }
    return out;
}

} // namespace bigslice
