#pragma once
// limb_ops.hpp - Low-level kernels on little-endian uint64 limb arrays.
//
// Everything here works on raw pointers/lengths so the higher layers can run
// over workspace buffers without allocation. Carry discipline: every routine
// states what it returns and what it may clobber.

#include <cassert>
#include <cstdint>
#include <cstring>
#include <span>

namespace bigslice {

using limb = std::uint64_t;
inline constexpr unsigned kLimbBits = 64;

namespace detail {

using uint128 = unsigned __int128;

// 64x64 -> 128 multiply.
inline void umul64(limb a, limb b, limb& hi, limb& lo) {
    uint128 p = static_cast<uint128>(a) * b;
    hi = static_cast<limb>(p >> 64);
    lo = static_cast<limb>(p);
}

inline int clz64(limb x) {
    assert(x != 0);
    return __builtin_clzll(x);
}

inline void zero_limbs(limb* p, std::size_t n) {
    std::memset(p, 0, n * sizeof(limb));
}

inline void copy_limbs(limb* dst, const limb* src, std::size_t n) {
    std::memmove(dst, src, n * sizeof(limb));
}

// Significant length after stripping leading zero limbs.
inline std::size_t trimmed_size(const limb* p, std::size_t n) {
    while (n > 0 && p[n - 1] == 0) n--;
    return n;
}

// r[0..n) = a[0..n) + b[0..n), returns carry.
inline limb add_n(limb* r, const limb* a, const limb* b, std::size_t n) {
    limb carry = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        uint128 s0 = static_cast<uint128>(a[i]) + b[i] + carry;
        uint128 s1 = static_cast<uint128>(a[i + 1]) + b[i + 1] +
                     static_cast<limb>(s0 >> 64);
        uint128 s2 = static_cast<uint128>(a[i + 2]) + b[i + 2] +
                     static_cast<limb>(s1 >> 64);
        uint128 s3 = static_cast<uint128>(a[i + 3]) + b[i + 3] +
                     static_cast<limb>(s2 >> 64);
        r[i] = static_cast<limb>(s0);
        r[i + 1] = static_cast<limb>(s1);
        r[i + 2] = static_cast<limb>(s2);
        r[i + 3] = static_cast<limb>(s3);
        carry = static_cast<limb>(s3 >> 64);
    }
    for (; i < n; i++) {
        uint128 s = static_cast<uint128>(a[i]) + b[i] + carry;
        r[i] = static_cast<limb>(s);
        carry = static_cast<limb>(s >> 64);
    }
    return carry;
}

// r[0..n) = a[0..n) + b, returns carry.
inline limb add_1(limb* r, const limb* a, std::size_t n, limb b) {
    limb carry = b;
    for (std::size_t i = 0; i < n; i++) {
        uint128 s = static_cast<uint128>(a[i]) + carry;
        r[i] = static_cast<limb>(s);
        carry = static_cast<limb>(s >> 64);
        if (carry == 0) {
            if (r != a) copy_limbs(r + i + 1, a + i + 1, n - i - 1);
            return 0;
        }
    }
    return carry;
}

// r[0..an) = a[0..an) + b[0..bn), an >= bn. Returns carry.
inline limb add(limb* r, const limb* a, std::size_t an, const limb* b, std::size_t bn) {
    assert(an >= bn);
    limb carry = add_n(r, a, b, bn);
    if (an > bn) return add_1(r + bn, a + bn, an - bn, carry);
    return carry;
}

// r[0..n) = a[0..n) - b[0..n), returns borrow.
inline limb sub_n(limb* r, const limb* a, const limb* b, std::size_t n) {
    limb borrow = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        uint128 d0 = static_cast<uint128>(a[i]) - b[i] - borrow;
        uint128 d1 = static_cast<uint128>(a[i + 1]) - b[i + 1] -
                     (static_cast<limb>(d0 >> 64) & 1);
        uint128 d2 = static_cast<uint128>(a[i + 2]) - b[i + 2] -
                     (static_cast<limb>(d1 >> 64) & 1);
        uint128 d3 = static_cast<uint128>(a[i + 3]) - b[i + 3] -
                     (static_cast<limb>(d2 >> 64) & 1);
        r[i] = static_cast<limb>(d0);
        r[i + 1] = static_cast<limb>(d1);
        r[i + 2] = static_cast<limb>(d2);
        r[i + 3] = static_cast<limb>(d3);
        borrow = static_cast<limb>(d3 >> 64) & 1;
    }
    for (; i < n; i++) {
        uint128 d = static_cast<uint128>(a[i]) - b[i] - borrow;
        r[i] = static_cast<limb>(d);
        borrow = static_cast<limb>(d >> 64) & 1;
    }
    return borrow;
}

// r[0..n) = a[0..n) - b, returns borrow.
inline limb sub_1(limb* r, const limb* a, std::size_t n, limb b) {
    limb borrow = b;
    for (std::size_t i = 0; i < n; i++) {
        uint128 d = static_cast<uint128>(a[i]) - borrow;
        r[i] = static_cast<limb>(d);
        borrow = static_cast<limb>(d >> 64) & 1;
        if (borrow == 0) {
            if (r != a) copy_limbs(r + i + 1, a + i + 1, n - i - 1);
            return 0;
        }
    }
    return borrow;
}

// r[0..an) = a[0..an) - b[0..bn), an >= bn. Returns borrow.
inline limb sub(limb* r, const limb* a, std::size_t an, const limb* b, std::size_t bn) {
    assert(an >= bn);
    limb borrow = sub_n(r, a, b, bn);
    if (an > bn) return sub_1(r + bn, a + bn, an - bn, borrow);
    return borrow;
}

// Compare a[0..n) with b[0..n): -1, 0, 1.
inline int cmp_n(const limb* a, const limb* b, std::size_t n) {
    for (std::size_t i = n; i-- > 0;) {
        if (a[i] != b[i]) return a[i] > b[i] ? 1 : -1;
    }
    return 0;
}

// Compare values with possibly different stored lengths.
inline int cmp(const limb* a, std::size_t an, const limb* b, std::size_t bn) {
    an = trimmed_size(a, an);
    bn = trimmed_size(b, bn);
    if (an != bn) return an > bn ? 1 : -1;
    return cmp_n(a, b, an);
}

// r[0..n) = a[0..n) << cnt within the window, 0 < cnt < 64.
// Returns the bits shifted out of the top. Safe for r == a.
inline limb lshift(limb* r, const limb* a, std::size_t n, unsigned cnt) {
    assert(cnt > 0 && cnt < kLimbBits && n > 0);
    unsigned rcnt = kLimbBits - cnt;
    limb out = a[n - 1] >> rcnt;
    for (std::size_t i = n - 1; i > 0; i--) {
        r[i] = (a[i] << cnt) | (a[i - 1] >> rcnt);
    }
    r[0] = a[0] << cnt;
    return out;
}

// r[0..n) = a[0..n) >> cnt, 0 < cnt < 64. Returns bits shifted out of the
// bottom (in the high end of the returned limb). Safe for r == a.
inline limb rshift(limb* r, const limb* a, std::size_t n, unsigned cnt) {
    assert(cnt > 0 && cnt < kLimbBits && n > 0);
    unsigned rcnt = kLimbBits - cnt;
    limb out = a[0] << rcnt;
    for (std::size_t i = 0; i + 1 < n; i++) {
        r[i] = (a[i] >> cnt) | (a[i + 1] << rcnt);
    }
    r[n - 1] = a[n - 1] >> cnt;
    return out;
}

// r[0..n) = a[0..n) * b, returns carry limb.
inline limb mul_1(limb* r, const limb* a, std::size_t n, limb b) {
    limb carry = 0;
    for (std::size_t i = 0; i < n; i++) {
        uint128 p = static_cast<uint128>(a[i]) * b + carry;
        r[i] = static_cast<limb>(p);
        carry = static_cast<limb>(p >> 64);
    }
    return carry;
}

// r[0..n) += a[0..n) * b, returns carry limb.
inline limb addmul_1(limb* r, const limb* a, std::size_t n, limb b) {
    limb carry = 0;
    for (std::size_t i = 0; i < n; i++) {
        uint128 p = static_cast<uint128>(a[i]) * b + carry + r[i];
        r[i] = static_cast<limb>(p);
        carry = static_cast<limb>(p >> 64);
    }
    return carry;
}

// Unrolled addmul_1 for the hot base case of the product recursion.
inline limb addmul_1_fast(limb* r, const limb* a, std::size_t n, limb b) {
    limb carry = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        uint128 p0 = static_cast<uint128>(a[i]) * b + r[i] + carry;
        uint128 p1 = static_cast<uint128>(a[i + 1]) * b + r[i + 1] +
                     static_cast<limb>(p0 >> 64);
        uint128 p2 = static_cast<uint128>(a[i + 2]) * b + r[i + 2] +
                     static_cast<limb>(p1 >> 64);
        uint128 p3 = static_cast<uint128>(a[i + 3]) * b + r[i + 3] +
                     static_cast<limb>(p2 >> 64);
        r[i] = static_cast<limb>(p0);
        r[i + 1] = static_cast<limb>(p1);
        r[i + 2] = static_cast<limb>(p2);
        r[i + 3] = static_cast<limb>(p3);
        carry = static_cast<limb>(p3 >> 64);
    }
    for (; i < n; i++) {
        uint128 p = static_cast<uint128>(a[i]) * b + carry + r[i];
        r[i] = static_cast<limb>(p);
        carry = static_cast<limb>(p >> 64);
    }
    return carry;
}

// r[0..n) -= a[0..n) * b, returns borrow limb.
inline limb submul_1(limb* r, const limb* a, std::size_t n, limb b) {
    limb borrow = 0;
    for (std::size_t i = 0; i < n; i++) {
        uint128 p = static_cast<uint128>(a[i]) * b + borrow;
        limb plo = static_cast<limb>(p);
        borrow = static_cast<limb>(p >> 64);
        uint128 d = static_cast<uint128>(r[i]) - plo;
        r[i] = static_cast<limb>(d);
        borrow += static_cast<limb>(d >> 64) & 1;
    }
    return borrow;
}

// acc[off..) += a[0..n) * b, propagating the final carry through the rest of
// acc. A carry out of the top of acc is dropped (callers size acc so that the
// drop can only concern columns they do not deliver).
inline void addmul_1_at(limb* acc, std::size_t acc_len, std::size_t off,
                        const limb* a, std::size_t n, limb b) {
    assert(off + n <= acc_len);
    limb carry = addmul_1(acc + off, a, n, b);
    std::size_t i = off + n;
    while (carry != 0 && i < acc_len) {
        uint128 s = static_cast<uint128>(acc[i]) + carry;
        acc[i] = static_cast<limb>(s);
        carry = static_cast<limb>(s >> 64);
        i++;
    }
}

// acc[off..) += a[0..n), propagating carry; overflow past acc is dropped.
inline void add_at(limb* acc, std::size_t acc_len, std::size_t off,
                   const limb* a, std::size_t n) {
    assert(off <= acc_len);
    if (n > acc_len - off) n = acc_len - off;
    limb carry = add_n(acc + off, acc + off, a, n);
    std::size_t i = off + n;
    while (carry != 0 && i < acc_len) {
        uint128 s = static_cast<uint128>(acc[i]) + carry;
        acc[i] = static_cast<limb>(s);
        carry = static_cast<limb>(s >> 64);
        i++;
    }
}

// q[0..n) = a[0..n) / d, returns the remainder.
inline limb divrem_1_raw(limb* q, const limb* a, std::size_t n, limb d) {
    assert(d != 0);
    limb rem = 0;
    for (std::size_t i = n; i-- > 0;) {
        uint128 num = (static_cast<uint128>(rem) << 64) | a[i];
        q[i] = static_cast<limb>(num / d);
        rem = static_cast<limb>(num % d);
    }
    return rem;
}

// Schoolbook long division with normalization and two-limb trial digits (at
// most two corrections per digit). Writes nu-nv+1 quotient limbs and nv
// remainder limbs, both untrimmed.
// Preconditions: nv >= 2, top limb of v nonzero, value(u) >= value(v).
inline void divmod_knuth(const limb* u, std::size_t nu, const limb* v, std::size_t nv,
                         std::vector<limb>& q, std::vector<limb>& r) {
    assert(nv >= 2 && v[nv - 1] != 0 && nu >= nv);
    unsigned shift = static_cast<unsigned>(clz64(v[nv - 1]));
    std::vector<limb> un(nu + 1, 0);
    copy_limbs(un.data(), u, nu);
    std::vector<limb> vn(v, v + nv);
    if (shift != 0) {
        un[nu] = lshift(un.data(), un.data(), nu, shift);
        lshift(vn.data(), vn.data(), nv, shift);
    }

    std::size_t m = nu - nv;
    q.assign(m + 1, 0);
    limb v1 = vn[nv - 1];
    limb v0 = vn[nv - 2];
    for (std::size_t j = m + 1; j-- > 0;) {
        limb u2 = un[j + nv];
        limb u1 = un[j + nv - 1];
        limb u0 = un[j + nv - 2];
        uint128 num = (static_cast<uint128>(u2) << 64) | u1;
        limb qhat = u2 >= v1 ? ~limb{0} : static_cast<limb>(num / v1);
        for (;;) {
            uint128 rem = num - static_cast<uint128>(qhat) * v1;
            if (rem >> 64) break;
            if (static_cast<uint128>(qhat) * v0 > ((rem << 64) | u0)) {
                qhat--;
                continue;
            }
            break;
        }
        limb borrow = submul_1(un.data() + j, vn.data(), nv, qhat);
        limb top = un[j + nv];
        un[j + nv] = top - borrow;
        if (top < borrow) {
            qhat--;
            limb carry = add_n(un.data() + j, un.data() + j, vn.data(), nv);
            un[j + nv] += carry;
        }
        q[j] = qhat;
    }

    un.resize(nv);
    if (shift != 0) rshift(un.data(), un.data(), nv, shift);
    r = std::move(un);
}

} // namespace detail
} // namespace bigslice
