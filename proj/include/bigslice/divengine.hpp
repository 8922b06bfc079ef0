#pragma once
// divengine.hpp - Division dispatcher and its three regimes.
//
//   divide_classical  schoolbook long division (Knuth-style trial digits,
//                     at most two corrections per digit). Exact; the oracle
//                     for every other path.
//   divide_fast       shifted-inverse division: q' = round(u * w / 2^s) is
//                     within one of the true quotient; a single 64-bit window
//                     of v*q' at a bit address chosen near the top of v
//                     usually settles the +-1 correction in linear time, and
//                     the exact low-product path settles it otherwise (and
//                     produces the remainder when requested).
//   divide_block_short  super-digit short division: u is cut into len(v)-limb
//                     blocks, each step divides (carry:block) by v reusing one
//                     precomputed inverse, so every inner division is the
//                     balanced 2N/N shape.
//
// Rounding q' (rather than truncating) keeps the hard correction cases away
// from exact division: after rounding, u - v*q' lies in (-v, v) and only a
// remainder near +-v/2 stresses the window test, which then simply falls back.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bigslice/mulengine.hpp"
#include "bigslice/natural.hpp"
#include "bigslice/shinv.hpp"
#include "bigslice/sliceprod.hpp"
#include "bigslice/thresholds.hpp"
#include "bigslice/workspace.hpp"

namespace bigslice {

struct DivResult {
    Natural q;
    std::optional<Natural> r;  // absent when only the quotient was requested
};

// Instrumentation for tests: the pre-correction quotient and which way the
// correction went.
struct FastDivProbe {
    Natural q_pre;
    int correction = 0;
    bool window_conclusive = false;
    bool low_path_used = false;
    bool delegated_classical = false;
};

namespace detail {

inline DivResult divrem_single(const Natural& u, limb d) {
    std::vector<limb> q(u.size());
    limb rem = divrem_1(q.data(), u.limbs().data(), u.size(), d);
    return {Natural::from_limbs(std::move(q)), Natural::from_u64(rem)};
}

} // namespace detail

inline DivResult divide_classical(const Natural& u, const Natural& v) {
    if (v.is_zero()) throw zero_divisor_error();
    if (compare(u, v) == std::strong_ordering::less) return {Natural(), u};
    std::size_t n = v.size();
    if (n == 1) return detail::divrem_single(u, v.limbs()[0]);

    unsigned shift = leading_zero_bits(v);
    std::size_t us = u.size();
    std::vector<limb> un(us + 1, 0);
    detail::copy_limbs(un.data(), u.limbs().data(), us);
    std::vector<limb> vn(v.limbs().begin(), v.limbs().end());
    if (shift != 0) {
        un[us] = detail::lshift(un.data(), un.data(), us, shift);
        detail::lshift(vn.data(), vn.data(), n, shift);
    }

    std::size_t m = us - n;
    std::vector<limb> q(m + 1, 0);
    limb v1 = vn[n - 1];
    limb v0 = vn[n - 2];
    for (std::size_t j = m + 1; j-- > 0;) {
        limb u2 = un[j + n];
        limb u1 = un[j + n - 1];
        limb u0 = un[j + n - 2];
        detail::uint128 num = (static_cast<detail::uint128>(u2) << 64) | u1;
        limb qhat = u2 >= v1 ? ~limb{0} : static_cast<limb>(num / v1);
        // Two-limb test brings qhat within one of the true digit.
        for (;;) {
            detail::uint128 rem = num - static_cast<detail::uint128>(qhat) * v1;
            if (rem >> 64) break;
            if (static_cast<detail::uint128>(qhat) * v0 > ((rem << 64) | u0)) {
                qhat--;
                continue;
            }
            break;
        }
        limb borrow = detail::submul_1(un.data() + j, vn.data(), n, qhat);
        limb top = un[j + n];
        un[j + n] = top - borrow;
        if (top < borrow) {
            qhat--;
            limb carry = detail::add_n(un.data() + j, un.data() + j, vn.data(), n);
            un[j + n] += carry;
        }
        q[j] = qhat;
    }

    un.resize(n);
    if (shift != 0) detail::rshift(un.data(), un.data(), n, shift);
    return {Natural::from_limbs(std::move(q)), Natural::from_limbs(std::move(un))};
}

namespace detail {

// Exact quotient limb count: len(u)-len(v), plus one when the top window of u
// is at least v.
inline std::size_t quotient_limbs(const Natural& u, const Natural& v) {
    std::size_t nu = u.size(), nv = v.size();
    if (nu < nv) return 0;
    int c = cmp_n(u.limbs().data() + (nu - nv), v.limbs().data(), nv);
    return nu - nv + (c >= 0 ? 1 : 0);
}

// Truncate a shifted inverse to fewer limbs; the one-sided contract survives
// with ulp_bound 1.
inline ShiftedInverse truncate_inverse(const ShiftedInverse& w, std::size_t k) {
    assert(k <= w.k);
    if (k == w.k) return w;
    ShiftedInverse out;
    out.w = shift_right_bits(w.w, 64 * (w.k - k));
    out.s = w.s - 64 * (w.k - k);
    out.k = k;
    out.ulp_bound = w.ulp_bound == 0 ? 0 : 1;
    return out;
}

inline Natural low_window(const Natural& x, std::size_t n) {
    std::span<const limb> l = x.limbs();
    if (l.size() <= n) return x;
    return Natural::from_limb_span(l.subspan(0, n));
}

// Exact low n limbs of v * q (low slices are exact).
inline Natural low_product(const Natural& v, const Natural& q, std::size_t n,
                           const MuldersConfig& cfg, Workspace& ws) {
    if (v.is_zero() || q.is_zero()) return Natural();
    std::size_t total = v.size() + q.size();
    std::size_t hi = n < total ? n : total;
    ProductSlice s = slice_mulders(v, q, SliceRequest{0, hi, 0}, cfg, ws);
    assert(s.deficit_bound == 1);
    return s.value();
}

struct LowPathResult {
    Natural q;
    Natural r;
    int correction;
};

// Resolve the final quotient and remainder from q_pre (|q - q_pre| <= 1) by
// recovering t = u - v*q_pre, which lies in (-v, 2v), from its residue
// modulo B^(nv+1).
inline LowPathResult resolve_low(const Natural& u, const Natural& v,
                                 const Natural& q_pre, const MuldersConfig& cfg,
                                 Workspace& ws) {
    std::size_t nlow = v.size() + 1;
    Natural p_low = low_product(v, q_pre, nlow, cfg, ws);
    Natural u_low = low_window(u, nlow);
    auto [mag, neg] = sub_signed(u_low, p_low);
    Natural t;
    bool t_neg;
    if (!neg) {
        Natural two_v = shift_left_bits(v, 1);
        if (compare(mag, two_v) == std::strong_ordering::less) {
            t = std::move(mag);
            t_neg = false;
        } else {
            t = sub(Natural::power_of_two(64 * nlow), mag);
            t_neg = true;
        }
    } else {
        if (compare(mag, v) == std::strong_ordering::less) {
            t = std::move(mag);
            t_neg = true;
        } else {
            t = sub(Natural::power_of_two(64 * nlow), mag);
            t_neg = false;
        }
    }
    LowPathResult out;
    if (t_neg) {
        out.q = sub(q_pre, Natural::from_u64(1));
        out.r = sub(v, t);
        out.correction = -1;
    } else if (compare(t, v) != std::strong_ordering::less) {
        out.q = add(q_pre, Natural::from_u64(1));
        out.r = sub(t, v);
        out.correction = 1;
    } else {
        out.q = q_pre;
        out.r = std::move(t);
        out.correction = 0;
    }
    return out;
}

DivResult divide_fast_core(const Natural& u, const Natural& v, bool want_remainder,
                           const DivThresholds& t, Workspace& ws,
                           const MuldersConfig& cfg, FastDivProbe* probe,
                           const ShiftedInverse* shared_inverse);

} // namespace detail

// Shifted-inverse division. The probe, when supplied, records the
// pre-correction quotient estimate.
inline DivResult divide_fast(const Natural& u, const Natural& v,
                             bool want_remainder, const DivThresholds& t,
                             Workspace& ws, FastDivProbe* probe = nullptr) {
    return detail::divide_fast_core(u, v, want_remainder, t, ws,
                                    global_tuning().mulders, probe, nullptr);
}

inline DivResult divide_fast(const Natural& u, const Natural& v,
                             bool want_remainder = true,
                             FastDivProbe* probe = nullptr) {
    return divide_fast(u, v, want_remainder, global_tuning().div,
                       detail::tls_workspace(), probe);
}

namespace detail {

inline DivResult divide_fast_core(const Natural& u, const Natural& v,
                                  bool want_remainder, const DivThresholds&,
                                  Workspace& ws, const MuldersConfig& cfg,
                                  FastDivProbe* probe,
                                  const ShiftedInverse* shared_inverse) {
    if (v.is_zero()) throw zero_divisor_error();
    if (compare(u, v) == std::strong_ordering::less) {
        if (probe != nullptr) *probe = FastDivProbe{};
        return {Natural(), want_remainder ? std::optional<Natural>(u) : std::nullopt};
    }
    std::size_t nv = v.size();
    std::size_t kq = quotient_limbs(u, v);
    if (nv < 2 || kq < 2) {
        // Too small for the window machinery; classical is exact and cheap.
        DivResult res = divide_classical(u, v);
        if (probe != nullptr) {
            probe->q_pre = res.q;
            probe->window_conclusive = true;
            probe->delegated_classical = true;
        }
        if (!want_remainder) res.r.reset();
        return res;
    }

    ShiftedInverse winv;
    if (shared_inverse != nullptr && shared_inverse->k >= kq + 2) {
        winv = truncate_inverse(*shared_inverse, kq + 2);
    } else {
        winv = shifted_inverse(v, kq + 2, ws, cfg);
    }

    // q' = round(u_t * w / 2^sh): high slice of the product, one extra bit
    // kept for round-half-up. The slice deficit is covered by the rounding
    // slack, so |q - q'| <= 1.
    std::size_t nu = u.size();
    std::size_t lt = nu < kq + 4 ? nu : kq + 4;
    Natural ut = top_limbs(u, lt);
    std::size_t sh_total = static_cast<std::size_t>(winv.s) - 64 * (nu - lt);
    std::size_t lx = lt + winv.w.size();
    std::size_t sl = (sh_total - 1) / 64;
    ProductSlice xs = slice_mulders(ut, winv.w, SliceRequest{sl, lx, 2}, cfg, ws);
    Natural half = shift_right_bits(xs.value(), sh_total - 1 - 64 * sl);
    Natural q_pre = shift_right_bits(add(half, Natural::from_u64(1)), 1);
    if (probe != nullptr) {
        probe->q_pre = q_pre;
        probe->window_conclusive = false;
        probe->low_path_used = false;
        probe->delegated_classical = false;
        probe->correction = 0;
    }

    // One-digit correction test: compare 64-bit windows of u and v*q' at a
    // bit address spanning the top bits of v. The window of v*q' can only
    // read low; conclusive zones leave a margin for that plus one borrow.
    std::size_t bl_v = v.bit_length();
    int correction = 0;
    bool conclusive = false;
    if (!q_pre.is_zero() && bl_v >= 64) {
        std::size_t bp = bl_v - 62;
        limb v62 = v.bits_at(bp);
        limb wu = u.bits_at(bp);
        ProductBitWindow pw = product_digit_at_bit(v, q_pre, bp);
        limb d = wu - pw.digit;
        limb margin = pw.max_deficit + 2;
        if (d >= margin && d <= v62 - margin) {
            conclusive = true;
            correction = 0;
        } else if (d >= v62 + margin && d <= 2 * v62 + 1 + margin) {
            conclusive = true;
            correction = 1;
        } else if (d >= ~limb{0} - v62) {  // 2^64 - v62 - 1 and up
            conclusive = true;
            correction = -1;
        }
    }

    if (conclusive) {
        Natural q_final = correction == 0
                              ? q_pre
                              : (correction > 0 ? add(q_pre, Natural::from_u64(1))
                                                : sub(q_pre, Natural::from_u64(1)));
        if (probe != nullptr) {
            probe->window_conclusive = true;
            probe->correction = correction;
        }
        if (!want_remainder) return {std::move(q_final), std::nullopt};
        // r = (u - v*q_final) mod B^(nv+1), known to lie in [0, v).
        Natural p_low = low_product(v, q_final, nv + 1, cfg, ws);
        auto [mag, neg] = sub_signed(low_window(u, nv + 1), p_low);
        Natural r = neg ? sub(Natural::power_of_two(64 * (nv + 1)), mag) : std::move(mag);
        assert(compare(r, v) == std::strong_ordering::less);
        if (probe != nullptr) probe->low_path_used = true;
        return {std::move(q_final), std::move(r)};
    }

    // Window inconclusive: drop back to the exact low-product scheme.
    LowPathResult lp = resolve_low(u, v, q_pre, cfg, ws);
    assert(compare(lp.r, v) == std::strong_ordering::less);
    if (probe != nullptr) {
        probe->low_path_used = true;
        probe->correction = lp.correction;
    }
    if (!want_remainder) return {std::move(lp.q), std::nullopt};
    return {std::move(lp.q), std::move(lp.r)};
}

} // namespace detail

// Super-digit short division: dividend processed in len(v)-limb blocks from
// the top, one shifted inverse of v shared by every block division.
inline DivResult divide_block_short(const Natural& u, const Natural& v,
                                    const DivThresholds& t, Workspace& ws) {
    if (v.is_zero()) throw zero_divisor_error();
    if (compare(u, v) == std::strong_ordering::less) return {Natural(), u};
    const MuldersConfig& cfg = global_tuning().mulders;
    std::size_t nv = v.size();
    std::size_t nu = u.size();
    if (nv < 2 || nu < 2 * nv) {
        return detail::divide_fast_core(u, v, true, t, ws, cfg, nullptr, nullptr);
    }

    ShiftedInverse winv = shifted_inverse(v, nv + 3, ws, cfg);

    std::size_t first = nu % nv == 0 ? nv : nu % nv;
    std::vector<limb> q_limbs(nu, 0);
    Natural carry;
    std::size_t pos = nu;
    while (pos > 0) {
        std::size_t width = pos == nu ? first : nv;
        pos -= width;
        // acc = carry * B^width + block
        std::vector<limb> acc_limbs(u.limbs().begin() + static_cast<std::ptrdiff_t>(pos),
                                    u.limbs().begin() + static_cast<std::ptrdiff_t>(pos + width));
        acc_limbs.resize(width + carry.size());
        detail::copy_limbs(acc_limbs.data() + width, carry.limbs().data(), carry.size());
        Natural acc = Natural::from_limbs(std::move(acc_limbs));
        DivResult step =
            detail::divide_fast_core(acc, v, true, t, ws, cfg, nullptr, &winv);
        assert(step.q.size() <= width);
        detail::copy_limbs(q_limbs.data() + pos, step.q.limbs().data(), step.q.size());
        carry = std::move(*step.r);
    }
    return {Natural::from_limbs(std::move(q_limbs)), std::move(carry)};
}

inline DivResult divide_block_short(const Natural& u, const Natural& v) {
    return divide_block_short(u, v, global_tuning().div, detail::tls_workspace());
}

// Regime dispatcher. Contract identical to divide_classical everywhere.
inline DivResult divide(const Natural& u, const Natural& v, bool want_remainder,
                        const DivThresholds& t, Workspace& ws) {
    if (v.is_zero()) throw zero_divisor_error();
    if (u.is_zero()) return {Natural(), want_remainder ? std::optional<Natural>(Natural())
                                                       : std::nullopt};
    if (compare(u, v) == std::strong_ordering::less) {
        return {Natural(), want_remainder ? std::optional<Natural>(u) : std::nullopt};
    }
    std::size_t kq = detail::quotient_limbs(u, v);
    std::size_t nv = v.size();
    DivResult res;
    if (kq < t.fast_cutoff || nv < t.fast_cutoff) {
        res = divide_classical(u, v);
    } else if (static_cast<double>(kq) > t.block_ratio * static_cast<double>(nv)) {
        res = divide_block_short(u, v, t, ws);
    } else {
        res = detail::divide_fast_core(u, v, want_remainder, t, ws,
                                       global_tuning().mulders, nullptr, nullptr);
    }
    if (!want_remainder) res.r.reset();
    return res;
}

inline DivResult divide(const Natural& u, const Natural& v,
                        bool want_remainder = true) {
    return divide(u, v, want_remainder, global_tuning().div, detail::tls_workspace());
}

} // namespace bigslice
