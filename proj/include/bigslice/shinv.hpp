#pragma once
// shinv.hpp - Shifted inverse: an integer w and a bit shift s with
// w ~= floor(2^s / v), computed by Newton-Raphson with per-step precision
// doubling. Every intermediate stays an integer; the only "fraction" anywhere
// is the implicit scale 2^s.
//
// Conventions. For a divisor v with top bit set after normalization and a
// requested precision of k limbs, s = 64k - 1 + bit_length(v); then
// floor(2^s / v) occupies exactly k limbs with its top bit set (the power of
// two case is exact and handled separately). The result contract is one-sided:
//     w <= floor(2^s / v) <= w + ulp_bound,   ulp_bound <= 2.
// Iterates never overshoot: every product the step consumes comes from a
// slice that can only fall short, every correction is clamped low, and a
// Newton step from below stays below.
//
// The step at target precision k' consumes only the digits that matter:
// the top min(len(v), k'+2) limbs of v enter a windowed product against the
// current w (the limbs that would cancel against the implicit 1 are never
// formed), and the correction term is multiplied by w keeping only its top
// digits. Guard limbs absorb slice deficits; see sliceprod.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bigslice/mulengine.hpp"
#include "bigslice/natural.hpp"
#include "bigslice/sliceprod.hpp"
#include "bigslice/thresholds.hpp"
#include "bigslice/workspace.hpp"

namespace bigslice {

struct ShiftedInverse {
    Natural w;                 // k limbs of reciprocal digits
    std::uint64_t s = 0;       // w approximates floor(2^s / v)
    std::size_t k = 0;         // requested precision in limbs
    unsigned ulp_bound = 0;    // w <= floor(2^s/v) <= w + ulp_bound
};

struct NormalizedDivisor {
    Natural v_norm;            // v << shift, top bit of top limb set
    unsigned shift = 0;
    bool power_of_two = false;
};

inline NormalizedDivisor normalize(const Natural& v) {
    if (v.is_zero()) throw zero_divisor_error();
    NormalizedDivisor out;
    out.shift = leading_zero_bits(v);
    out.power_of_two = v.is_power_of_two();
    out.v_norm = out.shift == 0 ? v : shift_left_bits(v, out.shift);
    return out;
}

// Ascending limb precisions ending at the target, each step at most a
// doubling less one (k_next <= 2k - 1 keeps the quadratic error term under
// one output ulp; the odd-target case lands exactly on 2k - 1).
struct PrecisionSchedule {
    std::vector<std::size_t> steps;

    static PrecisionSchedule for_target(std::size_t k) {
        PrecisionSchedule sched;
        std::size_t t = k;
        while (t > 2) {
            sched.steps.push_back(t);
            t = t / 2 + 1;
        }
        sched.steps.push_back(t < 2 ? k : 2);
        for (std::size_t i = 0, j = sched.steps.size() - 1; i < j; i++, j--) {
            std::swap(sched.steps[i], sched.steps[j]);
        }
        return sched;
    }

    bool valid_for(std::size_t k) const {
        if (steps.empty() || steps.back() != k) return false;
        for (std::size_t i = 0; i + 1 < steps.size(); i++) {
            if (steps[i] >= steps[i + 1]) return false;
            if (steps[i + 1] > 2 * steps[i] + 1) return false;
        }
        return true;
    }
};

namespace detail {

// floor(2^exp / d) for a small d (here <= 4 limbs, top bit set), by binary
// restoring division. Only used once per inverse, on tiny operands.
inline std::vector<limb> pow2_div_small(std::size_t exp, const std::vector<limb>& d) {
    std::size_t qlimbs = exp / 64 + 1;
    std::vector<limb> q(qlimbs, 0);
    std::vector<limb> rem(d.size() + 1, 0);
    rem[0] = 1;  // consume the single set bit of the numerator
    for (std::size_t bit = exp; bit-- > 0;) {
        limb top = lshift(rem.data(), rem.data(), rem.size(), 1);
        (void)top;
        assert(top == 0);
        if (cmp(rem.data(), rem.size(), d.data(), d.size()) >= 0) {
            sub(rem.data(), rem.data(), rem.size(), d.data(), d.size());
            q[bit / 64] |= limb{1} << (bit % 64);
        }
    }
    return q;
}

inline Natural top_limbs(const Natural& v, std::size_t m) {
    std::span<const limb> l = v.limbs();
    return Natural::from_limb_span(l.subspan(l.size() - m, m));
}

inline ShiftedInverse exact_power_of_two_inverse(const Natural& v, std::size_t k) {
    // v = 2^e: floor(2^s / v) = 2^(s-e) exactly; pick s so w = B^(k-1).
    std::size_t e = v.bit_length() - 1;
    ShiftedInverse out;
    out.w = Natural::power_of_two(64 * (k - 1));
    out.s = 64 * (k - 1) + e;
    out.k = k;
    out.ulp_bound = 0;
    return out;
}

} // namespace detail

// Two-limb starting approximation from the top (up to four) limbs of the
// normalized divisor, rounded down so the one-sided contract holds from the
// start. Exact when the divisor itself fits in four limbs.
inline ShiftedInverse initial_inverse(const Natural& v_norm) {
    if (v_norm.is_zero()) throw zero_divisor_error();
    if (v_norm.is_power_of_two()) {
        throw std::invalid_argument("initial_inverse: power-of-two divisor is special-cased");
    }
    if (leading_zero_bits(v_norm) != 0) {
        throw std::invalid_argument("initial_inverse requires a normalized divisor");
    }
    std::size_t nv = v_norm.size();
    std::size_t m = nv < 4 ? nv : 4;
    Natural top = detail::top_limbs(v_norm, m);
    std::vector<limb> d(top.limbs().begin(), top.limbs().end());
    unsigned ulp = 0;
    if (nv > m) {
        // Divide by top+1 so the discarded tail cannot push us high.
        if (detail::add_1(d.data(), d.data(), d.size(), 1) != 0) {
            // top+1 = B^m: the quotient is exactly 2^127.
            ShiftedInverse out;
            out.w = Natural::power_of_two(127);
            out.s = 127 + 64 * nv;
            out.k = 2;
            out.ulp_bound = 1;
            return out;
        }
        ulp = 1;
    }
    std::vector<limb> q = detail::pow2_div_small(127 + 64 * m, d);
    ShiftedInverse out;
    out.w = Natural::from_limbs({q[0], q[1]});
    out.s = 127 + 64 * nv;
    out.k = 2;
    out.ulp_bound = ulp;
    assert(out.w.size() == 2);
    return out;
}

namespace detail {

// One Newton step with k_next <= 2k - 1, where the quadratic error term
// stays below one output ulp.
inline ShiftedInverse refine_single(const ShiftedInverse& w_k, const Natural& vn,
                                    std::uint64_t s_in, std::size_t k_next,
                                    Workspace& ws, const MuldersConfig& cfg) {
    std::size_t k = w_k.k;
    std::size_t kp = k_next;
    std::size_t nv = vn.size();

    // Windowed product of the divisor's top limbs by w. The digits of
    // v_t * w above position m are forced (they cancel against the implicit
    // 1), so only [wlo, m+1) is formed.
    std::size_t m = nv < kp + 2 ? nv : kp + 2;
    Natural vt = top_limbs(vn, m);
    std::size_t span_down = (kp - k) + 2;
    std::size_t wlo = m > span_down ? m - span_down : 0;
    ProductSlice xs = slice_mulders(vt, w_k.w, SliceRequest{wlo, m + 1, 2}, cfg, ws);

    // Residual window rho ~ B^(m+k)/2 - vt*w, reconstructed from the slice by
    // complement. A window reaching position 0 sees the whole residual and
    // the complement identity is exact (+1); otherwise the unknown low digits
    // and the slice deficit are covered by rounding down one deficit's worth.
    std::vector<limb> rho(xs.limbs.size());
    for (std::size_t i = 0; i < rho.size(); i++) rho[i] = ~xs.limbs[i];
    if (wlo == 0) {
        limb carry = add_1(rho.data(), rho.data(), rho.size(), 1);
        (void)carry;
        assert(carry == 0);
    } else if (sub_1(rho.data(), rho.data(), rho.size(), xs.deficit_bound) != 0) {
        zero_limbs(rho.data(), rho.size());
    }
    Natural rho_n = Natural::from_limbs(std::move(rho));

    // Correction C = 2 * rho * w / B^e2, kept one unit low so that no
    // deficit anywhere in the chain can push the iterate above the target.
    Natural c;
    if (!rho_n.is_zero()) {
        std::size_t e2 = 2 * k + m - kp - wlo;
        if (e2 == 0) {
            c = shift_left_bits(mul_karatsuba(rho_n, w_k.w, ws, global_tuning().mul), 1);
        } else {
            std::size_t flen = rho_n.size() + w_k.w.size();
            if (e2 - 1 < flen) {
                ProductSlice cs =
                    slice_mulders(rho_n, w_k.w, SliceRequest{e2 - 1, flen, 2}, cfg, ws);
                c = shift_right_bits(shift_left_bits(cs.value(), 1), 64);
            }
        }
        if (!c.is_zero()) c = sub(c, Natural::from_u64(1));
    }

    ShiftedInverse out;
    out.w = add(shift_left_bits(w_k.w, 64 * (kp - k)), c);
    out.s = s_in + 64 * (kp - k);
    out.k = kp;
    out.ulp_bound = 2;
    assert(out.w.size() == kp);
    return out;
}

} // namespace detail

// One Newton step: extend w_k from k to k_next correct limbs
// (k <= k_next <= 2k + 1). Steps beyond the safe doubling 2k - 1 are split
// internally so the quadratic error term never reaches an output ulp.
inline ShiftedInverse refine(const ShiftedInverse& w_k, const Natural& v,
                             std::size_t k_next, Workspace& ws,
                             const MuldersConfig& cfg) {
    std::size_t k = w_k.k;
    if (k < 2 || w_k.w.size() != k) {
        throw std::invalid_argument("refine: malformed input inverse");
    }
    if (k_next < k || k_next > 2 * k + 1) {
        throw std::invalid_argument("refine: k_next outside [k, 2k+1]");
    }
    NormalizedDivisor nd = normalize(v);
    if (nd.power_of_two) return detail::exact_power_of_two_inverse(v, k_next);
    if (w_k.s != 64 * k - 1 + v.bit_length()) {
        throw std::invalid_argument("refine: inconsistent scale for divisor");
    }
    ShiftedInverse cur = w_k;
    if (k_next > 2 * k - 1) {
        std::size_t mid = k_next / 2 + 1;
        cur = detail::refine_single(cur, nd.v_norm, cur.s, mid, ws, cfg);
    }
    if (k_next > cur.k) {
        cur = detail::refine_single(cur, nd.v_norm, cur.s, k_next, ws, cfg);
    }
    return cur;
}

inline ShiftedInverse refine(const ShiftedInverse& w_k, const Natural& v,
                             std::size_t k_next, Workspace& ws) {
    return refine(w_k, v, k_next, ws, global_tuning().mulders);
}

inline ShiftedInverse shifted_inverse(const Natural& v, std::size_t k,
                                      Workspace& ws, const MuldersConfig& cfg) {
    if (k < 1) throw std::invalid_argument("shifted_inverse: k must be positive");
    if (v.is_zero()) throw zero_divisor_error();
    NormalizedDivisor nd = normalize(v);
    if (nd.power_of_two) return detail::exact_power_of_two_inverse(v, k);

    ShiftedInverse cur = initial_inverse(nd.v_norm);
    // The iterate tracks the raw divisor's scale from here on.
    cur.s = 64 * cur.k - 1 + v.bit_length();
    if (k == 1) {
        // floor(w2 / B) is within one ulp of the 1-limb inverse.
        ShiftedInverse out;
        out.w = shift_right_bits(cur.w, 64);
        out.s = cur.s - 64;
        out.k = 1;
        out.ulp_bound = cur.ulp_bound == 0 ? 0 : 1;
        return out;
    }
    PrecisionSchedule sched = PrecisionSchedule::for_target(k);
    assert(sched.valid_for(k));
    for (std::size_t step : sched.steps) {
        if (step == cur.k) continue;
        cur = refine(cur, v, step, ws, cfg);
    }
    return cur;
}

inline ShiftedInverse shifted_inverse(const Natural& v, std::size_t k) {
    return shifted_inverse(v, k, detail::tls_workspace(), global_tuning().mulders);
}

} // namespace bigslice
