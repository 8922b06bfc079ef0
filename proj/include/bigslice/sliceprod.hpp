#pragma once
// sliceprod.hpp - Partial products: compute only a requested window of limbs
// of a*b, cheaper than the full product, with a sound bound on how far the
// returned digits can fall short of the true ones.
//
// Deficit model. Let P = a*b and let the request cover product limb positions
// [lo, hi). The engine accumulates a subset S of P's limb-by-limb partial
// products: every pair contributing to columns in [base, hi) with
// base = lo - guards (clamped at 0), possibly more, never pairs that are not
// part of P. Carries out of columns below base are therefore missing, so the
// digits of S at [lo, hi) can only be the true digits or fall short of them.
// With the internal minimum of two guard limbs the shortfall is at most
// deficit_bound - 1 units of B^lo, where a "unit" shortfall may wrap the
// window when the true digits sit on a carry boundary: the precise statement
// is (true_window - returned_window) mod B^(hi-lo) < deficit_bound.
// deficit_bound is 1 (window exact) when base reaches 0, else 2.
//
// Low slices (lo = 0) omit nothing below the window and are always exact.
//
// slice_mulders recurses: a near-square corner of the pair grid is taken as
// one full (fast, sequential) multiplication and the two remaining triangular
// bands recurse, splitting at the beta point; small bands fall back to
// column-by-column classical accumulation, which is also what slice_classical
// does for the whole request.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bigslice/mulengine.hpp"
#include "bigslice/natural.hpp"
#include "bigslice/thresholds.hpp"
#include "bigslice/workspace.hpp"

namespace bigslice {

struct SliceRequest {
    std::size_t lo = 0;      // first product limb position delivered
    std::size_t hi = 0;      // one past the last position delivered
    std::size_t guards = 2;  // extra low positions carried internally
};

struct ProductSlice {
    std::vector<limb> limbs;      // digits at positions [lo, lo+limbs.size())
    std::size_t lo = 0;
    std::uint64_t deficit_bound = 1;

    // Window digits as a value (for tests and small consumers).
    Natural value() const { return Natural::from_limb_span(limbs); }
};

namespace detail {

inline void validate_request(const SliceRequest& req, std::size_t la, std::size_t lb) {
    if (req.lo >= req.hi || req.hi > la + lb) {
        throw std::invalid_argument("slice request out of range for operands");
    }
}

inline std::size_t effective_guards(std::size_t requested) {
    return requested < 2 ? 2 : requested;
}

// Accumulate into acc (columns [acc_base, acc_base+acc_len)) every pair (i,j)
// of a x b, at global columns org+i+j, with column in [col_lo, col_hi).
// Rows come from the shorter operand so narrow bands of long-by-short
// products stay linear in the short length.
inline void accumulate_band_classical(const limb* a, std::size_t la,
                                      const limb* b, std::size_t lb,
                                      std::size_t org, std::size_t col_lo,
                                      std::size_t col_hi, limb* acc,
                                      std::size_t acc_base, std::size_t acc_len) {
    if (la > lb) {
        std::swap(a, b);
        std::swap(la, lb);
    }
    for (std::size_t i = 0; i < la; i++) {
        std::size_t row = org + i;
        if (row >= col_hi) break;
        std::size_t jlo = col_lo > row ? col_lo - row : 0;
        std::size_t jhi = col_hi - row < lb ? col_hi - row : lb;
        if (jlo >= jhi) continue;
        addmul_1_at(acc, acc_len, row + jlo - acc_base, b + jlo, jhi - jlo, a[i]);
    }
}

// acc += product digits, where the product occupies columns
// [prod_org, prod_org+plen); clipped to the acc window at both ends.
inline void add_product_clipped(const limb* prod, std::size_t plen,
                                std::size_t prod_org, limb* acc,
                                std::size_t acc_base, std::size_t acc_len) {
    if (prod_org >= acc_base) {
        std::size_t off = prod_org - acc_base;
        if (off >= acc_len) return;
        std::size_t n = plen < acc_len - off ? plen : acc_len - off;
        add_at(acc, acc_len, off, prod, n);
        return;
    }
    std::size_t skip = acc_base - prod_org;
    if (skip >= plen) return;
    std::size_t n = plen - skip < acc_len ? plen - skip : acc_len;
    add_at(acc, acc_len, 0, prod + skip, n);
}

// Full product of a sub-rectangle, accumulated with clipping. Sequential by
// construction: slices never spawn tasks.
inline void accumulate_full_product(const limb* a, std::size_t la, const limb* b,
                                    std::size_t lb, std::size_t org, limb* acc,
                                    std::size_t acc_base, std::size_t acc_len,
                                    const MulThresholds& mt, Workspace& ws) {
    std::size_t need = la + lb + mul_rec_bound(la, lb, mt);
    ScratchBuffer buf = ws.acquire(need);
    Bump bump(buf.data() + la + lb, need - la - lb);
    mul_rec(buf.data(), a, la, b, lb, bump, mt);
    add_product_clipped(buf.data(), la + lb, org, acc, acc_base, acc_len);
}

// Core band recursion. Ensures every pair with global column in [base, hi)
// is accumulated exactly once; pairs below base are never touched except as
// part of a corner product (which only brings the sum closer to the truth);
// pairs at columns >= hi may be included or skipped freely.
inline void slice_band_rec(const limb* a, std::size_t la, const limb* b,
                           std::size_t lb, std::size_t org, std::size_t base,
                           std::size_t hi, limb* acc, std::size_t acc_base,
                           std::size_t acc_len, const MuldersConfig& cfg,
                           const MulThresholds& mt, Workspace& ws) {
    if (org >= hi) return;
    // Limbs at or above hi - org only feed columns >= hi.
    if (la > hi - org) la = hi - org;
    if (lb > hi - org) lb = hi - org;
    if (la == 0 || lb == 0) return;
    if (org + la + lb - 2 < base) return;  // whole rectangle below the band

    std::size_t cutoff = cfg.mulders_cutoff < 1 ? 1 : cfg.mulders_cutoff;
    std::size_t small = la < lb ? la : lb;
    if (small <= cutoff) {
        std::size_t col_lo = base > org ? base : org;
        accumulate_band_classical(a, la, b, lb, org, col_lo, hi, acc, acc_base, acc_len);
        return;
    }

    if (base <= org) {
        // Low band: everything from the bottom of the rectangle is needed.
        if (org + la + lb - 2 < hi) {
            accumulate_full_product(a, la, b, lb, org, acc, acc_base, acc_len, mt, ws);
            return;
        }
        // Split at the beta point: full low corner plus two recursive bands.
        std::size_t hi_rel = hi - org;
        std::size_t k = static_cast<std::size_t>(cfg.beta * static_cast<double>(hi_rel));
        if (k < 1) k = 1;
        std::size_t ka = k < la ? k : la;
        std::size_t kb = k < lb ? k : lb;
        if (ka == la && kb == lb) {
            accumulate_full_product(a, la, b, lb, org, acc, acc_base, acc_len, mt, ws);
            return;
        }
        accumulate_full_product(a, ka, b, kb, org, acc, acc_base, acc_len, mt, ws);
        slice_band_rec(a + ka, la - ka, b, lb, org + ka, base, hi, acc, acc_base,
                       acc_len, cfg, mt, ws);
        slice_band_rec(a, ka, b + kb, lb - kb, org + kb, base, hi, acc, acc_base,
                       acc_len, cfg, mt, ws);
        return;
    }

    // High band: a full corner at the top of the rectangle plus two recursive
    // triangular bands. The corner may reach below base; that only adds true
    // product content.
    std::size_t s = la + lb - (base - org);
    std::size_t k = static_cast<std::size_t>(cfg.beta * static_cast<double>(s));
    if (k < 1) k = 1;
    std::size_t ka = k < la ? k : la;
    std::size_t kb = k < lb ? k : lb;
    if (ka == la && kb == lb) {
        accumulate_full_product(a, la, b, lb, org, acc, acc_base, acc_len, mt, ws);
        return;
    }
    std::size_t ca = la - ka;
    std::size_t cb = lb - kb;
    accumulate_full_product(a + ca, ka, b + cb, kb, org + ca + cb, acc, acc_base,
                            acc_len, mt, ws);
    slice_band_rec(a, ca, b, lb, org, base, hi, acc, acc_base, acc_len, cfg, mt, ws);
    slice_band_rec(a + ca, ka, b, cb, org + ca, base, hi, acc, acc_base, acc_len,
                   cfg, mt, ws);
}

inline ProductSlice finish_slice(std::vector<limb>& acc, std::size_t base,
                                 const SliceRequest& req) {
    ProductSlice out;
    out.lo = req.lo;
    out.limbs.assign(acc.begin() + static_cast<std::ptrdiff_t>(req.lo - base),
                     acc.begin() + static_cast<std::ptrdiff_t>(req.hi - base));
    out.deficit_bound = base == 0 ? 1 : 2;
    return out;
}

} // namespace detail

// Column-by-column slice; the baseline and oracle for slice_mulders.
inline ProductSlice slice_classical(const Natural& a, const Natural& b,
                                    const SliceRequest& req) {
    detail::validate_request(req, a.size(), b.size());
    std::size_t g = detail::effective_guards(req.guards);
    std::size_t base = req.lo > g ? req.lo - g : 0;
    std::vector<limb> acc(req.hi - base + 2, 0);
    detail::accumulate_band_classical(a.limbs().data(), a.size(), b.limbs().data(),
                                      b.size(), 0, base, req.hi, acc.data(), base,
                                      acc.size());
    return detail::finish_slice(acc, base, req);
}

inline ProductSlice slice_mulders(const Natural& a, const Natural& b,
                                  const SliceRequest& req, const MuldersConfig& cfg,
                                  Workspace& ws) {
    detail::validate_request(req, a.size(), b.size());
    if (cfg.beta <= 0.0 || cfg.beta >= 1.0) {
        throw std::invalid_argument("beta must lie in (0,1)");
    }
    std::size_t g = detail::effective_guards(req.guards);
    std::size_t base = req.lo > g ? req.lo - g : 0;
    std::vector<limb> acc(req.hi - base + 2, 0);
    detail::slice_band_rec(a.limbs().data(), a.size(), b.limbs().data(), b.size(),
                           0, base, req.hi, acc.data(), base, acc.size(), cfg,
                           global_tuning().mul, ws);
    return detail::finish_slice(acc, base, req);
}

inline ProductSlice slice_mulders(const Natural& a, const Natural& b,
                                  const SliceRequest& req) {
    return slice_mulders(a, b, req, global_tuning().mulders, detail::tls_workspace());
}

// Middle window of v2k * wk around position k, with guard limbs on both
// sides: the inner product shape of the reciprocal iteration. Positions
// outside the product range are delivered as zero digits.
inline ProductSlice middle_product(const Natural& v2k, const Natural& wk,
                                   std::size_t k, std::size_t guards,
                                   const MuldersConfig& cfg, Workspace& ws) {
    if (k < 1 || v2k.size() > 2 * k || wk.size() > k) {
        throw std::invalid_argument("middle_product operand lengths");
    }
    std::size_t total = v2k.size() + wk.size();
    std::size_t lo = k > guards ? k - guards : 0;
    std::size_t hi = 2 * k + guards;
    std::size_t hi_in = hi < total ? hi : total;
    if (v2k.is_zero() || wk.is_zero() || hi_in <= lo) {
        ProductSlice zero;
        zero.lo = lo;
        zero.limbs.assign(hi - lo, 0);
        zero.deficit_bound = 1;
        return zero;
    }
    ProductSlice s = slice_mulders(v2k, wk, SliceRequest{lo, hi_in, guards}, cfg, ws);
    s.limbs.resize(hi - lo, 0);
    return s;
}

inline ProductSlice middle_product(const Natural& v2k, const Natural& wk,
                                   std::size_t k, std::size_t guards = 2) {
    return middle_product(v2k, wk, k, guards, global_tuning().mulders,
                          detail::tls_workspace());
}

// One 64-bit window of a*b starting at an arbitrary bit address, from the
// product columns adjacent to that position only (linear work). The returned
// value may fall short of the true bit field by at most max_deficit, in the
// same modular-window sense as ProductSlice.
struct ProductBitWindow {
    limb digit = 0;
    unsigned max_deficit = 0;
};

inline ProductBitWindow product_digit_at_bit(const Natural& a, const Natural& b,
                                             std::size_t bit_pos) {
    std::size_t total = a.size() + b.size();
    if (bit_pos + 64 > 64 * total) {
        throw std::out_of_range("bit window beyond product range");
    }
    std::size_t d = bit_pos / 64;
    unsigned off = static_cast<unsigned>(bit_pos % 64);
    std::size_t hi = off == 0 ? d + 1 : d + 2;
    ProductSlice s = slice_classical(a, b, SliceRequest{d, hi, 2});
    ProductBitWindow out;
    limb lo_limb = s.limbs[0];
    limb hi_limb = s.limbs.size() > 1 ? s.limbs[1] : 0;
    out.digit = off == 0 ? lo_limb : (lo_limb >> off) | (hi_limb << (64 - off));
    out.max_deficit = s.deficit_bound == 1 ? 0 : 1;
    return out;
}

} // namespace bigslice
