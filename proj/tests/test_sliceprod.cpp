// Partial products: never-high, deficit soundness, exact low slices,
// classical/Mulders agreement, the bit-addressed digit window, and the cost
// property of the low half.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <chrono>
#include <random>

#include "bigslice/sliceprod.hpp"
#include "oracle.hpp"

using namespace bigslice;

namespace {

// True digits [lo, hi) of a*b, via the classical full product.
std::vector<limb> exact_window(const Natural& a, const Natural& b, std::size_t lo,
                               std::size_t hi) {
    Natural p = mul_classical(a, b);
    std::vector<limb> out;
    for (std::size_t i = lo; i < hi; i++) out.push_back(p.limb_at(i));
    return out;
}

// (exact - returned) interpreted modulo the window size; the contract is
// that this is below deficit_bound.
bool window_deficit_ok(const Natural& a, const Natural& b, const ProductSlice& s,
                       std::size_t hi, std::uint64_t* out_short = nullptr) {
    std::vector<limb> exact = exact_window(a, b, s.lo, hi);
    std::size_t n = exact.size();
    std::vector<limb> diff(n);
    limb borrow = detail::sub_n(diff.data(), exact.data(), s.limbs.data(), n);
    (void)borrow;  // modular window: a wrap is a legal one-unit shortfall
    for (std::size_t i = 1; i < n; i++) {
        if (diff[i] != 0) return false;
    }
    if (out_short != nullptr) *out_short = diff.empty() ? 0 : diff[0];
    return diff.empty() || diff[0] < s.deficit_bound;
}

} // namespace

TEST_CASE("slice_classical basics") {
    std::mt19937_64 rng(21);
    Natural a = oracle::random_natural(rng, 6);
    Natural b = oracle::random_natural(rng, 4);

    SECTION("full range equals the full product") {
        ProductSlice s = slice_classical(a, b, {0, a.size() + b.size(), 0});
        CHECK(s.value() == mul_classical(a, b));
        CHECK(s.deficit_bound == 1);
    }
    SECTION("low slices are exact") {
        for (std::size_t k = 1; k <= 6; k++) {
            ProductSlice s = slice_classical(a, b, {0, k, 0});
            CHECK(s.limbs == exact_window(a, b, 0, k));
            CHECK(s.deficit_bound == 1);
        }
    }
    SECTION("invalid requests rejected") {
        CHECK_THROWS_AS(slice_classical(a, b, {3, 3, 0}), std::invalid_argument);
        CHECK_THROWS_AS(slice_classical(a, b, {0, 11, 0}), std::invalid_argument);
    }
    SECTION("middle slice within deficit") {
        for (int i = 0; i < 2000; i++) {
            Natural x = oracle::random_natural(rng, 1 + rng() % 8);
            Natural y = oracle::random_natural(rng, 1 + rng() % 8);
            std::size_t total = x.size() + y.size();
            std::size_t lo = rng() % total;
            std::size_t hi = lo + 1 + rng() % (total - lo);
            ProductSlice s = slice_classical(x, y, {lo, hi, 2});
            REQUIRE(window_deficit_ok(x, y, s, hi));
        }
    }
}

TEST_CASE("slice_mulders equals classical and the full product") {
    std::mt19937_64 rng(22);
    Workspace ws;
    MuldersConfig cfg;

    SECTION("full-range request degenerates to the full product") {
        Natural a = oracle::random_natural(rng, 120);
        Natural b = oracle::random_natural(rng, 80);
        ProductSlice s = slice_mulders(a, b, {0, 200, 0}, cfg, ws);
        CHECK(s.value() == mul_classical(a, b));
    }
    SECTION("low half of 100x100 is exact") {
        Natural a = oracle::random_natural(rng, 100);
        Natural b = oracle::random_natural(rng, 100);
        ProductSlice s = slice_mulders(a, b, {0, 100, 0}, cfg, ws);
        CHECK(s.limbs == exact_window(a, b, 0, 100));
        CHECK(s.deficit_bound == 1);
    }
    SECTION("high half of 100x100 within deficit, mostly exact") {
        int exact_count = 0, trials = 300;
        for (int i = 0; i < trials; i++) {
            Natural a = oracle::random_natural(rng, 100);
            Natural b = oracle::random_natural(rng, 100);
            ProductSlice s = slice_mulders(a, b, {100, 200, 2}, cfg, ws);
            std::uint64_t shortfall = 1;
            REQUIRE(window_deficit_ok(a, b, s, 200, &shortfall));
            if (shortfall == 0) exact_count++;
        }
        // Requested digits equal the true ones nearly always (and never high).
        CHECK(exact_count >= trials * 99 / 100);
    }
}

TEST_CASE("randomized slice battery against full products") {
    std::mt19937_64 rng(23);
    Workspace ws;
    MuldersConfig cfg;
    for (int i = 0; i < 10000; i++) {
        Natural a = oracle::random_natural_loglen(rng, 64);
        Natural b = oracle::random_natural_loglen(rng, 64);
        std::size_t total = a.size() + b.size();
        std::size_t lo = rng() % total;
        std::size_t hi = lo + 1 + rng() % (total - lo);
        std::size_t guards = rng() % 4;
        ProductSlice sm = slice_mulders(a, b, {lo, hi, guards}, cfg, ws);
        REQUIRE(window_deficit_ok(a, b, sm, hi));
        if (i % 4 == 0) {
            ProductSlice sc = slice_classical(a, b, {lo, hi, guards});
            REQUIRE(window_deficit_ok(a, b, sc, hi));
            // Same guards: both land within the max of the two deficits of
            // the exact window, so they differ by less than that from each
            // other as well.
            REQUIRE(sm.deficit_bound == sc.deficit_bound);
        }
        if (lo == 0) REQUIRE(sm.limbs == exact_window(a, b, 0, hi));
    }
}

TEST_CASE("adversarial patterns stay never-high") {
    Workspace ws;
    MuldersConfig cfg;
    std::vector<limb> ones(80, ~limb{0});
    Natural a = Natural::from_limbs(ones);
    ProductSlice s = slice_mulders(a, a, {80, 160, 2}, cfg, ws);
    CHECK(window_deficit_ok(a, a, s, 160));
    Natural bit = Natural::power_of_two(64 * 79 + 13);
    s = slice_mulders(a, bit, {60, 140, 2}, cfg, ws);
    CHECK(window_deficit_ok(a, bit, s, 140));
}

TEST_CASE("middle_product") {
    std::mt19937_64 rng(24);
    Workspace ws;
    MuldersConfig cfg;
    SECTION("k=1 single-limb operands") {
        Natural x = Natural::from_u64(0xDEADBEEFDEADBEEFULL);
        Natural y = Natural::from_u64(0x1234567812345678ULL);
        ProductSlice s = middle_product(x, y, 1, 2, cfg, ws);
        Natural p = mul_classical(x, y);
        // Window [0, 4) of a 2-limb product: equal to the product itself.
        CHECK(s.lo == 0);
        CHECK(s.value() == p);
    }
    SECTION("random 2k x k with and without full length") {
        for (int i = 0; i < 2000; i++) {
            std::size_t k = 1 + rng() % 8;
            std::size_t lv = 1 + rng() % (2 * k);
            std::size_t lw = 1 + rng() % k;
            Natural v2k = oracle::random_natural(rng, lv);
            Natural wk = oracle::random_natural(rng, lw);
            ProductSlice s = middle_product(v2k, wk, k, 2, cfg, ws);
            std::size_t lo = k > 2 ? k - 2 : 0;
            // Compare the in-range part of the window against the product.
            std::size_t hi_in = std::min(2 * k + 2, lv + lw);
            if (hi_in > lo) {
                ProductSlice in_range = s;
                in_range.limbs.resize(hi_in - lo);
                REQUIRE(window_deficit_ok(v2k, wk, in_range, hi_in));
            }
            // Padding digits beyond the product are zero.
            for (std::size_t j = hi_in > lo ? hi_in - lo : 0; j < s.limbs.size(); j++) {
                REQUIRE(s.limbs[j] == 0);
            }
        }
    }
    SECTION("preconditions") {
        Natural big = oracle::random_natural(rng, 5);
        CHECK_THROWS_AS(middle_product(big, big, 2, 2, cfg, ws), std::invalid_argument);
    }
}

TEST_CASE("product_digit_at_bit") {
    std::mt19937_64 rng(25);
    SECTION("bit 0 of single limbs is exact") {
        Natural a = Natural::from_u64(0xABCDEF0123456789ULL);
        Natural b = Natural::from_u64(0x9876543210FEDCBAULL);
        auto w = product_digit_at_bit(a, b, 0);
        CHECK(w.digit == mul_classical(a, b).limb_at(0));
        CHECK(w.max_deficit == 0);
    }
    SECTION("limb-aligned positions match product limbs within deficit") {
        for (int i = 0; i < 3000; i++) {
            Natural a = oracle::random_natural(rng, 1 + rng() % 6);
            Natural b = oracle::random_natural(rng, 1 + rng() % 6);
            std::size_t total = a.size() + b.size();
            std::size_t d = rng() % total;
            auto w = product_digit_at_bit(a, b, 64 * d);
            limb exact = mul_classical(a, b).limb_at(d);
            REQUIRE(exact - w.digit <= w.max_deficit);  // wrapping diff
        }
    }
    SECTION("random unaligned positions") {
        for (int i = 0; i < 10000; i++) {
            Natural a = oracle::random_natural(rng, 6);
            Natural b = oracle::random_natural(rng, 6);
            std::size_t bit = rng() % (64 * 11);
            auto w = product_digit_at_bit(a, b, bit);
            Natural p = mul_classical(a, b);
            limb exact = p.bits_at(bit);
            REQUIRE(exact - w.digit <= w.max_deficit);
        }
    }
    SECTION("range validation") {
        Natural a = Natural::from_u64(5);
        CHECK_THROWS_AS(product_digit_at_bit(a, a, 65), std::out_of_range);
        CHECK_NOTHROW(product_digit_at_bit(a, a, 64));
    }
}

TEST_CASE("low-half cost is below full multiplication") {
    std::mt19937_64 rng(26);
    Workspace ws;
    MuldersConfig cfg;
    MulThresholds mt = global_tuning().mul;
    std::size_t n = 100;
    Natural a = oracle::random_natural(rng, n);
    Natural b = oracle::random_natural(rng, n);
    auto tm = [&](auto&& fn) {
        double best = 1e30;
        for (int r = 0; r < 9; r++) {
            auto c0 = std::chrono::high_resolution_clock::now();
            for (int i = 0; i < 60; i++) fn();
            auto c1 = std::chrono::high_resolution_clock::now();
            best = std::min(best, std::chrono::duration<double>(c1 - c0).count());
        }
        return best;
    };
    slice_mulders(a, b, {0, n, 0}, cfg, ws);  // warm
    double t_slice = tm([&] { slice_mulders(a, b, {0, n, 0}, cfg, ws); });
    double t_full = tm([&] { mul_karatsuba(a, b, ws, mt); });
    INFO("slice " << t_slice << " full " << t_full);
    CHECK(t_slice <= 0.9 * t_full);
}
