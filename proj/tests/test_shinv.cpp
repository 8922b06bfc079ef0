// Shifted inverse: the one-sided ulp contract against the classical-division
// oracle, per-step error control along the schedule, and the cost property.
#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <random>

#include "bigslice/divengine.hpp"
#include "bigslice/shinv.hpp"
#include "oracle.hpp"

using namespace bigslice;

namespace {

// floor(2^s / v) by classical division: the oracle for every inverse check.
Natural floor_pow2_over(const std::uint64_t s, const Natural& v) {
    return divide_classical(Natural::power_of_two(s), v).q;
}

// w <= floor(2^s/v) <= w + bound
bool inverse_within(const ShiftedInverse& si, const Natural& v, unsigned bound) {
    Natural target = floor_pow2_over(si.s, v);
    if (compare(si.w, target) == std::strong_ordering::greater) return false;
    Natural diff = sub(target, si.w);
    return compare(diff, Natural::from_u64(bound)) != std::strong_ordering::greater;
}

} // namespace

TEST_CASE("normalize") {
    auto n1 = normalize(Natural::from_u64(1));
    CHECK(n1.shift == 63);
    CHECK(n1.power_of_two);
    auto n2 = normalize(Natural::from_u64(limb{1} << 63));
    CHECK(n2.shift == 0);
    CHECK(n2.power_of_two);
    auto n3 = normalize(Natural::from_u64(3));
    CHECK(n3.shift == 62);
    CHECK_FALSE(n3.power_of_two);
    CHECK(n3.v_norm == Natural::from_u64(limb{3} << 62));
    CHECK(leading_zero_bits(n3.v_norm) == 0);
    CHECK_THROWS_AS(normalize(Natural()), zero_divisor_error);
}

TEST_CASE("precision schedule") {
    for (std::size_t k : {2ul, 3ul, 4ul, 5ul, 7ul, 13ul, 100ul, 137ul, 200ul, 501ul}) {
        PrecisionSchedule s = PrecisionSchedule::for_target(k);
        INFO("k=" << k);
        CHECK(s.valid_for(k));
        CHECK(s.steps.front() == 2);
    }
}

TEST_CASE("initial_inverse") {
    SECTION("top limb pattern 0x8000... with a nonzero tail") {
        std::vector<limb> l(3, 0);
        l[2] = limb{1} << 63;
        l[0] = 12345;
        Natural v = Natural::from_limbs(l);
        auto nd = normalize(v);
        REQUIRE_FALSE(nd.power_of_two);
        ShiftedInverse si = initial_inverse(nd.v_norm);
        CHECK(si.k == 2);
        CHECK(si.w.size() == 2);
        CHECK(inverse_within(si, nd.v_norm, si.ulp_bound));
    }
    SECTION("v_norm = 3 * 2^62") {
        auto nd = normalize(Natural::from_u64(3));
        ShiftedInverse si = initial_inverse(nd.v_norm);
        CHECK(inverse_within(si, nd.v_norm, 2));
    }
    SECTION("random normalized divisors") {
        std::mt19937_64 rng(31);
        for (int i = 0; i < 10000; i++) {
            Natural v = oracle::random_natural(rng, 1 + rng() % 8);
            auto nd = normalize(v);
            if (nd.power_of_two) continue;
            ShiftedInverse si = initial_inverse(nd.v_norm);
            REQUIRE(si.ulp_bound <= 2);
            REQUIRE(inverse_within(si, nd.v_norm, si.ulp_bound));
            // top bit of w set
            REQUIRE(si.w.bit_length() == 128);
        }
    }
    SECTION("rejects unnormalized and power-of-two input") {
        CHECK_THROWS_AS(initial_inverse(Natural::from_u64(3)), std::invalid_argument);
        CHECK_THROWS_AS(initial_inverse(Natural::from_u64(limb{1} << 63)),
                        std::invalid_argument);
    }
}

TEST_CASE("refine") {
    std::mt19937_64 rng(32);
    Workspace ws;
    MuldersConfig cfg;
    SECTION("fixed point: k_next == k") {
        for (int i = 0; i < 200; i++) {
            Natural v = oracle::random_natural(rng, 2);
            auto nd = normalize(v);
            if (nd.power_of_two) continue;
            ShiftedInverse si = initial_inverse(nd.v_norm);
            si.s = 64 * si.k - 1 + v.bit_length();
            ShiftedInverse re = refine(si, v, 2, ws, cfg);
            REQUIRE(inverse_within(re, v, 2));
            // Unchanged within a couple ulps of the input by construction.
            Natural lo = si.w, hi = add(si.w, Natural::from_u64(2));
            REQUIRE(compare(re.w, lo) != std::strong_ordering::less);
            REQUIRE(compare(re.w, hi) != std::strong_ordering::greater);
        }
    }
    SECTION("k=2 -> k_next=4 on random v") {
        for (int i = 0; i < 3000; i++) {
            Natural v = oracle::random_natural(rng, 2 + rng() % 6);
            auto nd = normalize(v);
            if (nd.power_of_two) continue;
            ShiftedInverse si = initial_inverse(nd.v_norm);
            si.s = 64 * si.k - 1 + v.bit_length();
            ShiftedInverse re = refine(si, v, 4, ws, cfg);
            REQUIRE(re.k == 4);
            REQUIRE(inverse_within(re, v, 2));
        }
    }
    SECTION("divisor shorter than 2k limbs") {
        for (int i = 0; i < 500; i++) {
            Natural v = oracle::random_natural(rng, 1 + rng() % 3);
            auto nd = normalize(v);
            if (nd.power_of_two) continue;
            ShiftedInverse si = initial_inverse(nd.v_norm);
            si.s = 64 * si.k - 1 + v.bit_length();
            ShiftedInverse re = refine(si, v, 3 + rng() % 3, ws, cfg);
            REQUIRE(inverse_within(re, v, 2));
        }
    }
    SECTION("precondition checks") {
        Natural v = oracle::random_natural(rng, 2);
        auto nd = normalize(v);
        if (!nd.power_of_two) {
            ShiftedInverse si = initial_inverse(nd.v_norm);
            si.s = 64 * si.k - 1 + v.bit_length();
            CHECK_THROWS_AS(refine(si, v, 6, ws, cfg), std::invalid_argument);
            CHECK_THROWS_AS(refine(si, v, 1, ws, cfg), std::invalid_argument);
        }
    }
}

TEST_CASE("per-step error never escalates along the schedule") {
    std::mt19937_64 rng(33);
    Workspace ws;
    MuldersConfig cfg;
    for (int i = 0; i < 60; i++) {
        std::size_t nv = 1 + rng() % 40;
        std::size_t k = 2 + rng() % 60;
        Natural v = oracle::random_natural(rng, nv);
        auto nd = normalize(v);
        if (nd.power_of_two) continue;
        PrecisionSchedule sched = PrecisionSchedule::for_target(k < 2 ? 2 : k);
        ShiftedInverse cur = initial_inverse(nd.v_norm);
        cur.s = 64 * cur.k - 1 + v.bit_length();
        REQUIRE(inverse_within(cur, v, cur.ulp_bound));
        for (std::size_t step : sched.steps) {
            if (step == cur.k) continue;
            cur = refine(cur, v, step, ws, cfg);
            INFO("nv=" << nv << " step=" << step);
            REQUIRE(inverse_within(cur, v, 2));
        }
    }
}

TEST_CASE("shifted_inverse") {
    std::mt19937_64 rng(34);
    SECTION("power of two is exact") {
        ShiftedInverse si = shifted_inverse(Natural::power_of_two(64), 3);
        CHECK(si.ulp_bound == 0);
        CHECK(si.w == Natural::power_of_two(64 * 2));
        CHECK(si.s == 64 * 2 + 64);
        CHECK(floor_pow2_over(si.s, Natural::power_of_two(64)) == si.w);
    }
    SECTION("v = 3 gives the alternating bit pattern") {
        ShiftedInverse si = shifted_inverse(Natural::from_u64(3), 4);
        REQUIRE(inverse_within(si, Natural::from_u64(3), 2));
        // floor(2^s/3) with s = 64*4 - 1 + 2 = 257: 0xAAAA...AA across 4 limbs.
        Natural target = floor_pow2_over(si.s, Natural::from_u64(3));
        for (limb l : target.limbs()) CHECK(l == 0xAAAAAAAAAAAAAAAAULL);
    }
    SECTION("k = 1") {
        for (int i = 0; i < 300; i++) {
            Natural v = oracle::random_natural(rng, 1 + rng() % 4);
            ShiftedInverse si = shifted_inverse(v, 1);
            REQUIRE(si.k == 1);
            REQUIRE(si.w.size() == 1);
            REQUIRE(inverse_within(si, v, 2));
        }
    }
    SECTION("randomized sweep up to 200 limbs") {
        for (int i = 0; i < 1000; i++) {
            std::size_t nv = 1 + rng() % 200;
            std::size_t k = 1 + rng() % 200;
            Natural v = oracle::random_natural(rng, nv);
            ShiftedInverse si = shifted_inverse(v, k);
            INFO("nv=" << nv << " k=" << k);
            REQUIRE(si.k == k);
            REQUIRE(si.ulp_bound <= 2);
            REQUIRE(inverse_within(si, v, si.ulp_bound));
        }
    }
    SECTION("zero divisor rejected") {
        CHECK_THROWS_AS(shifted_inverse(Natural(), 4), zero_divisor_error);
    }
}

TEST_CASE("inverse cost within four multiplications") {
    std::mt19937_64 rng(35);
    std::size_t k = 500;
    Natural v = oracle::random_natural(rng, k);
    Workspace ws;
    MuldersConfig cfg = global_tuning().mulders;
    Natural m1 = oracle::random_natural(rng, k);
    Natural m2 = oracle::random_natural(rng, k);
    auto tm = [&](auto&& fn) {
        double best = 1e30;
        for (int r = 0; r < 7; r++) {
            auto c0 = std::chrono::high_resolution_clock::now();
            for (int i = 0; i < 10; i++) fn();
            auto c1 = std::chrono::high_resolution_clock::now();
            best = std::min(best, std::chrono::duration<double>(c1 - c0).count());
        }
        return best;
    };
    shifted_inverse(v, k, ws, cfg);  // warm
    mul(m1, m2);
    double t_inv = tm([&] { shifted_inverse(v, k, ws, cfg); });
    double t_mul = tm([&] { mul(m1, m2); });
    INFO("inverse " << t_inv << " mul " << t_mul);
    CHECK(t_inv <= 4.0 * t_mul);
}
