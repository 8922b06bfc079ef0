// Division: classical against the base-2^16 oracle, fast and block-short
// against classical, adversarial constructions, the |q - q'| <= 1 claim, and
// the Euclidean identity on every case.
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bigslice/divengine.hpp"
#include "oracle.hpp"

using namespace bigslice;

namespace {

// u = q*v + r and 0 <= r < v, checked by multiply-and-compare.
void check_euclidean(const Natural& u, const Natural& v, const DivResult& res) {
    REQUIRE(res.r.has_value());
    REQUIRE(compare(*res.r, v) == std::strong_ordering::less);
    REQUIRE(add(mul_classical(res.q, v), *res.r) == u);
}

void check_against_classical(const Natural& u, const Natural& v, const DivResult& res) {
    DivResult ref = divide_classical(u, v);
    REQUIRE(res.q == ref.q);
    if (res.r.has_value()) REQUIRE(*res.r == *ref.r);
}

} // namespace

TEST_CASE("divide_classical basics") {
    auto r = divide_classical(Natural::from_u64(7), Natural::from_u64(2));
    CHECK(r.q == Natural::from_u64(3));
    CHECK(*r.r == Natural::from_u64(1));

    std::mt19937_64 rng(41);
    Natural u = oracle::random_natural(rng, 9);
    auto i = divide_classical(u, Natural::from_u64(1));
    CHECK(i.q == u);
    CHECK(i.r->is_zero());

    CHECK_THROWS_AS(divide_classical(u, Natural()), zero_divisor_error);
}

TEST_CASE("divide_classical against the base-2^16 oracle") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 10000; i++) {
        Natural u = oracle::random_natural(rng, 1 + rng() % 8);
        Natural v = oracle::random_natural(rng, 1 + rng() % 3);
        DivResult res = divide_classical(u, v);
        oracle::Num oq, orr;
        oracle::divmod(oracle::from_natural(u), oracle::from_natural(v), oq, orr);
        REQUIRE(res.q == oracle::to_natural(oq));
        REQUIRE(*res.r == oracle::to_natural(orr));
        check_euclidean(u, v, res);
    }
}

TEST_CASE("divide_fast equals classical on random shapes") {
    std::mt19937_64 rng(43);
    Workspace ws;
    DivThresholds t;
    for (int i = 0; i < 3000; i++) {
        Natural u = oracle::random_natural_loglen(rng, 192);
        Natural v = oracle::random_natural_loglen(rng, 96);
        FastDivProbe probe;
        DivResult res = divide_fast(u, v, true, t, ws, &probe);
        check_against_classical(u, v, res);
        if (compare(u, v) != std::strong_ordering::less) {
            check_euclidean(u, v, res);
            // Pre-correction quotient is within one of the truth.
            DivResult ref = divide_classical(u, v);
            auto [diff, neg] = sub_signed(ref.q, probe.q_pre);
            REQUIRE(compare(diff, Natural::from_u64(1)) !=
                    std::strong_ordering::greater);
        }
    }
}

TEST_CASE("divide_fast adversarial constructions") {
    std::mt19937_64 rng(44);
    Workspace ws;
    DivThresholds t;

    SECTION("exact division") {
        for (int i = 0; i < 400; i++) {
            Natural v = oracle::random_natural(rng, 3 + rng() % 40);
            Natural q = oracle::random_natural(rng, 3 + rng() % 40);
            Natural u = mul_classical(v, q);
            FastDivProbe probe;
            DivResult res = divide_fast(u, v, true, t, ws, &probe);
            REQUIRE(res.q == q);
            REQUIRE(res.r->is_zero());
            DivResult qonly = divide_fast(u, v, false, t, ws);
            REQUIRE(qonly.q == q);
            REQUIRE_FALSE(qonly.r.has_value());
        }
    }
    SECTION("remainder near v/2") {
        for (int i = 0; i < 400; i++) {
            Natural v = oracle::random_natural(rng, 3 + rng() % 40);
            Natural q = oracle::random_natural(rng, 3 + rng() % 40);
            Natural half = shift_right_bits(v, 1);
            for (int delta = -1; delta <= 1; delta++) {
                Natural r = half;
                if (delta == -1) {
                    if (r.is_zero()) continue;
                    r = sub(r, Natural::from_u64(1));
                }
                if (delta == 1) r = add(r, Natural::from_u64(1));
                if (compare(r, v) != std::strong_ordering::less) continue;
                Natural u = add(mul_classical(v, q), r);
                DivResult res = divide_fast(u, v, true, t, ws);
                REQUIRE(res.q == q);
                REQUIRE(*res.r == r);
            }
        }
    }
    SECTION("remainder at the extremes: 0, 1, v-1") {
        for (int i = 0; i < 300; i++) {
            Natural v = oracle::random_natural(rng, 3 + rng() % 30);
            Natural q = oracle::random_natural(rng, 3 + rng() % 30);
            for (int which = 0; which < 3; which++) {
                Natural r;
                if (which == 1) r = Natural::from_u64(1);
                if (which == 2) r = sub(v, Natural::from_u64(1));
                if (compare(r, v) != std::strong_ordering::less) continue;
                Natural u = add(mul_classical(v, q), r);
                DivResult res = divide_fast(u, v, true, t, ws);
                REQUIRE(res.q == q);
                REQUIRE(*res.r == r);
            }
        }
    }
    SECTION("all-ones and single-bit operands") {
        std::vector<limb> ones(60, ~limb{0});
        Natural u = Natural::from_limbs(ones);
        Natural v = Natural::power_of_two(64 * 20 + 33);
        check_against_classical(u, v, divide_fast(u, v, true, t, ws));
        std::vector<limb> vones(20, ~limb{0});
        Natural v2 = Natural::from_limbs(vones);
        check_against_classical(u, v2, divide_fast(u, v2, true, t, ws));
    }
}

TEST_CASE("quotient-only consistency") {
    std::mt19937_64 rng(45);
    Workspace ws;
    DivThresholds t;
    for (int i = 0; i < 1500; i++) {
        Natural u = oracle::random_natural_loglen(rng, 160);
        Natural v = oracle::random_natural_loglen(rng, 80);
        DivResult with_r = divide_fast(u, v, true, t, ws);
        DivResult without = divide_fast(u, v, false, t, ws);
        REQUIRE(with_r.q == without.q);
        REQUIRE_FALSE(without.r.has_value());
    }
}

TEST_CASE("divide_block_short equals classical") {
    std::mt19937_64 rng(46);
    Workspace ws;
    DivThresholds t;
    SECTION("block-aligned power case") {
        Natural v = oracle::random_natural(rng, 8);
        Natural u = mul_classical(v, Natural::power_of_two(64 * 24));
        DivResult res = divide_block_short(u, v, t, ws);
        REQUIRE(res.q == Natural::power_of_two(64 * 24));
        REQUIRE(res.r->is_zero());
    }
    SECTION("random long-dividend shapes") {
        for (int i = 0; i < 300; i++) {
            std::size_t nv = 2 + rng() % 24;
            std::size_t nu = nv * (2 + rng() % 8) + rng() % nv;
            Natural u = oracle::random_natural(rng, nu);
            Natural v = oracle::random_natural(rng, nv);
            DivResult res = divide_block_short(u, v, t, ws);
            check_against_classical(u, v, res);
            check_euclidean(u, v, res);
        }
    }
    SECTION("Table-3 shape at small scale: 990/100-ish quotient") {
        Natural u = oracle::random_natural(rng, 1000);
        Natural v = oracle::random_natural(rng, 100);
        DivResult res = divide_block_short(u, v, t, ws);
        check_against_classical(u, v, res);
    }
}

TEST_CASE("dispatcher") {
    std::mt19937_64 rng(47);
    SECTION("zero dividend") {
        DivResult res = divide(Natural(), Natural::from_u64(9));
        CHECK(res.q.is_zero());
        CHECK(res.r->is_zero());
    }
    SECTION("division by zero") {
        CHECK_THROWS_AS(divide(Natural::from_u64(1), Natural()), zero_divisor_error);
    }
    SECTION("fuzz across regime boundaries") {
        DivThresholds t{8, 2.0};  // tighter cutoffs so all regimes engage
        Workspace ws;
        for (int i = 0; i < 4000; i++) {
            std::size_t nv = 1 + rng() % 24;
            std::size_t nu = 1 + rng() % 96;
            Natural u = oracle::random_natural(rng, nu);
            Natural v = oracle::random_natural(rng, nv);
            DivResult res = divide(u, v, true, t, ws);
            check_against_classical(u, v, res);
            check_euclidean(u, v, res);
            DivResult qonly = divide(u, v, false, t, ws);
            REQUIRE(qonly.q == res.q);
            REQUIRE_FALSE(qonly.r.has_value());
        }
    }
    SECTION("table shapes at one-tenth scale") {
        Workspace ws;
        DivThresholds t;
        std::size_t utotal = 1000;
        for (std::size_t nv : {10ul, 50ul, 500ul, 950ul, 990ul}) {
            Natural u = oracle::random_natural(rng, utotal);
            Natural v = oracle::random_natural(rng, nv);
            DivResult res = divide(u, v, true, t, ws);
            check_against_classical(u, v, res);
        }
    }
}

TEST_CASE("euclidean identity on mixed random shapes across all paths") {
    std::mt19937_64 rng(48);
    Workspace ws;
    DivThresholds t;
    for (int i = 0; i < 800; i++) {
        Natural u = oracle::random_natural_loglen(rng, 256);
        Natural v = oracle::random_natural_loglen(rng, 256);
        if (v.is_zero()) continue;
        check_euclidean(u, v, divide(u, v, true, t, ws));
        if (compare(u, v) != std::strong_ordering::less && v.size() >= 2) {
            check_euclidean(u, v, divide_fast(u, v, true, t, ws));
            check_euclidean(u, v, divide_block_short(u, v, t, ws));
        }
    }
}
