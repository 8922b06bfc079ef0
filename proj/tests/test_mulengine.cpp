// Multiplication engine: classical oracle checks, Karatsuba equivalence on
// balanced and unbalanced shapes, the parallel top level, and workspace
// bounds.
#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <random>

#include "bigslice/mulengine.hpp"
#include "oracle.hpp"

using namespace bigslice;

namespace {

// Best of several loop timings: robust to scheduler noise on busy machines.
double best_time(const std::function<void()>& fn, int reps = 9) {
    double best = 1e30;
    for (int i = 0; i < reps; i++) {
        auto c0 = std::chrono::high_resolution_clock::now();
        fn();
        auto c1 = std::chrono::high_resolution_clock::now();
        best = std::min(best, std::chrono::duration<double>(c1 - c0).count());
    }
    return best;
}

} // namespace

TEST_CASE("mul_classical basics") {
    CHECK(mul_classical(Natural::from_u64(7), Natural()).is_zero());
    // (B-1)^2 = B^2 - 2B + 1 -> limbs [1, B-2]
    limb top = ~limb{0};
    CHECK(mul_classical(Natural::from_u64(top), Natural::from_u64(top)) ==
          Natural::from_limbs({1, top - 1}));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; i++) {
        Natural a = oracle::random_natural(rng, 6);
        Natural b = oracle::random_natural(rng, 4);
        REQUIRE(mul_classical(a, b) ==
                oracle::to_natural(oracle::mul(oracle::from_natural(a),
                                               oracle::from_natural(b))));
    }
}

TEST_CASE("karatsuba equals classical") {
    std::mt19937_64 rng(4);
    Workspace ws;
    MulThresholds t;
    SECTION("below cutoff delegates") {
        for (int i = 0; i < 200; i++) {
            Natural a = oracle::random_natural(rng, 1 + rng() % (t.karatsuba_cutoff - 1));
            Natural b = oracle::random_natural(rng, 1 + rng() % (t.karatsuba_cutoff - 1));
            REQUIRE(mul_karatsuba(a, b, ws, t) == mul_classical(a, b));
        }
    }
    SECTION("balanced 100x100") {
        for (int i = 0; i < 50; i++) {
            Natural a = oracle::random_natural(rng, 100);
            Natural b = oracle::random_natural(rng, 100);
            REQUIRE(mul_karatsuba(a, b, ws, t) == mul_classical(a, b));
        }
    }
    SECTION("unbalanced 300x40") {
        for (int i = 0; i < 30; i++) {
            Natural a = oracle::random_natural(rng, 300);
            Natural b = oracle::random_natural(rng, 40);
            REQUIRE(mul_karatsuba(a, b, ws, t) == mul_classical(a, b));
            REQUIRE(mul_karatsuba(b, a, ws, t) == mul_classical(a, b));
        }
    }
    SECTION("adversarial patterns") {
        // All-ones and single-bit operands stress the subtractive middle term.
        std::vector<limb> ones(64, ~limb{0});
        Natural a = Natural::from_limbs(ones);
        Natural bit = shift_left_bits(Natural::from_u64(1), 64 * 63 + 17);
        REQUIRE(mul_karatsuba(a, a, ws, t) == mul_classical(a, a));
        REQUIRE(mul_karatsuba(a, bit, ws, t) == mul_classical(a, bit));
        REQUIRE(mul_karatsuba(bit, bit, ws, t) == mul_classical(bit, bit));
    }
}

TEST_CASE("mul dispatcher: randomized equivalence up to 512 limbs") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 3000; i++) {
        Natural a = oracle::random_natural_loglen(rng, 512);
        Natural b = oracle::random_natural_loglen(rng, 512);
        Natural m = mul(a, b);
        REQUIRE(m == mul_classical(a, b));
        REQUIRE(m == mul(b, a));
    }
    CHECK(mul(Natural::from_u64(1), Natural::from_limbs({9, 9})) ==
          Natural::from_limbs({9, 9}));
}

TEST_CASE("parallel path is deterministic and equals sequential") {
    std::mt19937_64 rng(6);
    MulThresholds seq{16, detail::kNoParallel};
    MulThresholds par{16, 64};
    Workspace ws;
    for (int i = 0; i < 20; i++) {
        Natural a = oracle::random_natural(rng, 300 + rng() % 300);
        Natural b = oracle::random_natural(rng, 300 + rng() % 300);
        Natural s = mul(a, b, ws, seq);
        Natural p1 = mul(a, b, ws, par);
        Natural p2 = mul(a, b, ws, par);
        REQUIRE(s == p1);
        REQUIRE(p1 == p2);
    }
    Natural big = oracle::random_natural(rng, 1000);
    Natural big2 = oracle::random_natural(rng, 1000);
    REQUIRE(mul(big, big2, ws, par) == mul_classical(big, big2));
}

TEST_CASE("workspace_bound dominates observed high water") {
    MulThresholds t{16, detail::kNoParallel};
    std::mt19937_64 rng(7);
    auto check_shape = [&](std::size_t la, std::size_t lb) {
        Natural a = oracle::random_natural(rng, la);
        Natural b = oracle::random_natural(rng, lb);
        Workspace ws;
        detail::MulProbe probe;
        mul_karatsuba(a, b, ws, t, &probe);
        INFO("shape " << la << "x" << lb);
        REQUIRE(probe.scratch_high_water <= workspace_bound(la, lb, t));
        REQUIRE(probe.scratch_high_water > 0);
    };
    CHECK(workspace_bound(8, 8, t) == 0);  // below cutoff: no scratch
    check_shape(64, 64);
    check_shape(300, 40);
    check_shape(500, 500);
    check_shape(333, 170);
    check_shape(512, 17);

    // Parallel regime: measured on the shared pool across the three tasks.
    MulThresholds par{16, 64};
    BlockPool pool;
    Workspace ws(pool);
    Natural a = oracle::random_natural(rng, 300);
    Natural b = oracle::random_natural(rng, 300);
    pool.reset_high_water();
    mul(a, b, ws, par);
    REQUIRE(pool.high_water_limbs() <= workspace_bound(300, 300, par));
}

TEST_CASE("asymptotic win over classical") {
    MulThresholds t = global_tuning().mul;
    std::size_t n = 4 * t.karatsuba_cutoff;
    std::mt19937_64 rng(8);
    Natural a = oracle::random_natural(rng, n);
    Natural b = oracle::random_natural(rng, n);
    Workspace ws;
    // Warm up.
    mul_karatsuba(a, b, ws, t);
    mul_classical(a, b);
    double fast = best_time([&] {
        for (int i = 0; i < 100; i++) mul_karatsuba(a, b, ws, t);
    });
    double classical = best_time([&] {
        for (int i = 0; i < 100; i++) mul_classical(a, b);
    });
    CHECK(fast < classical);
}
