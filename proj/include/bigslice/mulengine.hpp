#pragma once
// mulengine.hpp - Full products: classical baseline, Karatsuba with support
// for unbalanced operands, and a concurrent top-level split.
//
// mul_classical is the correctness oracle for every other product routine in
// the library: all of them must match it limb for limb.
//
// Unbalanced handling: when one operand is at least twice as long as the
// other, the long one is cut into blocks sized to the short one and the block
// products are accumulated with shifts, so the recursion proper only ever
// sees near-balanced shapes. The Karatsuba middle term uses the subtractive
// form |a1-a0|*|b1-b0| to keep all intermediates unsigned.
//
// Scratch is one block per call, sized up front by workspace_bound and carved
// by a stack allocator, so exhaustion mid-recursion is impossible and the
// steady-state cost of temporaries is a pointer bump.
//
// Above parallel_cutoff the three top-level sub-products run on three tasks;
// recombination happens after all of them join. Only the top level spawns.

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <future>
#include <thread>

#include "bigslice/natural.hpp"
#include "bigslice/thresholds.hpp"
#include "bigslice/workspace.hpp"

namespace bigslice {
namespace detail {

inline constexpr std::size_t kNoParallel = static_cast<std::size_t>(-1);

// Persistent workers for the top-level product split. Tasks never submit
// further tasks, so a small fixed pool cannot deadlock. Spawning threads per
// multiplication would cost more than a mid-sized product, and condvar wakeups
// alone are too slow for tasks in the tens of microseconds, so workers poll
// briefly before sleeping and a waiting caller runs queued tasks itself.
class TaskPool {
public:
    struct TaskState {
        std::function<void()> fn;
        std::atomic<bool> done{false};
    };
    using Handle = std::shared_ptr<TaskState>;

    static TaskPool& global() {
        static TaskPool pool(2);
        return pool;
    }

    explicit TaskPool(unsigned workers) {
        for (unsigned i = 0; i < workers; i++) {
            threads_.emplace_back([this] { worker(); });
        }
    }

    ~TaskPool() {
        stop_.store(true, std::memory_order_release);
        cv_.notify_all();
        for (auto& th : threads_) th.join();
    }

    Handle submit(std::function<void()> fn) {
        auto st = std::make_shared<TaskState>();
        st->fn = std::move(fn);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            queue_.push_back(st);
        }
        cv_.notify_one();
        return st;
    }

    // Blocks until the task completes, running other queued tasks meanwhile.
    void wait(const Handle& h) {
        while (!h->done.load(std::memory_order_acquire)) {
            Handle other = try_pop();
            if (other) {
                run(other);
            } else {
                std::this_thread::yield();
            }
        }
    }

private:
    static void run(const Handle& h) {
        h->fn();
        h->done.store(true, std::memory_order_release);
    }

    Handle try_pop() {
        std::lock_guard<std::mutex> lock(mutex_);
        if (queue_.empty()) return nullptr;
        Handle h = std::move(queue_.front());
        queue_.pop_front();
        return h;
    }

    void worker() {
        unsigned idle = 0;
        while (!stop_.load(std::memory_order_acquire)) {
            Handle h = try_pop();
            if (h) {
                run(h);
                idle = 0;
                continue;
            }
            if (++idle < 200) {
                std::this_thread::yield();
                continue;
            }
            std::unique_lock<std::mutex> lock(mutex_);
            cv_.wait_for(lock, std::chrono::milliseconds(2), [this] {
                return stop_.load(std::memory_order_relaxed) || !queue_.empty();
            });
            idle = 0;
        }
    }

    std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<Handle> queue_;
    std::vector<std::thread> threads_;
    std::atomic<bool> stop_{false};
};

// Stack carving of a preallocated scratch span.
class Bump {
public:
    Bump(limb* base, std::size_t cap) : base_(base), cap_(cap) {}

    limb* take(std::size_t n) {
        assert(off_ + n <= cap_);
        limb* p = base_ + off_;
        off_ += n;
        if (off_ > high_) high_ = off_;
        return p;
    }
    std::size_t mark() const { return off_; }
    void reset(std::size_t m) {
        assert(m <= off_);
        off_ = m;
    }
    std::size_t high_water() const { return high_; }

private:
    limb* base_;
    std::size_t cap_;
    std::size_t off_ = 0;
    std::size_t high_ = 0;
};

// r[0..la+lb) = a * b, schoolbook. Operands may carry leading zero limbs.
inline void mul_classical_raw(limb* r, const limb* a, std::size_t la,
                              const limb* b, std::size_t lb) {
    zero_limbs(r, la + lb);
    if (la == 0 || lb == 0) return;
    for (std::size_t i = 0; i < la; i++) {
        r[i + lb] = addmul_1(r + i, b, lb, a[i]);
    }
}

// Tuned base case for the product recursion: short operand outside, unrolled
// inner rows, first row stored instead of accumulated.
inline void mul_base_raw(limb* r, const limb* a, std::size_t la,
                         const limb* b, std::size_t lb) {
    if (la > lb) {
        std::swap(a, b);
        std::swap(la, lb);
    }
    if (la == 0) {
        zero_limbs(r, la + lb);
        return;
    }
    r[lb] = mul_1(r, b, lb, a[0]);
    for (std::size_t i = 1; i < la; i++) {
        r[i + lb] = addmul_1_fast(r + i, b, lb, a[i]);
    }
}

inline std::size_t kara_cutoff(const MulThresholds& t) {
    return t.karatsuba_cutoff < 2 ? 2 : t.karatsuba_cutoff;
}

// d[0..dlen) = |x - y|, zero padded; returns true when x < y.
inline bool abs_diff(limb* d, std::size_t dlen, const limb* x, std::size_t lx,
                     const limb* y, std::size_t ly) {
    lx = trimmed_size(x, lx);
    ly = trimmed_size(y, ly);
    bool neg = cmp(x, lx, y, ly) < 0;
    const limb* hi = neg ? y : x;
    const limb* lo = neg ? x : y;
    std::size_t lhi = neg ? ly : lx;
    std::size_t llo = neg ? lx : ly;
    assert(lhi <= dlen);
    sub(d, hi, lhi, lo, llo);
    zero_limbs(d + lhi, dlen - lhi);
    return neg;
}

struct KaraSplit {
    std::size_t h, la1, lb1, lda, ldb, n0, n2, nmid;
};

inline KaraSplit kara_split(std::size_t la, std::size_t lb) {
    KaraSplit s;
    s.h = la / 2;
    s.la1 = la - s.h;
    s.lb1 = lb - s.h;
    s.lda = s.la1;
    s.ldb = s.h > s.lb1 ? s.h : s.lb1;
    s.n0 = 2 * s.h;
    s.n2 = la + lb - 2 * s.h;
    s.nmid = (s.n0 > s.n2 ? s.n0 : s.n2) + 2;
    return s;
}

// Recombination shared by the sequential and parallel paths: r holds m0 and
// m2 in place, mm holds |a1-a0|*|b1-b0|; adds (m0 + m2 -/+ mm) * B^h.
inline void kara_combine(limb* r, std::size_t la, std::size_t lb,
                         const KaraSplit& s, const limb* mm, std::size_t lmm,
                         bool same_sign, limb* mid) {
    copy_limbs(mid, r, s.n0);
    zero_limbs(mid + s.n0, s.nmid - s.n0);
    add_at(mid, s.nmid, 0, r + s.n0, s.n2);
    if (same_sign) {
        limb borrow = sub(mid, mid, s.nmid, mm, lmm);
        (void)borrow;
        assert(borrow == 0);
    } else {
        add_at(mid, s.nmid, 0, mm, lmm);
    }
    std::size_t lmid = trimmed_size(mid, s.nmid);
    assert(lmid <= la + lb - s.h);
    add_at(r, la + lb, s.h, mid, lmid);
}

inline void mul_rec(limb* r, const limb* a, std::size_t la, const limb* b,
                    std::size_t lb, Bump& bump, const MulThresholds& t) {
    if (la < lb) {
        std::swap(a, b);
        std::swap(la, lb);
    }
    if (lb < kara_cutoff(t)) {
        mul_base_raw(r, a, la, b, lb);
        return;
    }
    if (la >= 2 * lb) {
        // Long-by-short: lb-sized blocks of a, products accumulated at their
        // block offsets.
        zero_limbs(r, la + lb);
        std::size_t m0 = bump.mark();
        limb* tmp = bump.take(2 * lb);
        for (std::size_t off = 0; off < la; off += lb) {
            std::size_t blen = la - off < lb ? la - off : lb;
            mul_rec(tmp, a + off, blen, b, lb, bump, t);
            add_at(r, la + lb, off, tmp, blen + lb);
        }
        bump.reset(m0);
        return;
    }

    KaraSplit s = kara_split(la, lb);
    std::size_t m_outer = bump.mark();
    limb* mm = bump.take(s.lda + s.ldb);
    std::size_t m_inner = bump.mark();
    limb* da = bump.take(s.lda);
    limb* db = bump.take(s.ldb);
    bool na = abs_diff(da, s.lda, a + s.h, s.la1, a, s.h);
    bool nb = abs_diff(db, s.ldb, b + s.h, s.lb1, b, s.h);
    mul_rec(mm, da, s.lda, db, s.ldb, bump, t);
    bump.reset(m_inner);  // da/db are dead once mm is formed
    mul_rec(r, a, s.h, b, s.h, bump, t);
    mul_rec(r + 2 * s.h, a + s.h, s.la1, b + s.h, s.lb1, bump, t);
    limb* mid = bump.take(s.nmid);
    kara_combine(r, la, lb, s, mm, trimmed_size(mm, s.lda + s.ldb), na == nb, mid);
    bump.reset(m_outer);
}

// Upper bound on scratch limbs mul_rec may carve for these lengths, mirroring
// its allocation pattern.
inline std::size_t mul_rec_bound(std::size_t la, std::size_t lb,
                                 const MulThresholds& t) {
    if (la < lb) std::swap(la, lb);
    if (lb < kara_cutoff(t)) return 0;
    if (la >= 2 * lb) {
        std::size_t w = mul_rec_bound(lb, lb, t);
        std::size_t tail = la % lb;
        if (tail != 0) {
            std::size_t wt = mul_rec_bound(tail, lb, t);
            if (wt > w) w = wt;
        }
        return 2 * lb + w;
    }
    KaraSplit s = kara_split(la, lb);
    std::size_t w_mm = s.lda + s.ldb + mul_rec_bound(s.lda, s.ldb, t);
    std::size_t w_m0 = mul_rec_bound(s.h, s.h, t);
    std::size_t w_m2 = mul_rec_bound(s.la1, s.lb1, t);
    std::size_t inner = w_mm;
    if (w_m0 > inner) inner = w_m0;
    if (w_m2 > inner) inner = w_m2;
    if (s.nmid > inner) inner = s.nmid;
    return (s.lda + s.ldb) + inner;
}

struct MulProbe {
    std::size_t scratch_high_water = 0;
};

// Sequential product over a caller-provided workspace. One block acquisition
// sized by mul_rec_bound; recursion carves it.
inline void mul_seq(limb* r, const limb* a, std::size_t la, const limb* b,
                    std::size_t lb, Workspace& ws, const MulThresholds& t,
                    MulProbe* probe = nullptr) {
    std::size_t need = mul_rec_bound(la, lb, t);
    if (need == 0) {
        mul_base_raw(r, a, la, b, lb);
        return;
    }
    ScratchBuffer block = ws.acquire(need);
    Bump bump(block.data(), need);
    mul_rec(r, a, la, b, lb, bump, t);
    if (probe != nullptr) probe->scratch_high_water = bump.high_water();
}

// Top-level entry: as mul_seq, but the three Karatsuba sub-products of a
// balanced split run concurrently above parallel_cutoff.
inline void mul_top(limb* r, const limb* a, std::size_t la, const limb* b,
                    std::size_t lb, Workspace& ws, const MulThresholds& t) {
    if (la < lb) {
        std::swap(a, b);
        std::swap(la, lb);
    }
    bool balanced = lb >= kara_cutoff(t) && la < 2 * lb;
    if (!balanced || la < t.parallel_cutoff) {
        mul_seq(r, a, la, b, lb, ws, t);
        return;
    }

    KaraSplit s = kara_split(la, lb);
    ScratchBuffer da = ws.acquire(s.lda);
    ScratchBuffer db = ws.acquire(s.ldb);
    ScratchBuffer mm = ws.acquire(s.lda + s.ldb);
    bool na = abs_diff(da.data(), s.lda, a + s.h, s.la1, a, s.h);
    bool nb = abs_diff(db.data(), s.ldb, b + s.h, s.lb1, b, s.h);

    // The three sub-products run concurrently: two on the pool, one on the
    // calling thread. Output regions are disjoint.
    BlockPool& pool = ws.pool();
    limb* mmp = mm.data();
    const limb* dap = da.data();
    const limb* dbp = db.data();
    TaskPool& tasks = TaskPool::global();
    auto run_m0 = tasks.submit([&, r] {
        Workspace wl(pool);
        mul_seq(r, a, s.h, b, s.h, wl, t);
    });
    auto run_m2 = tasks.submit([&, r] {
        Workspace wl(pool);
        mul_seq(r + 2 * s.h, a + s.h, s.la1, b + s.h, s.lb1, wl, t);
    });
    {
        Workspace wl(pool);
        mul_seq(mmp, dap, s.lda, dbp, s.ldb, wl, t);
    }
    tasks.wait(run_m0);
    tasks.wait(run_m2);
    da.release();
    db.release();

    ScratchBuffer mid = ws.acquire(s.nmid);
    kara_combine(r, la, lb, s, mm.data(), trimmed_size(mm.data(), s.lda + s.ldb),
                 na == nb, mid.data());
}

} // namespace detail

inline Natural mul_classical(const Natural& a, const Natural& b) {
    if (a.is_zero() || b.is_zero()) return Natural();
    std::vector<limb> r(a.size() + b.size());
    detail::mul_classical_raw(r.data(), a.limbs().data(), a.size(),
                              b.limbs().data(), b.size());
    return Natural::from_limbs(std::move(r));
}

// Sequential Karatsuba (classical below the cutoff). The optional probe
// reports how much of the preallocated scratch the recursion actually used.
inline Natural mul_karatsuba(const Natural& a, const Natural& b, Workspace& ws,
                             const MulThresholds& t = MulThresholds{},
                             detail::MulProbe* probe = nullptr) {
    if (a.is_zero() || b.is_zero()) return Natural();
    std::vector<limb> r(a.size() + b.size());
    detail::mul_seq(r.data(), a.limbs().data(), a.size(), b.limbs().data(),
                    b.size(), ws, t, probe);
    return Natural::from_limbs(std::move(r));
}

// Dispatcher with the optionally-concurrent top level.
inline Natural mul(const Natural& a, const Natural& b, Workspace& ws,
                   const MulThresholds& t) {
    if (a.is_zero() || b.is_zero()) return Natural();
    std::vector<limb> r(a.size() + b.size());
    detail::mul_top(r.data(), a.limbs().data(), a.size(), b.limbs().data(),
                    b.size(), ws, t);
    return Natural::from_limbs(std::move(r));
}

inline Natural mul(const Natural& a, const Natural& b) {
    return mul(a, b, detail::tls_workspace(), global_tuning().mul);
}

// Upper bound on the scratch limbs any mul with these operand lengths may
// acquire, counting concurrent sub-tasks in the parallel regime. Validated in
// tests against instrumented high-water marks.
inline std::size_t workspace_bound(std::size_t la, std::size_t lb,
                                   const MulThresholds& t = MulThresholds{}) {
    if (la < lb) std::swap(la, lb);
    bool balanced = lb >= detail::kara_cutoff(t) && la < 2 * lb;
    if (balanced && la >= t.parallel_cutoff) {
        detail::KaraSplit s = detail::kara_split(la, lb);
        return s.lda + s.ldb + (s.lda + s.ldb) + s.nmid +
               detail::mul_rec_bound(s.h, s.h, t) +
               detail::mul_rec_bound(s.la1, s.lb1, t) +
               detail::mul_rec_bound(s.lda, s.ldb, t);
    }
    return detail::mul_rec_bound(la, lb, t);
}

} // namespace bigslice
