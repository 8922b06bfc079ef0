#pragma once
// benchkit.hpp - Benchmark harness: seeded operand generation, checksum
// validation, timed loops with median-of-5 reporting, table builders for the
// standard measurement shapes, and a per-platform threshold tuner.
//
// Reproducibility contract. Operands come from a fixed, documented generator
// (xorshift64* seeded from (seed, index), see gen_operand) and results are
// folded into a checksum with acc <- acc * MULT + limb, MULT as below. The
// same (operation, lengths, repeats, seed) therefore yields the same checksum
// on any build, any thread setting, any platform; only the timing columns
// vary. Performance conclusions should always come from ratios within one
// process run, never from absolute seconds.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bigslice/divengine.hpp"
#include "bigslice/mulengine.hpp"
#include "bigslice/natural.hpp"
#include "bigslice/shinv.hpp"
#include "bigslice/sliceprod.hpp"
#include "bigslice/thresholds.hpp"

namespace bigslice {

// Fixed odd multiplier for the result checksum.
inline constexpr std::uint64_t kChecksumMult = 6364136223846793005ULL;

enum class BenchOp {
    mul,
    mul_classical,
    slice_low,
    slice_high,
    shinv,
    div_classical,
    div_fast,
    div_quotient_only,
};

inline const char* to_string(BenchOp op) {
    switch (op) {
        case BenchOp::mul: return "mul";
        case BenchOp::mul_classical: return "mul-classical";
        case BenchOp::slice_low: return "slice-low";
        case BenchOp::slice_high: return "slice-high";
        case BenchOp::shinv: return "shinv";
        case BenchOp::div_classical: return "div-classical";
        case BenchOp::div_fast: return "div-fast";
        case BenchOp::div_quotient_only: return "div-quotient-only";
    }
    return "?";
}

struct BenchSpec {
    BenchOp op = BenchOp::mul;
    std::size_t len_a = 1;      // limbs of the first operand (dividend, for divisions)
    std::size_t len_b = 1;      // limbs of the second operand (divisor / precision)
    std::size_t repeats = 1;
    std::uint64_t seed = 1;
    unsigned threads = 0;       // 0 = library default; 1 forces sequential
};

struct BenchRecord {
    BenchSpec spec;
    double elapsed = 0.0;       // median timed-loop wall time, seconds
    double per_op = 0.0;        // elapsed / repeats
    double cpu_per_op = 0.0;    // process CPU time per operation (informational)
    std::uint64_t checksum = 0;
    std::optional<double> baseline_ratio;
};

// ---------------------------------------------------------------------------
// Operand generation (fixed algorithm, part of the interface: golden
// checksums depend on it):
//   state = mix64(seed XOR index * 0x9E3779B97F4A7C15) | 1
//   limb  = xorshift64*(state) per draw, top limb redrawn until nonzero
// where mix64 is the splitmix64 finalizer
//   z ^= z>>30; z *= 0xBF58476D1CE4E5B9; z ^= z>>27; z *= 0x94D049BB133111EB;
//   z ^= z>>31;
// and xorshift64* is s ^= s>>12; s ^= s<<25; s ^= s>>27; out = s *
// 0x2545F4914F6CDD1D.

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t xorshift64s(std::uint64_t& s) {
    s ^= s >> 12;
    s ^= s << 25;
    s ^= s >> 27;
    return s * 0x2545F4914F6CDD1DULL;
}

} // namespace detail

inline Natural gen_operand(std::uint64_t seed, std::uint64_t index, std::size_t len) {
    if (len < 1) throw std::invalid_argument("gen_operand: len must be positive");
    std::uint64_t s = detail::mix64(seed ^ (index * 0x9E3779B97F4A7C15ULL)) | 1;
    std::vector<limb> limbs(len);
    for (auto& l : limbs) l = detail::xorshift64s(s);
    while (limbs.back() == 0) limbs.back() = detail::xorshift64s(s);
    return Natural::from_limbs(std::move(limbs));
}

inline std::uint64_t checksum_fold(std::uint64_t acc, std::span<const limb> limbs) {
    for (limb l : limbs) acc = acc * kChecksumMult + l;
    return acc;
}

namespace detail {

inline double wall_now() {
    return std::chrono::duration<double>(
               std::chrono::high_resolution_clock::now().time_since_epoch())
        .count();
}

inline double cpu_now() {
    return static_cast<double>(std::clock()) / CLOCKS_PER_SEC;
}

struct BenchOperands {
    Natural a;
    Natural b;
};

// Operands for iteration i, regenerated from (seed, iteration index).
// Generation happens outside the timed window so that small-operand ratios
// measure the arithmetic rather than the generator.
inline BenchOperands gen_bench_operands(const BenchSpec& spec, std::size_t i) {
    BenchOperands o;
    o.a = gen_operand(spec.seed, 2 * i, spec.len_a);
    if (spec.op != BenchOp::shinv) o.b = gen_operand(spec.seed, 2 * i + 1, spec.len_b);
    return o;
}

// One timed iteration: runs the operation and folds the result into the
// checksum.
inline std::uint64_t bench_iteration(const BenchSpec& spec, const BenchOperands& o,
                                     std::uint64_t acc, const Tuning& tn,
                                     Workspace& ws) {
    switch (spec.op) {
        case BenchOp::mul:
            return checksum_fold(acc, mul(o.a, o.b, ws, tn.mul).limbs());
        case BenchOp::mul_classical:
            return checksum_fold(acc, mul_classical(o.a, o.b).limbs());
        case BenchOp::slice_low: {
            ProductSlice s = slice_mulders(o.a, o.b, {0, spec.len_a, 2}, tn.mulders, ws);
            return checksum_fold(acc, s.limbs);
        }
        case BenchOp::slice_high: {
            ProductSlice s = slice_mulders(o.a, o.b, {spec.len_a, spec.len_a + spec.len_b, 2},
                                           tn.mulders, ws);
            return checksum_fold(acc, s.limbs);
        }
        case BenchOp::shinv: {
            ShiftedInverse si = shifted_inverse(o.a, spec.len_b, ws, tn.mulders);
            acc = checksum_fold(acc, si.w.limbs());
            return acc * kChecksumMult + si.s;
        }
        case BenchOp::div_classical: {
            DivResult r = divide_classical(o.a, o.b);
            acc = checksum_fold(acc, r.q.limbs());
            return checksum_fold(acc, r.r->limbs());
        }
        case BenchOp::div_fast: {
            DivResult r = detail::divide_fast_core(o.a, o.b, true, tn.div, ws, tn.mulders,
                                                   nullptr, nullptr);
            acc = checksum_fold(acc, r.q.limbs());
            return checksum_fold(acc, r.r->limbs());
        }
        case BenchOp::div_quotient_only: {
            DivResult r = detail::divide_fast_core(o.a, o.b, false, tn.div, ws, tn.mulders,
                                                   nullptr, nullptr);
            return checksum_fold(acc, r.q.limbs());
        }
    }
    throw std::invalid_argument("unknown benchmark operation");
}

} // namespace detail

// Warm-up pass, then five timed loops of `repeats` operations each with
// per-iteration operand regeneration; the median loop is reported. Checksums
// are identical across loops by construction and asserted so.
inline BenchRecord run_bench(const BenchSpec& spec) {
    if (spec.repeats < 1 || spec.len_a < 1 || spec.len_b < 1) {
        throw std::invalid_argument("invalid benchmark spec");
    }
    Tuning tn = global_tuning();
    if (spec.threads == 1) tn.mul.parallel_cutoff = detail::kNoParallel;
    Workspace ws;

    std::vector<detail::BenchOperands> ops(spec.repeats);
    for (std::size_t i = 0; i < spec.repeats; i++) ops[i] = detail::gen_bench_operands(spec, i);
    std::uint64_t check = detail::bench_iteration(spec, ops[0], 0, tn, ws);  // warm-up
    (void)check;

    std::vector<double> loops;
    std::uint64_t acc_first = 0;
    double cpu0 = detail::cpu_now();
    for (int rep = 0; rep < 5; rep++) {
        std::uint64_t acc = 0;
        double t0 = detail::wall_now();
        for (std::size_t i = 0; i < spec.repeats; i++) {
            acc = detail::bench_iteration(spec, ops[i], acc, tn, ws);
        }
        double t1 = detail::wall_now();
        loops.push_back(t1 - t0);
        if (rep == 0) {
            acc_first = acc;
        } else {
            assert(acc == acc_first);
        }
    }
    double cpu1 = detail::cpu_now();

    std::sort(loops.begin(), loops.end());
    BenchRecord rec;
    rec.spec = spec;
    rec.elapsed = loops[loops.size() / 2];
    rec.per_op = rec.elapsed / static_cast<double>(spec.repeats);
    rec.cpu_per_op = (cpu1 - cpu0) / (5.0 * static_cast<double>(spec.repeats));
    rec.checksum = acc_first;
    return rec;
}

// Two specs measured with interleaved timed loops (a,b,a,b,...), so slow
// machine phases hit both sides of a ratio about equally. Medians per
// operation as in run_bench.
inline std::pair<BenchRecord, BenchRecord> run_bench_paired(const BenchSpec& sa,
                                                            const BenchSpec& sb) {
    if (sa.repeats < 1 || sa.len_a < 1 || sa.len_b < 1 || sb.repeats < 1 ||
        sb.len_a < 1 || sb.len_b < 1) {
        throw std::invalid_argument("invalid benchmark spec");
    }
    Tuning ta = global_tuning(), tb = global_tuning();
    if (sa.threads == 1) ta.mul.parallel_cutoff = detail::kNoParallel;
    if (sb.threads == 1) tb.mul.parallel_cutoff = detail::kNoParallel;
    Workspace ws;
    std::vector<detail::BenchOperands> oa(sa.repeats), ob(sb.repeats);
    for (std::size_t i = 0; i < sa.repeats; i++) oa[i] = detail::gen_bench_operands(sa, i);
    for (std::size_t i = 0; i < sb.repeats; i++) ob[i] = detail::gen_bench_operands(sb, i);
    detail::bench_iteration(sa, oa[0], 0, ta, ws);
    detail::bench_iteration(sb, ob[0], 0, tb, ws);

    std::vector<double> la, lb;
    std::uint64_t ca = 0, cb = 0;
    for (int rep = 0; rep < 5; rep++) {
        std::uint64_t acc = 0;
        double t0 = detail::wall_now();
        for (std::size_t i = 0; i < sa.repeats; i++) {
            acc = detail::bench_iteration(sa, oa[i], acc, ta, ws);
        }
        la.push_back(detail::wall_now() - t0);
        ca = acc;
        acc = 0;
        t0 = detail::wall_now();
        for (std::size_t i = 0; i < sb.repeats; i++) {
            acc = detail::bench_iteration(sb, ob[i], acc, tb, ws);
        }
        lb.push_back(detail::wall_now() - t0);
        cb = acc;
    }
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    BenchRecord ra, rb;
    ra.spec = sa;
    ra.elapsed = la[la.size() / 2];
    ra.per_op = ra.elapsed / static_cast<double>(sa.repeats);
    ra.checksum = ca;
    rb.spec = sb;
    rb.elapsed = lb[lb.size() / 2];
    rb.per_op = rb.elapsed / static_cast<double>(sb.repeats);
    rb.checksum = cb;
    return {ra, rb};
}

// ---------------------------------------------------------------------------
// Tables

struct Table {
    std::string title;
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;

    void write_csv(std::ostream& os) const {
        for (std::size_t i = 0; i < headers.size(); i++) {
            os << headers[i] << (i + 1 < headers.size() ? "," : "\n");
        }
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); i++) {
                os << row[i] << (i + 1 < row.size() ? "," : "\n");
            }
        }
    }

    void write_text(std::ostream& os) const {
        std::vector<std::size_t> width(headers.size(), 0);
        for (std::size_t i = 0; i < headers.size(); i++) width[i] = headers[i].size();
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); i++) {
                if (row[i].size() > width[i]) width[i] = row[i].size();
            }
        }
        if (!title.empty()) os << title << "\n";
        auto emit = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); i++) {
                os << std::string(width[i] - cells[i].size() + (i ? 2 : 0), ' ') << cells[i];
            }
            os << "\n";
        };
        emit(headers);
        for (const auto& row : rows) emit(row);
    }
};

namespace detail {

inline std::string fmt_time(double seconds) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", seconds);
    return buf;
}

inline std::string fmt_ratio(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r);
    return buf;
}

} // namespace detail

// Same-length multiplication: our dispatcher against the classical reference.
inline Table table_mul_equal_lengths(const std::vector<std::size_t>& lengths,
                                     std::size_t repeats, std::uint64_t seed,
                                     unsigned threads = 0) {
    Table t;
    t.title = "Multiplication of two integers of the same length";
    t.headers = {"length", "our_time", "ref_time", "ref_over_ours", "checksum"};
    for (std::size_t n : lengths) {
        BenchRecord ours = run_bench({BenchOp::mul, n, n, repeats, seed, threads});
        BenchRecord ref = run_bench({BenchOp::mul_classical, n, n, repeats, seed, threads});
        assert(ours.checksum == ref.checksum);
        t.rows.push_back({std::to_string(n), detail::fmt_time(ours.per_op),
                          detail::fmt_time(ref.per_op),
                          detail::fmt_ratio(ref.per_op / ours.per_op),
                          std::to_string(ours.checksum)});
    }
    return t;
}

// Lower half of an N x N product: classical slice, full product then discard,
// and the Mulders slice, with the three ratios.
inline Table table_half_product(const std::vector<std::size_t>& lengths,
                                std::size_t repeats, std::uint64_t seed,
                                unsigned threads = 0) {
    Tuning tn = global_tuning();
    if (threads == 1) tn.mul.parallel_cutoff = detail::kNoParallel;
    Workspace ws;
    Table t;
    t.title = "Lower half of the product of two N-limb values";
    t.headers = {"N",          "class_time", "kara_time",  "fast_time",
                 "kara_class", "fast_class", "fast_kara",  "checksum"};
    for (std::size_t n : lengths) {
        std::vector<std::pair<Natural, Natural>> ops(repeats);
        for (std::size_t i = 0; i < repeats; i++) {
            ops[i] = {gen_operand(seed, 2 * i, n), gen_operand(seed, 2 * i + 1, n)};
        }
        auto time_loop = [&](auto&& fn) {
            std::uint64_t acc0 = fn(ops[0], 0);  // warm-up
            (void)acc0;
            std::vector<double> loops;
            std::uint64_t acc = 0;
            for (int rep = 0; rep < 5; rep++) {
                acc = 0;
                double t0 = detail::wall_now();
                for (std::size_t i = 0; i < repeats; i++) acc = fn(ops[i], acc);
                loops.push_back(detail::wall_now() - t0);
            }
            std::sort(loops.begin(), loops.end());
            return std::pair<double, std::uint64_t>(
                loops[loops.size() / 2] / static_cast<double>(repeats), acc);
        };
        using Op = std::pair<Natural, Natural>;
        auto [t_class, c_class] = time_loop([&](const Op& o, std::uint64_t acc) {
            return checksum_fold(acc, slice_classical(o.first, o.second, {0, n, 2}).limbs);
        });
        auto [t_kara, c_kara] = time_loop([&](const Op& o, std::uint64_t acc) {
            Natural full = mul(o.first, o.second, ws, tn.mul);
            return checksum_fold(acc, full.limbs().subspan(0, n));
        });
        auto [t_fast, c_fast] = time_loop([&](const Op& o, std::uint64_t acc) {
            return checksum_fold(acc,
                                 slice_mulders(o.first, o.second, {0, n, 2}, tn.mulders, ws).limbs);
        });
        assert(c_class == c_fast);
        assert(c_class == c_kara);  // low slices are exact
        t.rows.push_back({std::to_string(n), detail::fmt_time(t_class),
                          detail::fmt_time(t_kara), detail::fmt_time(t_fast),
                          detail::fmt_ratio(t_kara / t_class),
                          detail::fmt_ratio(t_fast / t_class),
                          detail::fmt_ratio(t_fast / t_kara),
                          std::to_string(c_fast)});
    }
    return t;
}

// Division shapes at a fixed dividend length: the four algorithm rows, each
// scaled by the time of multiplying divisor by quotient.
inline Table table_div_shapes(std::size_t u_len, const std::vector<std::size_t>& v_lens,
                              std::size_t repeats, std::uint64_t seed,
                              unsigned threads = 0) {
    Table t;
    t.title = "Scaled multiplication and division (dividend " +
              std::to_string(u_len) + " limbs)";
    t.headers = {"v,q"};
    std::vector<std::vector<std::string>> cells(4);
    const char* row_names[4] = {"classical mul", "classical div", "fast div+rem",
                                "fast quot only"};
    for (int r = 0; r < 4; r++) cells[r].push_back(row_names[r]);
    for (std::size_t nv : v_lens) {
        if (nv >= u_len) throw std::invalid_argument("divisor length must be below dividend");
        std::size_t nq = u_len - nv;
        t.headers.push_back(std::to_string(nv) + "," + std::to_string(nq));
        BenchRecord base = run_bench({BenchOp::mul, nv, nq, repeats, seed, threads});
        BenchRecord cmul =
            run_bench({BenchOp::mul_classical, nv, nq, repeats, seed, threads});
        BenchRecord cdiv =
            run_bench({BenchOp::div_classical, u_len, nv, repeats, seed, threads});
        BenchRecord fdiv = run_bench({BenchOp::div_fast, u_len, nv, repeats, seed, threads});
        BenchRecord fq =
            run_bench({BenchOp::div_quotient_only, u_len, nv, repeats, seed, threads});
        assert(cdiv.checksum == fdiv.checksum);
        cells[0].push_back(detail::fmt_ratio(cmul.per_op / base.per_op));
        cells[1].push_back(detail::fmt_ratio(cdiv.per_op / base.per_op));
        cells[2].push_back(detail::fmt_ratio(fdiv.per_op / base.per_op));
        cells[3].push_back(detail::fmt_ratio(fq.per_op / base.per_op));
    }
    for (auto& row : cells) t.rows.push_back(std::move(row));
    return t;
}

// 2N x N division shapes as N grows; scaled by the time of an N x N multiply.
inline Table table_div_2n_n(const std::vector<std::size_t>& sizes, std::size_t repeats,
                            std::uint64_t seed, unsigned threads = 0) {
    Table t;
    t.title = "2N x N multiplication and division, scaled by an N x N multiply";
    t.headers = {"N", "classical_multiply", "classical_divide", "fast_divide",
                 "divide_no_rem", "checksum"};
    for (std::size_t n : sizes) {
        BenchRecord base = run_bench({BenchOp::mul, n, n, repeats, seed, threads});
        BenchRecord cmul = run_bench({BenchOp::mul_classical, n, n, repeats, seed, threads});
        BenchRecord cdiv =
            run_bench({BenchOp::div_classical, 2 * n, n, repeats, seed, threads});
        BenchRecord fdiv = run_bench({BenchOp::div_fast, 2 * n, n, repeats, seed, threads});
        BenchRecord fq =
            run_bench({BenchOp::div_quotient_only, 2 * n, n, repeats, seed, threads});
        assert(cdiv.checksum == fdiv.checksum);
        t.rows.push_back({std::to_string(n), detail::fmt_ratio(cmul.per_op / base.per_op),
                          detail::fmt_ratio(cdiv.per_op / base.per_op),
                          detail::fmt_ratio(fdiv.per_op / base.per_op),
                          detail::fmt_ratio(fq.per_op / base.per_op),
                          std::to_string(cdiv.checksum)});
    }
    return t;
}

// Shifted inverse against a same-size multiplication.
inline Table table_shinv(const std::vector<std::size_t>& sizes, std::size_t repeats,
                         std::uint64_t seed, unsigned threads = 0) {
    Table t;
    t.title = "Shifted inverse of a k-limb divisor to k limbs, scaled by a k x k multiply";
    t.headers = {"k", "shinv_time", "mul_time", "shinv_over_mul", "checksum"};
    for (std::size_t k : sizes) {
        BenchRecord inv = run_bench({BenchOp::shinv, k, k, repeats, seed, threads});
        BenchRecord base = run_bench({BenchOp::mul, k, k, repeats, seed, threads});
        t.rows.push_back({std::to_string(k), detail::fmt_time(inv.per_op),
                          detail::fmt_time(base.per_op),
                          detail::fmt_ratio(inv.per_op / base.per_op),
                          std::to_string(inv.checksum)});
    }
    return t;
}

// ---------------------------------------------------------------------------
// Tuning file: flat "key = value" lines, '#' comments.

inline std::string emit_tuning(const Tuning& t) {
    std::ostringstream os;
    os << "# bigslice tuning thresholds (limb counts unless noted)\n";
    os << "karatsuba_cutoff = " << t.mul.karatsuba_cutoff << "\n";
    os << "parallel_cutoff = " << t.mul.parallel_cutoff << "\n";
    os << "mulders_cutoff = " << t.mulders.mulders_cutoff << "\n";
    os << "beta = " << t.mulders.beta << "\n";
    os << "fast_cutoff = " << t.div.fast_cutoff << "\n";
    os << "block_ratio = " << t.div.block_ratio << "\n";
    return os.str();
}

inline Tuning parse_tuning(const std::string& text) {
    Tuning t;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        lineno++;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key, eq, value;
        if (!(ls >> key)) continue;  // blank
        if (!(ls >> eq >> value) || eq != "=") {
            throw parse_error("tuning file line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        }
        if (key == "karatsuba_cutoff") {
            t.mul.karatsuba_cutoff = std::stoull(value);
        } else if (key == "parallel_cutoff") {
            t.mul.parallel_cutoff = std::stoull(value);
        } else if (key == "mulders_cutoff") {
            t.mulders.mulders_cutoff = std::stoull(value);
        } else if (key == "beta") {
            t.mulders.beta = std::stod(value);
        } else if (key == "fast_cutoff") {
            t.div.fast_cutoff = std::stoull(value);
        } else if (key == "block_ratio") {
            t.div.block_ratio = std::stod(value);
        } else {
            throw parse_error("tuning file line " + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
        }
    }
    if (t.mul.karatsuba_cutoff < 2 || t.mul.parallel_cutoff < t.mul.karatsuba_cutoff ||
        t.mulders.beta <= 0.0 || t.mulders.beta >= 1.0 || t.div.fast_cutoff < 2 ||
        t.div.block_ratio <= 1.0) {
        throw parse_error("tuning values out of range");
    }
    return t;
}

inline Tuning load_tuning_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open tuning file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_tuning(ss.str());
}

// ---------------------------------------------------------------------------
// Tuner: one threshold at a time, grid candidates spaced under 20%, cost from
// repeated timed loops, and a plateau rule (smallest candidate within
// tolerance of the best) so that re-runs land on the same value.

struct TuneOptions {
    bool quick = false;
    std::uint64_t seed = 1;
    std::ostream* log = nullptr;
};

namespace detail {

inline double probe_best(const std::function<void()>& fn, int reps) {
    fn();  // warm
    double best = 1e30;
    for (int r = 0; r < reps; r++) {
        double t0 = wall_now();
        fn();
        best = std::min(best, wall_now() - t0);
    }
    return best;
}

template <typename T>
T plateau_pick(const std::vector<T>& candidates, const std::vector<double>& costs,
               double tol = 0.08) {
    double best = costs[0];
    for (double c : costs) best = std::min(best, c);
    for (std::size_t i = 0; i < candidates.size(); i++) {
        if (costs[i] <= best * (1.0 + tol)) return candidates[i];
    }
    return candidates[0];
}

} // namespace detail

inline Tuning tune(const TuneOptions& opt = TuneOptions{}) {
    Tuning tn = global_tuning();
    Workspace ws;
    int reps = opt.quick ? 3 : 5;
    auto log = [&](const std::string& s) {
        if (opt.log != nullptr) *opt.log << s << "\n";
    };

    // karatsuba_cutoff: sequential products at mid sizes.
    {
        std::vector<std::size_t> cands = {8, 9, 11, 13, 15, 18, 21, 25, 30};
        std::vector<double> costs;
        for (std::size_t c : cands) {
            MulThresholds mt{c, detail::kNoParallel};
            double cost = 0;
            for (std::size_t n : {64ul, 160ul}) {
                Natural a = gen_operand(opt.seed, n, n);
                Natural b = gen_operand(opt.seed, n + 1, n);
                int inner = opt.quick ? 100 : 300;
                cost += detail::probe_best(
                    [&] {
                        for (int i = 0; i < inner; i++) mul_karatsuba(a, b, ws, mt);
                    },
                    reps);
            }
            costs.push_back(cost);
        }
        tn.mul.karatsuba_cutoff = detail::plateau_pick(cands, costs);
        log("karatsuba_cutoff = " + std::to_string(tn.mul.karatsuba_cutoff));
    }

    // parallel_cutoff: full products around the threading break-even point.
    {
        std::vector<std::size_t> cands = {128, 154, 185, 222, 266, 319, 383,
                                          460,  552, 662, 794, 953, 1144};
        std::vector<double> costs;
        for (std::size_t c : cands) {
            MulThresholds mt{tn.mul.karatsuba_cutoff, c};
            double cost = 0;
            for (std::size_t n : {192ul, 384ul, 768ul}) {
                Natural a = gen_operand(opt.seed, n, n);
                Natural b = gen_operand(opt.seed, n + 1, n);
                int inner = opt.quick ? 10 : 30;
                cost += detail::probe_best(
                    [&] {
                        for (int i = 0; i < inner; i++) mul(a, b, ws, mt);
                    },
                    reps);
            }
            costs.push_back(cost);
        }
        tn.mul.parallel_cutoff = detail::plateau_pick(cands, costs);
        log("parallel_cutoff = " + std::to_string(tn.mul.parallel_cutoff));
    }

    // mulders_cutoff and beta: low and high halves at representative sizes.
    {
        std::vector<std::size_t> cands = {8, 9, 11, 13, 15, 18, 21, 25, 30};
        std::vector<double> costs;
        for (std::size_t c : cands) {
            MuldersConfig mc{tn.mulders.beta, c};
            double cost = 0;
            for (std::size_t n : {96ul, 200ul}) {
                Natural a = gen_operand(opt.seed, n, n);
                Natural b = gen_operand(opt.seed, n + 1, n);
                int inner = opt.quick ? 30 : 100;
                cost += detail::probe_best(
                    [&] {
                        for (int i = 0; i < inner; i++)
                            slice_mulders(a, b, {0, n, 2}, mc, ws);
                    },
                    reps);
            }
            costs.push_back(cost);
        }
        tn.mulders.mulders_cutoff = detail::plateau_pick(cands, costs);
        log("mulders_cutoff = " + std::to_string(tn.mulders.mulders_cutoff));
    }
    {
        std::vector<double> cands = {0.55, 0.60, 0.65, 0.70, 0.75, 0.80};
        std::vector<double> costs;
        for (double bta : cands) {
            MuldersConfig mc{bta, tn.mulders.mulders_cutoff};
            double cost = 0;
            std::size_t n = 128;
            Natural a = gen_operand(opt.seed, n, n);
            Natural b = gen_operand(opt.seed, n + 1, n);
            int inner = opt.quick ? 30 : 100;
            cost += detail::probe_best(
                [&] {
                    for (int i = 0; i < inner; i++) slice_mulders(a, b, {0, n, 2}, mc, ws);
                },
                reps);
            cost += detail::probe_best(
                [&] {
                    for (int i = 0; i < inner; i++)
                        slice_mulders(a, b, {n, 2 * n, 2}, mc, ws);
                },
                reps);
            costs.push_back(cost);
        }
        tn.mulders.beta = detail::plateau_pick(cands, costs);
        std::ostringstream os;
        os << "beta = " << tn.mulders.beta;
        log(os.str());
    }

    // fast_cutoff: 2N x N divides straddling the classical/fast crossover.
    {
        std::vector<std::size_t> cands = {16, 19, 23, 27, 32, 38, 45, 54, 64, 76, 91};
        std::vector<double> costs;
        MuldersConfig save_m = global_tuning().mulders;
        global_tuning().mulders = tn.mulders;
        for (std::size_t c : cands) {
            DivThresholds dt{c, tn.div.block_ratio};
            double cost = 0;
            for (std::size_t n : {24ul, 40ul, 64ul, 96ul}) {
                Natural u = gen_operand(opt.seed, n, 2 * n);
                Natural v = gen_operand(opt.seed, n + 1, n);
                int inner = opt.quick ? 10 : 30;
                cost += detail::probe_best(
                    [&] {
                        for (int i = 0; i < inner; i++) divide(u, v, true, dt, ws);
                    },
                    reps);
            }
            costs.push_back(cost);
        }
        tn.div.fast_cutoff = detail::plateau_pick(cands, costs);
        global_tuning().mulders = save_m;
        log("fast_cutoff = " + std::to_string(tn.div.fast_cutoff));
    }

    // block_ratio: quotient-to-divisor shapes around the super-digit regime.
    {
        std::vector<double> cands = {1.3, 1.55, 1.85, 2.2, 2.6, 3.1};
        std::vector<double> costs;
        MuldersConfig save_m = global_tuning().mulders;
        global_tuning().mulders = tn.mulders;
        for (double c : cands) {
            DivThresholds dt{tn.div.fast_cutoff, c};
            double cost = 0;
            std::size_t nv = 48;
            for (std::size_t nq : {72ul, 96ul, 144ul, 192ul}) {
                Natural u = gen_operand(opt.seed, nq, nv + nq);
                Natural v = gen_operand(opt.seed, nq + 1, nv);
                int inner = opt.quick ? 5 : 15;
                cost += detail::probe_best(
                    [&] {
                        for (int i = 0; i < inner; i++) divide(u, v, true, dt, ws);
                    },
                    reps);
            }
            costs.push_back(cost);
        }
        tn.div.block_ratio = detail::plateau_pick(cands, costs);
        global_tuning().mulders = save_m;
        std::ostringstream os;
        os << "block_ratio = " << tn.div.block_ratio;
        log(os.str());
    }

    return tn;
}

} // namespace bigslice
