// bigslice command-line front end: benchmark tables, threshold tuning,
// randomized differential checking, and ad-hoc decimal arithmetic.
//
// Exit status: 0 success, 1 verification failure, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bigslice/bigslice.hpp"

using namespace bigslice;

namespace {

void emit_table(const Table& table, const std::string& format) {
    if (format == "csv") {
        table.write_csv(std::cout);
    } else {
        table.write_text(std::cout);
    }
}

// Deterministic per-case lengths for the check command.
std::uint64_t mix(std::uint64_t seed, std::uint64_t i, std::uint64_t salt) {
    std::uint64_t s = (seed ^ (i * 0x9E3779B97F4A7C15ULL) ^ (salt << 32)) | 1;
    return detail::xorshift64s(s);
}

int run_check(std::size_t cases, std::uint64_t seed, std::size_t max_limbs) {
    Workspace ws;
    const Tuning& tn = global_tuning();
    auto fail = [&](std::size_t i, const char* what) {
        std::cout << "FAIL: " << what << " (seed " << seed << ", case " << i << ")\n";
        return 1;
    };
    for (std::size_t i = 0; i < cases; i++) {
        std::size_t la = 1 + mix(seed, i, 1) % max_limbs;
        std::size_t lb = 1 + mix(seed, i, 2) % max_limbs;
        Natural a = gen_operand(seed, 4 * i, la);
        Natural b = gen_operand(seed, 4 * i + 1, lb);

        // Multiplication paths agree.
        Natural ref = mul_classical(a, b);
        if (mul(a, b, ws, tn.mul) != ref) return fail(i, "mul vs mul_classical");

        // Slice soundness: never high, within the deficit, low slices exact.
        std::size_t total = la + lb;
        std::size_t lo = mix(seed, i, 3) % total;
        std::size_t hi = lo + 1 + mix(seed, i, 4) % (total - lo);
        ProductSlice s = slice_mulders(a, b, {lo, hi, 2}, tn.mulders, ws);
        {
            std::vector<limb> exact(hi - lo);
            for (std::size_t j = lo; j < hi; j++) exact[j - lo] = ref.limb_at(j);
            std::vector<limb> diff(exact.size());
            detail::sub_n(diff.data(), exact.data(), s.limbs.data(), exact.size());
            for (std::size_t j = 1; j < diff.size(); j++) {
                if (diff[j] != 0) return fail(i, "slice window off by more than deficit");
            }
            if (!diff.empty() && diff[0] >= s.deficit_bound)
                return fail(i, "slice deficit bound violated");
            if (lo == 0 && !diff.empty() && diff[0] != 0)
                return fail(i, "low slice not exact");
        }

        // Division paths agree and satisfy the Euclidean identity.
        const Natural& u = la >= lb ? a : b;
        const Natural& v = la >= lb ? b : a;
        if (v.is_zero()) continue;
        DivResult dc = divide_classical(u, v);
        DivResult dd = divide(u, v, true, tn.div, ws);
        if (dd.q != dc.q || *dd.r != *dc.r) return fail(i, "divide vs divide_classical");
        DivResult df = divide_fast(u, v, true, tn.div, ws);
        if (df.q != dc.q || *df.r != *dc.r) return fail(i, "divide_fast vs divide_classical");
        DivResult db = divide_block_short(u, v, tn.div, ws);
        if (db.q != dc.q || *db.r != *dc.r)
            return fail(i, "divide_block_short vs divide_classical");
        DivResult dq = divide(u, v, false, tn.div, ws);
        if (dq.q != dc.q || dq.r.has_value()) return fail(i, "quotient-only mismatch");
        if (add(mul_classical(dc.q, v), *dc.r) != u || compare(*dc.r, v) != std::strong_ordering::less)
            return fail(i, "euclidean identity");
    }
    std::cout << "OK: " << cases << " differential cases, zero mismatches\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bigslice: arbitrary-precision arithmetic benchmarks and checks"};
    app.require_subcommand(1);

    // bench
    auto* bench = app.add_subcommand("bench", "run a benchmark table");
    std::string bench_kind;
    bench->add_option("kind", bench_kind, "mul|halfprod|shinv|div|div2n")
        ->required()
        ->check(CLI::IsMember({"mul", "halfprod", "shinv", "div", "div2n"}));
    std::vector<std::size_t> sizes;
    bench->add_option("--sizes", sizes, "limb counts (comma separated)")
        ->required()
        ->delimiter(',');
    std::size_t repeats = 10;
    bench->add_option("--repeats", repeats, "operations per timed loop");
    std::uint64_t seed = 1;
    bench->add_option("--seed", seed, "operand generator seed");
    unsigned threads = 0;
    bench->add_option("--threads", threads, "parallelism cap (1 = sequential)");
    std::string format = "text";
    bench->add_option("--format", format, "csv|text")
        ->check(CLI::IsMember({"csv", "text"}));

    // tune
    auto* tune_cmd = app.add_subcommand("tune", "measure and write platform thresholds");
    std::string out_path = "bigslice_tuning.txt";
    tune_cmd->add_option("--out", out_path, "output tuning file");
    bool quick = false;
    tune_cmd->add_flag("--quick", quick, "reduced probe budget");
    std::uint64_t tune_seed = 1;
    tune_cmd->add_option("--seed", tune_seed, "operand generator seed");

    // check
    auto* check_cmd = app.add_subcommand("check", "randomized differential verification");
    std::size_t cases = 2000;
    check_cmd->add_option("--cases", cases, "number of random cases");
    std::uint64_t check_seed = 1;
    check_cmd->add_option("--seed", check_seed, "case generator seed");
    std::size_t max_limbs = 64;
    check_cmd->add_option("--max-limbs", max_limbs, "operand length bound");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate one operation on decimals");
    std::string eval_op;
    eval_cmd->add_option("op", eval_op, "mul|divq|divr")
        ->required()
        ->check(CLI::IsMember({"mul", "divq", "divr"}));
    std::string lhs, rhs;
    eval_cmd->add_option("lhs", lhs, "left decimal operand")->required();
    eval_cmd->add_option("rhs", rhs, "right decimal operand")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (const char* env = std::getenv("BIGSLICE_TUNING")) {
        try {
            global_tuning() = load_tuning_file(env);
        } catch (const std::exception& e) {
            std::cerr << "error: BIGSLICE_TUNING: " << e.what() << "\n";
            return 2;
        }
    }

    try {
        if (bench->parsed()) {
            if (bench_kind == "mul") {
                emit_table(table_mul_equal_lengths(sizes, repeats, seed, threads), format);
            } else if (bench_kind == "halfprod") {
                emit_table(table_half_product(sizes, repeats, seed, threads), format);
            } else if (bench_kind == "shinv") {
                emit_table(table_shinv(sizes, repeats, seed, threads), format);
            } else if (bench_kind == "div") {
                // Fixed 1000-limb dividend; sizes select the divisor lengths.
                emit_table(table_div_shapes(1000, sizes, repeats, seed, threads), format);
            } else {
                emit_table(table_div_2n_n(sizes, repeats, seed, threads), format);
            }
            return 0;
        }
        if (tune_cmd->parsed()) {
            TuneOptions opt;
            opt.quick = quick;
            opt.seed = tune_seed;
            opt.log = &std::cerr;
            Tuning tn = tune(opt);
            std::string text = emit_tuning(tn);
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "error: cannot write " << out_path << "\n";
                return 2;
            }
            out << text;
            std::cout << text;
            return 0;
        }
        if (check_cmd->parsed()) {
            if (cases < 1 || max_limbs < 1) {
                std::cerr << "error: --cases and --max-limbs must be positive\n";
                return 2;
            }
            return run_check(cases, check_seed, max_limbs);
        }
        if (eval_cmd->parsed()) {
            Natural a = Natural::from_decimal(lhs);
            Natural b = Natural::from_decimal(rhs);
            if (eval_op == "mul") {
                std::cout << mul(a, b).to_decimal() << "\n";
            } else if (eval_op == "divq") {
                std::cout << divide(a, b, false).q.to_decimal() << "\n";
            } else {
                std::cout << divide(a, b, true).r->to_decimal() << "\n";
            }
            return 0;
        }
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const zero_divisor_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
