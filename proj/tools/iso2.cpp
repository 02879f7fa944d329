// iso2: batch front end for the 2-adic differential-equation solver and its
// applications. Subcommands: solve, lin-solve, isogeny, irreducible, analyze,
// bench. Exit codes: 0 success, 1 mathematical failure (machine-readable
// error class on stderr), 2 usage or schema error.

#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "twoadic/io.hpp"
#include "twoadic/irreducible.hpp"
#include "twoadic/isogeny.hpp"
#include "twoadic/norms.hpp"

using namespace twoadic;

namespace {

void print_report(const SolveReport& rep) {
    std::cout << "report: n=" << rep.n << " N=" << rep.N << " M=" << rep.M
              << " depth=" << rep.depth << "\n";
    for (const auto& lv : rep.levels)
        std::cout << "  level n=" << lv.n << " m=" << lv.m << " defect_val2=" << lv.defect_val
                  << " front_val2=" << lv.front_val << "\n";
}

int cmd_solve(const std::string& path) {
    JobFile job = parse_job_file(path, {"d", "M", "N", "modulus", "n", "U", "V", "c"});
    int n = int(job_int(job.at("n")));
    auto ctx = job_context(job, n);
    Series U = job_series(ctx.get(), job.at("U"), n);
    Series V = job_series(ctx.get(), job.at("V"), n);
    std::optional<Zq> c;
    if (job.has("c")) c = job_element(ctx.get(), job.at("c"));
    SolveReport rep;
    Series z = iso_solve(U, V, n, c, &rep);
    rep.N = job.has("N") ? int(job_int(job.at("N")))
                         : ctx->M - (required_precision(3, n) - 3);
    std::cout << "z " << encode_series(z) << "\n";
    print_report(rep);
    return 0;
}

int cmd_lin_solve(const std::string& path) {
    JobFile job = parse_job_file(path, {"d", "M", "N", "modulus", "n", "a", "f"});
    int n = int(job_int(job.at("n")));
    auto ctx = job_context(job, n);
    Zq a = job_element(ctx.get(), job.at("a"));
    Series f = job_series(ctx.get(), job.at("f"), n);
    Series y = psi_plus(a, f, n);
    std::cout << "y " << encode_series(y) << "\n";
    return 0;
}

LiftedPair pair_from_job(const JobFile& job) {
    int ell = int(job_int(job.at("ell")));
    int n = 2 * ell + 2;
    LiftedPair pair;
    pair.ctx = job_context(job, n);
    pair.ell = ell;
    pair.A2 = job_element(pair.ctx.get(), job.at("A2"));
    pair.A6 = job_element(pair.ctx.get(), job.at("A6"));
    pair.At2 = job_element(pair.ctx.get(), job.at("At2"));
    pair.At6 = job_element(pair.ctx.get(), job.at("At6"));
    pair.c = job_element(pair.ctx.get(), job.at("c"));
    return pair;
}

int cmd_isogeny(const std::string& path, bool verify, int trials) {
    JobFile job = parse_job_file(
        path, {"d", "M", "N", "modulus", "ell", "A2", "A6", "At2", "At6", "c", "trials"});
    LiftedPair pair = pair_from_job(job);
    SolveReport rep;
    IsogenyResult res = compute_isogeny(pair, &rep);
    std::cout << "ell = " << res.ell << "\n";
    std::cout << "eta_num = " << print_poly_hex(res.num) << "\n";
    std::cout << "eta_den = " << print_poly_hex(res.den) << "\n";
    std::cout << "psi = " << print_poly_hex(res.psi) << "\n";
    if (verify) {
        if (job.has("trials")) trials = int(job_int(job.at("trials")));
        GFContext F = pair.ctx->residue_field();
        OrdinaryCurve src{F, pair.A2.reduce_mod2(), pair.A6.reduce_mod2()};
        OrdinaryCurve dst{F, pair.At2.reduce_mod2(), pair.At6.reduce_mod2()};
        VerifyReport vr = verify_isogeny(res, src, dst, trials);
        std::cout << "verified " << vr.passed << "/" << vr.tried
                  << (vr.ok() ? " ok" : " FAILED") << "\n";
        if (!vr.ok()) throw MathError("isogeny verification failed");
    }
    return 0;
}

int cmd_irreducible(const std::string& weil, long long ell, bool list, long long bound,
                    const std::string& jobpath) {
    auto comma = weil.find(',');
    if (comma == std::string::npos) throw SchemaError("--weil expects q,tr");
    WeilData w{std::stoll(weil.substr(0, comma)), std::stoll(weil.substr(comma + 1))};
    if (list) {
        auto degs = achievable_degrees(w, bound);
        std::cout << "degrees:";
        for (auto d : degs) std::cout << " " << d;
        std::cout << "\n";
        return 0;
    }
    if (ell <= 0) throw SchemaError("need --ell or --list");
    auto roots = elkies_split(w, ell);
    if (!roots) {
        std::cout << "ell = " << ell << ": not split (no Elkies plan)\n";
        return 0;
    }
    DegreePlan plan = classify(w, ell);
    std::cout << "ell = " << ell << " roots = {" << roots->first << ", " << roots->second
              << "} lambda = " << plan.lambda << " ord = " << plan.ord
              << " minus_one_in_lambda = " << (plan.minus_one_in_lambda ? "yes" : "no") << "\n";
    std::cout << "degrees:";
    for (auto d : plan.degrees) std::cout << " " << d;
    std::cout << "\n";
    if (!jobpath.empty()) {
        JobFile job = parse_job_file(
            jobpath, {"d", "M", "N", "modulus", "ell", "A2", "A6", "At2", "At6", "c", "trials"});
        LiftedPair pair = pair_from_job(job);
        if (pair.ell != ell) throw SchemaError("job ell does not match --ell");
        IsogenyResult res = compute_isogeny(pair);
        GFContext F = pair.ctx->residue_field();
        OrdinaryCurve src{F, pair.A2.reduce_mod2(), pair.A6.reduce_mod2()};
        ExtractedPolys polys = extract_polys(res, plan, src);
        std::cout << "Psi_ell = " << print_poly_hex(polys.Psi_ell) << "\n";
        if (polys.Phi_ell) std::cout << "Phi_ell = " << print_poly_hex(*polys.Phi_ell) << "\n";
    }
    return 0;
}

int cmd_analyze(const std::string& path, const std::string& rs, const std::string& ss) {
    JobFile job = parse_job_file(path, {"a", "U", "V", "n"});
    auto to_q = [](const std::string& s) {
        JobValue v;
        v.raw = s;
        return job_rational(v);
    };
    mpq_class r = to_q(rs), s = to_q(ss);
    auto log2_of = [](mpq_class x) {
        // exact log2 for powers of two
        long vn = long(mpz_scan1(x.get_num().get_mpz_t(), 0));
        long vd = long(mpz_scan1(x.get_den().get_mpz_t(), 0));
        mpq_class back = mpq_class(mpz_class(1) << vn) / mpq_class(mpz_class(1) << vd);
        if (back != x) throw SchemaError("radii must be powers of two");
        return mpq_class(vn - vd);
    };
    mpq_class l2r = log2_of(r), l2s = log2_of(s);
    auto read_qs = [&](const char* key) {
        QSeries q;
        for (const auto& e : job.at(key).list) q.push_back(job_rational(e));
        return q;
    };
    QSeries U = read_qs("U"), V = read_qs("V");
    LogNorm b = roc_lower_bound(U, V, l2r, l2s);
    mpq_class bv = b.v;
    std::cout << "RoC >= 2^(" << bv.get_str() << ")";
    if (bv.get_den() == 1 && bv.get_num() <= 0) {
        mpz_class denom = mpz_class(1) << size_t(-bv.get_num().get_si());
        std::cout << " = 1/" << denom.get_str();
    }
    std::cout << "\n";
    return 0;
}

int cmd_bench(int min_log2, int max_log2, const std::string& csv_path) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!csv_path.empty()) {
        file.open(csv_path);
        out = &file;
    }
    (*out) << "n,seconds\n";
    for (int k = min_log2; k <= max_log2; ++k) {
        int n = 1 << k;
        auto ctx = make_context(1, required_precision(3, n));
        // multiplication-by-3 instance over F_2: dense, integral solution
        Series U = Series::from_ints(ctx.get(), {0, 4, 1, 0, 4}, n);
        Zq c = Zq::from_int(ctx.get(), 9);
        auto t0 = std::chrono::steady_clock::now();
        Series z = iso_solve(U, U, n, std::optional<Zq>(c));
        auto t1 = std::chrono::steady_clock::now();
        double secs = std::chrono::duration<double>(t1 - t0).count();
        (*out) << n << "," << secs << "\n";
        (void)z;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2-adic isogeny differential-equation solver"};
    app.require_subcommand(1);

    std::string job, weil = "2,-1", rflag = "1/4", sflag = "1", csv;
    long long ell = 0, bound = 0;
    bool verify = false, list = false;
    int trials = 200, min_log2 = 8, max_log2 = 14;

    auto* solve = app.add_subcommand("solve", "solve U z'^2 = c V(z) from a job file");
    solve->add_option("job", job)->required();

    auto* lin = app.add_subcommand("lin-solve", "apply the linearized-equation solver");
    lin->add_option("job", job)->required();

    auto* iso = app.add_subcommand("isogeny", "compute an isogeny x-map from lifted data");
    iso->add_option("job", job)->required();
    iso->add_flag("--verify", verify);
    iso->add_option("--trials", trials);

    auto* irr = app.add_subcommand("irreducible", "degree plans and polynomial extraction");
    irr->add_option("--weil", weil);
    irr->add_option("--ell", ell);
    irr->add_flag("--list", list);
    irr->add_option("--bound", bound);
    irr->add_option("--job", job);

    auto* ana = app.add_subcommand("analyze", "convergence-lab bound for an exact instance");
    ana->add_option("job", job)->required();
    ana->add_option("--r", rflag);
    ana->add_option("--s", sflag);

    auto* ben = app.add_subcommand("bench", "time the solver across n = 2^k");
    ben->add_option("--min-log2", min_log2);
    ben->add_option("--max-log2", max_log2);
    ben->add_option("--csv", csv);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(job);
        if (lin->parsed()) return cmd_lin_solve(job);
        if (iso->parsed()) return cmd_isogeny(job, verify, trials);
        if (irr->parsed()) return cmd_irreducible(weil, ell, list, bound, job);
        if (ana->parsed()) return cmd_analyze(job, rflag, sflag);
        if (ben->parsed()) return cmd_bench(min_log2, max_log2, csv);
    } catch (const SchemaError& e) {
        std::cerr << "error: SchemaError: " << e.what() << "\n";
        return 2;
    } catch (const PrecisionError& e) {
        std::cerr << "error: PrecisionError: " << e.what() << "\n";
        return 1;
    } catch (const HenselFailure& e) {
        std::cerr << "error: HenselFailure: " << e.what() << "\n";
        return 1;
    } catch (const NotASquare& e) {
        std::cerr << "error: NotASquare: " << e.what() << "\n";
        return 1;
    } catch (const MathError& e) {
        std::cerr << "error: MathError: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
