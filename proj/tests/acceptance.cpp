// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
// Thresholds that the underlying asymptotics cannot pin at desk scale
// (relative-deviation budgets, spread factors, bound constants) are fixed
// here as calibration constants and echoed in the output.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "ztm/report_io.hpp"

using namespace ztm;

namespace {

int g_failures = 0;

void line(int id, const char* tag, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", id, tag, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void info(const std::string& detail) {
    std::printf("[INFO] %s\n", detail.c_str());
    std::fflush(stdout);
}

std::string f(double v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

double ramanujan_brute(u64 n, i64 a) {
    cplx s{};
    for (u64 b = 1; b <= n; ++b) {
        if (std::gcd(b, n) != 1) continue;
        i128 r = (i128(b) * a) % i128(n);
        if (r < 0) r += n;
        s += unit_exp(double(r) / double(n));
    }
    return s.real();
}

// -------------------------------------------------------------------------

void criterion1_exact_identities() {
    double rdev = 0.0;
    for (u64 n = 1; n <= 200; ++n)
        for (i64 a = -200; a <= 200; ++a)
            rdev = std::max(rdev, std::abs(ramanujan_sum(n, a) - ramanujan_brute(n, a)));

    FracCoefficients fc = frac_coefficients(2, 10000);
    bool conv_exact = fc.exact;
    auto conv = dirichlet_convolve(fc.ratv, fc.ratv);
    for (u64 n = 1; n <= 10000 && conv_exact; ++n)
        if (!(conv[n] == Rational(1))) conv_exact = false;

    double kdev = 0.0;
    for (u64 c = 1; c <= 100; ++c)
        for (i64 a : {0, 1, 2, 3, 5, 17, -7})
            kdev = std::max(kdev, std::abs(kloosterman_sum(a, 0, c) - ramanujan_sum(c, a)));

    bool pass = rdev <= 1e-10 && conv_exact && kdev <= 1e-10;
    line(1, "exact identities", pass,
         "ramanujan closed-vs-brute max " + f(rdev) + " (tol 1e-10); d_{1/2} self-convolution " +
             (conv_exact ? "exact to 1e4" : "NOT exact") + "; kloosterman b=0 reduction max " +
             f(kdev) + " (tol 1e-10)");
}

void criterion2_weight_identities() {
    DyadicPartition part(1.0, 2000.0);
    double pmax = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        double x = std::exp(std::log(2000.0) * i / 10000.0);
        pmax = std::max(pmax, std::abs(part.sum(x) - 1.0));
    }

    double wdev = 0.0;
    for (double x : {1.0, 5.0})
        for (double c : {1.0, 2.0, 3.0})
            wdev = std::max(wdev, std::abs(W_eval_contour(x, c) - W_eval_direct(x)));
    for (double x : {0.01, 0.3})
        wdev = std::max(wdev, std::abs(W_eval_contour_left(x) - W_eval_direct(x)));

    double rdev = 0.0;
    for (double x : {2.0, 10.0, 100.0})
        rdev = std::max(rdev, std::abs(residue_main_term(x) - (0.5 * std::log(x) + kEulerGamma)));

    SmoothingPair six;
    double mdev = std::max(mellin_smoothing_identity_check(cplx(2.0, 0.0), 20.0, six),
                           mellin_smoothing_identity_check(cplx(1.5, 5.0), 50.0, six));

    bool pass = pmax <= 1e-10 && wdev <= 1e-9 && rdev <= 1e-6 && mdev <= 1e-6;
    line(2, "weight identities", pass,
         "partition sum dev " + f(pmax) + " (tol 1e-10); W contour-independence " + f(wdev) +
             " (tol 1e-9); residue dev " + f(rdev) + " (tol 1e-6); Mellin identity dev " +
             f(mdev) + " (tol 1e-6)");
}

void criterion3_afe() {
    ZetaEvalConfig rs;
    rs.method = ZetaMethod::riemann_siegel;
    bool pass = true;
    std::string detail;
    for (double T : {1e3, 1e4}) {
        SplitMix64 rng(mix_seed(461, u64(T)));
        std::vector<double> ts(200);
        for (auto& t : ts) t = T + T * rng.uniform01();
        auto zs = zeta_abs_sq_line_batch(0.5, ts, rs);
        std::vector<double> devs(ts.size());
        parallel_chunks(ts.size(),
                        [&](std::size_t i) { devs[i] = std::abs(afe_abs_zeta_sq(ts[i]) - zs[i]); });
        double mx = 0.0;
        for (double d : devs) mx = std::max(mx, d);
        double bound = 10.0 * std::pow(T, -2.0 / 3.0);
        pass = pass && mx <= bound;
        detail += "T=" + f(T) + ": max " + f(mx) + " vs 10*T^-2/3 = " + f(bound) + "; ";
    }
    line(3, "AFE accuracy", pass, detail + "200 samples each");
}

void criterion4_twisted_moment() {
    ZetaEvalConfig rs;
    rs.method = ZetaMethod::riemann_siegel;
    auto ens = twisted_moment_experiment(CoeffModel::random(CoeffModel::Kind::random_disk, 0), 5e4,
                                   0.25, 5, 20240801, {}, rs);
    auto unit = twisted_moment_experiment(CoeffModel::unit_model(), 1e3, 0.25, 1, 1, {}, rs);
    bool pass = ens.mean_rel_dev <= 0.05 && unit.trials[0].rel_dev <= 0.03;
    line(4, "twisted-moment consistency", pass,
         "T=5e4 theta=0.25, 5 random trials: mean rel dev " + f(ens.mean_rel_dev) +
             " (tol 0.05, calibration); unit T=1e3: " + f(unit.trials[0].rel_dev) +
             " (tol 0.03, calibration)");
}

void criterion5_diagonal_vs_main() {
    double T = 1e3;
    DirichletPolynomial unit;
    double D = diagonal_term(unit, T);
    double A0 = zero_mode_term(unit, T);
    auto mt = main_term(unit, T);
    double resid = std::abs(mt.value - (D + A0));
    double tol = 1e-5 * std::abs(mt.value);  // quadrature-error budget
    bool pass = resid <= tol;
    line(5, "diagonal + contour piece vs main term", pass,
         "unit, T=1e3: D=" + f(D) + " A0=" + f(A0) + " main=" + f(mt.value) + "; residual " +
             f(resid) + " (tol " + f(tol) + ")");
}

void criterion6_third_moment() {
    ZetaEvalConfig rs;
    rs.method = ZetaMethod::riemann_siegel;
    ZetaEvalConfig fast;
    fast.em_cutoff_multiplier = 0.5;
    fast.em_terms = 14;
    double nmin = 1e300, nmax = 0.0;
    bool transfer_ok = true;
    std::string tdetail;
    for (double T : {1e3, 2e3, 5e3, 1e4, 2e4}) {
        auto m = third_moment(0.5, T, {}, rs);
        double norm = m.value / (T * std::pow(std::log(T), 2.25));
        nmin = std::min(nmin, norm);
        nmax = std::max(nmax, norm);
        double sig = 0.5 + 3.0 / std::log(T);
        auto ms = third_moment(sig, T, {}, fast);
        double ratio = m.value / ms.value;
        double bound = 10.0 * std::pow(T, 1.5 * (sig - 0.5));
        transfer_ok = transfer_ok && ratio <= bound;
        tdetail += "T=" + f(T) + ": norm " + f(norm) + ", transfer " + f(ratio) + "<=" + f(bound) +
                   "; ";
    }
    double spread = nmax / nmin;
    bool pass = spread <= 2.0 && transfer_ok;
    line(6, "third-moment growth and transfer", pass,
         "normalized spread " + f(spread) + " (tol 2.0); " + tdetail);
}

void criterion7_trilinear() {
    // invariants over 100 random specs at A = M = N = 8
    double lin_worst = 0.0, phase_worst = 0.0, recip_worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto s = make_trilinear_spec(8, 8, 8,
                                     CoeffModel::random(CoeffModel::Kind::random_disk, 0),
                                     mix_seed(777, u64(i)));
        // linearity: split nu
        TrilinearSpec s1 = s, s2 = s;
        for (std::size_t k = 0; k < s.nu.size(); ++k) {
            s1.nu[k] = 0.3 * s.nu[k];
            s2.nu[k] = 0.7 * s.nu[k];
        }
        lin_worst = std::max(lin_worst, std::abs(trilinear_sum(s) - trilinear_sum(s1) -
                                                 trilinear_sum(s2)));
        // global phase on alpha leaves ratios unchanged
        TrilinearSpec rot = s;
        cplx ph = unit_exp(0.37);
        for (auto& v : rot.alpha) v *= ph;
        auto b0 = evaluate_bounds(s);
        auto b1 = evaluate_bounds(rot);
        phase_worst = std::max(phase_worst,
                               std::abs(b1.ratio_conjecture - b0.ratio_conjecture));
        recip_worst = std::max(recip_worst, reciprocity_residual(s));
    }
    bool invariants = lin_worst < 1e-9 && phase_worst < 1e-12 && recip_worst < 1e-9;

    // appendix lower bound
    auto lb = lower_bound_construction(64, 8, 8);
    bool lb_ok = lb.ratio >= 0.5 && lb.ratio <= 2.0;
    double c_floor = 1e-3;  // calibration constant for |S|/(MA)
    bool grid_ok = true;
    for (u64 M : {64ULL, 128ULL, 256ULL})
        for (u64 N : {8ULL, 16ULL})
            for (u64 A : {8ULL, 16ULL}) {
                auto r = lower_bound_construction(M, N, A);
                grid_ok = grid_ok && r.s_over_ma >= c_floor;
            }

    bool pass = invariants && lb_ok && grid_ok;
    line(7, "trilinear harness", pass,
         "invariants on 100 specs: linearity " + f(lin_worst) + ", phase " + f(phase_worst) +
             ", reciprocity " + f(recip_worst) + "; lower bound (64,8,8) ratio " + f(lb.ratio) +
             " in [0.5,2]; |S|/(MA) >= " + f(c_floor) + " across the grid: " +
             (grid_ok ? "yes" : "no"));

    // exploratory: conjecture stress test, reported without a verdict
    auto ens = ratio_harness(64, 64, 64, 1000,
                             CoeffModel::random(CoeffModel::Kind::random_sign, 0), 31416);
    info("criterion 7 exploratory: conjecture-1 max ratio over 1000 random_sign trials at "
         "A=M=N=64: " +
         f(ens.max_ratio_conjecture) + " (mean " + f(ens.mean_ratio_conjecture) +
         ", argmax trial " + std::to_string(ens.argmax_trial) + "; no pass/fail)");
}

void criterion8_determinism() {
    ZetaEvalConfig rs;
    rs.method = ZetaMethod::riemann_siegel;
    auto run = [&] {
        auto rep = twisted_moment_experiment(CoeffModel::random(CoeffModel::Kind::random_disk, 0),
                                       1e3, 0.25, 2, 4242, {}, rs);
        auto lb = lower_bound_construction(64, 8, 8);
        ordered_json j;
        j["experiment"] = to_json(rep);
        j["lower_bound"] = to_json(lb);
        return j.dump();
    };
    int saved = thread_count();
    set_thread_count(1);
    std::string a = run();
    set_thread_count(std::max(2u, std::thread::hardware_concurrency()));
    std::string b = run();
    set_thread_count(saved);
    bool api_ok = a == b;

    // CLI-level byte comparison when the binary path is provided
    bool cli_ok = true;
    std::string cli_note = "CLI check skipped (ZTM_BIN unset)";
    if (const char* bin = std::getenv("ZTM_BIN")) {
        auto run_cli = [&](int threads, const std::string& out) {
            std::string cmd = std::string(bin) +
                              " twisted-moment --T 400 --theta 0.25 --trials 2 --seed 9 "
                              "--threads " +
                              std::to_string(threads) + " --out " + out;
            return std::system(cmd.c_str());
        };
        int r1 = run_cli(1, "acc_det_1.json");
        int r2 = run_cli(2, "acc_det_2.json");
        auto load_stripped = [](const std::string& path) {
            std::ifstream is(path);
            ordered_json j;
            is >> j;
            j.erase("wall_time");
            j["config"].erase("threads");  // execution detail, not a value
            return j.dump();
        };
        cli_ok = r1 == 0 && r2 == 0 && load_stripped("acc_det_1.json") ==
                                           load_stripped("acc_det_2.json");
        cli_note = cli_ok ? "CLI reports byte-identical (wall_time aside)"
                          : "CLI reports differ";
    }
    line(8, "determinism across thread counts", api_ok && cli_ok,
         std::string(api_ok ? "API reports byte-identical for 1 vs max threads"
                            : "API reports differ") +
             "; " + cli_note);
}

}  // namespace

int main() {
    std::printf("acceptance suite: %d worker threads\n", thread_count());
    criterion1_exact_identities();
    criterion2_weight_identities();
    criterion3_afe();
    criterion4_twisted_moment();
    criterion5_diagonal_vs_main();
    criterion6_third_moment();
    criterion7_trilinear();
    criterion8_determinism();
    std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "OK" : "FAILURES", g_failures);
    return g_failures;
}
