#include <catch2/catch.hpp>

#include "ztm/moments.hpp"

using namespace ztm;

namespace {

// per-pair quadrature oracle for the main term, no caching or log-splitting
double main_term_brute(const DirichletPolynomial& p, double T) {
    std::size_t N = p.length();
    cplx acc{};
    for (std::size_t d = 1; d <= N; ++d)
        for (std::size_t e = 1; e <= N; ++e) {
            if (p.coeffs[d] == cplx{} || p.coeffs[e] == cplx{}) continue;
            std::uint64_t g = std::gcd(d, e);
            double gg = double(g) * double(g);
            double de = double(d) * double(e);
            double J = integrate_panels_real(T, 2.0 * T, T / 400.0, 8, [&](double t) {
                return (std::log(t * gg / (kTwoPi * de)) + 2.0 * kEulerGamma) * phi_eval(t / T);
            });
            acc += p.coeffs[d] * std::conj(p.coeffs[e]) * (double(g) / de) * J;
        }
    return acc.real();
}

}  // namespace

TEST_CASE("quadrature spec validation") {
    QuadratureSpec q;
    q.nodes_per_panel = 2;
    CHECK_THROWS_AS(q.validate(1000.0), ConfigInvalid);
    QuadratureSpec wide;
    wide.panel_width = 1.0;  // way above the oscillation scale at T = 1e4
    CHECK_THROWS_AS(wide.validate(1e4), ConfigInvalid);
    QuadratureSpec ok;
    ok.panel_width = 0.2;
    CHECK_NOTHROW(ok.validate(1000.0));
    CHECK_THROWS_AS(direct_twisted_moment(DirichletPolynomial{}, 50.0), ConfigInvalid);
}

TEST_CASE("direct twisted moment of the unit polynomial") {
    DirichletPolynomial unit;
    auto rep = direct_twisted_moment(unit, 1000.0);
    CHECK(rep.value > 0.0);
    CHECK(rep.evaluations > 0);

    // the main-term formula should reproduce the direct integral at desk scale
    auto mt = main_term(unit, 1000.0);
    CHECK(std::abs(rep.value - mt.value) / rep.value < 1e-3);

    // same moment under the Simpson rule
    QuadratureSpec simp;
    simp.rule = QuadratureSpec::Rule::simpson;
    simp.nodes_per_panel = 8;
    auto rep2 = direct_twisted_moment(unit, 1000.0, simp);
    CHECK(std::abs(rep2.value - rep.value) < 1e-7 * rep.value);

    // halving the panel width stays within the reported estimate
    QuadratureSpec half;
    half.panel_width = 0.5 * QuadratureSpec().width_for(1000.0);
    auto rep3 = direct_twisted_moment(unit, 1000.0, half);
    CHECK(std::abs(rep3.value - rep.value) <=
          std::max(rep.abs_error_estimate, 1e-10 * rep.value));
}

TEST_CASE("twisted moment is non-negative and deterministic across threads") {
    auto p = build(CoeffModel::random(CoeffModel::Kind::random_disk, 21), 12);
    int saved = thread_count();
    set_thread_count(1);
    auto one = direct_twisted_moment(p, 400.0);
    set_thread_count(4);
    auto four = direct_twisted_moment(p, 400.0);
    set_thread_count(saved);
    CHECK(one.value >= 0.0);
    CHECK(one.value == four.value);  // bit-identical pairwise reduction
}

TEST_CASE("main term: unit polynomial and Hermitian structure") {
    DirichletPolynomial unit;
    auto mt = main_term(unit, 1000.0);
    double J0 = integrate_panels_real(1000.0, 2000.0, 2.0, 8, [&](double t) {
        return (std::log(t / kTwoPi) + 2.0 * kEulerGamma) * phi_eval(t / 1000.0);
    });
    CHECK(mt.value == Approx(J0).epsilon(1e-10));
    CHECK(mt.negative_log_pairs == 0);

    // real coefficients give a real sum; conjugating all coefficients keeps it
    auto p = build(CoeffModel::random(CoeffModel::Kind::random_disk, 33), 15);
    auto m1 = main_term(p, 1000.0);
    CHECK(m1.imag_residual < 1e-12 * (1.0 + std::abs(m1.value)));
    DirichletPolynomial pc = p;
    for (auto& cc : pc.coeffs) cc = std::conj(cc);
    auto m2 = main_term(pc, 1000.0);
    CHECK(m2.value == Approx(m1.value).margin(1e-10));

    // pairs where the log factor goes negative are flagged, not dropped
    auto ones = build([] {
        CoeffModel m;
        m.kind = CoeffModel::Kind::random_sign;
        return m;
    }(), 40);
    auto m3 = main_term(ones, 1000.0);
    CHECK(m3.negative_log_pairs > 0);
}

TEST_CASE("main term equals the no-cache per-pair oracle") {
    DirichletPolynomial two(std::vector<cplx>{cplx{}, cplx(1, 0), cplx(1, 0)});
    auto mt = main_term(two, 1000.0);
    CHECK(mt.value == Approx(main_term_brute(two, 1000.0)).epsilon(1e-9));
    auto p = build(CoeffModel::random(CoeffModel::Kind::random_disk, 8), 6);
    CHECK(main_term(p, 500.0).value == Approx(main_term_brute(p, 500.0)).epsilon(1e-9));
}

TEST_CASE("approximate functional equation surrogate") {
    for (double t : {500.0, 2000.0}) {
        double dev = std::abs(afe_abs_zeta_sq(t) - zeta_abs_sq_critical(t));
        CHECK(dev <= 10.0 * std::pow(t, -2.0 / 3.0));
    }
    CHECK_THROWS_AS(afe_abs_zeta_sq(50.0), ConfigInvalid);
}

TEST_CASE("diagonal term: unit instantiation") {
    double T = 1000.0;
    DirichletPolynomial unit;
    double D = diagonal_term(unit, T);
    // literal l-sum with the slow W route
    double ref = 0.0;
    for (double l = 1.0; kTwoPi * l * l / (2.0 * T) < kWCutoff; l += 1.0) {
        ref += (2.0 / l) * integrate_panels_real(T, 2.0 * T, 4.0, 8, [&](double t) {
            return W_eval_direct(kTwoPi * l * l / t) * phi_eval(t / T);
        });
    }
    CHECK(D == Approx(ref).epsilon(1e-8));
}

TEST_CASE("diagonal plus contour piece reproduces the main term") {
    double T = 1000.0;
    DirichletPolynomial unit;
    double D = diagonal_term(unit, T);
    double A0 = zero_mode_term(unit, T);
    auto mt = main_term(unit, T);
    CHECK(std::abs(mt.value - (D + A0)) < 1e-6 * std::abs(mt.value));

    // a short random polynomial too
    auto p = build(CoeffModel::random(CoeffModel::Kind::random_sign, 77), 4);
    double Dp = diagonal_term(p, T);
    double A0p = zero_mode_term(p, T);
    auto mtp = main_term(p, T);
    CHECK(std::abs(mtp.value - (Dp + A0p)) < 1e-5 * std::abs(mtp.value));
}

TEST_CASE("third moment basics") {
    auto m3 = third_moment(0.5, 1000.0);
    CHECK(m3.value > 0.0);
    CHECK(std::isfinite(m3.value));
    CHECK(m3.abs_error_estimate >= 0.0);
    CHECK_THROWS_AS(third_moment(0.4, 1000.0), ConfigInvalid);
    CHECK_THROWS_AS(third_moment(0.5, 50.0), ConfigInvalid);
    // the shifted line is cheaper than the critical line pointwise
    auto ms = third_moment(0.75, 1000.0);
    CHECK(ms.value > 0.0);
    CHECK(ms.value < m3.value);
}

TEST_CASE("theorem-1 experiment harness") {
    CHECK_THROWS_AS(twisted_moment_experiment(CoeffModel::unit_model(), 1000.0, 0.7, 1, 1),
                    ConfigInvalid);
    CHECK_THROWS_AS(twisted_moment_experiment(CoeffModel::unit_model(), 5e6, 0.6, 1, 1), TooLarge);

    auto rep = twisted_moment_experiment(CoeffModel::random(CoeffModel::Kind::random_disk, 2), 500.0,
                                   0.25, 2, 99);
    CHECK(rep.N == 5);
    CHECK_FALSE(rep.beyond_half_regime);
    REQUIRE(rep.trials.size() == 2);
    CHECK(rep.trials[0].seed != rep.trials[1].seed);
    for (auto& tr : rep.trials) {
        CHECK(tr.i_direct > 0.0);
        CHECK(tr.rel_dev < 0.05);
    }
    CHECK(rep.mean_rel_dev <= rep.max_rel_dev);

    // degenerate unit ensemble: every trial identical
    auto ur = twisted_moment_experiment(CoeffModel::unit_model(), 500.0, 0.25, 2, 7);
    CHECK(ur.trials[0].i_direct == ur.trials[1].i_direct);
    CHECK(ur.trials[0].rel_dev == ur.max_rel_dev);

    auto br = twisted_moment_experiment(CoeffModel::unit_model(), 120.0, 0.51, 1, 7);
    CHECK(br.beyond_half_regime);
}
