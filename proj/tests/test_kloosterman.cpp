#include <catch2/catch.hpp>

#include "ztm/kloosterman_forms.hpp"

using namespace ztm;

namespace {

TrilinearSpec all_ones(std::uint64_t A, std::uint64_t M, std::uint64_t N) {
    TrilinearSpec s;
    s.A = A;
    s.M = M;
    s.N = N;
    s.nu.assign(A, cplx(1.0, 0.0));
    s.alpha.assign(M, cplx(1.0, 0.0));
    s.beta.assign(N, cplx(1.0, 0.0));
    return s;
}

TrilinearSpec random_spec(std::uint64_t A, std::uint64_t M, std::uint64_t N, std::uint64_t seed) {
    return make_trilinear_spec(A, M, N, CoeffModel::random(CoeffModel::Kind::random_disk, 0),
                               seed);
}

// literal four-loop oracle for the quadruple count
std::uint64_t quadruples_4loop(std::uint64_t X) {
    std::uint64_t c = 0;
    for (std::uint64_t a1 = X; a1 < 2 * X; ++a1)
        for (std::uint64_t a2 = X; a2 < 2 * X; ++a2)
            for (std::uint64_t a3 = X; a3 < 2 * X; ++a3)
                for (std::uint64_t a4 = X; a4 < 2 * X; ++a4)
                    if (a1 * a2 == a3 * a4) ++c;
    return c;
}

}  // namespace

TEST_CASE("trilinear sum: pinned small cases") {
    CHECK(trilinear_sum(all_ones(1, 1, 1)) == cplx(1.0, 0.0));  // e(0)

    auto z = all_ones(4, 4, 4);
    z.nu.assign(4, cplx{});
    CHECK(trilinear_sum(z) == cplx{});

    // A = M = 1, N = 2: n in {2,3}, m = 1: e(1/2) + e(1/3)
    cplx expect = unit_exp(1.0 / 2.0) + unit_exp(1.0 / 3.0);
    CHECK(std::abs(trilinear_sum(all_ones(1, 1, 2)) - expect) < 1e-14);

    TrilinearSpec big = all_ones(1001, 1001, 1001);
    CHECK_THROWS_AS(trilinear_sum(big), TooLarge);

    TrilinearSpec bad = all_ones(2, 2, 2);
    bad.alpha.resize(1);
    CHECK_THROWS_AS(trilinear_sum(bad), ConfigInvalid);
}

TEST_CASE("trilinear sum is linear in each coefficient sequence") {
    auto s1 = random_spec(8, 8, 8, 1);
    auto s2 = random_spec(8, 8, 8, 2);
    for (int which = 0; which < 3; ++which) {
        TrilinearSpec mixed = s1;
        TrilinearSpec other = s1;
        auto& m_seq = which == 0 ? mixed.nu : which == 1 ? mixed.alpha : mixed.beta;
        auto& o_seq = which == 0 ? other.nu : which == 1 ? other.alpha : other.beta;
        const auto& b_seq = which == 0 ? s2.nu : which == 1 ? s2.alpha : s2.beta;
        for (std::size_t i = 0; i < m_seq.size(); ++i) m_seq[i] += b_seq[i];
        o_seq = b_seq;
        cplx lhs = trilinear_sum(mixed);
        cplx rhs = trilinear_sum(s1) + trilinear_sum(other);
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("ratios are invariant under phase rotation and global scaling") {
    auto s = random_spec(8, 8, 8, 5);
    auto base = evaluate_bounds(s);
    // rotate nu by a global phase
    TrilinearSpec rot = s;
    cplx ph = unit_exp(0.1234);
    for (auto& v : rot.nu) v *= ph;
    auto r = evaluate_bounds(rot);
    CHECK(r.ratio_conjecture == Approx(base.ratio_conjecture).epsilon(1e-12));
    CHECK(r.ratio_bcr == Approx(base.ratio_bcr).epsilon(1e-12));
    // double every sequence: |S| scales by 8, as does each rhs
    TrilinearSpec twice = s;
    for (auto* seq : {&twice.nu, &twice.alpha, &twice.beta})
        for (auto& v : *seq) v *= 2.0;
    auto t = evaluate_bounds(twice);
    CHECK(t.s_abs == Approx(8.0 * base.s_abs).epsilon(1e-12));
    CHECK(t.ratio_conjecture == Approx(base.ratio_conjecture).epsilon(1e-12));
}

TEST_CASE("reciprocity relation holds term by term") {
    CHECK(reciprocity_residual(random_spec(6, 9, 7, 11)) < 1e-9);
    CHECK(reciprocity_residual(all_ones(8, 8, 8)) < 1e-9);
}

TEST_CASE("conjectured right-hand side") {
    auto u = all_ones(1, 1, 1);
    CHECK(conjecture_rhs(u, 0.0) == Approx(std::sqrt(2.0) + 2.0));
    CHECK(conjecture_rhs(u, 0.1) == Approx(std::pow(2.0, 0.6) + 2.0));
    // homogeneity in ||nu||
    auto s = random_spec(8, 8, 8, 3);
    TrilinearSpec sc = s;
    for (auto& v : sc.nu) v *= 3.0;
    CHECK(conjecture_rhs(sc, 0.0) == Approx(3.0 * conjecture_rhs(s, 0.0)).epsilon(1e-12));
    // monotone in epsilon
    CHECK(conjecture_rhs(s, 0.1) > conjecture_rhs(s, 0.0));
    CHECK_THROWS_AS(conjecture_rhs(s, -0.1), ConfigInvalid);
}

TEST_CASE("general right-hand side and presets") {
    auto s = random_spec(8, 8, 8, 4);
    CHECK(general_rhs(s, 0.0, 0.0, 0.0).value == Approx(conjecture_rhs(s, 0.0)).epsilon(1e-12));

    // DFI window is (NM)^((0.5 - 23/48)/2) = (NM)^(1/96): tiny, so A = 8 is
    // far outside it
    auto d = general_rhs(s, kPresetDFI.r, kPresetDFI.t, 0.0);
    CHECK_FALSE(d.admissible);
    // r = t = 0 window is (NM)^(1/2) = 8: A = 8 sits right on it
    CHECK(general_rhs(s, 0.0, 0.0, 0.0).admissible);

    // BCR sharper than DFI on a large-A spec
    auto big = random_spec(32, 32, 32, 6);
    double bcr = general_rhs(big, kPresetBCR.r, kPresetBCR.t, 0.0).value;
    double dfi = general_rhs(big, kPresetDFI.r, kPresetDFI.t, 0.0).value;
    CHECK(bcr < dfi);
}

TEST_CASE("ratio harness ensemble") {
    auto ens =
        ratio_harness(8, 8, 8, 100, CoeffModel::random(CoeffModel::Kind::random_sign, 0), 99);
    REQUIRE(ens.rows.size() == 100);
    CHECK(ens.max_ratio_conjecture > 0.0);
    CHECK(std::isfinite(ens.max_ratio_conjecture));
    CHECK(ens.mean_ratio_conjecture <= ens.max_ratio_conjecture);
    CHECK(ens.argmax_trial >= 0);
    // the stored extremal spec reproduces the max ratio
    auto re = evaluate_bounds(ens.argmax_spec);
    CHECK(re.ratio_conjecture == Approx(ens.max_ratio_conjecture));
    // norms recorded
    CHECK(ens.rows[0].norm_nu == Approx(std::sqrt(8.0)));

    // degenerate concentration: nu on one a, alpha on one m
    TrilinearSpec s = all_ones(4, 4, 4);
    s.nu.assign(4, cplx{});
    s.nu[1] = 1.0;  // a = 5
    s.alpha.assign(4, cplx{});
    s.alpha[2] = 1.0;  // m = 6
    cplx expect{};
    for (std::uint64_t n = 4; n < 8; ++n) {
        if (std::gcd<std::uint64_t>(6, n) != 1) continue;
        expect += unit_exp(double(5 * mod_inverse(6, n) % n) / double(n));
    }
    CHECK(std::abs(trilinear_sum(s) - expect) < 1e-12);
}

TEST_CASE("harness size guard") {
    CHECK_THROWS_AS(ratio_harness(1024, 1024, 1024, 1,
                                  CoeffModel::random(CoeffModel::Kind::random_sign, 0), 1),
                    TooLarge);
}

TEST_CASE("lower-bound construction") {
    auto lb = lower_bound_construction(64, 8, 8);
    CHECK(lb.nu_primes == 1);    // 11
    CHECK(lb.beta_primes == 1);  // 13
    CHECK(lb.ratio > 0.5);
    CHECK(lb.ratio < 2.0);
    CHECK(lb.s_over_ma > 1e-3);

    // exactly linear in K by construction
    auto l1 = lower_bound_construction(64, 8, 8, 0.3);
    auto l2 = lower_bound_construction(64, 8, 8, 0.6);
    CHECK(l2.s_abs == Approx(2.0 * l1.s_abs).epsilon(1e-10));

    CHECK_THROWS_AS(lower_bound_construction(64, 2, 8), EmptyPrimeClass);
    CHECK_THROWS_AS(lower_bound_construction(8, 64, 8), ConfigInvalid);  // M < N
    CHECK_THROWS_AS(lower_bound_construction(64, 8, 8, 0.9), ConfigInvalid);
}

TEST_CASE("poisson-ramanujan reduction") {
    // n = 1: both sides are the full mass K*M
    CHECK(poisson_ramanujan_check(1, 3, 5000) < 1e-10);
    // pinned point
    CHECK(poisson_ramanujan_check(5, 1, 10000) < 1e-3);
    // deviation decreases in M where the analytic error is visible
    double d_small = poisson_ramanujan_check(7, 3, 100);
    double d_large = poisson_ramanujan_check(7, 3, 1000);
    CHECK(d_large < d_small);
    CHECK(d_small < 0.05);
    CHECK(d_large < 1e-6);
}

TEST_CASE("character fourth-moment counting") {
    CHECK(char_fourth_moment_count(1, 1).a_quadruples == 1);
    CHECK(char_fourth_moment_count(2, 1).a_quadruples == 6);
    for (std::uint64_t X : {2ULL, 3ULL, 4ULL, 6ULL})
        CHECK(multiplicative_quadruple_count(X) == quadruples_4loop(X));

    auto c = char_fourth_moment_count(8, 16);
    CHECK(c.second == 128);
    CHECK(c.fourth == Approx(double(c.a_quadruples) * double(c.n_quadruples)));

    // growth no faster than (A log A)^2 across the doubling grid
    for (std::uint64_t A : {8ULL, 16ULL, 32ULL, 64ULL}) {
        double q = double(multiplicative_quadruple_count(A));
        double bound = std::pow(double(A) * std::log(double(A)), 2.0);
        CHECK(q <= 1.0 * bound);
    }

    CHECK_THROWS_AS(char_fourth_moment_count(300, 8), TooLarge);
}
