#pragma once

// Complex zeta and log-gamma at controllable precision.
//
// Euler-Maclaurin (valid for Re s > -1 here, cutoff L ~ mult*(|t|+10)):
//   zeta(s) = sum_{n<L} n^-s + L^(1-s)/(s-1) + L^-s/2
//           + sum_{k=1..K} B_{2k}/(2k)! * s(s+1)...(s+2k-2) * L^(-s-2k+1)
//
// Riemann-Siegel on the critical line, a = sqrt(t/2pi), m = floor(a), p = a-m:
//   Z(t) = 2 sum_{n<=m} cos(theta(t) - t log n)/sqrt(n)
//        + (-1)^(m+1) a^(-1/2) [ C0(p) + C1(p)/a + C2(p)/a^2 ] + O(a^(-7/2))
//   C0 = Psi,  C1 = -Psi'''/(96 pi^2),  C2 = Psi''/(64 pi^2) + Psi^(6)/(18432 pi^4)
//   Psi(p) = cos(2pi(p^2 - p - 1/16)) / cos(2pi p)
// The C_j are entire, so they are tabulated once as Chebyshev interpolants
// with Taylor coefficients of Psi extracted by circle contours.
// Below kRsMinT the asymptotic remainder exceeds 1e-8 and the riemann_siegel
// method evaluates through the Euler-Maclaurin core instead.

#include <cmath>
#include <cstdint>

#include "ztm/common.hpp"
#include "ztm/quadrature.hpp"

namespace ztm {

enum class ZetaMethod { euler_maclaurin, riemann_siegel };

struct ZetaEvalConfig {
    ZetaMethod method = ZetaMethod::euler_maclaurin;
    double target_abs_error = 1e-12;
    int em_terms = 12;                  // Bernoulli correction depth
    double em_cutoff_multiplier = 1.3;  // L = ceil(mult * (|t| + 10))

    void validate() const {
        if (!(target_abs_error > 0)) throw ConfigInvalid("target_abs_error must be > 0");
        if (em_terms < 1) throw ConfigInvalid("em_terms must be >= 1");
        if (!(em_cutoff_multiplier > 0)) throw ConfigInvalid("em_cutoff_multiplier must be > 0");
    }
};

// Pure-asymptotic Riemann-Siegel is used only above this height; the C0..C2
// remainder is ~1e-8 at t = 5000 and shrinks like t^(-7/4).
inline constexpr double kRsMinT = 5000.0;

// B_2, B_4, ..., B_30
inline constexpr double kBernoulli2k[15] = {
    1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6,
    -3617.0 / 510, 43867.0 / 798, -174611.0 / 330, 854513.0 / 138,
    -236364091.0 / 2730, 8553103.0 / 6, -23749461029.0 / 870,
    8615841276005.0 / 14322};

// ---------------------------------------------------------------------------
// log Gamma: recurrence into |s| >= 12, then Stirling.  Principal branch for
// Re s > 0; reflection handles the left half-plane.
// ---------------------------------------------------------------------------

inline cplx log_gamma(cplx s) {
    if (s.imag() == 0.0 && s.real() <= 0.0 && s.real() == std::floor(s.real()))
        throw PoleAtNonPositiveInteger("log_gamma: pole at non-positive integer");
    if (s.real() < 0.0) {
        // log pi - log sin(pi s) - log Gamma(1 - s); principal log of sin.
        cplx lgs = std::log(kPi) - std::log(std::sin(kPi * s)) - log_gamma(1.0 - s);
        return lgs;
    }
    cplx shift{};
    while (std::abs(s) < 12.0) {
        shift += std::log(s);
        s += 1.0;
    }
    cplx r = (s - 0.5) * std::log(s) - s + 0.5 * std::log(kTwoPi);
    cplx s2 = 1.0 / (s * s);
    cplx term = 1.0 / s;
    for (int k = 1; k <= 10; ++k) {
        r += kBernoulli2k[k - 1] / double(2 * k * (2 * k - 1)) * term;
        term *= s2;
    }
    return r - shift;
}

// ---------------------------------------------------------------------------
// Euler-Maclaurin zeta
// ---------------------------------------------------------------------------

namespace detail {

inline cplx zeta_em_tail(cplx s, double L, int em_terms) {
    // L^(1-s)/(s-1) + L^-s/2 + Bernoulli corrections
    cplx Lms = std::exp(-s * std::log(L));  // L^-s
    cplx r = Lms * L / (s - 1.0) + 0.5 * Lms;
    int K = std::min(em_terms, 15);
    cplx poch = s;                 // s(s+1)...(s+2k-2), k terms below
    double fact = 2.0;             // (2k)!
    double Lpow = 1.0 / L;         // L^(1-2k)
    for (int k = 1; k <= K; ++k) {
        r += kBernoulli2k[k - 1] / fact * poch * Lms * Lpow;
        // advance to k+1
        poch *= (s + double(2 * k - 1)) * (s + double(2 * k));
        fact *= double(2 * k + 1) * double(2 * k + 2);
        Lpow /= L * L;
    }
    return r;
}

}  // namespace detail

inline cplx zeta_em(cplx s, const ZetaEvalConfig& cfg = {}) {
    cfg.validate();
    if (s == cplx(1.0, 0.0)) throw PoleAtOne("zeta: pole at s = 1");
    if (s.real() <= -1.0)
        throw MethodDomain("zeta_em: implemented for Re s > -1");
    std::int64_t L =
        std::int64_t(std::ceil(cfg.em_cutoff_multiplier * (std::abs(s.imag()) + 10.0)));
    if (L < 16) L = 16;
    double sigma = s.real(), t = s.imag();
    // compensated accumulation keeps the main-sum rounding noise near eps
    // even for L ~ 1e5 terms
    double re = 0.0, im = 0.0, cr = 0.0, ci = 0.0;
    for (std::int64_t n = 1; n < L; ++n) {
        double ln = std::log(double(n));
        double amp = std::exp(-sigma * ln);
        double ph = -t * ln;
        double xr = amp * std::cos(ph) - cr;
        double tr = re + xr;
        cr = (tr - re) - xr;
        re = tr;
        double xi = amp * std::sin(ph) - ci;
        double ti = im + xi;
        ci = (ti - im) - xi;
        im = ti;
    }
    return cplx(re, im) + detail::zeta_em_tail(s, double(L), cfg.em_terms);
}

// ---------------------------------------------------------------------------
// Riemann-Siegel
// ---------------------------------------------------------------------------

// theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi
inline double rs_theta(double t) {
    return log_gamma(cplx(0.25, 0.5 * t)).imag() - 0.5 * t * std::log(kPi);
}

namespace detail {

// Psi(z) = cos(2pi(z^2 - z - 1/16))/cos(2pi z); the zeros of the denominator
// at z0 = 1/4 + k/2 are removable.  Near them both cosines are rewritten
// about z0 (an exact identity), which stays stable under cancellation.
inline cplx rs_psi(cplx z) {
    cplx den = std::cos(kTwoPi * z);
    if (std::abs(den) > 0.05) {
        cplx g = z * z - z - cplx(1.0 / 16.0, 0.0);
        return std::cos(kTwoPi * g) / den;
    }
    double k = std::round((z.real() - 0.25) * 2.0);
    double z0 = 0.25 + 0.5 * k;
    double c0z = std::cos(kTwoPi * z0), s0z = std::sin(kTwoPi * z0);
    double g0 = z0 * z0 - z0 - 1.0 / 16.0;
    double c0g = std::cos(kTwoPi * g0), s0g = std::sin(kTwoPi * g0);
    cplx u = z - z0;
    cplx h = u * (z + z0 - 1.0);
    cplx num = c0g * std::cos(kTwoPi * h) - s0g * std::sin(kTwoPi * h);
    cplx dnm = c0z * std::cos(kTwoPi * u) - s0z * std::sin(kTwoPi * u);
    if (std::abs(u) < 1e-9) {
        // sin(2pi h)/sin(2pi u) -> h/u = z + z0 - 1
        return (s0g / s0z) * (z + z0 - 1.0);
    }
    return num / dnm;
}

struct RsCorrections {
    Cheb c0, c1, c2;
};

inline const RsCorrections& rs_corrections() {
    static const RsCorrections tab = [] {
        auto coeffs_at = [](double p) {
            return taylor_on_circle(cplx(p, 0.0), 0.45, 512, 6,
                                    [](cplx z) { return rs_psi(z); });
        };
        const double pi2 = kPi * kPi;
        const double pi4 = pi2 * pi2;
        RsCorrections t;
        t.c0 = cheb_fit(0.0, 1.0, 56, [&](double p) { return coeffs_at(p)[0].real(); });
        t.c1 = cheb_fit(0.0, 1.0, 56, [&](double p) {
            return -6.0 * coeffs_at(p)[3].real() / (96.0 * pi2);
        });
        t.c2 = cheb_fit(0.0, 1.0, 56, [&](double p) {
            auto a = coeffs_at(p);
            return 2.0 * a[2].real() / (64.0 * pi2) + 720.0 * a[6].real() / (18432.0 * pi4);
        });
        return t;
    }();
    return tab;
}

}  // namespace detail

// Asymptotic Z(t) with three correction terms; caller is responsible for the
// validity height (see kRsMinT).
inline double rs_z_raw(double t) {
    double a = std::sqrt(t / kTwoPi);
    std::int64_t m = std::int64_t(std::floor(a));
    double p = a - double(m);
    double th = rs_theta(t);
    double s = 0.0;
    for (std::int64_t n = 1; n <= m; ++n)
        s += std::cos(th - t * std::log(double(n))) / std::sqrt(double(n));
    const auto& C = detail::rs_corrections();
    double corr = C.c0(p) + C.c1(p) / a + C.c2(p) / (a * a);
    double sign = (m % 2 == 0) ? -1.0 : 1.0;  // (-1)^(m+1)
    return 2.0 * s + sign * corr / std::sqrt(a);
}

// Hardy Z via whichever core is accurate at this height.
inline double rs_z(double t, const ZetaEvalConfig& cfg = {}) {
    if (t >= kRsMinT) return rs_z_raw(t);
    cplx z = zeta_em(cplx(0.5, t), cfg);
    return (std::exp(cplx(0.0, rs_theta(t))) * z).real();
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline cplx zeta(cplx s, const ZetaEvalConfig& cfg = {}) {
    cfg.validate();
    if (s == cplx(1.0, 0.0)) throw PoleAtOne("zeta: pole at s = 1");
    if (cfg.method == ZetaMethod::riemann_siegel) {
        if (s.real() != 0.5)
            throw MethodDomain("zeta: riemann_siegel requires Re s = 1/2");
        if (std::abs(s.imag()) < 10.0)
            throw MethodDomain("zeta: riemann_siegel requires |Im s| >= 10");
        double t = s.imag();
        double za = rs_z(std::abs(t), cfg);
        cplx v = za * std::exp(cplx(0.0, -rs_theta(std::abs(t))));
        return t >= 0 ? v : std::conj(v);
    }
    return zeta_em(s, cfg);
}

// |zeta(1/2 + it)|^2, t >= 10.
inline double zeta_abs_sq_critical(double t, const ZetaEvalConfig& cfg = {}) {
    if (t < 10.0) throw MethodDomain("zeta_abs_sq_critical: t >= 10 required");
    if (cfg.method == ZetaMethod::riemann_siegel) {
        double z = rs_z(t, cfg);
        return z * z;
    }
    return std::norm(zeta_em(cplx(0.5, t), cfg));
}

// ---------------------------------------------------------------------------
// Batch evaluation along a horizontal line s = sigma + i t, shared tables.
// Parallel over t-chunks with slot-indexed output (deterministic).
// ---------------------------------------------------------------------------

inline std::vector<cplx> zeta_line_batch(double sigma, const std::vector<double>& ts,
                                         const ZetaEvalConfig& cfg = {}) {
    cfg.validate();
    if (sigma <= -1.0) throw MethodDomain("zeta_line_batch: Re s > -1 required");
    double tmax = 0.0;
    for (double t : ts) tmax = std::max(tmax, std::abs(t));
    std::int64_t Lmax =
        std::int64_t(std::ceil(cfg.em_cutoff_multiplier * (tmax + 10.0)));
    if (Lmax < 16) Lmax = 16;
    std::vector<double> ln(Lmax + 1), amp(Lmax + 1);
    for (std::int64_t n = 1; n <= Lmax; ++n) {
        ln[n] = std::log(double(n));
        amp[n] = std::exp(-sigma * ln[n]);
    }
    std::vector<cplx> out(ts.size());
    const std::size_t chunk = 64;
    std::size_t n_chunks = (ts.size() + chunk - 1) / chunk;
    parallel_chunks(n_chunks, [&](std::size_t ci) {
        std::size_t lo = ci * chunk, hi = std::min(ts.size(), lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            double t = ts[i];
            std::int64_t L =
                std::int64_t(std::ceil(cfg.em_cutoff_multiplier * (std::abs(t) + 10.0)));
            if (L < 16) L = 16;
            if (L > Lmax) L = Lmax;
            double re = 0.0, im = 0.0, cr = 0.0, ci = 0.0;
            for (std::int64_t n = 1; n < L; ++n) {
                double ph = -t * ln[n];
                double xr = amp[n] * std::cos(ph) - cr;
                double tr = re + xr;
                cr = (tr - re) - xr;
                re = tr;
                double xi = amp[n] * std::sin(ph) - ci;
                double ti = im + xi;
                ci = (ti - im) - xi;
                im = ti;
            }
            out[i] = cplx(re, im) + detail::zeta_em_tail(cplx(sigma, t), double(L), cfg.em_terms);
        }
    });
    return out;
}

// |zeta(sigma + it)|^2 on a grid; on the critical line the Riemann-Siegel
// fast path is used where valid.
inline std::vector<double> zeta_abs_sq_line_batch(double sigma, const std::vector<double>& ts,
                                                  const ZetaEvalConfig& cfg = {}) {
    std::vector<double> out(ts.size());
    if (sigma == 0.5 && cfg.method == ZetaMethod::riemann_siegel) {
        detail::rs_corrections();  // build tables before going parallel
        std::vector<std::size_t> em_idx;
        for (std::size_t i = 0; i < ts.size(); ++i)
            if (ts[i] < kRsMinT) em_idx.push_back(i);
        const std::size_t chunk = 64;
        std::size_t n_chunks = (ts.size() + chunk - 1) / chunk;
        parallel_chunks(n_chunks, [&](std::size_t ci) {
            std::size_t lo = ci * chunk, hi = std::min(ts.size(), lo + chunk);
            for (std::size_t i = lo; i < hi; ++i)
                if (ts[i] >= kRsMinT) {
                    double z = rs_z_raw(ts[i]);
                    out[i] = z * z;
                }
        });
        if (!em_idx.empty()) {
            std::vector<double> sub(em_idx.size());
            for (std::size_t j = 0; j < em_idx.size(); ++j) sub[j] = ts[em_idx[j]];
            auto vals = zeta_line_batch(0.5, sub, cfg);
            for (std::size_t j = 0; j < em_idx.size(); ++j)
                out[em_idx[j]] = std::norm(vals[j]);
        }
        return out;
    }
    auto vals = zeta_line_batch(sigma, ts, cfg);
    for (std::size_t i = 0; i < ts.size(); ++i) out[i] = std::norm(vals[i]);
    return out;
}

}  // namespace ztm
