#pragma once

// Test-only high-precision oracle: a slow Euler-Maclaurin zeta in __float128
// (~33 significant digits), independent of the double-precision fast path it
// validates.  Linked with -lquadmath.

#include <quadmath.h>

#include <complex>
#include <cstdint>

namespace oracle {

using f128 = __float128;

struct qcplx {
    f128 re, im;
};

inline qcplx qadd(qcplx a, qcplx b) { return {a.re + b.re, a.im + b.im}; }
inline qcplx qsub(qcplx a, qcplx b) { return {a.re - b.re, a.im - b.im}; }
inline qcplx qmul(qcplx a, qcplx b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline qcplx qmul(f128 c, qcplx a) { return {c * a.re, c * a.im}; }
inline qcplx qdiv(qcplx a, qcplx b) {
    f128 d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
// exp(a) for complex a
inline qcplx qexp(qcplx a) {
    f128 m = expq(a.re);
    return {m * cosq(a.im), m * sinq(a.im)};
}
// n^(-s) = exp(-s log n)
inline qcplx qpow_neg(std::int64_t n, qcplx s) {
    f128 ln = logq((f128)n);
    return qexp({-s.re * ln, -s.im * ln});
}

// B_2 .. B_30 as exact rationals in f128 (all parts below 2^53, so the
// double-literal casts are exact)
inline qcplx zeta_q(qcplx s, int terms = 15, double mult = 2.0) {
    static const double bnum[15] = {1.0, -1.0, 1.0, -1.0, 5.0, -691.0, 7.0,
                                    -3617.0, 43867.0, -174611.0, 854513.0,
                                    -236364091.0, 8553103.0, -23749461029.0,
                                    8615841276005.0};
    static const double bden[15] = {6.0, 30.0, 42.0, 30.0, 66.0, 2730.0, 6.0,
                                    510.0, 798.0, 330.0, 138.0, 2730.0, 6.0,
                                    870.0, 14322.0};
    f128 timag = s.im < 0 ? -s.im : s.im;
    std::int64_t L = (std::int64_t)(mult * ((double)timag + 40.0));
    if (L < 64) L = 64;
    qcplx sum{(f128)0, (f128)0};
    for (std::int64_t n = 1; n < L; ++n) sum = qadd(sum, qpow_neg(n, s));
    f128 Lf = (f128)L;
    qcplx Lms = qpow_neg(L, s);
    // L^(1-s)/(s-1)
    qcplx r = qdiv(qmul(Lf, Lms), qsub(s, {(f128)1, (f128)0}));
    r = qadd(r, qmul((f128)0.5, Lms));
    qcplx poch = s;
    f128 fact = (f128)2;
    f128 Lpow = (f128)1 / Lf;
    for (int k = 1; k <= terms; ++k) {
        qcplx term = qmul((f128)bnum[k - 1] / ((f128)bden[k - 1] * fact), qmul(poch, Lms));
        r = qadd(r, qmul(Lpow, term));
        poch = qmul(poch, qmul(qadd(s, {(f128)(2 * k - 1), (f128)0}),
                               qadd(s, {(f128)(2 * k), (f128)0})));
        fact *= (f128)(2 * k + 1) * (f128)(2 * k + 2);
        Lpow /= Lf * Lf;
    }
    return qadd(sum, r);
}

inline std::complex<double> zeta_oracle(std::complex<double> s) {
    qcplx v = zeta_q({(f128)s.real(), (f128)s.imag()});
    return {(double)v.re, (double)v.im};
}

// residual of a double-precision value against the oracle
inline double residual(std::complex<double> approx, std::complex<double> s) {
    qcplx v = zeta_q({(f128)s.real(), (f128)s.imag()});
    f128 dr = (f128)approx.real() - v.re;
    f128 di = (f128)approx.imag() - v.im;
    return (double)sqrtq(dr * dr + di * di);
}

}  // namespace oracle
