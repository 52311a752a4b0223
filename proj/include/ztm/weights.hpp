#pragma once

// Smooth cutoffs and Mellin weights.
//
//   phi(x) = exp(4 - 1/((x-1)(2-x))) on (1,2): the C-infinity bump of the
//            moment integrals, normalized to peak 1 at x = 3/2.
//
//   G(w)   = (1 - 4w^2) * Int m(u) cosh(uw) du, with m a normalized
//            C-infinity bump supported on [-log 40, log 40].  G is entire,
//            even, G(0) = 1, G(1/2) = 0, and decays faster than any power on
//            vertical lines.  Its Mellin weight
//               W(x) = (1/2pi i) Int_(c) x^-w G(w) dw/w
//            has the closed form  W(x) = Mbar(log x) + 4 m'(log x)  with
//            Mbar(L) = Int_L^inf m, so W == 1 for x <= 1/40 and W == 0 for
//            x >= 40.  That hard cutoff at 40 is what the approximate
//            functional equation truncation relies on.
//
//   F_M(x) = ramp(x/M) - ramp(2x/M): dyadic partition of unity with support
//            [M/2, 2M] and F^(j) = O(M^-j).
//
//   The smoothing pair:
//            Fhat(z) = e^(2pi i (theta-delta) z) *
//                      ((e^(2pi i (1-theta) z) - 1)/(2pi i (1-theta) z))^N
//            is the transform of the N-fold self-convolution of a box of
//            width (1-theta) shifted to start at theta-delta (an Irwin-Hall
//            density F), and the cutoff it integrates to is 1 - Int_0^x F(u) du.

#include <cmath>

#include "ztm/quadrature.hpp"
#include "ztm/special.hpp"

namespace ztm {

// ---------------------------------------------------------------------------
// Bump primitives
// ---------------------------------------------------------------------------

inline double bump_raw(double v) {
    if (std::abs(v) >= 1.0 - 1e-12) return 0.0;
    return std::exp(-1.0 / (1.0 - v * v));
}

inline double bump_raw_d1(double v) {
    if (std::abs(v) >= 1.0 - 1e-12) return 0.0;
    double q = 1.0 - v * v;
    return bump_raw(v) * (-2.0 * v / (q * q));
}

inline double bump_raw_d2(double v) {
    if (std::abs(v) >= 1.0 - 1e-12) return 0.0;
    double q = 1.0 - v * v;
    double g1 = -2.0 * v / (q * q);
    double g1p = -2.0 / (q * q) - 8.0 * v * v / (q * q * q);
    return bump_raw(v) * (g1 * g1 + g1p);
}

namespace detail {

struct BumpTables {
    double norm = 0.0;                 // Int_{-1}^{1} bump_raw
    std::vector<double> cdf;           // cumulative of bump_raw on a uniform grid
    double h = 0.0;
    static constexpr int kGrid = 4096;
};

inline const BumpTables& bump_tables() {
    static const BumpTables tab = [] {
        BumpTables t;
        t.h = 2.0 / BumpTables::kGrid;
        t.cdf.assign(BumpTables::kGrid + 1, 0.0);
        const GaussLegendre& gl = gauss_legendre(8);
        for (int i = 0; i < BumpTables::kGrid; ++i) {
            double a = -1.0 + t.h * i, mid = a + 0.5 * t.h, half = 0.5 * t.h;
            double s = 0.0;
            for (int j = 0; j < 8; ++j) s += gl.weight[j] * bump_raw(mid + half * gl.node[j]);
            t.cdf[i + 1] = t.cdf[i] + s * half;
        }
        t.norm = t.cdf[BumpTables::kGrid];
        return t;
    }();
    return tab;
}

// Int_{-1}^{v} bump_raw, grid prefix plus a local 8-node panel (no
// interpolation error beyond the quadrature itself).
inline double bump_cdf_raw(double v) {
    const BumpTables& t = bump_tables();
    if (v <= -1.0) return 0.0;
    if (v >= 1.0) return t.norm;
    int i = int((v + 1.0) / t.h);
    if (i > BumpTables::kGrid - 1) i = BumpTables::kGrid - 1;
    double a = -1.0 + t.h * i;
    const GaussLegendre& gl = gauss_legendre(8);
    double mid = 0.5 * (a + v), half = 0.5 * (v - a);
    double s = 0.0;
    for (int j = 0; j < 8; ++j) s += gl.weight[j] * bump_raw(mid + half * gl.node[j]);
    return t.cdf[i] + s * half;
}

}  // namespace detail

// normalized bump density on [-1, 1] and its cumulative
inline double bump_pdf(double v) { return bump_raw(v) / detail::bump_tables().norm; }
inline double bump_cdf(double v) { return detail::bump_cdf_raw(v) / detail::bump_tables().norm; }

// smooth step: 0 for u <= 0, 1 for u >= 1, C-infinity monotone in between,
// symmetric (S(u) + S(1-u) = 1)
inline double smooth_step(double u) { return bump_cdf(2.0 * u - 1.0); }

// smooth ramp: 1 on (-inf, 1], 0 on [2, inf)
inline double smooth_ramp(double u) { return 1.0 - smooth_step(u - 1.0); }

// ---------------------------------------------------------------------------
// phi
// ---------------------------------------------------------------------------

inline double phi_eval(double x) {
    if (x <= 1.0 || x >= 2.0) return 0.0;
    return std::exp(4.0 - 1.0 / ((x - 1.0) * (2.0 - x)));
}

// ---------------------------------------------------------------------------
// Dyadic partition of unity
// ---------------------------------------------------------------------------

struct DyadicPartition {
    double x_min = 1.0, x_max = 1024.0;
    int k_lo = 0, k_hi = 10;

    DyadicPartition() = default;
    DyadicPartition(double lo, double hi) : x_min(lo), x_max(hi) {
        if (!(lo > 0) || !(hi > lo)) throw ConfigInvalid("DyadicPartition: need 0 < x_min < x_max");
        k_lo = int(std::floor(std::log2(lo)));
        k_hi = int(std::ceil(std::log2(hi)));
    }

    std::vector<double> scales() const {
        std::vector<double> m;
        for (int k = k_lo; k <= k_hi; ++k) m.push_back(std::ldexp(1.0, k));
        return m;
    }

    // F_M(x) = ramp(x/M) - ramp(2x/M), supported in [M/2, 2M]
    static double eval(double M, double x) {
        return smooth_ramp(x / M) - smooth_ramp(2.0 * x / M);
    }

    double sum(double x) const {
        double s = 0.0;
        for (int k = k_lo; k <= k_hi; ++k) s += eval(std::ldexp(1.0, k), x);
        return s;
    }
};

// ---------------------------------------------------------------------------
// Mellin weight G / W
// ---------------------------------------------------------------------------

// W transitions inside [1/kWCutoff, kWCutoff] and vanishes beyond; the AFE
// and diagonal-term truncations depend on this bound.
inline constexpr double kWCutoff = 40.0;

namespace detail {

struct MellinTables {
    double b = 0.0;                       // log-half-width of the kernel
    // trapezoid grid for G(w): kernel n - 4 n''/b^2, which equals
    // (1 - 4w^2) * Ghat(w) after integrating by parts twice (n and n'
    // vanish at the endpoints).  Folding the polynomial into the kernel
    // avoids the y^2 noise amplification on tall contours.
    std::vector<double> gv, gk;           // v-nodes and kernel values
    double gkmass = 0.0;                  // trapezoid mass (= 1 analytically)
    // Hermite table of W on v = log(x)/b in [-1, 1]
    std::vector<double> wv, wd;           // values and d/dv
    double wh = 0.0;
    static constexpr int kGNodes = 2048;
    static constexpr int kWGrid = 8192;
};

inline const MellinTables& mellin_tables() {
    static const MellinTables tab = [] {
        MellinTables t;
        t.b = std::log(kWCutoff);
        t.gv.resize(MellinTables::kGNodes + 1);
        t.gk.resize(MellinTables::kGNodes + 1);
        double dv = 2.0 / MellinTables::kGNodes;
        double norm = bump_tables().norm;
        for (int j = 0; j <= MellinTables::kGNodes; ++j) {
            double v = -1.0 + dv * j;
            t.gv[j] = v;
            t.gk[j] = (bump_raw(v) - 4.0 * bump_raw_d2(v) / (t.b * t.b)) / norm;
        }
        double mass = 0.0;
        for (int j = 0; j <= MellinTables::kGNodes; ++j) {
            double w = (j == 0 || j == MellinTables::kGNodes) ? 0.5 : 1.0;
            mass += w * t.gk[j];
        }
        t.gkmass = mass * dv;

        double b2 = t.b * t.b;
        t.wh = 2.0 / MellinTables::kWGrid;
        t.wv.resize(MellinTables::kWGrid + 1);
        t.wd.resize(MellinTables::kWGrid + 1);
        for (int i = 0; i <= MellinTables::kWGrid; ++i) {
            double v = -1.0 + t.wh * i;
            t.wv[i] = 1.0 - bump_cdf(v) + 4.0 / b2 * bump_raw_d1(v) / bump_tables().norm;
            // d/dv [1 - C(v) + (4/b^2) n'(v)] = -n(v) + (4/b^2) n''(v)
            t.wd[i] = -bump_pdf(v) + 4.0 / b2 * bump_raw_d2(v) / bump_tables().norm;
        }
        return t;
    }();
    return tab;
}

}  // namespace detail

// G(w) = (1 - 4 w^2) * Int m(u) cosh(u w) du, normalized so G(0) = 1.
// The kernel is even, so only v >= 0 nodes are summed.
inline cplx G_eval(cplx w) {
    const auto& t = detail::mellin_tables();
    constexpr int N = detail::MellinTables::kGNodes;
    double dv = 2.0 / N;
    cplx acc = t.gk[N / 2] * cplx(1.0, 0.0);  // v = 0 node
    for (int j = N / 2 + 1; j <= N; ++j) {
        if (t.gk[j] == 0.0) continue;
        double wt = (j == N) ? 1.0 : 2.0;
        acc += wt * t.gk[j] * std::cosh(t.b * t.gv[j] * w);
    }
    return acc * (dv / t.gkmass);
}

// Closed form via the defining kernel: W(x) = Mbar(log x) + 4 m'(log x).
inline double W_eval_direct(double x) {
    if (!(x > 0)) throw ConfigInvalid("W_eval: x > 0 required");
    const auto& t = detail::mellin_tables();
    double v = std::log(x) / t.b;
    if (v <= -1.0) return 1.0;
    if (v >= 1.0) return 0.0;
    double q = 1.0 - v * v;
    double mp = bump_pdf(v) * (-2.0 * v / (q * q));
    return 1.0 - bump_cdf(v) + 4.0 / (t.b * t.b) * mp;
}

// Fast path: cubic Hermite on the precomputed table (used in the AFE and
// diagonal-term inner loops).
inline double W_eval(double x) {
    if (!(x > 0)) throw ConfigInvalid("W_eval: x > 0 required");
    const auto& t = detail::mellin_tables();
    double v = std::log(x) / t.b;
    if (v <= -1.0) return 1.0;
    if (v >= 1.0) return 0.0;
    double s = (v + 1.0) / t.wh;
    int i = int(s);
    if (i > detail::MellinTables::kWGrid - 1) i = detail::MellinTables::kWGrid - 1;
    double u = s - i;
    double h = t.wh;
    double y0 = t.wv[i], y1 = t.wv[i + 1], d0 = t.wd[i] * h, d1 = t.wd[i + 1] * h;
    double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * d0 + (-2 * u3 + 3 * u2) * y1 +
           (u3 - u2) * d1;
}

// Contour route, for verification against the closed form.  Integrates on
// Re w = c > 0 with fixed panels, extending in height until the tail is dead.
inline double W_eval_contour(double x, double c, double panel = 0.5, int nodes = 16,
                             double y_cap = 1200.0) {
    if (!(x > 0) || !(c > 0)) throw ConfigInvalid("W_eval_contour: x > 0, c > 0");
    const GaussLegendre& gl = gauss_legendre(nodes);
    double xc = std::pow(x, -c);
    double acc = 0.0;
    int quiet = 0;
    double lx = std::log(x);
    for (double y0 = 0.0; y0 < y_cap; y0 += panel) {
        double contrib = 0.0;
        for (int j = 0; j < nodes; ++j) {
            double y = y0 + 0.5 * panel * (1.0 + gl.node[j]);
            cplx w(c, y);
            cplx val = std::exp(cplx(0.0, -y * lx)) * G_eval(w) / w;
            contrib += gl.weight[j] * 0.5 * panel * val.real();  //(*)
        }
        // (*) integrand at -y is the conjugate, so twice the real part
        acc += 2.0 * contrib;
        if (y0 > 40.0 && std::abs(contrib) < 1e-12 * (1.0 + std::abs(acc))) {
            if (++quiet >= 3) return xc * acc / kTwoPi;
        } else {
            quiet = 0;
        }
    }
    throw QuadratureNotConverged("W_eval_contour: tail not dead by the height cap");
}

// Same value via the shifted contour Re w = -1/4 plus the residue 1 at w = 0.
inline double W_eval_contour_left(double x, double panel = 0.5, int nodes = 16,
                                  double y_cap = 1200.0) {
    if (!(x > 0)) throw ConfigInvalid("W_eval_contour_left: x > 0");
    const double c = -0.25;
    const GaussLegendre& gl = gauss_legendre(nodes);
    double xc = std::pow(x, -c);
    double acc = 0.0;
    int quiet = 0;
    double lx = std::log(x);
    for (double y0 = 0.0; y0 < y_cap; y0 += panel) {
        double contrib = 0.0;
        for (int j = 0; j < nodes; ++j) {
            double y = y0 + 0.5 * panel * (1.0 + gl.node[j]);
            cplx w(c, y);
            cplx val = std::exp(cplx(0.0, -y * lx)) * G_eval(w) / w;
            contrib += gl.weight[j] * 0.5 * panel * val.real();
        }
        acc += 2.0 * contrib;
        if (y0 > 40.0 && std::abs(contrib) < 1e-12 * (1.0 + std::abs(acc))) {
            if (++quiet >= 3) return 1.0 + xc * acc / kTwoPi;
        } else {
            quiet = 0;
        }
    }
    throw QuadratureNotConverged("W_eval_contour_left: tail not dead by the height cap");
}

// ---------------------------------------------------------------------------
// Res_{w=0} x^w zeta(1+2w) G(w)/w  ==  (1/2) log x + gamma
// ---------------------------------------------------------------------------

inline double residue_main_term(double x, double radius = 0.07, int nodes = 64) {
    if (!(x > 1.0)) throw ConfigInvalid("residue_main_term: x > 1 required");
    auto f = [&](cplx w) { return std::exp(w * std::log(x)) * zeta_em(1.0 + 2.0 * w) * G_eval(w); };
    cplx r1 = circle_mean(cplx(0.0, 0.0), radius, nodes, f);
    cplx r2 = circle_mean(cplx(0.0, 0.0), radius, 2 * nodes, f);
    if (std::abs(r1 - r2) > 1e-8)
        throw QuadratureNotConverged("residue_main_term: node doubling moved the value");
    if (std::abs(r2.imag()) > 1e-10)
        throw NumericFailure("residue_main_term: imaginary residue");
    return r2.real();
}

// ---------------------------------------------------------------------------
// The smoothing pair (Fhat, F, cutoff)
// ---------------------------------------------------------------------------

struct SmoothingPair {
    double theta = 0.7;
    double delta = 0.05;
    int N = 12;

    void validate() const {
        if (!(theta > 0.0 && theta < 1.0)) throw ConfigInvalid("smoothing pair: theta in (0,1)");
        if (!(delta > 0.0 && theta - delta > 0.0)) throw ConfigInvalid("smoothing pair: 0 < delta < theta");
        if (N <= 10) throw ConfigInvalid("smoothing pair: N > 10");
    }

    double support_lo() const { return theta - delta; }
    double support_hi() const { return theta - delta + (1.0 - theta) * N; }
};

namespace detail {

inline double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

// Irwin-Hall density and CDF on [0, N]
inline double irwin_hall_pdf(double x, int N) {
    if (x <= 0.0 || x >= double(N)) return 0.0;
    double lognfact = std::lgamma(double(N));  // (N-1)!
    double s = 0.0;
    int kmax = int(std::floor(x));
    for (int k = 0; k <= kmax; ++k) {
        double term = binomial(N, k) * std::pow(x - k, N - 1);
        s += (k % 2 == 0) ? term : -term;
    }
    return s / std::exp(lognfact);
}

inline double irwin_hall_cdf(double x, int N) {
    if (x <= 0.0) return 0.0;
    if (x >= double(N)) return 1.0;
    double lognfact = std::lgamma(double(N) + 1.0);  // N!
    double s = 0.0;
    int kmax = int(std::floor(x));
    for (int k = 0; k <= kmax; ++k) {
        double term = binomial(N, k) * std::pow(x - k, N);
        s += (k % 2 == 0) ? term : -term;
    }
    return s / std::exp(lognfact);
}

// (e^{iq} - 1)/(iq) with the removable singularity handled by series
inline cplx sinc_exp(cplx q) {
    cplx iq = cplx(0.0, 1.0) * q;
    if (std::abs(iq) < 1e-3) {
        // 1 + iq/2 + (iq)^2/6 + (iq)^3/24 + (iq)^4/120
        return 1.0 + iq * (0.5 + iq * (1.0 / 6.0 + iq * (1.0 / 24.0 + iq / 120.0)));
    }
    return (std::exp(iq) - 1.0) / iq;
}

}  // namespace detail

inline cplx fhat_eval(cplx z, const SmoothingPair& p) {
    p.validate();
    cplx head = std::exp(cplx(0.0, 1.0) * (kTwoPi * p.support_lo()) * z);
    cplx base = detail::sinc_exp(kTwoPi * (1.0 - p.theta) * z);
    cplx pw = 1.0;
    for (int i = 0; i < p.N; ++i) pw *= base;
    return head * pw;
}

// F = -(cutoff)' for x > 0: the shifted, scaled Irwin-Hall density
inline double pair_density_eval(double u, const SmoothingPair& p) {
    p.validate();
    double v = (u - p.support_lo()) / (1.0 - p.theta);
    return detail::irwin_hall_pdf(v, p.N) / (1.0 - p.theta);
}

inline double pair_cutoff_eval(double x, const SmoothingPair& p) {
    p.validate();
    if (x <= 0.0) return 1.0;
    double v = (x - p.support_lo()) / (1.0 - p.theta);
    return 1.0 - detail::irwin_hall_cdf(v, p.N);
}

// Both sides of the Mellin smoothing identity
//   sum_n cutoff(log n/log x) n^-s = (1/2pi i) Int_(c) zeta(s+w) Fhat(-iw log x/2pi) dw/w,
// returned as |LHS - RHS|.
inline double mellin_smoothing_identity_check(cplx s, double x, const SmoothingPair& p,
                                              double c_in = 0.0) {
    p.validate();
    if (!(x > 1.0)) throw ConfigInvalid("mellin identity: x > 1 required");
    double c = c_in > 0.0 ? c_in : std::max(1.0 - s.real(), 0.0) + 0.5;
    if (!(c > std::max(1.0 - s.real(), 0.0)))
        throw ConfigInvalid("mellin identity: c > max(1 - Re s, 0) required");

    double lx = std::log(x);
    double nmax_f = std::pow(x, p.support_hi());
    if (nmax_f > 5e7) throw TooLarge("mellin identity: LHS sum too long");
    std::int64_t nmax = std::int64_t(nmax_f) + 1;
    cplx lhs{};
    for (std::int64_t n = 1; n <= nmax; ++n) {
        double g = pair_cutoff_eval(std::log(double(n)) / lx, p);
        if (g == 0.0) continue;
        lhs += g * std::exp(-s * std::log(double(n)));
    }

    const int nodes = 12;
    const double panel = 0.5;
    const GaussLegendre& gl = gauss_legendre(nodes);
    auto integrand = [&](double y) {
        cplx w(c, y);
        cplx z = cplx(0.0, -1.0) * w * (lx / kTwoPi);
        return zeta_em(s + w) * fhat_eval(z, p) / w;
    };
    cplx acc{};
    for (int dir : {+1, -1}) {
        int quiet = 0;
        for (double y0 = 0.0; y0 < 400.0; y0 += panel) {
            cplx contrib{};
            for (int j = 0; j < nodes; ++j) {
                double y = dir * (y0 + 0.5 * panel * (1.0 + gl.node[j]));
                contrib += gl.weight[j] * 0.5 * panel * integrand(y);
            }
            acc += contrib;
            if (std::abs(contrib) < 1e-12 * (1.0 + std::abs(acc))) {
                if (++quiet >= 3) break;
            } else {
                quiet = 0;
            }
            if (y0 + panel >= 400.0)
                throw QuadratureNotConverged("mellin identity: contour tail not dead");
        }
    }
    cplx rhs = acc / kTwoPi;
    return std::abs(lhs - rhs);
}

}  // namespace ztm
