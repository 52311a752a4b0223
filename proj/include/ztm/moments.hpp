#pragma once

// The moment integrals:
//
//   I = Int |zeta(1/2+it)|^2 |A(1/2+it)|^2 phi(t/T) dt        (direct)
//
//   main term = sum_{d,e<=N} a_d conj(a_e)/[d,e] *
//               Int (log(t (d,e)^2/(2 pi d e)) + 2 gamma) phi(t/T) dt
//     The inner integral depends on (d,e) only through q = d* e*, and
//     log(t/(2 pi q)) splits it as J0 - log(q) * Phi with two fixed
//     integrals, so the double sum needs no per-pair quadrature at all.
//
//   diagonal D = 2 sum_{n1,n2,l} a_{n1} conj(a_{n2}) (n1,n2)/(l n1 n2) *
//                Int W(2 pi l^2 n1* n2*/t) phi(t/T) dt
//
//   A0 = -(2/2pi i) sum a conj(a) (n1,n2)/(n1 n2) *
//        Int_R Int_(-1/4) (t/2pi q)^w zeta(1+2w) G(w) dw/w phi(t/T) dt,
//     the h = 0 off-diagonal piece; D + A0 reproduces the main term.  The
//     t-integral factors through Phi_w = Int_1^2 u^w phi(u) du, leaving one
//     exponential per contour node per distinct q.
//
//   AFE: |zeta(1/2+it)|^2 = 2 sum_{m1,m2} (m1 m2)^(-1/2) (m1/m2)^(it)
//                           W(2 pi m1 m2/t) + O(t^(-2/3)),
//     truncated at m1 m2 <= t*kWCutoff/(2 pi) where W vanishes identically.
//
//   M3(sigma, T) = Int_T^2T |zeta(sigma+it)|^3 dt

#include <chrono>

#include "ztm/dirichlet_poly.hpp"
#include "ztm/quadrature.hpp"
#include "ztm/special.hpp"
#include "ztm/weights.hpp"

namespace ztm {

// ---------------------------------------------------------------------------
// Quadrature spec and report
// ---------------------------------------------------------------------------

struct QuadratureSpec {
    enum class Rule { gauss_legendre_panels, simpson };
    Rule rule = Rule::gauss_legendre_panels;
    double panel_width = 0.0;  // 0 = auto
    int nodes_per_panel = 8;

    // |zeta(1/2+it)|^2 varies on the zero-spacing scale ~ 2 pi / log t
    static double osc_scale(double T) { return kTwoPi / (4.0 * std::log(2.0 * T / kTwoPi)); }

    double width_for(double T) const {
        double w = panel_width > 0.0 ? panel_width : std::min(0.25, osc_scale(T));
        return w;
    }

    void validate(double T) const {
        if (nodes_per_panel < 4) throw ConfigInvalid("QuadratureSpec: nodes_per_panel >= 4");
        if (panel_width > 0.0 && panel_width > osc_scale(T) * (1.0 + 1e-12))
            throw ConfigInvalid("QuadratureSpec: panel width exceeds the oscillation scale");
    }
};

struct MomentReport {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
    double wall_time = 0.0;
};

namespace detail {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// |zeta|^2 grid over [T, 2T]
// ---------------------------------------------------------------------------

struct ZetaGrid {
    double T = 0.0;
    double width = 0.0;
    int nodes = 8;
    std::size_t panels = 0;
    QuadratureSpec::Rule rule = QuadratureSpec::Rule::gauss_legendre_panels;
    std::vector<double> t;    // node ordinates, panel-major
    std::vector<double> w;    // quadrature weights
    std::vector<double> zsq;  // |zeta(1/2 + i t)|^2
};

// node layout for one panel [a, a+h]
inline void panel_nodes(QuadratureSpec::Rule rule, int nodes, double a, double h,
                        std::vector<double>& ts, std::vector<double>& ws) {
    ts.clear();
    ws.clear();
    if (rule == QuadratureSpec::Rule::gauss_legendre_panels) {
        const GaussLegendre& gl = gauss_legendre(nodes);
        for (int j = 0; j < nodes; ++j) {
            ts.push_back(a + 0.5 * h * (1.0 + gl.node[j]));
            ws.push_back(0.5 * h * gl.weight[j]);
        }
    } else {
        int m = nodes % 2 == 0 ? nodes : nodes + 1;  // even subinterval count
        double hh = h / m;
        for (int j = 0; j <= m; ++j) {
            double wj = (j == 0 || j == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            ts.push_back(a + hh * j);
            ws.push_back(wj * hh / 3.0);
        }
    }
}

inline ZetaGrid build_zeta_grid(double T, const QuadratureSpec& quad,
                                const ZetaEvalConfig& zcfg) {
    quad.validate(T);
    ZetaGrid g;
    g.T = T;
    g.width = quad.width_for(T);
    g.nodes = quad.nodes_per_panel;
    g.rule = quad.rule;
    g.panels = std::size_t(std::ceil(T / g.width - 1e-12));
    double h = T / double(g.panels);
    g.width = h;
    std::vector<double> pts, pws;
    for (std::size_t p = 0; p < g.panels; ++p) {
        panel_nodes(g.rule, g.nodes, T + h * double(p), h, pts, pws);
        g.t.insert(g.t.end(), pts.begin(), pts.end());
        g.w.insert(g.w.end(), pws.begin(), pws.end());
    }
    g.zsq = zeta_abs_sq_line_batch(0.5, g.t, zcfg);
    return g;
}

// ---------------------------------------------------------------------------
// Direct twisted moment
// ---------------------------------------------------------------------------

namespace detail {

// integral against an existing grid; per-panel partials, pairwise reduced
inline double grid_integral(const ZetaGrid& g, const DirichletPolynomial& p) {
    std::size_t per = g.t.size() / g.panels;
    std::vector<double> partial(g.panels);
    parallel_chunks(g.panels, [&](std::size_t pi) {
        double s = 0.0;
        for (std::size_t j = pi * per; j < (pi + 1) * per; ++j) {
            double ph = phi_eval(g.t[j] / g.T);
            if (ph == 0.0) continue;
            s += g.w[j] * g.zsq[j] * p.abs_sq_half(g.t[j]) * ph;
        }
        partial[pi] = s;
    });
    return pairwise_sum(partial);
}

}  // namespace detail

// I with an error estimate from a half-width rerun on a 5% panel sample.  A
// quarter-width rerun on the same sample guards the estimate itself: if it
// is not shrinking, the quadrature has not converged.
inline MomentReport direct_twisted_moment(const DirichletPolynomial& p, double T,
                                          const QuadratureSpec& quad = {},
                                          const ZetaEvalConfig& zcfg = {},
                                          const ZetaGrid* shared = nullptr) {
    if (T < 100.0) throw ConfigInvalid("direct_twisted_moment: T >= 100 required");
    detail::Stopwatch clock;
    ZetaGrid local;
    const ZetaGrid* g = shared;
    if (!g) {
        local = build_zeta_grid(T, quad, zcfg);
        g = &local;
    }
    MomentReport rep;
    rep.value = detail::grid_integral(*g, p);
    rep.evaluations = g->t.size();

    // refinement sample: every 20th panel, halved then quartered
    double h = g->width;
    std::size_t per = g->t.size() / g->panels;
    std::vector<std::size_t> sample;
    for (std::size_t pi = 0; pi < g->panels; pi += 20) sample.push_back(pi);
    auto refine = [&](std::size_t pi, int split) {
        double a = g->T + h * double(pi);
        double hh = h / split;
        std::vector<double> ts, ws, allt, allw;
        for (int k = 0; k < split; ++k) {
            panel_nodes(g->rule, g->nodes, a + hh * k, hh, ts, ws);
            allt.insert(allt.end(), ts.begin(), ts.end());
            allw.insert(allw.end(), ws.begin(), ws.end());
        }
        auto zs = zeta_abs_sq_line_batch(0.5, allt, zcfg);
        double s = 0.0;
        for (std::size_t j = 0; j < allt.size(); ++j) {
            double ph = phi_eval(allt[j] / g->T);
            if (ph == 0.0) continue;
            s += allw[j] * zs[j] * p.abs_sq_half(allt[j]) * ph;
        }
        return s;
    };
    std::vector<double> d1(sample.size()), d2(sample.size());
    parallel_chunks(sample.size(), [&](std::size_t si) {
        std::size_t pi = sample[si];
        double base = 0.0;
        for (std::size_t j = pi * per; j < (pi + 1) * per; ++j) {
            double ph = phi_eval(g->t[j] / g->T);
            if (ph == 0.0) continue;
            base += g->w[j] * g->zsq[j] * p.abs_sq_half(g->t[j]) * ph;
        }
        double half = refine(pi, 2);
        double quarter = refine(pi, 4);
        d1[si] = std::abs(half - base);
        d2[si] = std::abs(quarter - half);
    });
    double s1 = pairwise_sum(d1), s2 = pairwise_sum(d2);
    rep.abs_error_estimate = s1 * double(g->panels) / double(sample.size());
    if (s2 > 10.0 * s1 + 1e-12 * std::abs(rep.value))
        throw QuadratureNotConverged("direct_twisted_moment: refinement not contracting");
    rep.wall_time = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// Main term of the twisted moment
// ---------------------------------------------------------------------------

struct MainTermResult {
    double value = 0.0;
    double imag_residual = 0.0;
    std::uint64_t negative_log_pairs = 0;  // pairs whose log factor dips below 0 in [T,2T]
};

inline MainTermResult main_term(const DirichletPolynomial& p, double T) {
    if (T <= 10.0) throw ConfigInvalid("main_term: T > 10 required");
    // J0 = Int (log(t/2pi) + 2 gamma) phi(t/T) dt,  Phi = Int phi(t/T) dt
    double J0 = integrate_panels_real(T, 2.0 * T, T / 256.0, 8, [&](double t) {
        return (std::log(t / kTwoPi) + 2.0 * kEulerGamma) * phi_eval(t / T);
    });
    double Phi = integrate_panels_real(T, 2.0 * T, T / 256.0, 8,
                                       [&](double t) { return phi_eval(t / T); });
    std::size_t N = p.length();
    cplx acc{};
    std::uint64_t neg = 0;
    for (std::size_t d = 1; d <= N; ++d) {
        if (p.coeffs[d] == cplx{}) continue;
        for (std::size_t e = 1; e <= N; ++e) {
            if (p.coeffs[e] == cplx{}) continue;
            std::uint64_t g = std::gcd(d, e);
            double q = double(d / g) * double(e / g);  // d* e* = de/(d,e)^2
            cplx wgt = p.coeffs[d] * std::conj(p.coeffs[e]) * (double(g) / (double(d) * double(e)));
            acc += wgt * (J0 - std::log(q) * Phi);
            if (T / (kTwoPi * q) < 1.0) ++neg;
        }
    }
    MainTermResult r;
    r.value = acc.real();
    r.imag_residual = std::abs(acc.imag());
    r.negative_log_pairs = neg;
    return r;
}

// ---------------------------------------------------------------------------
// Diagonal term
// ---------------------------------------------------------------------------

inline double diagonal_term(const DirichletPolynomial& p, double T) {
    if (T < 100.0) throw ConfigInvalid("diagonal_term: T >= 100 required");
    std::size_t N = p.length();
    // K_W(m) = Int W(2 pi m/t) phi(t/T) dt, truncated where W vanishes for
    // every t <= 2T
    double m_cut = 2.0 * T * kWCutoff / kTwoPi;
    auto KW = [&](double m) {
        return integrate_panels_real(T, 2.0 * T, T / 96.0, 8, [&](double t) {
            return W_eval(kTwoPi * m / t) * phi_eval(t / T);
        });
    };
    // gather (q, weight) pairs, then the l-sum per distinct q
    struct Pair {
        double q;
        cplx wgt;
    };
    std::vector<Pair> pairs;
    for (std::size_t n1 = 1; n1 <= N; ++n1) {
        if (p.coeffs[n1] == cplx{}) continue;
        for (std::size_t n2 = 1; n2 <= N; ++n2) {
            if (p.coeffs[n2] == cplx{}) continue;
            std::uint64_t g = std::gcd(n1, n2);
            double q = double(n1 / g) * double(n2 / g);
            cplx wgt =
                p.coeffs[n1] * std::conj(p.coeffs[n2]) * (double(g) / (double(n1) * double(n2)));
            pairs.push_back({q, wgt});
        }
    }
    std::vector<double> partial(pairs.size());
    parallel_chunks(pairs.size(), [&](std::size_t i) {
        double q = pairs[i].q;
        double s = 0.0;
        for (double l = 1.0; l * l * q <= m_cut; l += 1.0) s += KW(l * l * q) / l;
        partial[i] = (pairs[i].wgt * s).real();
    });
    return 2.0 * pairwise_sum(partial);
}

// ---------------------------------------------------------------------------
// A0: the h = 0 off-diagonal contribution (shifted contour Re w = -1/4)
// ---------------------------------------------------------------------------

inline double zero_mode_term(const DirichletPolynomial& p, double T) {
    if (T < 100.0) throw ConfigInvalid("zero_mode_term: T >= 100 required");
    // contour nodes w = -1/4 + iy; integrand dies with G and zeta growth is mild
    const double panel = 0.25;
    const int nodes = 8;
    const double c = -0.25;
    const GaussLegendre& gl = gauss_legendre(nodes);
    std::vector<double> ys, yw;
    for (double y0 = 0.0; y0 < 320.0; y0 += panel)
        for (int j = 0; j < nodes; ++j) {
            ys.push_back(y0 + 0.5 * panel * (1.0 + gl.node[j]));
            yw.push_back(0.5 * panel * gl.weight[j]);
        }
    // K(y) = zeta(1+2w) G(w)/w * T^(w+1) Phi_w, with Phi_w = Int_1^2 u^w phi(u) du
    std::vector<cplx> K(ys.size());
    parallel_chunks((ys.size() + 63) / 64, [&](std::size_t ci) {
        for (std::size_t i = ci * 64; i < std::min(ys.size(), (ci + 1) * 64); ++i) {
            cplx w(c, ys[i]);
            cplx phiw = integrate_panels<cplx>(1.0, 2.0, 1.0 / 64.0, 8, [&](double u) {
                return std::exp(w * std::log(u)) * phi_eval(u);
            });
            K[i] = zeta_em(1.0 + 2.0 * w) * G_eval(w) / w * std::exp((w + 1.0) * std::log(T)) *
                   phiw * yw[i];
        }
    });
    // H(q) = (1/pi) Re sum K(y) (2 pi q)^-w  (conjugate symmetry in y)
    auto H = [&](double q) {
        double lq = std::log(kTwoPi * q);
        cplx s{};
        for (std::size_t i = 0; i < ys.size(); ++i)
            s += K[i] * std::exp(-cplx(c, ys[i]) * lq);
        return s.real() / kPi;
    };
    std::size_t N = p.length();
    cplx acc{};
    for (std::size_t n1 = 1; n1 <= N; ++n1) {
        if (p.coeffs[n1] == cplx{}) continue;
        for (std::size_t n2 = 1; n2 <= N; ++n2) {
            if (p.coeffs[n2] == cplx{}) continue;
            std::uint64_t g = std::gcd(n1, n2);
            double q = double(n1 / g) * double(n2 / g);
            cplx wgt =
                p.coeffs[n1] * std::conj(p.coeffs[n2]) * (double(g) / (double(n1) * double(n2)));
            acc += wgt * H(q);
        }
    }
    return -2.0 * acc.real();
}

// ---------------------------------------------------------------------------
// Approximate functional equation surrogate for |zeta(1/2+it)|^2
// ---------------------------------------------------------------------------

inline double afe_abs_zeta_sq(double t) {
    if (t < 100.0) throw ConfigInvalid("afe_abs_zeta_sq: t >= 100 required");
    std::int64_t K = std::int64_t(t * kWCutoff / kTwoPi);
    std::vector<double> ln(K + 1);
    for (std::int64_t n = 1; n <= K; ++n) ln[n] = std::log(double(n));
    double diag = 0.0, cr = 0.0;
    double off = 0.0, co = 0.0;
    for (std::int64_t m1 = 1; m1 * m1 <= K; ++m1) {
        // diagonal
        {
            double x = W_eval(kTwoPi * double(m1) * double(m1) / t) / double(m1) - cr;
            double s = diag + x;
            cr = (s - diag) - x;
            diag = s;
        }
        for (std::int64_t m2 = m1 + 1; m1 * m2 <= K; ++m2) {
            double k = double(m1) * double(m2);
            double wv = W_eval(kTwoPi * k / t);
            if (wv == 0.0) continue;
            double term = 2.0 * wv * std::cos(t * (ln[m1] - ln[m2])) / std::sqrt(k) - co;
            double s = off + term;
            co = (s - off) - term;
            off = s;
        }
    }
    return 2.0 * (diag + off);
}

// ---------------------------------------------------------------------------
// Third moment
// ---------------------------------------------------------------------------

inline MomentReport third_moment(double sigma, double T, const QuadratureSpec& quad = {},
                                 const ZetaEvalConfig& zcfg = {}) {
    if (!(sigma >= 0.5 && sigma <= 1.0)) throw ConfigInvalid("third_moment: sigma in [1/2, 1]");
    if (T < 100.0) throw ConfigInvalid("third_moment: T >= 100 required");
    detail::Stopwatch clock;
    quad.validate(T);
    double h0 = quad.width_for(T);
    std::size_t panels = std::size_t(std::ceil(T / h0 - 1e-12));
    double h = T / double(panels);
    std::vector<double> ts, ws, pts, pws;
    for (std::size_t p = 0; p < panels; ++p) {
        panel_nodes(quad.rule, quad.nodes_per_panel, T + h * double(p), h, pts, pws);
        ts.insert(ts.end(), pts.begin(), pts.end());
        ws.insert(ws.end(), pws.begin(), pws.end());
    }
    auto zsq = zeta_abs_sq_line_batch(sigma, ts, zcfg);
    std::size_t per = ts.size() / panels;
    std::vector<double> partial(panels);
    parallel_chunks(panels, [&](std::size_t pi) {
        double s = 0.0;
        for (std::size_t j = pi * per; j < (pi + 1) * per; ++j)
            s += ws[j] * zsq[j] * std::sqrt(zsq[j]);
        partial[pi] = s;
    });
    MomentReport rep;
    rep.value = pairwise_sum(partial);
    rep.evaluations = ts.size();

    // half-width rerun on a 5% sample
    std::vector<std::size_t> sample;
    for (std::size_t pi = 0; pi < panels; pi += 20) sample.push_back(pi);
    std::vector<double> d1(sample.size());
    parallel_chunks(sample.size(), [&](std::size_t si) {
        std::size_t pi = sample[si];
        double a = T + h * double(pi);
        std::vector<double> t2, w2, p2t, p2w;
        for (int k = 0; k < 2; ++k) {
            panel_nodes(quad.rule, quad.nodes_per_panel, a + 0.5 * h * k, 0.5 * h, p2t, p2w);
            t2.insert(t2.end(), p2t.begin(), p2t.end());
            w2.insert(w2.end(), p2w.begin(), p2w.end());
        }
        auto z2 = zeta_abs_sq_line_batch(sigma, t2, zcfg);
        double fine = 0.0;
        for (std::size_t j = 0; j < t2.size(); ++j) fine += w2[j] * z2[j] * std::sqrt(z2[j]);
        d1[si] = std::abs(fine - partial[pi]);
    });
    rep.abs_error_estimate = pairwise_sum(d1) * double(panels) / double(sample.size());
    if (rep.abs_error_estimate > 0.05 * std::abs(rep.value))
        throw QuadratureNotConverged("third_moment: refinement estimate too large");
    rep.wall_time = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// Twisted-moment consistency experiment
// ---------------------------------------------------------------------------

struct MomentExperimentTrial {
    int trial = 0;
    std::uint64_t seed = 0;
    double i_direct = 0.0;
    double main = 0.0;
    double rel_dev = 0.0;
    std::uint64_t negative_log_pairs = 0;
};

struct MomentExperimentReport {
    double T = 0.0;
    double theta = 0.0;
    std::uint64_t N = 0;
    bool beyond_half_regime = false;  // theta > 1/2: past the diagonal barrier
    std::vector<MomentExperimentTrial> trials;
    double mean_rel_dev = 0.0;
    double max_rel_dev = 0.0;
};

inline MomentExperimentReport twisted_moment_experiment(const CoeffModel& model, double T, double theta,
                                          int trials, std::uint64_t seed,
                                          const QuadratureSpec& quad = {},
                                          const ZetaEvalConfig& zcfg = {}) {
    if (!(theta > 0.0 && theta <= 0.6)) throw ConfigInvalid("twisted_moment_experiment: theta in (0, 0.6]");
    if (trials < 1) throw ConfigInvalid("twisted_moment_experiment: trials >= 1");
    std::uint64_t N = std::uint64_t(std::ceil(std::pow(T, theta)));
    if (N > 10'000) throw TooLarge("twisted_moment_experiment: N = ceil(T^theta) beyond the desk guard 1e4");

    MomentExperimentReport rep;
    rep.T = T;
    rep.theta = theta;
    rep.N = N;
    rep.beyond_half_regime = theta > 0.5;

    ZetaGrid grid = build_zeta_grid(T, quad, zcfg);
    double sum_dev = 0.0;
    for (int i = 0; i < trials; ++i) {
        CoeffModel m = model;
        m.seed = mix_seed(seed, std::uint64_t(i));
        DirichletPolynomial p = build(m, N);
        MomentExperimentTrial row;
        row.trial = i;
        row.seed = m.seed;
        row.i_direct = detail::grid_integral(grid, p);
        MainTermResult mt = main_term(p, T);
        row.main = mt.value;
        row.negative_log_pairs = mt.negative_log_pairs;
        row.rel_dev = std::abs(row.i_direct - row.main) / std::abs(row.i_direct);
        sum_dev += row.rel_dev;
        rep.max_rel_dev = std::max(rep.max_rel_dev, row.rel_dev);
        rep.trials.push_back(row);
    }
    rep.mean_rel_dev = sum_dev / double(trials);
    return rep;
}

}  // namespace ztm
