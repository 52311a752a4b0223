#pragma once

// Quadrature building blocks used across the workbench:
//   - Gauss-Legendre nodes/weights (Newton on the Legendre recurrence),
//   - fixed-width panel integration, serial and deterministically parallel,
//   - Chebyshev interpolation on [a,b],
//   - periodic trapezoid means over circles (residues, Taylor coefficients
//     of analytic functions; spectrally accurate).

#include <cmath>
#include <functional>
#include <map>
#include <mutex>

#include "ztm/common.hpp"

namespace ztm {

struct GaussLegendre {
    std::vector<double> node;    // on [-1, 1]
    std::vector<double> weight;
};

inline GaussLegendre make_gauss_legendre(int n) {
    GaussLegendre gl;
    gl.node.resize(n);
    gl.weight.resize(n);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double z1, pp;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            z1 = z;
            z = z1 - p1 / pp;
        } while (std::abs(z - z1) > 1e-15);
        gl.node[i] = -z;
        gl.node[n - 1 - i] = z;
        gl.weight[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        gl.weight[n - 1 - i] = gl.weight[i];
    }
    return gl;
}

inline const GaussLegendre& gauss_legendre(int n) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

namespace detail {
inline std::size_t panel_count(double a, double b, double width) {
    double len = b - a;
    if (!(len > 0) || !(width > 0)) throw ConfigInvalid("integrate_panels: bad range or width");
    return std::size_t(std::ceil(len / width - 1e-12));
}
}  // namespace detail

// Integral of f over [a, b], fixed panels of at most `width`, `nodes`-point
// Gauss-Legendre per panel.  Serial, fixed order.
template <class T, class F>
T integrate_panels(double a, double b, double width, int nodes, F&& f) {
    std::size_t np = detail::panel_count(a, b, width);
    double h = (b - a) / double(np);
    const GaussLegendre& gl = gauss_legendre(nodes);
    std::vector<T> partial(np);
    for (std::size_t p = 0; p < np; ++p) {
        double lo = a + h * double(p);
        double mid = lo + 0.5 * h, half = 0.5 * h;
        T s{};
        for (int j = 0; j < nodes; ++j)
            s += T(gl.weight[j] * f(mid + half * gl.node[j]));
        partial[p] = s * half;
    }
    return pairwise_sum(partial);
}

template <class F>
double integrate_panels_real(double a, double b, double width, int nodes, F&& f) {
    return integrate_panels<double>(a, b, width, nodes, std::forward<F>(f));
}

// Parallel variant: panels are the chunk unit; the reduction is a pairwise
// sum over the panel-indexed array, so the value is identical for any thread
// count.  Returns the integral; *evals receives the number of f calls.
template <class F>
double integrate_panels_parallel(double a, double b, double width, int nodes, F&& f,
                                 std::size_t* evals = nullptr) {
    std::size_t np = detail::panel_count(a, b, width);
    double h = (b - a) / double(np);
    const GaussLegendre& gl = gauss_legendre(nodes);
    std::vector<double> partial(np);
    parallel_chunks(np, [&](std::size_t p) {
        double lo = a + h * double(p);
        double mid = lo + 0.5 * h, half = 0.5 * h;
        double s = 0.0;
        for (int j = 0; j < nodes; ++j)
            s += gl.weight[j] * f(mid + half * gl.node[j]);
        partial[p] = s * half;
    });
    if (evals) *evals = np * std::size_t(nodes);
    return pairwise_sum(partial);
}

// ---------------------------------------------------------------------------
// Chebyshev interpolant on [a, b] (first-kind nodes, Clenshaw evaluation).
// ---------------------------------------------------------------------------

struct Cheb {
    double a = 0.0, b = 1.0;
    std::vector<double> coef;

    double operator()(double x) const {
        double t = (2.0 * x - a - b) / (b - a);
        double d = 0.0, dd = 0.0;
        for (std::size_t j = coef.size(); j-- > 1;) {
            double sv = d;
            d = 2.0 * t * d - dd + coef[j];
            dd = sv;
        }
        return t * d - dd + coef[0];
    }
};

inline Cheb cheb_fit(double a, double b, int n, const std::function<double(double)>& f) {
    std::vector<double> fv(n);
    for (int k = 0; k < n; ++k) {
        double th = kPi * (k + 0.5) / n;
        double x = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(th);
        fv[k] = f(x);
    }
    Cheb c;
    c.a = a;
    c.b = b;
    c.coef.resize(n);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += fv[k] * std::cos(kPi * j * (k + 0.5) / n);
        c.coef[j] = (j == 0 ? 1.0 : 2.0) * s / n;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Circle contours.  For f analytic on and inside |w - c| = r the periodic
// trapezoid rule converges geometrically in the node count.
// ---------------------------------------------------------------------------

// (1/2*pi*i) * contour integral of f(w)/(w - c) dw  ==  mean of f over the circle.
template <class F>
cplx circle_mean(cplx center, double r, int n, F&& f) {
    cplx s{};
    for (int j = 0; j < n; ++j) {
        double th = kTwoPi * j / n;
        s += f(center + cplx(r * std::cos(th), r * std::sin(th)));
    }
    return s / double(n);
}

// Taylor coefficients a_0..a_kmax of f about `center`: a_k = f^(k)/k!.
template <class F>
std::vector<cplx> taylor_on_circle(cplx center, double r, int n, int kmax, F&& f) {
    std::vector<cplx> fv(n);
    for (int j = 0; j < n; ++j) {
        double th = kTwoPi * j / n;
        fv[j] = f(center + cplx(r * std::cos(th), r * std::sin(th)));
    }
    std::vector<cplx> a(kmax + 1);
    for (int k = 0; k <= kmax; ++k) {
        cplx s{};
        for (int j = 0; j < n; ++j) {
            double th = kTwoPi * j / n;
            s += fv[j] * cplx(std::cos(k * th), -std::sin(k * th));
        }
        a[k] = s / (double(n) * std::pow(r, k));
    }
    return a;
}

}  // namespace ztm
