#pragma once

// Dirichlet polynomials A(s) = sum_{n<=N} a_n n^-s: construction from
// coefficient models (unit, seeded random draws, smooth profiles, prime
// indicators, d_{1/k}, Dirichlet-convolution products) and evaluation with a
// precomputed log table.  Polynomials are immutable after build.

#include <memory>
#include <string>

#include "ztm/arith.hpp"
#include "ztm/weights.hpp"

namespace ztm {

struct DirichletPolynomial {
    std::vector<cplx> coeffs;   // 1-indexed; coeffs[0] unused
    std::vector<double> logn;   // cached log n
    std::string label;

    DirichletPolynomial() : coeffs(2, cplx{}), logn(2, 0.0) { coeffs[1] = 1.0; }

    explicit DirichletPolynomial(std::vector<cplx> c, std::string lab = "")
        : coeffs(std::move(c)), label(std::move(lab)) {
        if (coeffs.size() < 2) throw BadModel("DirichletPolynomial: N >= 1 required");
        logn.resize(coeffs.size());
        for (std::size_t n = 1; n < coeffs.size(); ++n) logn[n] = std::log(double(n));
    }

    std::size_t length() const { return coeffs.size() - 1; }

    bool real_coeffs() const {
        for (std::size_t n = 1; n < coeffs.size(); ++n)
            if (coeffs[n].imag() != 0.0) return false;
        return true;
    }

    double norm_sq() const {
        double s = 0.0;
        for (std::size_t n = 1; n < coeffs.size(); ++n) s += std::norm(coeffs[n]);
        return s;
    }

    // sum a_n exp(-s log n), direct order
    cplx eval(cplx s) const {
        double sig = s.real(), t = s.imag();
        double re = 0.0, im = 0.0;
        for (std::size_t n = 1; n < coeffs.size(); ++n) {
            const cplx& a = coeffs[n];
            if (a == cplx{}) continue;
            double amp = std::exp(-sig * logn[n]);
            double c = std::cos(t * logn[n]), sn = -std::sin(t * logn[n]);
            re += amp * (a.real() * c - a.imag() * sn);
            im += amp * (a.real() * sn + a.imag() * c);
        }
        return {re, im};
    }

    // blocked route: per-block partials, pairwise-reduced
    cplx eval_blocked(cplx s) const {
        const std::size_t B = 512;
        std::vector<cplx> partial;
        double sig = s.real(), t = s.imag();
        for (std::size_t lo = 1; lo < coeffs.size(); lo += B) {
            std::size_t hi = std::min(coeffs.size(), lo + B);
            cplx acc{};
            for (std::size_t n = lo; n < hi; ++n) {
                const cplx& a = coeffs[n];
                if (a == cplx{}) continue;
                double amp = std::exp(-sig * logn[n]);
                acc += a * cplx(amp * std::cos(t * logn[n]), -amp * std::sin(t * logn[n]));
            }
            partial.push_back(acc);
        }
        return pairwise_sum(partial);
    }

    // |A(1/2 + it)|^2 with amplitudes hoisted for grid scans
    double abs_sq_half(double t) const {
        double re = 0.0, im = 0.0;
        for (std::size_t n = 1; n < coeffs.size(); ++n) {
            const cplx& a = coeffs[n];
            if (a == cplx{}) continue;
            double amp = std::exp(-0.5 * logn[n]);
            double c = std::cos(t * logn[n]), sn = -std::sin(t * logn[n]);
            re += amp * (a.real() * c - a.imag() * sn);
            im += amp * (a.real() * sn + a.imag() * c);
        }
        return re * re + im * im;
    }
};

// ---------------------------------------------------------------------------
// Coefficient models
// ---------------------------------------------------------------------------

struct CoeffModel {
    enum class Kind {
        unit,
        random_disk,
        random_sign,
        smooth_psi,
        prime_indicator,
        frac_order,
        convolution_product
    };

    Kind kind = Kind::unit;
    std::uint64_t seed = 1;
    // support window, clipped to [1, N] at build time; 0 hi means "to N"
    std::uint64_t lo = 1, hi = 0;
    // kind-specific parameters
    std::uint64_t frac_k = 2;         // frac_order: the k of zeta^{1/k}
    double psi_T = 1000.0;            // smooth_psi: support [N T^-xi1, N]
    double psi_xi1 = 0.1;
    std::uint64_t residue_r = 1, residue_q = 4;  // prime_indicator class
    std::shared_ptr<CoeffModel> left, right;     // convolution_product factors

    static CoeffModel unit_model() { return {}; }
    static CoeffModel random(Kind k, std::uint64_t seed) {
        CoeffModel m;
        m.kind = k;
        m.seed = seed;
        return m;
    }
};

inline const char* coeff_kind_name(CoeffModel::Kind k) {
    switch (k) {
        case CoeffModel::Kind::unit: return "unit";
        case CoeffModel::Kind::random_disk: return "random_disk";
        case CoeffModel::Kind::random_sign: return "random_sign";
        case CoeffModel::Kind::smooth_psi: return "smooth_psi";
        case CoeffModel::Kind::prime_indicator: return "prime_indicator";
        case CoeffModel::Kind::frac_order: return "frac_order";
        case CoeffModel::Kind::convolution_product: return "convolution_product";
    }
    return "?";
}

inline DirichletPolynomial build(const CoeffModel& model, std::uint64_t N) {
    if (N < 1) throw BadModel("build: N >= 1 required");
    std::uint64_t lo = model.lo, hi = model.hi == 0 ? N : model.hi;
    if (lo < 1 || hi < lo) throw BadModel("build: inconsistent support window");
    hi = std::min(hi, N);

    std::vector<cplx> c(N + 1, cplx{});
    auto in_window = [&](std::uint64_t n) { return n >= lo && n <= hi; };

    switch (model.kind) {
        case CoeffModel::Kind::unit: {
            if (in_window(1)) c[1] = 1.0;
            break;
        }
        case CoeffModel::Kind::random_disk: {
            SplitMix64 rng(mix_seed(model.seed, 0));
            for (std::uint64_t n = 1; n <= N; ++n) {
                cplx v = rng.unit_disk();  // drawn for every n so the window
                if (in_window(n)) c[n] = v;  // does not shift the stream
            }
            break;
        }
        case CoeffModel::Kind::random_sign: {
            SplitMix64 rng(mix_seed(model.seed, 0));
            for (std::uint64_t n = 1; n <= N; ++n) {
                double v = rng.sign();
                if (in_window(n)) c[n] = v;
            }
            break;
        }
        case CoeffModel::Kind::smooth_psi: {
            // psi rises over [a, 2a] and falls over [N/2, N]; the ramp scales
            // give psi^(j) = O(x^-j).  When the ramps overlap the product
            // peaks below 1, which is still an admissible profile.
            double a = std::max(1.0, double(N) * std::pow(model.psi_T, -model.psi_xi1));
            for (std::uint64_t n = 1; n <= N; ++n) {
                if (!in_window(n)) continue;
                double x = double(n);
                double v = smooth_step((x - a) / a) * smooth_ramp(2.0 * x / double(N));
                if (v != 0.0) c[n] = v;
            }
            break;
        }
        case CoeffModel::Kind::prime_indicator: {
            auto marks = prime_indicator(lo, hi, model.residue_r, model.residue_q);
            for (std::uint64_t n = lo; n <= hi; ++n)
                if (marks[n - lo]) c[n] = 1.0;
            break;
        }
        case CoeffModel::Kind::frac_order: {
            FracCoefficients fc = frac_coefficients(model.frac_k, N);
            for (std::uint64_t n = 1; n <= N; ++n)
                if (in_window(n)) c[n] = fc.values[n];
            break;
        }
        case CoeffModel::Kind::convolution_product: {
            if (!model.left || !model.right)
                throw BadModel("convolution_product: two factor models required");
            DirichletPolynomial A = build(*model.left, N);
            DirichletPolynomial B = build(*model.right, N);
            auto conv = dirichlet_convolve(A.coeffs, B.coeffs);
            for (std::uint64_t n = 1; n <= N; ++n)
                if (in_window(n)) c[n] = conv[n];
            break;
        }
    }
    return DirichletPolynomial(std::move(c), coeff_kind_name(model.kind));
}

// sum_{n<=x} d_{1/2}(n) n^{-i v} n^{-s}: the square-root mollifier
inline DirichletPolynomial dhalf_mollifier(std::uint64_t x, double v) {
    if (x < 1) throw BadModel("dhalf_mollifier: x >= 1 required");
    FracCoefficients fc = frac_coefficients(2, x);
    std::vector<cplx> c(x + 1, cplx{});
    for (std::uint64_t n = 1; n <= x; ++n) {
        double ph = -v * std::log(double(n));
        c[n] = fc.values[n] * cplx(std::cos(ph), std::sin(ph));
    }
    return DirichletPolynomial(std::move(c), "dhalf");
}

// coefficient dump, one row per index: n,re,im
inline void dump_coeffs_csv(const DirichletPolynomial& p, std::ostream& os) {
    os << "n,re,im\n";
    char buf[96];
    for (std::size_t n = 1; n < p.coeffs.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", n, p.coeffs[n].real(),
                      p.coeffs[n].imag());
        os << buf;
    }
}

}  // namespace ztm
