#pragma once

// Exact integer arithmetic and multiplicative coefficient generators:
// factorization against a fixed sieve, mu, phi, modular inverses, Ramanujan
// and Kloosterman sums, the d_{1/n} coefficients of zeta^{1/n}, Dirichlet
// convolution, and residue-class prime indicators.
//
// Identities relied on below:
//   c_n(a) = sum_{(b,n)=1} e(ba/n) = mu(n/(n,a)) * phi(n) / phi(n/(n,a))
//   S(a,b;c) = sum_{(x,c)=1} e((ax + b*xbar)/c),  S(a,0;c) = c_c(a)
//   d_{1/k}(p^j) = C(j - 1 + 1/k, j) = prod_{i=0}^{j-1} (1 + i*k) / (k*(i+1))

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>

#include "ztm/common.hpp"

namespace ztm {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using i128 = __int128_t;

// All desk-scale indices stay below this; factorization is trial division
// against primes from a sieve of this size (so n up to kSieveLimit^2 works).
inline constexpr u64 kSieveLimit = 1'000'000;

namespace detail {

struct SieveTables {
    std::vector<std::uint32_t> spf;   // smallest prime factor, spf[0]=spf[1]=0
    std::vector<std::uint32_t> primes;
};

inline const SieveTables& sieve() {
    static const SieveTables tab = [] {
        SieveTables t;
        t.spf.assign(kSieveLimit + 1, 0);
        for (u64 i = 2; i <= kSieveLimit; ++i) {
            if (t.spf[i] == 0) {
                t.primes.push_back(std::uint32_t(i));
                for (u64 j = i; j <= kSieveLimit; j += i)
                    if (t.spf[j] == 0) t.spf[j] = std::uint32_t(i);
            }
        }
        return t;
    }();
    return tab;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// FactoredInteger
// ---------------------------------------------------------------------------

struct FactoredInteger {
    u64 n = 1;
    std::vector<std::pair<u64, int>> factors;  // (prime, exponent), primes increasing
};

inline FactoredInteger factorize(u64 n) {
    if (n == 0) throw ConfigInvalid("factorize: n must be >= 1");
    FactoredInteger f;
    f.n = n;
    const auto& tab = detail::sieve();
    u64 m = n;
    if (m <= kSieveLimit) {
        while (m > 1) {
            u64 p = tab.spf[m];
            int e = 0;
            while (m % p == 0) { m /= p; ++e; }
            f.factors.emplace_back(p, e);
        }
        return f;
    }
    if (n > kSieveLimit * kSieveLimit)
        throw TooLarge("factorize: n exceeds sieve-backed range (n > 1e12)");
    for (u64 p : tab.primes) {
        if (p * p > m) break;
        if (m % p == 0) {
            int e = 0;
            while (m % p == 0) { m /= p; ++e; }
            f.factors.emplace_back(p, e);
        }
    }
    if (m > 1) f.factors.emplace_back(m, 1);  // prime cofactor
    return f;
}

inline int mobius(u64 n) {
    FactoredInteger f = factorize(n);
    for (auto& [p, e] : f.factors)
        if (e > 1) return 0;
    return (f.factors.size() % 2 == 0) ? 1 : -1;
}

inline u64 euler_phi(u64 n) {
    FactoredInteger f = factorize(n);
    u64 r = n;
    for (auto& [p, e] : f.factors) r = r / p * (p - 1);
    return r;
}

inline u64 lcm_u64(u64 a, u64 b) {
    u64 g = std::gcd(a, b);
    i128 l = i128(a / g) * i128(b);
    if (l > i128(UINT64_MAX)) throw ArithmeticOverflow("lcm overflow");
    return u64(l);
}

// ---------------------------------------------------------------------------
// Modular inverse (extended gcd)
// ---------------------------------------------------------------------------

inline i64 egcd(i64 a, i64 b, i64& x, i64& y) {
    if (b == 0) { x = 1; y = 0; return a; }
    i64 x1, y1;
    i64 g = egcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

// Returns x in [0, n) with m*x == 1 (mod n).  n >= 1; m any integer.
inline u64 mod_inverse(i64 m, u64 n) {
    if (n == 0) throw ConfigInvalid("mod_inverse: n must be >= 1");
    if (n == 1) return 0;
    i64 mr = m % i64(n);
    if (mr < 0) mr += i64(n);
    i64 x, y;
    i64 g = egcd(mr, i64(n), x, y);
    if (g != 1) throw NotCoprime("mod_inverse: gcd(m, n) > 1");
    x %= i64(n);
    if (x < 0) x += i64(n);
    return u64(x);
}

// ---------------------------------------------------------------------------
// Ramanujan and Kloosterman sums
// ---------------------------------------------------------------------------

// Closed form c_n(a) = mu(n/g) * phi(n) / phi(n/g), g = (n, a).
inline double ramanujan_sum(u64 n, i64 a) {
    if (n == 0) throw ConfigInvalid("ramanuan_sum: n must be >= 1");
    u64 aa = (a == 0) ? n : u64(std::abs(a)) % n;
    u64 g = (aa == 0) ? n : std::gcd(n, aa);
    u64 q = n / g;
    return double(mobius(q)) * double(euler_phi(n)) / double(euler_phi(q));
}

// S(a,b;c) over x mod c with (x,c)=1.  The full sum is real (x <-> -x pairs
// conjugate terms); the imaginary residue is asserted below 1e-10 to catch
// coprimality-filter bugs.
inline double kloosterman_sum(i64 a, i64 b, u64 c) {
    if (c == 0) throw ConfigInvalid("kloosterman_sum: c must be >= 1");
    if (c == 1) return 1.0;
    i64 ar = ((a % i64(c)) + i64(c)) % i64(c);
    i64 br = ((b % i64(c)) + i64(c)) % i64(c);
    cplx s{};
    for (u64 x = 1; x < c; ++x) {
        if (std::gcd(x, c) != 1) continue;
        u64 xb = mod_inverse(i64(x), c);
        u64 num = (u64(ar) * x + u64(br) * xb) % c;
        s += unit_exp(double(num) / double(c));
    }
    if (std::abs(s.imag()) > 1e-10)
        throw NumericFailure("kloosterman_sum: imaginary residue above 1e-10");
    return s.real();
}

// ---------------------------------------------------------------------------
// Exact rationals (int64 numerator/denominator, __int128 intermediates)
// ---------------------------------------------------------------------------

struct Rational {
    i64 num = 0;
    i64 den = 1;  // > 0, gcd(num, den) = 1

    Rational() = default;
    Rational(i64 n) : num(n), den(1) {}
    Rational(i64 n, i64 d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw ArithmeticOverflow("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        i64 g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    static Rational from128(i128 n, i128 d) {
        if (d == 0) throw ArithmeticOverflow("Rational: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        i128 an = n < 0 ? -n : n;
        i128 g = std::__gcd(an, d);
        if (g > 1) { n /= g; d /= g; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw ArithmeticOverflow("Rational: value exceeds int64 range");
        Rational r;
        r.num = i64(n);
        r.den = i64(d);
        return r;
    }

    double to_double() const { return double(num) / double(den); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from128(i128(a.num) * b.den + i128(b.num) * a.den, i128(a.den) * b.den);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from128(i128(a.num) * b.den - i128(b.num) * a.den, i128(a.den) * b.den);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from128(i128(a.num) * b.num, i128(a.den) * b.den);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num == 0) throw ArithmeticOverflow("Rational: division by zero");
        return from128(i128(a.num) * b.den, i128(a.den) * b.num);
    }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
};

// ---------------------------------------------------------------------------
// d_{1/order} coefficients of zeta(s)^{1/order}
// ---------------------------------------------------------------------------

struct FracCoefficients {
    u64 order = 1;
    bool exact = false;             // rational mode (X <= 1e4)
    std::vector<Rational> ratv;     // 1-indexed (ratv[0] unused) when exact
    std::vector<double> values;     // 1-indexed doubles, always filled

    double at(u64 n) const { return values.at(n); }
};

// Rational mode is used up to X = 1e4 so the self-convolution invariant
// (order-fold convolution equals the all-ones sequence) is exact.
inline constexpr u64 kFracExactLimit = 10'000;

inline FracCoefficients frac_coefficients(u64 order, u64 X) {
    if (order == 0 || X == 0) throw ConfigInvalid("frac_coefficients: order, X >= 1");
    FracCoefficients fc;
    fc.order = order;
    fc.exact = (X <= kFracExactLimit);
    const auto& tab = detail::sieve();
    if (X > kSieveLimit) throw TooLarge("frac_coefficients: X beyond sieve limit");

    // prime-power values d(p^j), independent of p:
    //   d(p^j) = prod_{i=0}^{j-1} (1 + i*order) / (order*(i+1))
    int maxexp = 1;
    while ((u64(1) << (maxexp + 1)) <= X) ++maxexp;
    std::vector<Rational> pw(maxexp + 1);
    std::vector<double> pwd(maxexp + 1);
    pw[0] = Rational(1);
    pwd[0] = 1.0;
    for (int j = 1; j <= maxexp; ++j) {
        if (fc.exact)
            pw[j] = pw[j - 1] * Rational(i64(1 + u64(j - 1) * order), i64(order * u64(j)));
        pwd[j] = pwd[j - 1] * double(1 + u64(j - 1) * order) / double(order * u64(j));
    }

    fc.values.assign(X + 1, 0.0);
    fc.values[1] = 1.0;
    if (fc.exact) {
        fc.ratv.assign(X + 1, Rational(0));
        fc.ratv[1] = Rational(1);
    }
    for (u64 n = 2; n <= X; ++n) {
        u64 p = tab.spf[n];
        u64 m = n;
        int e = 0;
        while (m % p == 0) { m /= p; ++e; }
        fc.values[n] = fc.values[m] * pwd[e];
        if (fc.exact) fc.ratv[n] = fc.ratv[m] * pw[e];
    }
    return fc;
}

// ---------------------------------------------------------------------------
// Dirichlet convolution, (a*b)[d] = sum_{nk=d} a[n] b[k]
// ---------------------------------------------------------------------------

// Sequences are 1-indexed: index 0 is present but ignored.  The result is
// complete up to min(len(a), len(b)) - 1.
template <class T>
std::vector<T> dirichlet_convolve(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw ConfigInvalid("dirichlet_convolve: sequences must have index 1");
    std::size_t X = std::min(a.size(), b.size()) - 1;
    std::vector<T> c(X + 1, T{});
    for (std::size_t n = 1; n <= X; ++n) {
        if (a[n] == T{}) continue;
        for (std::size_t k = 1; n * k <= X; ++k) c[n * k] += a[n] * b[k];
    }
    return c;
}

// ---------------------------------------------------------------------------
// Primes in residue classes
// ---------------------------------------------------------------------------

inline bool is_prime(u64 n) {
    if (n < 2) return false;
    if (n <= kSieveLimit) return detail::sieve().spf[n] == n;
    FactoredInteger f = factorize(n);
    return f.factors.size() == 1 && f.factors[0].second == 1;
}

// 0/1 marks over [lo, hi] for primes p == r (mod q).
inline std::vector<std::uint8_t> prime_indicator(u64 lo, u64 hi, u64 r, u64 q) {
    if (lo == 0 || hi < lo) throw ConfigInvalid("prime_indicator: need hi >= lo >= 1");
    if (q == 0) throw ConfigInvalid("prime_indicator: modulus q >= 1");
    std::vector<std::uint8_t> out(hi - lo + 1, 0);
    for (u64 n = lo; n <= hi; ++n)
        if (n % q == r % q && is_prime(n)) out[n - lo] = 1;
    return out;
}

}  // namespace ztm
