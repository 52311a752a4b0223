#pragma once

// Shared plumbing: error taxonomy, deterministic RNG, deterministic parallel
// chunking, pairwise summation.  Everything here is header-only and pure.

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ztm {

using cplx = std::complex<double>;

inline constexpr double kPi       = 3.14159265358979323846264338328;
inline constexpr double kTwoPi    = 6.28318530717958647692528676656;
// Euler-Mascheroni constant, enters the twisted-moment main term as 2*gamma.
inline constexpr double kEulerGamma = 0.57721566490153286;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotCoprime : Error { using Error::Error; };
struct PoleAtOne : Error { using Error::Error; };
struct PoleAtNonPositiveInteger : Error { using Error::Error; };
struct MethodDomain : Error { using Error::Error; };
struct QuadratureNotConverged : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct EmptyPrimeClass : Error { using Error::Error; };
struct BadModel : Error { using Error::Error; };
struct ConfigInvalid : Error { using Error::Error; };
struct NumericFailure : Error { using Error::Error; };
struct ArithmeticOverflow : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Deterministic RNG (splitmix64).  std:: distributions are implementation
// defined, so draws are hand-rolled to keep seeded runs reproducible.
// ---------------------------------------------------------------------------

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

    // uniform in [-1, 1]
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

    double sign() { return (next() & 1) ? 1.0 : -1.0; }

    // uniform on the closed unit disk (rejection-free via sqrt radius)
    cplx unit_disk() {
        double r = std::sqrt(uniform01());
        double th = kTwoPi * uniform01();
        return cplx(r * std::cos(th), r * std::sin(th));
    }
};

// Mix a base seed with stream indices so trials get independent substreams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0x632be59bd9b4e019ULL * (stream + 1)));
    g.next();
    return g.next();
}

// ---------------------------------------------------------------------------
// Thread configuration.  ZTM_THREADS env var overrides hardware concurrency;
// set_thread_count() takes precedence over both (used by the CLI flag).
// ---------------------------------------------------------------------------

namespace detail {
inline int initial_thread_count() {
    if (const char* env = std::getenv("ZTM_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? int(hw) : 1;
}
inline std::atomic<int>& thread_count_ref() {
    static std::atomic<int> n{initial_thread_count()};
    return n;
}
}  // namespace detail

inline int thread_count() { return detail::thread_count_ref().load(); }
inline void set_thread_count(int n) { detail::thread_count_ref().store(n >= 1 ? n : 1); }

// Run f(i) for i in [0, n_chunks).  Work is handed out by an atomic counter;
// results must be written to slots indexed by i so the output is independent
// of the thread count and of scheduling.
template <class F>
void parallel_chunks(std::size_t n_chunks, F&& f) {
    int nt = std::min<std::size_t>(thread_count(), n_chunks);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n_chunks; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n_chunks) return;
            f(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int k = 0; k < nt; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Pairwise summation: a fixed reduction tree, so sums are bit-identical for
// any thread count once the per-chunk partials are in place.
// ---------------------------------------------------------------------------

template <class T>
T pairwise_sum(const T* a, std::size_t n) {
    if (n <= 16) {
        T s{};
        for (std::size_t i = 0; i < n; ++i) s += a[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(a, h) + pairwise_sum(a + h, n - h);
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
    return v.empty() ? T{} : pairwise_sum(v.data(), v.size());
}

// e(x) = exp(2*pi*i*x)
inline cplx unit_exp(double x) {
    double a = kTwoPi * x;
    return cplx(std::cos(a), std::sin(a));
}

}  // namespace ztm
