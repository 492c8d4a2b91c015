#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace thermograph {

/// Invalid input: bad family parameters, malformed files, inconsistent sizes.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical routine failed to converge or left its validity domain.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Combinatorial enumeration exceeded its configured budget.
struct BudgetExceeded : std::runtime_error {
    long long count;
    BudgetExceeded(const std::string& msg, long long n)
        : std::runtime_error(msg), count(n) {}
};

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Deterministic 64-bit generator (splitmix64). Used everywhere randomness
/// is needed so that a seed fully determines all sampling, independent of
/// platform library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Value in [a,b] with log-uniform distribution; requires 0 < a < b.
    double log_uniform(double a, double b) {
        return std::exp(uniform(std::log(a), std::log(b)));
    }

    /// Independent child stream; (seed, key) fully determines it.
    Rng derive(std::uint64_t key) const {
        Rng r(state_ ^ (0x9e3779b97f4a7c15ull * (key + 0x632be59bd9b4e019ull)));
        r.next_u64();
        return r;
    }

private:
    std::uint64_t state_;
};

/// FNV-1a, used for config hashes in CSV outputs.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Shortest decimal that round-trips a double (17 significant digits).
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline int thread_cap() {
    if (const char* env = std::getenv("THERMOGRAPH_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

/// Index-parallel loop. Work items must be independent; results must be
/// written to per-index slots so the outcome does not depend on scheduling.
inline void parallel_for(long long n, const std::function<void(long long)>& fn) {
    int threads = thread_cap();
    if (threads <= 1 || n < 4) {
        for (long long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<long long> next{0};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                long long i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace thermograph
