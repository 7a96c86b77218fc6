// Deterministic RNG (pinned Box-Muller over mt19937_64, so parallel and serial
// runs agree bit-for-bit) and a small index-deterministic parallel_for.
#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace corrsist {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // in [0,1)
        return (eng_() >> 11) * 0x1.0p-53;
    }
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * M_PI * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }
    Eigen::Vector3d unit3() {
        Eigen::Vector3d v;
        do {
            v << normal(), normal(), normal();
        } while (v.norm() < 1e-12);
        return v / v.norm();
    }
    std::uint64_t raw() { return eng_(); }

    // fixed-arithmetic derivation of per-task streams from a master seed
    static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
        std::uint64_t h = master ^ (0x9E3779B97F4A7C15ull * (index + 1));
        h ^= h >> 30; h *= 0xBF58476D1CE4E5B9ull;
        h ^= h >> 27; h *= 0x94D049BB133111EBull;
        h ^= h >> 31;
        return h;
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0;
    bool have_spare_ = false;
};

inline int worker_count() {
    if (const char* env = std::getenv("CORRSIST_THREADS")) {
        const int k = std::atoi(env);
        if (k >= 1) return k;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? int(hw) : 1;
}

namespace detail {
inline thread_local int parallel_depth = 0;
}

// Runs fn(i) for i in [0,n); results must be written by index so that the
// outcome is independent of scheduling. Nested calls run serially.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int workers = std::min<std::size_t>(worker_count(), n ? n : 1);
    if (detail::parallel_depth > 0 || workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            detail::parallel_depth = 1;
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace corrsist
