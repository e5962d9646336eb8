#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

namespace mext {

// Fixed-capacity ambient vector; components beyond size() are kept at zero so
// arithmetic can run over the full array without branching.
struct Vec {
    std::array<double, 4> v{0.0, 0.0, 0.0, 0.0};
    int n = 0;

    Vec() = default;
    Vec(int size) : n(size) {}
    Vec(std::initializer_list<double> init) {
        n = static_cast<int>(init.size());
        int i = 0;
        for (double x : init) v[static_cast<std::size_t>(i++)] = x;
    }
    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
    int size() const { return n; }
    const double* data() const { return v.data(); }
    double* data() { return v.data(); }
};

inline Vec operator+(Vec a, const Vec& b) {
    for (int i = 0; i < a.n; ++i) a.v[static_cast<std::size_t>(i)] += b.v[static_cast<std::size_t>(i)];
    return a;
}
inline Vec operator-(Vec a, const Vec& b) {
    for (int i = 0; i < a.n; ++i) a.v[static_cast<std::size_t>(i)] -= b.v[static_cast<std::size_t>(i)];
    return a;
}
inline Vec operator*(double s, Vec a) {
    for (int i = 0; i < a.n; ++i) a.v[static_cast<std::size_t>(i)] *= s;
    return a;
}
inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < a.n; ++i) s += a.v[static_cast<std::size_t>(i)] * b.v[static_cast<std::size_t>(i)];
    return s;
}
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// Pairwise (cascade) summation: deterministic for a fixed element order and
// accurate to O(log n) rounding growth. All norm/diagnostic reductions go
// through here so equal inputs give byte-equal results.
double pairwise_sum(const double* x, std::size_t n);
double pairwise_sum(const std::vector<double>& x);

// Halton low-discrepancy sequence, one value per (index, base).
double halton(std::uint64_t index, std::uint32_t base);

// Shortest round-trippable decimal (%.17g); the one float format every
// canonical serialization uses. NaN renders as "NA" in the _or_na variant.
std::string format_g17(double v);
std::string format_or_na(double v);

// Deterministic 64-bit generator (splitmix64) with explicit uniform/normal
// maps; avoids the implementation-defined std:: distributions so seeded
// outputs are stable across toolchains.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next_u64() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Standard normal via Box-Muller (polar rejection kept simple and exact).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }
};

} // namespace mext
