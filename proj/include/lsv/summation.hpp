#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace lsv {

/// Double-double accumulator (TwoSum cascade).  Carries ~32 significant
/// digits so the rounded double result does not depend on summation order
/// for realistic magnitudes.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    void add(double x) {
        const double s = hi + x;
        const double bb = s - hi;
        const double err = (hi - (s - bb)) + (x - bb);
        hi = s;
        lo += err;
    }

    void add(const DoubleDouble& other) {
        add(other.hi);
        add(other.lo);
    }

    double value() const { return hi + lo; }
};

constexpr Eigen::Index kSumChunk = 4096;

/// Order-fixed chunked reduction of f(i), i in [0,n).  Chunks are accumulated
/// independently (parallelizable) and combined in index order, so the result
/// is bit-identical for any thread count.
template <class F>
double deterministic_sum(Eigen::Index n, F&& f) {
    if (n <= 0) return 0.0;
    const Eigen::Index n_chunks = (n + kSumChunk - 1) / kSumChunk;
    std::vector<DoubleDouble> partial(static_cast<std::size_t>(n_chunks));
#pragma omp parallel for schedule(static)
    for (Eigen::Index c = 0; c < n_chunks; ++c) {
        DoubleDouble acc;
        const Eigen::Index lo = c * kSumChunk;
        const Eigen::Index hi = std::min(n, lo + kSumChunk);
        for (Eigen::Index i = lo; i < hi; ++i) acc.add(f(i));
        partial[static_cast<std::size_t>(c)] = acc;
    }
    DoubleDouble total;
    for (const auto& p : partial) total.add(p);
    return total.value();
}

inline double deterministic_sum(const Eigen::Ref<const Eigen::ArrayXd>& v) {
    return deterministic_sum(v.size(), [&](Eigen::Index i) { return v[i]; });
}

} // namespace lsv
