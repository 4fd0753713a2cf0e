#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

namespace nystromkit {

// Counter-based Gaussian generator. Every normal deviate is a pure function
// of (seed, index), so parallel consumers produce identical streams
// regardless of evaluation order.
namespace rng {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double uniform01(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t h = mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
    // 53-bit mantissa, strictly inside (0, 1)
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

inline double normal(std::uint64_t seed, std::uint64_t index) {
    const double u1 = uniform01(seed, 2 * index);
    const double u2 = uniform01(seed, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Derive an independent stream seed, e.g. one per Monte Carlo trial.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream + 1));
}

}  // namespace rng

// Matrix with i.i.d. N(0,1) entries; entry (i,j) uses counter
// offset + j*rows + i.
inline Eigen::MatrixXd standard_gaussian(Eigen::Index rows, Eigen::Index cols,
                                         std::uint64_t seed, std::uint64_t offset = 0) {
    Eigen::MatrixXd X(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            X(i, j) = rng::normal(seed, offset + static_cast<std::uint64_t>(j) * rows + i);
    return X;
}

}  // namespace nystromkit
