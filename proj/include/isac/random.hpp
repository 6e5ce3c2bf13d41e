#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace isac {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent streams from a root seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Deterministic seed for a sub-stream identified by an index path,
/// e.g. derive_seed(campaign_seed, {grid_point, trial}).
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix_seed(root);
    for (auto p : path) s = mix_seed(s ^ mix_seed(p + 0x632BE59BD9B4E019ull));
    return s;
}

/// Circular complex Gaussian CN(0, variance).
class ComplexGaussian {
public:
    explicit ComplexGaussian(double variance) : dist_(0.0, std::sqrt(variance / 2.0)) {}
    template <class G>
    std::complex<double> operator()(G& g) {
        double re = dist_(g);
        double im = dist_(g);
        return {re, im};
    }

private:
    std::normal_distribution<double> dist_;
};

inline double uniform_phase(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 2.0 * 3.14159265358979323846)(rng);
}

}  // namespace isac
