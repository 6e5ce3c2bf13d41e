#pragma once

#include <cstdint>

#include "isac/random.hpp"
#include "isac/scenario.hpp"
#include "isac/txchain.hpp"

namespace isac {

struct MiResult {
    RMatrix cell_mi;  // bits, N x M; zero on pilot cells
    double frame_mi_bits = 0.0;
    double rate_bps = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

/// Differential entropy of CN(0, var) in nats: ln(pi e var).
double noise_entropy(double noise_var);

/// ln f(y | h) for a uniform input over the constellation.
double log_output_density(cdouble y, cdouble h, const Constellation& constel, double noise_var);

/// f(y | h) = (1/L) sum_l CN(y; h x_l, var).
double output_density(cdouble y, cdouble h, const Constellation& constel, double noise_var);

/// Monte-Carlo MI estimate in bits before clamping.
double mi_cell_raw(cdouble h, const Constellation& constel, double noise_var, std::size_t samples,
                   Rng& rng);

/// Monte-Carlo MI estimate in bits, clamped to [0, log2 L].
double mi_cell(cdouble h, const Constellation& constel, double noise_var, std::size_t samples,
               Rng& rng);

/// Per-cell MI over the data cells of a frame and the resulting rate
/// sum(MI) / (M Tsym). Cells with equal |h| share one estimate seeded from
/// the first such cell, so the result does not depend on `threads`.
MiResult frame_rate(const CMatrix& h, const Frame& frame, const Constellation& constel,
                    double noise_var, std::size_t samples, const OfdmConfig& cfg, std::uint64_t seed,
                    std::size_t threads = 1);

}  // namespace isac
