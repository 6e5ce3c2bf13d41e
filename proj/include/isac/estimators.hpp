#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "isac/channel.hpp"
#include "isac/txchain.hpp"

namespace isac {

enum class EstimatorKind { RF, MF, LMMSE };

std::string_view to_string(EstimatorKind kind);

/// Unstructured time-frequency channel estimate of one antenna and one beam, N x M_b.
struct ChannelEstimate {
    CMatrix h;
    EstimatorKind kind = EstimatorKind::MF;
    double snr = 0.0;  // linear; meaningful for LMMSE only
    std::size_t antenna = 0;
    std::size_t beam = 0;
};

/// Element-wise Y / X. Throws SingularInputError if X has a zero entry.
ChannelEstimate rf_estimate(const CMatrix& y, const CMatrix& x);

/// Element-wise Y * conj(X).
ChannelEstimate mf_estimate(const CMatrix& y, const CMatrix& x);

/// Element-wise Y * conj(X) / (|X|^2 + 1/snr). Throws ConfigError unless snr > 0.
ChannelEstimate lmmse_estimate(const CMatrix& y, const CMatrix& x, double snr);

/// ||alpha||^2 / noise_var.
double estimate_snr_b(std::span<const cdouble> gains, double noise_var);

/// Received and transmitted symbols restricted to one beam's symbol set.
struct BeamObservation {
    std::vector<CMatrix> y;  // per antenna, N x M_b
    CMatrix x;               // N x M_b
    std::vector<std::size_t> symbols;
    std::size_t beam = 0;
    double noise_var = 0.0;
};

BeamObservation extract_beam(const RadarCube& cube, const Frame& frame,
                             std::span<const std::size_t> symbols, std::size_t beam);

/// Applies one estimator to every antenna of the beam; snr is used by LMMSE only.
std::vector<ChannelEstimate> estimate_beam(const BeamObservation& obs, EstimatorKind kind,
                                           double snr = 1.0);

}  // namespace isac
