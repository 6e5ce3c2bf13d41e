#pragma once

#include <span>
#include <vector>

#include "isac/random.hpp"
#include "isac/scenario.hpp"
#include "isac/txchain.hpp"

namespace isac {

/// Half-wavelength ULA response: element i = exp(j pi i sin(theta)).
CVector steering(double angle_deg, std::size_t n_ant);

/// Frequency-domain delay vector b(tau): element n = exp(-j 2 pi n df tau).
CVector delay_vector(double delay_s, std::size_t n, double df);

/// Slow-time phase exp(j 2 pi m Tsym nu) for each listed absolute symbol index.
CVector doppler_phases(double doppler_hz, std::span<const std::size_t> symbols, double tsym);

/// Radar range equation, two-way: rcs lambda^2 / ((4 pi)^3 d^4).
double radar_link_gain(double rcs_m2, double range_m, double wavelength_m);
/// Free-space one-way gain lambda^2 / (4 pi d)^2.
double los_link_gain(double d0_m, double wavelength_m);
/// Bistatic single-bounce gain rcs lambda^2 / ((4 pi)^3 d1^2 d2^2).
double nlos_link_gain(double rcs_m2, double d1_m, double d2_m, double wavelength_m);

/// Complex path gain sqrt(gain) exp(-j 2 pi fc tau); deterministic.
cdouble comm_path_gain(const CommPath& path, const OfdmConfig& cfg);

/// One complex gain per target: radar-equation magnitude, uniform random phase.
CVector draw_target_gains(std::span<const Target> targets, const OfdmConfig& cfg, Rng& rng);

/// H_{n,m}, NR x NT.
CMatrix sensing_channel_entry(std::span<const Target> targets, std::span<const cdouble> gains,
                              std::size_t n, std::size_t m, const OfdmConfig& cfg);

/// h^com_{n,m}, length NT.
CVector comm_channel_entry(std::span<const CommPath> paths, std::size_t n, std::size_t m,
                           const OfdmConfig& cfg);

/// NR x N x M reception, antenna-major.
struct RadarCube {
    std::vector<CMatrix> antennas;  // each N x M
    double noise_var = 0.0;

    std::size_t rx_antennas() const { return antennas.size(); }
    std::size_t subcarriers() const { return antennas.empty() ? 0 : antennas[0].rows(); }
    std::size_t symbols() const { return antennas.empty() ? 0 : antennas[0].cols(); }
};

/// y_{n,m} = H_{n,m} f_m x_{n,m} + n_{n,m}; the noise term is skipped when add_noise is false.
RadarCube synthesize_radar_cube(std::span<const Target> targets, std::span<const cdouble> gains,
                                const Frame& frame, const TxBeamMatrix& F, const OfdmConfig& cfg,
                                Rng& rng, bool add_noise = true);

/// Draws the target gains from rng, then synthesizes.
RadarCube synthesize_radar_cube(std::span<const Target> targets, const Frame& frame,
                                const TxBeamMatrix& F, const OfdmConfig& cfg, Rng& rng);

struct CommReception {
    CMatrix y;  // N x M
    CMatrix h;  // effective channel (h^com)^T f_m
    double noise_var = 0.0;
};

/// Effective scalar channel per cell, N x M.
CMatrix effective_comm_channel(std::span<const CommPath> paths, const TxBeamMatrix& F,
                               const OfdmConfig& cfg);

CommReception synthesize_comm_reception(std::span<const CommPath> paths, const Frame& frame,
                                        const TxBeamMatrix& F, double noise_var,
                                        const OfdmConfig& cfg, Rng& rng, bool add_noise = true);

/// Overall gain of a target seen through transmit beam f: alpha a_T(theta)^T f.
cdouble beam_target_gain(const Target& target, cdouble alpha, std::span<const cdouble> f);

/// One draw of the unstructured per-antenna channel H_{i,b} (N x M_b) under the
/// uniform delay/Doppler/angle prior: `targets` paths with CN(0, var/targets)
/// gains, delay on [0, 1/df), Doppler on [0, 1/Tsym), angle on [-90, 90] deg.
CMatrix sample_prior_channel(const ChannelPrior& prior, std::size_t targets,
                             std::span<const std::size_t> symbols, std::size_t antenna,
                             const OfdmConfig& cfg, Rng& rng);

}  // namespace isac
