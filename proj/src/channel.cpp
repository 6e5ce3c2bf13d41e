#include "isac/channel.hpp"

#include <cmath>

namespace isac {

CVector steering(double angle_deg, std::size_t n_ant) {
    const double phase = kPi * std::sin(deg_to_rad(angle_deg));
    CVector a(n_ant);
    for (std::size_t i = 0; i < n_ant; ++i) a[i] = std::polar(1.0, phase * static_cast<double>(i));
    return a;
}

CVector delay_vector(double delay_s, std::size_t n, double df) {
    CVector b(n);
    for (std::size_t k = 0; k < n; ++k)
        b[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) * df * delay_s);
    return b;
}

CVector doppler_phases(double doppler_hz, std::span<const std::size_t> symbols, double tsym) {
    CVector c(symbols.size());
    for (std::size_t j = 0; j < symbols.size(); ++j)
        c[j] = std::polar(1.0, 2.0 * kPi * static_cast<double>(symbols[j]) * tsym * doppler_hz);
    return c;
}

double radar_link_gain(double rcs_m2, double range_m, double wavelength_m) {
    const double four_pi = 4.0 * kPi;
    return rcs_m2 * wavelength_m * wavelength_m /
           (four_pi * four_pi * four_pi * std::pow(range_m, 4));
}

double los_link_gain(double d0_m, double wavelength_m) {
    const double r = wavelength_m / (4.0 * kPi * d0_m);
    return r * r;
}

double nlos_link_gain(double rcs_m2, double d1_m, double d2_m, double wavelength_m) {
    const double four_pi = 4.0 * kPi;
    return rcs_m2 * wavelength_m * wavelength_m /
           (four_pi * four_pi * four_pi * d1_m * d1_m * d2_m * d2_m);
}

cdouble comm_path_gain(const CommPath& path, const OfdmConfig& cfg) {
    const double lambda = cfg.wavelength_m();
    const double g = path.kind == PathKind::Los ? los_link_gain(path.d0_m, lambda)
                                                : nlos_link_gain(path.rcs_m2, path.d1_m, path.d2_m, lambda);
    return std::polar(std::sqrt(g), -2.0 * kPi * cfg.carrier_hz * path.delay_s);
}

CVector draw_target_gains(std::span<const Target> targets, const OfdmConfig& cfg, Rng& rng) {
    CVector g;
    g.reserve(targets.size());
    for (const auto& t : targets)
        g.push_back(std::polar(std::sqrt(radar_link_gain(t.rcs_m2, t.range_m, cfg.wavelength_m())),
                               uniform_phase(rng)));
    return g;
}

CMatrix sensing_channel_entry(std::span<const Target> targets, std::span<const cdouble> gains,
                              std::size_t n, std::size_t m, const OfdmConfig& cfg) {
    CMatrix H(cfg.rx_antennas, cfg.tx_antennas);
    const double lambda = cfg.wavelength_m();
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const auto& t = targets[k];
        const cdouble phase =
            gains[k] *
            std::polar(1.0, -2.0 * kPi * static_cast<double>(n) * cfg.subcarrier_spacing_hz * t.delay_s()) *
            std::polar(1.0, 2.0 * kPi * static_cast<double>(m) * cfg.symbol_duration_s() *
                                t.doppler_hz(lambda));
        const CVector ar = steering(t.angle_deg, cfg.rx_antennas);
        const CVector at = steering(t.angle_deg, cfg.tx_antennas);
        for (std::size_t r = 0; r < ar.size(); ++r)
            for (std::size_t c = 0; c < at.size(); ++c) H(r, c) += phase * ar[r] * at[c];
    }
    return H;
}

CVector comm_channel_entry(std::span<const CommPath> paths, std::size_t n, std::size_t m,
                           const OfdmConfig& cfg) {
    CVector h(cfg.tx_antennas);
    for (const auto& p : paths) {
        const cdouble w =
            comm_path_gain(p, cfg) *
            std::polar(1.0, -2.0 * kPi * static_cast<double>(n) * cfg.subcarrier_spacing_hz * p.delay_s) *
            std::polar(1.0, 2.0 * kPi * static_cast<double>(m) * cfg.symbol_duration_s() * p.doppler_hz);
        const CVector at = steering(p.aod_deg, cfg.tx_antennas);
        for (std::size_t i = 0; i < h.size(); ++i) h[i] += w * at[i];
    }
    return h;
}

cdouble beam_target_gain(const Target& target, cdouble alpha, std::span<const cdouble> f) {
    const CVector at = steering(target.angle_deg, f.size());
    cdouble acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += at[i] * f[i];
    return alpha * acc;
}

RadarCube synthesize_radar_cube(std::span<const Target> targets, std::span<const cdouble> gains,
                                const Frame& frame, const TxBeamMatrix& F, const OfdmConfig& cfg,
                                Rng& rng, bool add_noise) {
    const std::size_t N = cfg.subcarriers, M = cfg.symbols, NR = cfg.rx_antennas;
    const double lambda = cfg.wavelength_m();

    // Per target the noise-free response factorizes as
    //   alpha_k aR_k[i] (a_T,k^T f_m) b_k[n] c_k[m] x[n,m].
    std::vector<CVector> delay(targets.size()), slow(targets.size()), rx(targets.size());
    std::vector<std::size_t> all(M);
    for (std::size_t m = 0; m < M; ++m) all[m] = m;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const auto& t = targets[k];
        delay[k] = delay_vector(t.delay_s(), N, cfg.subcarrier_spacing_hz);
        slow[k] = doppler_phases(t.doppler_hz(lambda), all, cfg.symbol_duration_s());
        const CVector at = steering(t.angle_deg, cfg.tx_antennas);
        for (std::size_t m = 0; m < M; ++m) {
            cdouble g = 0.0;
            for (std::size_t j = 0; j < at.size(); ++j) g += at[j] * F(j, m);
            slow[k][m] *= gains[k] * g;
        }
        rx[k] = steering(t.angle_deg, NR);
    }

    RadarCube cube;
    cube.noise_var = cfg.noise_variance();
    cube.antennas.assign(NR, CMatrix(N, M));
    ComplexGaussian noise(cube.noise_var);
    for (std::size_t i = 0; i < NR; ++i) {
        auto& Y = cube.antennas[i];
        for (std::size_t n = 0; n < N; ++n) {
            auto row = Y.row(n);
            auto xrow = frame.symbols.row(n);
            for (std::size_t k = 0; k < targets.size(); ++k) {
                const cdouble w = rx[k][i] * delay[k][n];
                for (std::size_t m = 0; m < M; ++m) row[m] += w * slow[k][m];
            }
            for (std::size_t m = 0; m < M; ++m) row[m] *= xrow[m];
            if (add_noise)
                for (std::size_t m = 0; m < M; ++m) row[m] += noise(rng);
        }
    }
    return cube;
}

RadarCube synthesize_radar_cube(std::span<const Target> targets, const Frame& frame,
                                const TxBeamMatrix& F, const OfdmConfig& cfg, Rng& rng) {
    const CVector gains = draw_target_gains(targets, cfg, rng);
    return synthesize_radar_cube(targets, gains, frame, F, cfg, rng, true);
}

CMatrix effective_comm_channel(std::span<const CommPath> paths, const TxBeamMatrix& F,
                               const OfdmConfig& cfg) {
    const std::size_t N = cfg.subcarriers, M = cfg.symbols;
    std::vector<std::size_t> all(M);
    for (std::size_t m = 0; m < M; ++m) all[m] = m;

    CMatrix H(N, M);
    for (const auto& p : paths) {
        const cdouble a = comm_path_gain(p, cfg);
        const CVector b = delay_vector(p.delay_s, N, cfg.subcarrier_spacing_hz);
        const CVector c = doppler_phases(p.doppler_hz, all, cfg.symbol_duration_s());
        const CVector at = steering(p.aod_deg, cfg.tx_antennas);
        CVector g(M);
        for (std::size_t m = 0; m < M; ++m) {
            cdouble s = 0.0;
            for (std::size_t j = 0; j < at.size(); ++j) s += at[j] * F(j, m);
            g[m] = a * s * c[m];
        }
        for (std::size_t n = 0; n < N; ++n) {
            auto row = H.row(n);
            for (std::size_t m = 0; m < M; ++m) row[m] += b[n] * g[m];
        }
    }
    return H;
}

CommReception synthesize_comm_reception(std::span<const CommPath> paths, const Frame& frame,
                                        const TxBeamMatrix& F, double noise_var,
                                        const OfdmConfig& cfg, Rng& rng, bool add_noise) {
    CommReception rec;
    rec.noise_var = noise_var;
    rec.h = effective_comm_channel(paths, F, cfg);
    rec.y = CMatrix(cfg.subcarriers, cfg.symbols);
    ComplexGaussian noise(noise_var);
    auto h = rec.h.flat();
    auto x = frame.symbols.flat();
    auto y = rec.y.flat();
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = h[i] * x[i];
        if (add_noise) y[i] += noise(rng);
    }
    return rec;
}

CMatrix sample_prior_channel(const ChannelPrior& prior, std::size_t targets,
                             std::span<const std::size_t> symbols, std::size_t antenna,
                             const OfdmConfig& cfg, Rng& rng) {
    const std::size_t N = cfg.subcarriers;
    CMatrix H(N, symbols.size());
    if (targets == 0) return H;
    ComplexGaussian alpha(prior.gain_variance / static_cast<double>(targets));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t k = 0; k < targets; ++k) {
        const cdouble a = alpha(rng);
        const double tau = unit(rng) / cfg.subcarrier_spacing_hz;
        const double nu = unit(rng) / cfg.symbol_duration_s();
        const double theta = -90.0 + 180.0 * unit(rng);
        const cdouble ar = steering(theta, antenna + 1)[antenna];
        const CVector b = delay_vector(tau, N, cfg.subcarrier_spacing_hz);
        const CVector c = doppler_phases(nu, symbols, cfg.symbol_duration_s());
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t j = 0; j < symbols.size(); ++j) H(n, j) += a * ar * b[n] * c[j];
    }
    return H;
}

}  // namespace isac
