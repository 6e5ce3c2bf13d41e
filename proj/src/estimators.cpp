#include "isac/estimators.hpp"

#include <algorithm>

#include "isac/kernels.hpp"

namespace isac {

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::RF: return "RF";
        case EstimatorKind::MF: return "MF";
        case EstimatorKind::LMMSE: return "LMMSE";
    }
    return "?";
}

namespace {

void require_same_shape(const CMatrix& y, const CMatrix& x) {
    if (!y.same_shape(x)) throw ConfigError("received and transmitted grids differ in shape");
}

}  // namespace

ChannelEstimate rf_estimate(const CMatrix& y, const CMatrix& x) {
    require_same_shape(y, x);
    if (std::ranges::any_of(x.flat(), [](cdouble v) { return v == cdouble{}; }))
        throw SingularInputError("reciprocal filtering needs nonzero transmit symbols");
    ChannelEstimate est{CMatrix(y.rows(), y.cols()), EstimatorKind::RF};
    kernels::active_kernels().rf(y.data(), x.data(), est.h.data(), y.size());
    return est;
}

ChannelEstimate mf_estimate(const CMatrix& y, const CMatrix& x) {
    require_same_shape(y, x);
    ChannelEstimate est{CMatrix(y.rows(), y.cols()), EstimatorKind::MF};
    kernels::active_kernels().mf(y.data(), x.data(), est.h.data(), y.size());
    return est;
}

ChannelEstimate lmmse_estimate(const CMatrix& y, const CMatrix& x, double snr) {
    require_same_shape(y, x);
    if (!(snr > 0.0)) throw ConfigError("LMMSE needs a positive SNR");
    ChannelEstimate est{CMatrix(y.rows(), y.cols()), EstimatorKind::LMMSE, snr};
    kernels::active_kernels().lmmse(y.data(), x.data(), 1.0 / snr, est.h.data(), y.size());
    return est;
}

double estimate_snr_b(std::span<const cdouble> gains, double noise_var) {
    double p = 0.0;
    for (auto g : gains) p += std::norm(g);
    return p / noise_var;
}

BeamObservation extract_beam(const RadarCube& cube, const Frame& frame,
                             std::span<const std::size_t> symbols, std::size_t beam) {
    const std::size_t N = frame.symbols.rows(), Mb = symbols.size();
    BeamObservation obs;
    obs.symbols.assign(symbols.begin(), symbols.end());
    obs.beam = beam;
    obs.noise_var = cube.noise_var;
    obs.x = CMatrix(N, Mb);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t j = 0; j < Mb; ++j) obs.x(n, j) = frame.symbols(n, symbols[j]);
    obs.y.reserve(cube.rx_antennas());
    for (const auto& Y : cube.antennas) {
        CMatrix s(N, Mb);
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t j = 0; j < Mb; ++j) s(n, j) = Y(n, symbols[j]);
        obs.y.push_back(std::move(s));
    }
    return obs;
}

std::vector<ChannelEstimate> estimate_beam(const BeamObservation& obs, EstimatorKind kind,
                                           double snr) {
    std::vector<ChannelEstimate> out;
    out.reserve(obs.y.size());
    for (std::size_t i = 0; i < obs.y.size(); ++i) {
        ChannelEstimate e;
        switch (kind) {
            case EstimatorKind::RF: e = rf_estimate(obs.y[i], obs.x); break;
            case EstimatorKind::MF: e = mf_estimate(obs.y[i], obs.x); break;
            case EstimatorKind::LMMSE: e = lmmse_estimate(obs.y[i], obs.x, snr); break;
        }
        e.antenna = i;
        e.beam = obs.beam;
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace isac
