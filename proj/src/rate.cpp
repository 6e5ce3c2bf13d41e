#include "isac/rate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "isac/kernels.hpp"
#include "isac/parallel.hpp"

namespace isac {

namespace {

constexpr std::size_t kChunk = 1024;

struct ScaledPoints {
    std::vector<double> re, im;
};

ScaledPoints scaled_points(cdouble h, const Constellation& constel) {
    ScaledPoints p;
    const auto pts = constel.points();
    p.re.reserve(pts.size());
    p.im.reserve(pts.size());
    for (auto x : pts) {
        const cdouble v = h * x;
        p.re.push_back(v.real());
        p.im.push_back(v.imag());
    }
    return p;
}

}  // namespace

double noise_entropy(double noise_var) { return std::log(kPi * std::exp(1.0) * noise_var); }

double log_output_density(cdouble y, cdouble h, const Constellation& constel, double noise_var) {
    const ScaledPoints p = scaled_points(h, constel);
    const double yr = y.real(), yi = y.imag();
    double lse = 0.0;
    kernels::active_kernels().mixture_logsum(&yr, &yi, 1, p.re.data(), p.im.data(), p.re.size(),
                                             1.0 / noise_var, &lse);
    return lse - std::log(static_cast<double>(p.re.size()) * kPi * noise_var);
}

double output_density(cdouble y, cdouble h, const Constellation& constel, double noise_var) {
    return std::exp(log_output_density(y, h, constel, noise_var));
}

double mi_cell_raw(cdouble h, const Constellation& constel, double noise_var, std::size_t samples,
                   Rng& rng) {
    if (samples == 0) throw ConfigError("MI needs at least one sample");
    if (!(noise_var > 0.0)) throw ConfigError("MI needs a positive noise variance");
    const ScaledPoints p = scaled_points(h, constel);
    const std::size_t L = p.re.size();
    std::uniform_int_distribution<std::size_t> pick(0, L - 1);
    ComplexGaussian noise(noise_var);
    const auto& k = kernels::active_kernels();

    std::vector<double> yr(kChunk), yi(kChunk), lse(kChunk);
    double total = 0.0;
    for (std::size_t done = 0; done < samples; done += kChunk) {
        const std::size_t n = std::min(kChunk, samples - done);
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t l = pick(rng);
            const cdouble z = noise(rng);
            yr[s] = p.re[l] + z.real();
            yi[s] = p.im[l] + z.imag();
        }
        k.mixture_logsum(yr.data(), yi.data(), n, p.re.data(), p.im.data(), L, 1.0 / noise_var,
                         lse.data());
        for (std::size_t s = 0; s < n; ++s) total += lse[s];
    }
    // h(y|h) - ln(pi e var) with ln f = lse - ln(L pi var) reduces to ln L - E[lse] - 1.
    const double nats = std::log(static_cast<double>(L)) - total / static_cast<double>(samples) - 1.0;
    return nats / std::log(2.0);
}

double mi_cell(cdouble h, const Constellation& constel, double noise_var, std::size_t samples,
               Rng& rng) {
    const double cap = std::log2(static_cast<double>(constel.order()));
    return std::clamp(mi_cell_raw(h, constel, noise_var, samples, rng), 0.0, cap);
}

MiResult frame_rate(const CMatrix& h, const Frame& frame, const Constellation& constel,
                    double noise_var, std::size_t samples, const OfdmConfig& cfg, std::uint64_t seed,
                    std::size_t threads) {
    if (!h.same_shape(frame.symbols)) throw ConfigError("effective channel and frame differ in shape");
    MiResult res;
    res.samples = samples;
    res.seed = seed;
    res.cell_mi = RMatrix(h.rows(), h.cols());

    // MI depends on h only through |h|, so cells are grouped by |h|^2.
    std::map<double, std::size_t> group_of;
    std::vector<std::size_t> first_cell;
    std::vector<double> group_gain;
    std::vector<std::size_t> cell_group(h.size(), SIZE_MAX);
    for (std::size_t n = 0; n < h.rows(); ++n) {
        for (std::size_t m = 0; m < h.cols(); ++m) {
            if (frame.label(n, m) != SymbolLabel::Data) continue;
            const std::size_t idx = n * h.cols() + m;
            const double g = std::norm(h(n, m));
            auto [it, inserted] = group_of.try_emplace(g, first_cell.size());
            if (inserted) {
                first_cell.push_back(idx);
                group_gain.push_back(g);
            }
            cell_group[idx] = it->second;
        }
    }

    std::vector<double> group_mi(first_cell.size());
    parallel_for(first_cell.size(), threads, [&](std::size_t g) {
        Rng rng(derive_seed(seed, {first_cell[g]}));
        group_mi[g] = mi_cell(cdouble(std::sqrt(group_gain[g]), 0.0), constel, noise_var, samples, rng);
    });

    auto cells = res.cell_mi.flat();
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        if (cell_group[idx] == SIZE_MAX) continue;
        cells[idx] = group_mi[cell_group[idx]];
        res.frame_mi_bits += cells[idx];
    }
    res.rate_bps = res.frame_mi_bits / (static_cast<double>(cfg.symbols) * cfg.symbol_duration_s());
    return res;
}

}  // namespace isac
