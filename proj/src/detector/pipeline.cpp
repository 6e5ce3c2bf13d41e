#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "isac/detector.hpp"

namespace isac {

std::string_view to_string(SensingMode mode) {
    switch (mode) {
        case SensingMode::RF: return "RF";
        case SensingMode::MF: return "MF";
        case SensingMode::LMMSE: return "LMMSE";
        case SensingMode::LMMSEIdeal: return "LMMSE-ideal";
    }
    return "?";
}

PipelineConfig make_pipeline_config(const Scenario& s) {
    PipelineConfig p;
    p.ofdm = s.ofdm;
    const auto& se = s.sensing;
    p.cfar = {se.pfa, se.guard_delay, se.guard_doppler, se.train_delay, se.train_doppler};
    p.pad = se.pad;
    p.esprit_threshold = se.esprit_threshold;
    p.max_sources = se.max_sources;
    p.initial_snr = se.initial_snr;
    p.local_maxima_only = se.local_maxima_only;

    const std::size_t B = std::max<std::size_t>(s.beams.count, 1);
    const std::size_t sensing = sensing_symbols(s.ofdm, s.strategy).size();
    const double mb = std::max<double>(1.0, static_cast<double>(sensing) / static_cast<double>(B));
    p.cluster.range_res_m = s.ofdm.range_resolution_m();
    p.cluster.velocity_res_mps = s.ofdm.wavelength_m() / (2.0 * mb * s.ofdm.symbol_duration_s());
    p.cluster.angle_res_deg = 2.0;
    p.cluster.eps = std::sqrt(3.0);
    return p;
}

namespace {

// Shrinks the Doppler extent of the CFAR window for beams with few symbols.
// Returns false when not even a one-cell training band fits.
bool fit_window(CfarConfig& cfar, std::size_t rows, std::size_t cols) {
    if (2 * (cfar.guard_delay + cfar.train_delay) + 1 > rows) return false;
    while (2 * (cfar.guard_doppler + cfar.train_doppler) + 1 > cols) {
        if (cfar.train_doppler > 1) --cfar.train_doppler;
        else if (cfar.guard_doppler > 0) --cfar.guard_doppler;
        else return false;
    }
    return true;
}

}  // namespace

std::vector<Detection> beam_pipeline(std::span<const ChannelEstimate> estimates,
                                     std::span<const std::size_t> symbols, const PipelineConfig& cfg) {
    if (estimates.empty() || symbols.empty()) return {};
    const DelayDopplerMap map = integrated_map(estimates, cfg.pad, cfg.ofdm);
    CfarConfig cfar = cfg.cfar;
    if (!fit_window(cfar, map.power.rows(), map.power.cols())) return {};

    auto hits = cfar_detect(map.power, cfar, estimates.size());
    if (cfg.local_maxima_only) hits = local_maxima(map.power, hits);

    std::vector<PathParams> params;
    std::vector<double> stats;
    BeamProjector proj(estimates, symbols, cfg.ofdm);
    for (const auto& h : hits) {
        const double tau = map.delay_of(h.delay_bin);
        const double nu = map.doppler_of(h.doppler_bin);
        const CVector y = proj.snapshot(tau, nu);
        for (double theta : esprit_angles(y, cfg.max_sources, cfg.esprit_threshold)) {
            params.push_back({tau, nu, theta});
            stats.push_back(h.statistic);
        }
    }
    const LsGains ls = ls_gains(proj, params);

    const double lambda = cfg.ofdm.wavelength_m();
    std::vector<Detection> out;
    out.reserve(ls.kept.size());
    for (std::size_t j = 0; j < ls.kept.size(); ++j) {
        const auto& p = params[ls.kept[j]];
        Detection d;
        d.delay_s = p.delay_s;
        d.doppler_hz = p.doppler_hz;
        d.range_m = kSpeedOfLight * p.delay_s / 2.0;
        d.velocity_mps = p.doppler_hz * lambda / 2.0;
        d.angle_deg = p.angle_deg;
        d.gain = ls.gains[j];
        d.statistic = stats[ls.kept[j]];
        d.beam = estimates[0].beam;
        d.estimator = estimates[0].kind;
        out.push_back(d);
    }
    return out;
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

// The CFAR statistic leads because it is scale-free: per-beam LMMSE shrinkage
// rescales gains by a different factor in every beam but leaves it untouched.
bool stronger(const Detection& a, std::size_t ia, const Detection& b, std::size_t ib) {
    if (a.statistic != b.statistic) return a.statistic > b.statistic;
    const double ma = std::abs(a.gain), mb = std::abs(b.gain);
    if (ma != mb) return ma > mb;
    if (a.beam != b.beam) return a.beam < b.beam;
    if (a.estimator != b.estimator) return a.estimator < b.estimator;
    return ia < ib;
}

}  // namespace

std::vector<Cluster> dbscan_cluster(std::span<const Detection> detections, const ClusterConfig& cfg) {
    const std::size_t n = detections.size();
    DisjointSets sets(n);
    const double eps2 = cfg.eps * cfg.eps;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dr = (detections[i].range_m - detections[j].range_m) / cfg.range_res_m;
            const double dv = (detections[i].velocity_mps - detections[j].velocity_mps) / cfg.velocity_res_mps;
            const double da = (detections[i].angle_deg - detections[j].angle_deg) / cfg.angle_res_deg;
            if (dr * dr + dv * dv + da * da <= eps2) sets.unite(i, j);
        }
    }
    std::vector<Cluster> clusters;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = sets.find(i);
        if (slot[root] == n) {
            slot[root] = clusters.size();
            clusters.push_back({{}, i});
        }
        auto& c = clusters[slot[root]];
        c.members.push_back(i);
        if (stronger(detections[i], i, detections[c.representative], c.representative)) c.representative = i;
    }
    return clusters;
}

std::vector<Detection> cluster_representatives(std::span<const Detection> detections,
                                               const ClusterConfig& cfg) {
    std::vector<Detection> out;
    for (const auto& c : dbscan_cluster(detections, cfg)) out.push_back(detections[c.representative]);
    std::ranges::sort(out, [](const Detection& a, const Detection& b) {
        return std::tie(a.range_m, a.velocity_mps, a.angle_deg) <
               std::tie(b.range_m, b.velocity_mps, b.angle_deg);
    });
    return out;
}

namespace {

std::vector<Detection> bootstrapped_lmmse(const BeamObservation& obs, const PipelineConfig& cfg) {
    const auto rf = estimate_beam(obs, EstimatorKind::RF);
    const auto mf = estimate_beam(obs, EstimatorKind::MF);
    const auto lm0 = estimate_beam(obs, EstimatorKind::LMMSE, cfg.initial_snr);

    std::vector<Detection> merged;
    for (const auto* ests : {&rf, &mf, &lm0}) {
        auto d = beam_pipeline(*ests, obs.symbols, cfg);
        merged.insert(merged.end(), d.begin(), d.end());
    }
    const auto reps = cluster_representatives(merged, cfg.cluster);

    std::vector<PathParams> params;
    params.reserve(reps.size());
    for (const auto& d : reps) params.push_back({d.delay_s, d.doppler_hz, d.angle_deg});
    const LsGains ls = ls_gains(mf, obs.symbols, params, cfg.ofdm);
    const double snr = estimate_snr_b(ls.gains, obs.noise_var);

    // Without initial detections there is nothing to bootstrap from; the
    // prior-SNR pass already is the LMMSE answer.
    if (!(snr > 0.0)) return beam_pipeline(lm0, obs.symbols, cfg);
    const auto lm = estimate_beam(obs, EstimatorKind::LMMSE, snr);
    return beam_pipeline(lm, obs.symbols, cfg);
}

}  // namespace

std::vector<Detection> run_sensing(const RadarCube& cube, const Frame& frame, const BeamPlan& plan,
                                   const PipelineConfig& cfg, SensingMode mode,
                                   std::span<const double> ideal_snr) {
    if (mode == SensingMode::LMMSEIdeal && ideal_snr.size() < plan.count())
        throw ConfigError("ideal LMMSE needs one SNR per beam");
    std::vector<Detection> all;
    for (std::size_t b = 0; b < plan.count(); ++b) {
        if (plan.symbol_sets[b].empty()) continue;
        const BeamObservation obs = extract_beam(cube, frame, plan.symbol_sets[b], b);
        std::vector<Detection> det;
        switch (mode) {
            case SensingMode::RF:
                det = beam_pipeline(estimate_beam(obs, EstimatorKind::RF), obs.symbols, cfg);
                break;
            case SensingMode::MF:
                det = beam_pipeline(estimate_beam(obs, EstimatorKind::MF), obs.symbols, cfg);
                break;
            case SensingMode::LMMSEIdeal: {
                const double snr = ideal_snr[b] > 0.0 ? ideal_snr[b] : cfg.initial_snr;
                det = beam_pipeline(estimate_beam(obs, EstimatorKind::LMMSE, snr), obs.symbols, cfg);
                break;
            }
            case SensingMode::LMMSE:
                det = bootstrapped_lmmse(obs, cfg);
                break;
        }
        std::ranges::stable_sort(det, [](const Detection& a, const Detection& b) {
            return a.statistic > b.statistic;
        });
        all.insert(all.end(), det.begin(), det.end());
    }
    return cluster_representatives(all, cfg.cluster);
}

std::vector<Detection> full_sensing(const RadarCube& cube, const Frame& frame, const BeamPlan& plan,
                                    const PipelineConfig& cfg) {
    return run_sensing(cube, frame, plan, cfg, SensingMode::LMMSE);
}

std::vector<double> true_beam_snr(std::span<const Target> targets, std::span<const cdouble> gains,
                                  const BeamPlan& plan, const TxBeamMatrix& F, double noise_var) {
    std::vector<double> out(plan.count(), 0.0);
    for (std::size_t b = 0; b < plan.count(); ++b) {
        if (plan.symbol_sets[b].empty()) continue;
        const std::size_t m = plan.symbol_sets[b].front();
        CVector f(F.rows());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = F(i, m);
        double p = 0.0;
        for (std::size_t k = 0; k < targets.size(); ++k)
            p += std::norm(beam_target_gain(targets[k], gains[k], f));
        out[b] = p / noise_var;
    }
    return out;
}

}  // namespace isac
