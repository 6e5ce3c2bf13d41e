#include <algorithm>
#include <cmath>
#include <limits>

#include "isac/harness.hpp"
#include "isac/parallel.hpp"
#include "isac/rate.hpp"
#include "isac/units.hpp"

namespace isac {

namespace {

// Stream tags keep sensing and rate draws of the same grid point independent.
constexpr std::uint64_t kSensingStream = 0;
constexpr std::uint64_t kRateStream = 1;

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::string db_field(double linear) {
    if (!(linear > 0.0)) return "-inf";
    return format_number(units::linear_to_db(linear), 3);
}

std::string mode_column(SensingMode m) { return "pd_" + std::string(to_string(m)); }

void require_campaign(const Campaign& c, const std::vector<double>& grid) {
    if (c.trials < 1) throw ConfigError("campaign needs at least one trial");
    if (grid.empty()) throw ConfigError("campaign sweep grid is empty");
    require_valid(c.scenario);
}

// Data/pilot layout of the scenario's strategy; symbol values are unused.
Frame label_frame(const Scenario& s) {
    Frame f;
    f.symbols = CMatrix(s.ofdm.subcarriers, s.ofdm.symbols);
    f.column_labels.assign(s.ofdm.symbols, SymbolLabel::Data);
    if (const auto* ts = std::get_if<TimeSharing>(&s.strategy))
        for (auto m : ts->sensing_symbols) f.column_labels[m] = SymbolLabel::Pilot;
    return f;
}

int as_order(double v) {
    const int order = static_cast<int>(std::lround(v));
    if (!is_supported_order(order) || std::abs(v - order) > 1e-9)
        throw ConfigError("grid value " + format_number(v, 3) + " is not a supported modulation order");
    return order;
}

}  // namespace

std::vector<double> default_grid(CampaignKind kind) {
    switch (kind) {
        case CampaignKind::RangeProfile: return {4, 1024};
        case CampaignKind::PdVsRcs: return linspace(-30.0, 10.0, 9);
        case CampaignKind::PdVsModOrder:
        case CampaignKind::Rate: return {4, 16, 64, 256, 1024};
        case CampaignKind::TradeoffRho:
        case CampaignKind::TradeoffTimeShare:
        case CampaignKind::ConcurrentVsTimeShare: return linspace(0.0, 1.0, 11);
    }
    return {};
}

PdPoint estimate_pd(const Scenario& s, std::span<const SensingMode> modes, std::size_t trials,
                    std::uint64_t seed, std::size_t threads) {
    require_valid(s);
    const Constellation constel = make_constellation(s.modulation_order);
    const BeamPlan plan = make_beam_plan(s.ofdm, s.beams, s.strategy);
    const TxBeamMatrix F = build_beam_matrix(s.ofdm, plan, s.comm_beam_angle_deg(), s.strategy);
    const PipelineConfig cfg = make_pipeline_config(s);
    const ScoringGates gates = scoring_gates(s);
    const std::size_t K = modes.size();

    std::vector<std::uint8_t> hits(trials * K, 0);
    std::vector<std::size_t> false_alarms(trials * K, 0);
    std::vector<double> snr_mean(trials, 0.0);

    parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng(derive_seed(seed, {t}));
        const Frame frame = generate_frame(s.ofdm, s.strategy, constel, rng);
        const CVector gains = draw_target_gains(s.targets, s.ofdm, rng);
        const RadarCube cube = synthesize_radar_cube(s.targets, gains, frame, F, s.ofdm, rng);
        const auto snr = true_beam_snr(s.targets, gains, plan, F, cube.noise_var);
        double acc = 0.0;
        for (double v : snr) acc += v;
        snr_mean[t] = snr.empty() ? 0.0 : acc / static_cast<double>(snr.size());
        for (std::size_t k = 0; k < K; ++k) {
            const auto det = run_sensing(cube, frame, plan, cfg, modes[k], snr);
            const auto hit = score_detections(det, s.targets, gates);
            const auto matched = static_cast<std::size_t>(std::ranges::count(hit, true));
            hits[t * K + k] = !s.targets.empty() && hit[s.probe_target];
            false_alarms[t * K + k] = det.size() - matched;
        }
    });

    PdPoint out;
    out.pd.assign(K, 0.0);
    out.false_alarms.assign(K, 0.0);
    double snr_acc = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        snr_acc += snr_mean[t];
        for (std::size_t k = 0; k < K; ++k) {
            out.pd[k] += hits[t * K + k];
            out.false_alarms[k] += static_cast<double>(false_alarms[t * K + k]);
        }
    }
    for (std::size_t k = 0; k < K; ++k) {
        out.pd[k] /= static_cast<double>(trials);
        out.false_alarms[k] /= static_cast<double>(trials);
    }
    const double snr = snr_acc / static_cast<double>(trials);
    out.snr_mean_db = snr > 0.0 ? units::linear_to_db(snr) : -std::numeric_limits<double>::infinity();
    return out;
}

double scenario_rate(const Scenario& s, std::size_t mi_samples, std::uint64_t seed,
                     std::size_t threads) {
    require_valid(s);
    const Constellation constel = make_constellation(s.modulation_order);
    const BeamPlan plan = make_beam_plan(s.ofdm, s.beams, s.strategy);
    const TxBeamMatrix F = build_beam_matrix(s.ofdm, plan, s.comm_beam_angle_deg(), s.strategy);
    const CMatrix h = effective_comm_channel(s.comm_paths, F, s.ofdm);
    const Frame labels = label_frame(s);
    return frame_rate(h, labels, constel, s.comm_noise_variance(), mi_samples, s.ofdm, seed, threads)
        .rate_bps;
}

CsvTable run_pd_vs_rcs(const Campaign& c) {
    const auto grid = c.grid.empty() ? default_grid(CampaignKind::PdVsRcs) : c.grid;
    require_campaign(c, grid);
    if (c.scenario.targets.empty()) throw ConfigError("pd-vs-rcs needs a probe target");
    const std::string hash = scenario_hash(c.scenario);
    CsvTable t{{"rcs_dbsm", "estimator", "pd", "false_alarms_per_trial", "snr_mean_db", "trials",
                "scenario_hash", "seed"}};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        Scenario s = c.scenario;
        s.targets[s.probe_target].rcs_m2 = units::dbsm_to_m2(grid[g]);
        const PdPoint p = estimate_pd(s, c.modes, c.trials, derive_seed(c.seed, {kSensingStream, g}), c.threads);
        for (std::size_t k = 0; k < c.modes.size(); ++k)
            t.rows.push_back({format_number(grid[g], 3), std::string(to_string(c.modes[k])),
                              format_number(p.pd[k], 4), format_number(p.false_alarms[k], 4),
                              format_number(p.snr_mean_db, 3), std::to_string(c.trials), hash,
                              std::to_string(c.seed)});
    }
    return t;
}

CsvTable run_pd_vs_mod(const Campaign& c) {
    const auto grid = c.grid.empty() ? default_grid(CampaignKind::PdVsModOrder) : c.grid;
    require_campaign(c, grid);
    const std::string hash = scenario_hash(c.scenario);
    CsvTable t{{"modulation_order", "estimator", "pd", "false_alarms_per_trial", "rate_bps",
                "snr_mean_db", "trials", "scenario_hash", "seed"}};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        Scenario s = c.scenario;
        s.modulation_order = as_order(grid[g]);
        const PdPoint p = estimate_pd(s, c.modes, c.trials, derive_seed(c.seed, {kSensingStream, g}), c.threads);
        const double rate = scenario_rate(s, c.mi_samples, derive_seed(c.seed, {kRateStream, g}), c.threads);
        for (std::size_t k = 0; k < c.modes.size(); ++k)
            t.rows.push_back({std::to_string(s.modulation_order), std::string(to_string(c.modes[k])),
                              format_number(p.pd[k], 4), format_number(p.false_alarms[k], 4),
                              format_number(rate, 1), format_number(p.snr_mean_db, 3),
                              std::to_string(c.trials), hash, std::to_string(c.seed)});
    }
    return t;
}

namespace {

void tradeoff_rows(const Campaign& c, const std::vector<double>& grid, bool time_sharing,
                   const std::string& hash, CsvTable& t) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
        Scenario s = c.scenario;
        if (time_sharing) {
            if (!(grid[g] >= 0.0 && grid[g] <= 1.0)) throw ConfigError("time-sharing ratio out of [0,1]");
            s.strategy = make_time_sharing(s.ofdm.symbols, s.beams.count, grid[g]);
        } else {
            s.strategy = Concurrent{grid[g]};
        }
        const PdPoint p = estimate_pd(s, c.modes, c.trials, derive_seed(c.seed, {kSensingStream, g}), c.threads);
        const double rate = scenario_rate(s, c.mi_samples, derive_seed(c.seed, {kRateStream, g}), c.threads);
        std::vector<std::string> row{time_sharing ? "time_sharing" : "concurrent",
                                     format_number(grid[g], 4), format_number(rate, 1)};
        for (std::size_t k = 0; k < c.modes.size(); ++k) row.push_back(format_number(p.pd[k], 4));
        for (std::size_t k = 0; k < c.modes.size(); ++k) row.push_back(format_number(p.false_alarms[k], 4));
        row.push_back(format_number(p.snr_mean_db, 3));
        row.push_back(std::to_string(c.trials));
        row.push_back(hash);
        row.push_back(std::to_string(c.seed));
        t.rows.push_back(std::move(row));
    }
}

}  // namespace

CsvTable run_tradeoff(const Campaign& c) {
    auto grid = c.grid.empty() ? default_grid(c.kind) : c.grid;
    std::ranges::sort(grid);
    require_campaign(c, grid);
    const std::string hash = scenario_hash(c.scenario);
    CsvTable t;
    t.header = {"strategy", "control", "rate_bps"};
    for (auto m : c.modes) t.header.push_back(mode_column(m));
    for (auto m : c.modes) t.header.push_back("fa_" + std::string(to_string(m)));
    for (const char* h : {"snr_mean_db", "trials", "scenario_hash", "seed"}) t.header.push_back(h);

    switch (c.kind) {
        case CampaignKind::TradeoffRho: tradeoff_rows(c, grid, false, hash, t); break;
        case CampaignKind::TradeoffTimeShare: tradeoff_rows(c, grid, true, hash, t); break;
        case CampaignKind::ConcurrentVsTimeShare:
            tradeoff_rows(c, grid, false, hash, t);
            tradeoff_rows(c, grid, true, hash, t);
            break;
        default: throw ConfigError("not a trade-off campaign");
    }
    return t;
}

CsvTable run_rate(const Campaign& c) {
    const auto grid = c.grid.empty() ? default_grid(CampaignKind::Rate) : c.grid;
    require_campaign(c, grid);
    const std::string hash = scenario_hash(c.scenario);
    CsvTable t{{"modulation_order", "rate_bps", "frame_mi_bits", "mean_cell_mi_bits",
                "comm_snr_mean_db", "mi_samples", "scenario_hash", "seed"}};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        Scenario s = c.scenario;
        s.modulation_order = as_order(grid[g]);
        const Constellation constel = make_constellation(s.modulation_order);
        const BeamPlan plan = make_beam_plan(s.ofdm, s.beams, s.strategy);
        const TxBeamMatrix F = build_beam_matrix(s.ofdm, plan, s.comm_beam_angle_deg(), s.strategy);
        const CMatrix h = effective_comm_channel(s.comm_paths, F, s.ofdm);
        const Frame labels = label_frame(s);
        const double nv = s.comm_noise_variance();
        const MiResult r = frame_rate(h, labels, constel, nv, c.mi_samples,
                                      s.ofdm, derive_seed(c.seed, {kRateStream, g}), c.threads);
        double snr = 0.0;
        for (auto v : h.flat()) snr += std::norm(v);
        snr /= static_cast<double>(h.size()) * nv;
        const std::size_t data = labels.data_columns() * s.ofdm.subcarriers;
        t.rows.push_back({std::to_string(s.modulation_order), format_number(r.rate_bps, 1),
                          format_number(r.frame_mi_bits, 3),
                          format_number(data ? r.frame_mi_bits / static_cast<double>(data) : 0.0, 6),
                          db_field(snr), std::to_string(c.mi_samples), hash, std::to_string(c.seed)});
    }
    return t;
}

CsvTable run_range_profile(const Campaign& c) {
    const auto grid = c.grid.empty() ? default_grid(CampaignKind::RangeProfile) : c.grid;
    require_campaign(c, grid);
    const Scenario& base = c.scenario;
    const std::string hash = scenario_hash(base);
    const double angle = base.targets.empty() ? 0.0 : base.targets[base.probe_target].angle_deg;

    // One sensing beam toward the probe target, held for the whole frame.
    BeamPlan plan;
    plan.angles_deg = {angle};
    plan.symbol_sets.resize(1);
    for (std::size_t m = 0; m < base.ofdm.symbols; ++m) plan.symbol_sets[0].push_back(m);
    plan.beams = {transmit_beam(base.ofdm, angle)};
    const Strategy pure_sensing = Concurrent{1.0};
    const TxBeamMatrix F = build_beam_matrix(base.ofdm, plan, angle, pure_sensing);
    const PipelineConfig cfg = make_pipeline_config(base);

    const EstimatorKind kinds[] = {EstimatorKind::RF, EstimatorKind::MF, EstimatorKind::LMMSE};
    CsvTable t{{"modulation_order", "estimator", "range_m", "magnitude_db", "trials", "scenario_hash", "seed"}};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const Constellation constel = make_constellation(as_order(grid[g]));
        const std::uint64_t point_seed = derive_seed(c.seed, {kSensingStream, g});
        // Trials run in fixed-size batches and are summed in trial order, so
        // the average does not depend on the worker count.
        const std::size_t batch = 8;
        std::vector<RMatrix> avg_maps(3);
        std::vector<RMatrix> slots(batch * 3);
        for (std::size_t start = 0; start < c.trials; start += batch) {
            const std::size_t count = std::min(batch, c.trials - start);
            parallel_for(count, c.threads, [&](std::size_t j) {
                const std::size_t tr = start + j;
                Rng rng(derive_seed(point_seed, {tr}));
                const Frame frame = generate_frame(base.ofdm, pure_sensing, constel, rng);
                const CVector gains = draw_target_gains(base.targets, base.ofdm, rng);
                const RadarCube cube = synthesize_radar_cube(base.targets, gains, frame, F, base.ofdm, rng);
                const double snr = true_beam_snr(base.targets, gains, plan, F, cube.noise_var)[0];
                const BeamObservation obs = extract_beam(cube, frame, plan.symbol_sets[0], 0);
                for (std::size_t k = 0; k < 3; ++k) {
                    const auto est = estimate_beam(obs, kinds[k], snr > 0.0 ? snr : 1.0);
                    slots[j * 3 + k] = integrated_map(est, cfg.pad, base.ofdm).power;
                }
            });
            for (std::size_t j = 0; j < count; ++j) {
                for (std::size_t k = 0; k < 3; ++k) {
                    auto& dst = avg_maps[k];
                    const auto& src = slots[j * 3 + k];
                    if (dst.empty()) {
                        dst = src;
                        continue;
                    }
                    auto d = dst.flat();
                    auto sv = src.flat();
                    for (std::size_t i = 0; i < d.size(); ++i) d[i] += sv[i];
                }
            }
        }
        const double delay_bin = 1.0 / (static_cast<double>(base.ofdm.subcarriers * cfg.pad) *
                                        base.ofdm.subcarrier_spacing_hz);
        for (std::size_t k = 0; k < 3; ++k) {
            const RMatrix& avg = avg_maps[k];
            std::size_t peak = 0;
            auto flat = avg.flat();
            for (std::size_t i = 1; i < flat.size(); ++i)
                if (flat[i] > flat[peak]) peak = i;
            const std::size_t q = peak % avg.cols();
            const double ref = flat[peak];
            for (std::size_t p = 0; p < avg.rows(); ++p) {
                const double v = avg(p, q);
                const double rng_m = kSpeedOfLight * static_cast<double>(p) * delay_bin / 2.0;
                t.rows.push_back({std::to_string(constel.order()), std::string(to_string(kinds[k])),
                                  format_number(rng_m, 4), ref > 0.0 ? db_field(v / ref) : "-inf",
                                  std::to_string(c.trials), hash, std::to_string(c.seed)});
            }
        }
    }
    return t;
}

CsvTable run_campaign(const Campaign& c) {
    switch (c.kind) {
        case CampaignKind::RangeProfile: return run_range_profile(c);
        case CampaignKind::PdVsRcs: return run_pd_vs_rcs(c);
        case CampaignKind::PdVsModOrder: return run_pd_vs_mod(c);
        case CampaignKind::TradeoffRho:
        case CampaignKind::TradeoffTimeShare:
        case CampaignKind::ConcurrentVsTimeShare: return run_tradeoff(c);
        case CampaignKind::Rate: return run_rate(c);
    }
    throw ConfigError("unknown campaign kind");
}

}  // namespace isac
