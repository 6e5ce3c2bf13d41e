#include <algorithm>
#include <set>

#include "doctest.h"
#include "isac/detector.hpp"
#include "isac/harness.hpp"
#include "oracles.hpp"

using namespace isac;

namespace {

struct Path {
    double delay_s, doppler_hz, angle_deg;
    cdouble gain;
};

// Per-antenna channel estimates of point scatterers, built directly from the model.
std::vector<ChannelEstimate> model_estimates(const OfdmConfig& cfg, std::span<const std::size_t> sym,
                                             std::span<const Path> paths) {
    std::vector<ChannelEstimate> out;
    const double df = cfg.subcarrier_spacing_hz, ts = cfg.symbol_duration_s();
    for (std::size_t i = 0; i < cfg.rx_antennas; ++i) {
        CMatrix h(cfg.subcarriers, sym.size());
        for (const auto& p : paths) {
            const cdouble a = p.gain * std::polar(1.0, oracle::kPi * i * std::sin(p.angle_deg * oracle::kPi / 180.0));
            for (std::size_t n = 0; n < cfg.subcarriers; ++n)
                for (std::size_t j = 0; j < sym.size(); ++j)
                    h(n, j) += a * std::polar(1.0, -2.0 * oracle::kPi * n * df * p.delay_s +
                                                       2.0 * oracle::kPi * sym[j] * ts * p.doppler_hz);
        }
        out.push_back({std::move(h), EstimatorKind::MF, 0.0, i, 0});
    }
    return out;
}

void add_noise(std::vector<ChannelEstimate>& est, double var, Rng& rng) {
    ComplexGaussian z(var);
    for (auto& e : est)
        for (auto& v : e.h.flat()) v += z(rng);
}

OfdmConfig grid_config(std::size_t n = 64, std::size_t nr = 8) {
    OfdmConfig cfg;
    cfg.subcarriers = n;
    cfg.rx_antennas = nr;
    return cfg;
}

std::vector<std::size_t> iota(std::size_t n, std::size_t start = 0) {
    std::vector<std::size_t> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = start + k;
    return v;
}

// Exact CA-CFAR false-alarm probability: X ~ Gamma(L), training sum ~ Gamma(K L),
// test X > (alpha / K) T.
double ca_pfa(double alpha, std::size_t k, std::size_t l) {
    const double c = alpha / static_cast<double>(k), kl = static_cast<double>(k * l);
    double p = 0.0;
    for (std::size_t j = 0; j < l; ++j)
        p += std::exp(j * std::log(c) - std::lgamma(j + 1.0) + std::lgamma(kl + j) - std::lgamma(kl) -
                      (kl + j) * std::log1p(c));
    return p;
}

Detection det(double r, double v, double a, double g = 1.0) {
    Detection d;
    d.range_m = r;
    d.velocity_mps = v;
    d.angle_deg = a;
    d.gain = g;
    return d;
}

}  // namespace

TEST_CASE("on-grid delay-Doppler ramp lands in a single bin") {
    const OfdmConfig cfg = grid_config(64, 1);
    const auto sym = iota(16);
    const std::size_t p = 9, q = 5;
    const double tau = p / (64.0 * cfg.subcarrier_spacing_hz), nu = q / (16.0 * cfg.symbol_duration_s());
    const std::vector<Path> path{{tau, nu, 0.0, 1.0}};
    const auto est = model_estimates(cfg, sym, path);
    const CMatrix dd = delay_doppler_map_per_antenna(est[0].h, 1);
    REQUIRE(dd.rows() == 64);
    REQUIRE(dd.cols() == 16);
    for (std::size_t r = 0; r < 64; ++r)
        for (std::size_t c = 0; c < 16; ++c) {
            if (r == p && c == q) CHECK(std::abs(dd(r, c)) == doctest::Approx(std::sqrt(64.0 * 16.0)));
            else CHECK(std::abs(dd(r, c)) < 1e-10);
        }
}

TEST_CASE("delay-Doppler transform preserves energy") {
    Rng rng(1);
    for (std::size_t pad : {1u, 2u, 4u}) {
        CMatrix h(40, 12);
        ComplexGaussian g(1.0);
        for (auto& v : h.flat()) v = g(rng);
        const CMatrix dd = delay_doppler_map_per_antenna(h, pad);
        CHECK(dd.rows() == 40 * pad);
        CHECK(dd.cols() == 12 * pad);
        double e0 = 0.0, e1 = 0.0;
        for (auto v : h.flat()) e0 += std::norm(v);
        for (auto v : dd.flat()) e1 += std::norm(v);
        CHECK(std::abs(e1 - e0) < 1e-10 * e0);
    }
    CHECK_THROWS_AS(delay_doppler_map_per_antenna(CMatrix(4, 4), 0), ConfigError);
}

TEST_CASE("off-grid delay follows the Dirichlet kernel") {
    const OfdmConfig cfg = grid_config(64, 1);
    const auto sym = iota(8);
    const double tau = 20.5 / (64.0 * cfg.subcarrier_spacing_hz);
    const std::vector<Path> path{{tau, 0.0, 0.0, 1.0}};
    const auto est = model_estimates(cfg, sym, path);
    const CMatrix dd = delay_doppler_map_per_antenna(est[0].h, 1);
    CHECK(std::abs(dd(20, 0)) == doctest::Approx(std::abs(dd(21, 0))).epsilon(1e-10));
    for (std::size_t r : {16u, 19u, 20u, 21u, 22u, 30u}) {
        const double want = oracle::dirichlet((static_cast<double>(r) - 20.5) / 64.0, 64) * std::sqrt(8.0) / 8.0;
        CHECK(std::abs(dd(r, 0)) == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("noncoherent integration") {
    CMatrix a(3, 2), b(3, 2);
    for (std::size_t k = 0; k < 6; ++k) {
        a.flat()[k] = cdouble(k, -1.0);
        b.flat()[k] = cdouble(0.5, k * 0.25);
    }
    const std::vector<CMatrix> one{a}, same{a, a, a}, two{a, b};
    const RMatrix r1 = noncoherent_integrate(one), r3 = noncoherent_integrate(same),
                  r2 = noncoherent_integrate(two);
    for (std::size_t k = 0; k < 6; ++k) {
        CHECK(r1.flat()[k] == std::norm(a.flat()[k]));
        CHECK(r3.flat()[k] == doctest::Approx(3.0 * std::norm(a.flat()[k])));
        CHECK(r2.flat()[k] >= 0.0);
        CHECK(r2.flat()[k] == doctest::Approx(std::norm(a.flat()[k]) + std::norm(b.flat()[k])));
    }
    const std::vector<CMatrix> bad{a, CMatrix(2, 3)};
    CHECK_THROWS_AS(noncoherent_integrate(bad), ConfigError);
}

TEST_CASE("integrated map of a noise-free on-grid target peaks at the true bin") {
    const OfdmConfig cfg = grid_config(64, 8);
    const auto sym = iota(32);
    const double tau = 11.0 / (64.0 * cfg.subcarrier_spacing_hz), nu = -3.0 / (32.0 * cfg.symbol_duration_s());
    const std::vector<Path> path{{tau, nu, 17.0, cdouble(0.2, 0.1)}};
    const auto est = model_estimates(cfg, sym, path);
    const DelayDopplerMap map = integrated_map(est, 1, cfg);
    std::size_t best = 0, ties = 0;
    const auto f = map.power.flat();
    for (std::size_t k = 1; k < f.size(); ++k)
        if (f[k] > f[best]) best = k;
    for (auto v : f) ties += v >= f[best] * (1.0 - 1e-9);
    CHECK(ties == 1);
    CHECK(best / 32 == 11);
    CHECK(best % 32 == 29);
    CHECK(map.delay_of(11) == doctest::Approx(tau));
    CHECK(map.doppler_of(29) == doctest::Approx(nu));
    CHECK(map.delay_bin_s == doctest::Approx(1.0 / (64.0 * cfg.subcarrier_spacing_hz)));
    CHECK(map.doppler_bin_hz == doctest::Approx(1.0 / (32.0 * cfg.symbol_duration_s())));
}

TEST_CASE("CFAR threshold inverts the exact false-alarm probability") {
    for (std::size_t l : {1u, 2u, 8u}) {
        for (double pfa : {1e-2, 1e-3, 1e-4, 1e-6}) {
            CfarConfig c;
            c.pfa = pfa;
            const double alpha = cfar_threshold(c, l);
            const std::size_t k = cfar_training_cells(c);
            CHECK(cfar_false_alarm(alpha, k, l) == doctest::Approx(pfa).epsilon(1e-8));
            CHECK(ca_pfa(alpha, k, l) == doctest::Approx(pfa).epsilon(1e-8));
        }
    }
    CfarConfig c;
    CHECK(cfar_training_cells(c) == (2 * 10 + 1) * (2 * 6 + 1) - (2 * 2 + 1) * (2 * 2 + 1));
    // single-look closed form (1 + alpha/K)^-K
    const double a = 7.5;
    CHECK(cfar_false_alarm(a, 100, 1) == doctest::Approx(std::pow(1.0 + a / 100.0, -100.0)).epsilon(1e-12));
}

TEST_CASE("CFAR on pure integrated noise meets the design false-alarm rate") {
    const std::size_t integrated = 8, rows = 512, cols = 400;
    Rng rng(42);
    std::gamma_distribution<double> gamma(static_cast<double>(integrated), 1.0);
    RMatrix map(rows, cols);
    for (auto& v : map.flat()) v = gamma(rng);
    CfarConfig c;
    c.pfa = 1e-3;
    const auto hits = cfar_detect(map, c, integrated);
    const auto band = oracle::binomial_band(static_cast<double>(rows * cols), c.pfa);
    CHECK(static_cast<double>(hits.size()) >= band.lo);
    CHECK(static_cast<double>(hits.size()) <= band.hi);
    // the statistic is scale invariant
    RMatrix scaled = map;
    for (auto& v : scaled.flat()) v *= 123.0;
    const auto hits2 = cfar_detect(scaled, c, integrated);
    REQUIRE(hits2.size() == hits.size());
    for (std::size_t k = 0; k < hits.size(); ++k) {
        CHECK(hits2[k].delay_bin == hits[k].delay_bin);
        CHECK(hits2[k].doppler_bin == hits[k].doppler_bin);
    }
}

TEST_CASE("CFAR detects a strong target at its bin and nothing on an empty map") {
    Rng rng(3);
    std::gamma_distribution<double> gamma(4.0, 1.0);
    RMatrix map(64, 32);
    for (auto& v : map.flat()) v = gamma(rng);
    map(40, 7) = 4.0 * 1e4;  // 40 dB above the mean floor
    CfarConfig c;
    const auto hits = cfar_detect(map, c, 4);
    bool found = false;
    for (const auto& h : hits)
        if (h.delay_bin == 40 && h.doppler_bin == 7) {
            found = true;
            CHECK(h.statistic > cfar_threshold(c, 4));
        }
    CHECK(found);
    CHECK(cfar_detect(RMatrix(64, 32, 0.0), c, 4).empty());
    CHECK_THROWS_AS(cfar_detect(RMatrix(16, 8, 1.0), c, 4), ConfigError);
}

TEST_CASE("local maxima filter keeps only neighborhood peaks") {
    RMatrix map(8, 8, 1.0);
    map(3, 3) = 10.0;
    map(3, 4) = 9.0;
    map(0, 0) = 5.0;
    map(7, 7) = 6.0;  // wraps onto (0, 0)
    const std::vector<CfarHit> hits{{3, 3, 10.0}, {3, 4, 9.0}, {0, 0, 5.0}, {7, 7, 6.0}};
    const auto kept = local_maxima(map, hits);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].delay_bin == 3);
    CHECK(kept[0].doppler_bin == 3);
    CHECK(kept[1].delay_bin == 7);
}

TEST_CASE("spatial snapshot of on-grid targets") {
    const OfdmConfig cfg = grid_config(32, 8);
    const auto sym = iota(16, 5);
    const double tau = 4.0 / (32.0 * cfg.subcarrier_spacing_hz), nu = 2.0 / (16.0 * cfg.symbol_duration_s());
    const cdouble a1(0.7, -0.2), a2(-0.1, 0.4);
    const auto ar = [](double deg, std::size_t i) {
        return std::polar(1.0, oracle::kPi * i * std::sin(deg * oracle::kPi / 180.0));
    };

    const std::vector<Path> one{{tau, nu, -23.0, a1}};
    const CVector y1 = spatial_snapshot(model_estimates(cfg, sym, one), sym, tau, nu, cfg);
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(y1[i] - a1 * ar(-23.0, i)) < 1e-12);

    const std::vector<Path> two{{tau, nu, -23.0, a1}, {tau, nu, 31.0, a2}};
    const CVector y2 = spatial_snapshot(model_estimates(cfg, sym, two), sym, tau, nu, cfg);
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(y2[i] - a1 * ar(-23.0, i) - a2 * ar(31.0, i)) < 1e-12);

    const CVector y0 = spatial_snapshot(model_estimates(cfg, sym, {}), sym, tau, nu, cfg);
    for (auto v : y0) CHECK(v == cdouble(0.0, 0.0));
}

TEST_CASE("ESPRIT recovers noise-free angles") {
    const auto snapshot = [](std::initializer_list<std::pair<double, cdouble>> src) {
        CVector y(8);
        for (auto [deg, g] : src)
            for (std::size_t i = 0; i < 8; ++i)
                y[i] += g * std::polar(1.0, oracle::kPi * i * std::sin(deg * oracle::kPi / 180.0));
        return y;
    };
    const auto a = esprit_angles(snapshot({{12.5, {1.0, 0.3}}}), 4);
    REQUIRE(a.size() == 1);
    CHECK(a[0] == doctest::Approx(12.5).epsilon(1e-9));

    auto b = esprit_angles(snapshot({{-40.0, {1.0, 0.0}}, {25.0, {0.0, 0.8}}}), 4);
    REQUIRE(b.size() == 2);
    std::ranges::sort(b);
    CHECK(b[0] == doctest::Approx(-40.0).epsilon(1e-8));
    CHECK(b[1] == doctest::Approx(25.0).epsilon(1e-8));

    CHECK(esprit_angles(CVector(8), 4).empty());
    CHECK(esprit_angles(snapshot({{10.0, 1.0}, {30.0, 1.0}, {-50.0, 1.0}}), 1).size() == 1);
    CHECK_THROWS_AS(esprit_angles(CVector(2, 1.0), 1), ConfigError);
}

TEST_CASE("least-squares gains recover noise-free path gains and drop duplicates") {
    const OfdmConfig cfg = grid_config(48, 8);
    const auto sym = iota(24, 3);
    const std::vector<Path> paths{{1.1e-7, 900.0, -12.0, {0.4, 0.3}}, {2.3e-7, -1500.0, 35.0, {-0.2, 0.05}},
                                  {1.1e-7, 900.0, 20.0, {0.0, -0.6}}};
    const auto est = model_estimates(cfg, sym, paths);
    std::vector<PathParams> params;
    for (const auto& p : paths) params.push_back({p.delay_s, p.doppler_hz, p.angle_deg});
    params.push_back(params[1]);
    const LsGains g = ls_gains(est, sym, params, cfg);
    REQUIRE(g.kept.size() == 3);
    CHECK(g.duplicates == std::vector<std::size_t>{3});
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(g.kept[k] == k);
        CHECK(std::abs(g.gains[k] - paths[k].gain) < 1e-10);
    }
    BeamProjector proj(est, sym, cfg);
    const LsGains g2 = ls_gains(proj, params);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(g2.gains[k] - g.gains[k]) < 1e-12);
}

TEST_CASE("range resolution and clustering eps") {
    OfdmConfig cfg;
    cfg.subcarrier_spacing_hz = 100e3;
    cfg.subcarriers = 4000;
    CHECK(cfg.range_resolution_m() == doctest::Approx(0.3747).epsilon(1e-4));
    Scenario s = desk_scenario();
    s.ofdm = cfg;
    const PipelineConfig p = make_pipeline_config(s);
    CHECK(p.cluster.range_res_m == doctest::Approx(0.3747).epsilon(1e-4));
    CHECK(p.cluster.angle_res_deg == 2.0);
    CHECK(p.cluster.eps == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("DBSCAN merges within eps and isolates distant points") {
    const ClusterConfig c{0.5, 2.0, 2.0, std::sqrt(3.0)};
    const std::vector<Detection> near{det(10.0, 1.0, 5.0), det(10.25, 2.0, 6.0)};  // distance 0.5 eps
    CHECK(dbscan_cluster(near, c).size() == 1);
    const std::vector<Detection> far{det(10.0, 1.0, 5.0), det(30.0, 1.0, 5.0)};
    const auto cl = dbscan_cluster(far, c);
    REQUIRE(cl.size() == 2);
    CHECK(cl[0].members == std::vector<std::size_t>{0});
    CHECK(cl[1].members == std::vector<std::size_t>{1});
    // chains connect transitively
    const std::vector<Detection> chain{det(0.0, 0, 0), det(0.6, 0, 0), det(1.2, 0, 0), det(1.8, 0, 0)};
    CHECK(dbscan_cluster(chain, c).size() == 1);
}

TEST_CASE("duplicates from the three estimators collapse to the strongest") {
    const ClusterConfig c{0.6, 1.2, 2.0, std::sqrt(3.0)};
    std::vector<Detection> d{det(40.0, 3.0, 10.0, 0.5), det(40.3, 3.4, 10.8, 0.9), det(39.8, 2.7, 9.5, 0.7)};
    d[0].estimator = EstimatorKind::RF;
    d[1].estimator = EstimatorKind::MF;
    d[2].estimator = EstimatorKind::LMMSE;
    const auto cl = dbscan_cluster(d, c);
    REQUIRE(cl.size() == 1);
    CHECK(cl[0].representative == 1);
    const auto reps = cluster_representatives(d, c);
    REQUIRE(reps.size() == 1);
    CHECK(reps[0].range_m == 40.3);
}

TEST_CASE("the CFAR statistic outranks the gain when choosing a representative") {
    const ClusterConfig c{0.6, 1.2, 2.0, std::sqrt(3.0)};
    std::vector<Detection> d{det(40.0, 3.0, 10.0, 5.0), det(40.3, 3.4, 10.8, 0.2)};
    d[0].statistic = 20.0;
    d[1].statistic = 30.0;
    CHECK(dbscan_cluster(d, c)[0].representative == 1);
    // rescaling one member's gain, as per-beam shrinkage does, changes nothing
    d[1].gain *= 1e-3;
    CHECK(dbscan_cluster(d, c)[0].representative == 1);
    d[1].statistic = 20.0;
    CHECK(dbscan_cluster(d, c)[0].representative == 0);
}

TEST_CASE("DBSCAN output is a permutation-invariant partition") {
    Rng rng(77);
    std::uniform_real_distribution<double> r(0.0, 20.0), v(-5.0, 5.0), a(-60.0, 60.0);
    std::vector<Detection> d;
    for (int k = 0; k < 120; ++k) d.push_back(det(r(rng), v(rng), a(rng), 1.0 + k));
    const ClusterConfig c{0.8, 1.0, 2.0, std::sqrt(3.0)};

    const auto signature = [&](const std::vector<Detection>& dd) {
        std::set<std::set<std::tuple<double, double, double>>> out;
        std::vector<int> seen(dd.size(), 0);
        for (const auto& cl : dbscan_cluster(dd, c)) {
            std::set<std::tuple<double, double, double>> s;
            for (auto m : cl.members) {
                ++seen[m];
                s.insert({dd[m].range_m, dd[m].velocity_mps, dd[m].angle_deg});
            }
            out.insert(s);
        }
        for (int s : seen) CHECK(s == 1);
        return out;
    };
    const auto base = signature(d);
    for (int rep = 0; rep < 5; ++rep) {
        std::shuffle(d.begin(), d.end(), rng);
        CHECK(signature(d) == base);
    }
    CHECK(cluster_representatives(d, c).size() <= d.size());
}

TEST_CASE("decision chain is invariant to a common positive scale") {
    OfdmConfig cfg = grid_config(64, 8);
    const auto sym = iota(32);
    const double dtau = 1.0 / (64.0 * cfg.subcarrier_spacing_hz), dnu = 1.0 / (32.0 * cfg.symbol_duration_s());
    const std::vector<Path> paths{{12 * dtau, 3 * dnu, 14.0, {0.05, 0.02}}, {30.4 * dtau, -5.3 * dnu, -33.0, {0.0, 0.03}}};
    auto est = model_estimates(cfg, sym, paths);
    Rng rng(12);
    add_noise(est, 1e-3, rng);
    auto scaled = est;
    const double c = 37.5;
    for (auto& e : scaled)
        for (auto& v : e.h.flat()) v *= c;
    PipelineConfig pc;
    pc.ofdm = cfg;
    const auto a = beam_pipeline(est, sym, pc), b = beam_pipeline(scaled, sym, pc);
    REQUIRE(!a.empty());
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].delay_s == b[k].delay_s);
        CHECK(a[k].doppler_hz == b[k].doppler_hz);
        CHECK(a[k].angle_deg == doctest::Approx(b[k].angle_deg).epsilon(1e-9));
        CHECK(std::abs(b[k].gain - c * a[k].gain) < 1e-9 * std::abs(c * a[k].gain));
    }
}

TEST_CASE("beam pipeline finds a noise-free on-grid target exactly once") {
    OfdmConfig cfg = grid_config(64, 8);
    const auto sym = iota(32);
    const double tau = 20.0 / (64.0 * cfg.subcarrier_spacing_hz), nu = 6.0 / (32.0 * cfg.symbol_duration_s());
    const std::vector<Path> path{{tau, nu, -8.0, {0.3, -0.3}}};
    auto est = model_estimates(cfg, sym, path);
    Rng rng(2);
    add_noise(est, 1e-6, rng);
    PipelineConfig pc;
    pc.ofdm = cfg;
    pc.max_sources = 1;
    const auto d = beam_pipeline(est, sym, pc);
    const auto near = std::ranges::count_if(d, [&](const Detection& x) {
        return std::abs(x.delay_s - tau) < 1e-12 && std::abs(x.doppler_hz - nu) < 1e-6;
    });
    CHECK(near == 1);
    for (const auto& x : d)
        if (std::abs(x.delay_s - tau) < 1e-12) {
            CHECK(x.angle_deg == doctest::Approx(-8.0).epsilon(1e-3));
            CHECK(std::abs(x.gain - cdouble(0.3, -0.3)) < 1e-3);
            CHECK(x.range_m == doctest::Approx(kSpeedOfLight * tau / 2.0));
        }
}

TEST_CASE("three targets at 20, 60 and 80 m are all recovered by the bootstrapped LMMSE chain") {
    Scenario s = desk_scenario();
    s.targets = {{20.0, 5.0, -25.0, 1.0}, {60.0, -8.0, 5.0, 1.0}, {80.0, 15.0, 30.0, 1.0}};
    const Constellation constel = make_constellation(1024);
    const BeamPlan plan = make_beam_plan(s.ofdm, s.beams, s.strategy);
    const TxBeamMatrix F = build_beam_matrix(s.ofdm, plan, s.comm_beam_angle_deg(), s.strategy);
    Rng rng(derive_seed(5, {0}));
    const Frame frame = generate_frame(s.ofdm, s.strategy, constel, rng);
    const RadarCube cube = synthesize_radar_cube(s.targets, frame, F, s.ofdm, rng);
    const PipelineConfig pc = make_pipeline_config(s);
    const auto d = full_sensing(cube, frame, plan, pc);
    const auto hit = score_detections(d, s.targets, scoring_gates(s));
    CHECK(hit[0]);
    CHECK(hit[1]);
    CHECK(hit[2]);
}

TEST_CASE("true beam SNR matches the link budget") {
    Scenario s = desk_scenario();
    const BeamPlan plan = make_beam_plan(s.ofdm, s.beams, s.strategy);
    const TxBeamMatrix F = build_beam_matrix(s.ofdm, plan, s.comm_beam_angle_deg(), s.strategy);
    const CVector g{cdouble(1e-6, 2e-6)};
    const auto snr = true_beam_snr(s.targets, g, plan, F, s.ofdm.noise_variance());
    REQUIRE(snr.size() == plan.count());
    for (std::size_t b = 0; b < plan.count(); ++b) {
        const std::size_t m = plan.symbol_sets[b].front();
        cdouble at_f = 0.0;
        for (std::size_t t = 0; t < s.ofdm.tx_antennas; ++t)
            at_f += std::polar(1.0, oracle::kPi * t * std::sin(s.targets[0].angle_deg * oracle::kPi / 180.0)) * F(t, m);
        CHECK(snr[b] == doctest::Approx(std::norm(g[0] * at_f) / s.ofdm.noise_variance()).epsilon(1e-12));
    }
    RadarCube empty;
    Frame f;
    PipelineConfig pc;
    const std::vector<double> wrong(1, 1.0);
    CHECK_THROWS_AS(run_sensing(empty, f, plan, pc, SensingMode::LMMSEIdeal, wrong), ConfigError);
}
