#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "isac/harness.hpp"

using namespace isac;

namespace {

Detection det(double r, double v, double a) {
    Detection d;
    d.range_m = r;
    d.velocity_mps = v;
    d.angle_deg = a;
    return d;
}

RadarCube random_cube(std::size_t nr, std::size_t n, std::size_t m, std::uint64_t seed) {
    Rng rng(seed);
    ComplexGaussian g(1.0);
    RadarCube c;
    for (std::size_t i = 0; i < nr; ++i) {
        CMatrix a(n, m);
        for (auto& v : a.flat()) v = g(rng);
        c.antennas.push_back(std::move(a));
    }
    return c;
}

// Small scene so campaigns finish in seconds.
Scenario small_scenario() {
    Scenario s = desk_scenario();
    s.ofdm.subcarriers = 128;
    s.ofdm.symbols = 64;
    s.beams.count = 4;
    s.targets = {{20.0, 10.0, 10.0, 1.0}};
    s.sensing.train_delay = 6;
    s.sensing.train_doppler = 2;
    s.sensing.guard_doppler = 1;
    return s;
}

// Rounds through a 32-bit float in memory; GCC 11 at -O3 otherwise folds the
// double -> float -> double pair away in this test.
double to_f32(double x) {
    volatile float f = static_cast<float>(x);
    return f;
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / (std::string("isac_test_") + name);
}

std::string message_of(std::string_view bytes) {
    try {
        decode_cube(bytes);
    } catch (const IoError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("scoring gates") {
    const std::vector<Target> truth{{50.0, 10.0, 5.0, 1.0}};
    const ScoringGates g{1.0, 2.0, 2.0};
    const std::vector<Detection> exact{det(50.0, 10.0, 5.0)};
    CHECK(score_detections(exact, truth, g) == std::vector<bool>{true});
    CHECK(score_detections({}, truth, g) == std::vector<bool>{false});
    const std::vector<Detection> off{det(51.5, 10.0, 5.0), det(50.0, 12.5, 5.0), det(50.0, 10.0, 7.5)};
    CHECK(score_detections(off, truth, g) == std::vector<bool>{false});
    const std::vector<Detection> edge{det(51.0, 8.0, 3.0)};
    CHECK(score_detections(edge, truth, g) == std::vector<bool>{true});
}

TEST_CASE("greedy assignment never reuses a detection") {
    const std::vector<Target> truth{{50.0, 10.0, 5.0, 1.0}, {50.5, 10.0, 5.0, 1.0}};
    const ScoringGates g{1.0, 2.0, 2.0};
    const std::vector<Detection> one{det(50.2, 10.0, 5.0)};
    const auto hit = score_detections(one, truth, g);
    CHECK(hit[0] + hit[1] == 1);
    CHECK(hit[0]);  // nearest target wins
    const std::vector<Detection> two{det(50.2, 10.0, 5.0), det(50.6, 10.0, 5.0)};
    CHECK(score_detections(two, truth, g) == std::vector<bool>{true, true});
}

TEST_CASE("scoring gates follow the scenario resolutions") {
    const Scenario s = desk_scenario();
    const ScoringGates g = scoring_gates(s);
    CHECK(g.range_m == doctest::Approx(s.ofdm.range_resolution_m()));
    CHECK(g.angle_deg == 2.0);
    const double mb = static_cast<double>(s.ofdm.symbols / s.beams.count);
    CHECK(g.velocity_mps ==
          doctest::Approx(s.ofdm.wavelength_m() / (2.0 * mb * s.ofdm.symbol_duration_s())));
}

TEST_CASE("CSV follows RFC 4180 with CRLF line ends") {
    CsvTable t{{"a", "b,c"}};
    t.rows.push_back({"1", "say \"hi\""});
    t.rows.push_back({"line\nbreak", ""});
    CHECK(t.str() == "a,\"b,c\"\r\n1,\"say \"\"hi\"\"\"\r\n\"line\nbreak\",\r\n");
    CHECK(format_number(1.23456, 3) == "1.235");
    CHECK(format_number(-0.5, 0) == "-0");
    const auto path = temp_file("table.csv");
    t.write(path);
    std::ifstream f(path, std::ios::binary);
    const std::string back((std::istreambuf_iterator<char>(f)), {});
    CHECK(back == t.str());
    std::filesystem::remove(path);
    CHECK_THROWS_AS(t.write("/nonexistent_dir/x.csv"), IoError);
}

TEST_CASE("cube files round-trip bit for bit") {
    const RadarCube c = random_cube(3, 5, 7, 1);
    const std::string bytes = encode_cube(c, 120e3, 28e9);
    CHECK(bytes.size() == 38 + 3 * 5 * 7 * 8);
    CHECK(bytes.substr(0, 8) == "OFDMCUBE");
    const IngestedCube in = decode_cube(bytes);
    CHECK(in.meta.version == 1);
    CHECK(in.meta.rx_antennas == 3);
    CHECK(in.meta.subcarriers == 5);
    CHECK(in.meta.symbols == 7);
    CHECK(in.meta.subcarrier_spacing_hz == 120e3);
    CHECK(in.meta.carrier_hz == 28e9);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 35; ++k) {
            const cdouble v = c.antennas[i].flat()[k];
            CHECK(in.cube.antennas[i].flat()[k] == cdouble(to_f32(v.real()), to_f32(v.imag())));
        }
    CHECK(encode_cube(in.cube, 120e3, 28e9) == bytes);

    const auto path = temp_file("cube.bin");
    export_cube(path, in.cube, 120e3, 28e9);
    const IngestedCube again = ingest_cube(path);
    CHECK(again.cube.antennas == in.cube.antennas);
    std::filesystem::remove(path);
}

TEST_CASE("malformed cube files raise typed errors naming the offset") {
    const std::string bytes = encode_cube(random_cube(2, 4, 3, 2), 1.0, 2.0);
    CHECK(message_of(bytes.substr(0, bytes.size() - 8)).find("truncated payload at offset " +
                                                             std::to_string(bytes.size() - 8)) == 0);
    std::string bad = bytes;
    bad[0] = 'X';
    CHECK(message_of(bad).find("not a cube file") == 0);
    CHECK(message_of("OFDM").find("not a cube file") == 0);
    CHECK(message_of(bytes.substr(0, 20)).find("truncated header") == 0);
    std::string ver = bytes;
    ver[8] = 2;
    CHECK(message_of(ver).find("unsupported cube version") == 0);
    CHECK(message_of(bytes + "x").find("trailing bytes") == 0);
    std::string huge = bytes;
    for (std::size_t k = 10; k < 22; ++k) huge[k] = static_cast<char>(0xff);
    CHECK(message_of(huge).find("overflow") != std::string::npos);
    CHECK_THROWS_AS(ingest_cube(temp_file("missing.bin")), IoError);
}

TEST_CASE("campaign configuration errors") {
    Campaign c;
    c.scenario = small_scenario();
    c.trials = 0;
    CHECK_THROWS_AS(run_campaign(c), ConfigError);
    c.trials = 1;
    c.kind = CampaignKind::PdVsModOrder;
    c.grid = {8.0};
    CHECK_THROWS_AS(run_campaign(c), ConfigError);
    for (auto k : {CampaignKind::RangeProfile, CampaignKind::PdVsRcs, CampaignKind::PdVsModOrder,
                   CampaignKind::TradeoffRho, CampaignKind::TradeoffTimeShare,
                   CampaignKind::ConcurrentVsTimeShare, CampaignKind::Rate})
        CHECK(!default_grid(k).empty());
}

TEST_CASE("campaigns are byte-identical across thread counts and carry hash and seed") {
    Campaign c;
    c.scenario = small_scenario();
    c.kind = CampaignKind::PdVsRcs;
    c.grid = {-10.0, 0.0};
    c.trials = 3;
    c.seed = 17;
    c.threads = 1;
    const std::string a = run_campaign(c).str();
    c.threads = 3;
    const CsvTable tb = run_campaign(c);
    CHECK(tb.str() == a);
    c.threads = 1;
    CHECK(run_campaign(c).str() == a);

    const auto& h = tb.header;
    const auto hash_col = std::ranges::find(h, "scenario_hash") - h.begin();
    const auto seed_col = std::ranges::find(h, "seed") - h.begin();
    REQUIRE(hash_col < static_cast<long>(h.size()));
    REQUIRE(seed_col < static_cast<long>(h.size()));
    for (const auto& row : tb.rows) {
        CHECK(row[hash_col] == scenario_hash(c.scenario));
        CHECK(row[seed_col] == "17");
    }
    c.seed = 18;
    CHECK(run_campaign(c).str() != a);
}

TEST_CASE("rate campaign is deterministic across thread counts") {
    Campaign c;
    c.scenario = small_scenario();
    c.kind = CampaignKind::Rate;
    c.grid = {4.0, 64.0};
    c.mi_samples = 200;
    c.threads = 1;
    const std::string a = run_campaign(c).str();
    c.threads = 4;
    CHECK(run_campaign(c).str() == a);
}

TEST_CASE("with QPSK every estimator makes the same decisions") {
    Scenario s = small_scenario();
    s.modulation_order = 4;
    s.targets[0].rcs_m2 = 0.05;
    const std::vector<SensingMode> modes{SensingMode::RF, SensingMode::MF, SensingMode::LMMSE};
    const PdPoint p = estimate_pd(s, modes, 6, 3, 2);
    CHECK(p.pd[0] == p.pd[1]);
    CHECK(p.pd[1] == p.pd[2]);
    CHECK(p.false_alarms[0] == p.false_alarms[1]);
    CHECK(p.false_alarms[1] == p.false_alarms[2]);
}

TEST_CASE("strong on-grid target is always detected") {
    Scenario s = small_scenario();
    const double dr = s.ofdm.range_resolution_m();
    const double mb = static_cast<double>(s.ofdm.symbols / s.beams.count);
    const double dv = s.ofdm.wavelength_m() / (2.0 * mb * s.ofdm.symbol_duration_s());
    s.targets = {{5.0 * dr, 2.0 * dv, 10.0, 100.0}};
    s.sensing.max_sources = 1;
    const std::vector<SensingMode> modes{SensingMode::LMMSE};
    const PdPoint p = estimate_pd(s, modes, 20, 4, 2);
    CHECK(p.pd[0] == 1.0);
}

TEST_CASE("pd-vs-rcs rows are probabilities that rise with RCS") {
    Campaign c;
    c.scenario = small_scenario();
    c.kind = CampaignKind::PdVsRcs;
    c.grid = {-40.0, 10.0};
    c.trials = 10;
    c.modes = {SensingMode::LMMSE};
    c.threads = 2;
    const CsvTable t = run_campaign(c);
    REQUIRE(t.rows.size() == 2);
    const double lo = std::stod(t.rows[0][2]), hi = std::stod(t.rows[1][2]);
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);
    CHECK(hi >= lo);
    CHECK(hi == 1.0);
}
