// Command-line front end for scenario validation, Monte-Carlo campaigns and
// radar-cube ingestion. Exit codes: 0 success, 1 invalid input, 2 I/O failure.
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "isac/harness.hpp"
#include "isac/kernels.hpp"
#include "isac/units.hpp"

namespace {

using namespace isac;

struct Common {
    std::string scenario;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::string out;
    std::size_t threads = 1;
    std::optional<std::size_t> pad;
    std::string grid;
    std::size_t mi_samples = 1000;
    std::string modes;
};

void add_common(CLI::App* cmd, Common& c, bool sensing) {
    cmd->add_option("--scenario", c.scenario, "Scenario file (.yaml or .json); default: desk scenario");
    cmd->add_option("--seed", c.seed, "Campaign seed");
    cmd->add_option("--out", c.out, "Output CSV path; default: stdout");
    cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--grid", c.grid, "Comma-separated sweep values");
    cmd->add_option("--mi-samples", c.mi_samples, "Monte-Carlo samples per MI evaluation")
        ->check(CLI::PositiveNumber);
    if (sensing) {
        cmd->add_option("--trials", c.trials, "Noise realizations per grid point")->check(CLI::PositiveNumber);
        cmd->add_option("--pad", c.pad, "Zero-pad factor of the delay-Doppler FFT")->check(CLI::PositiveNumber);
        cmd->add_option("--modes", c.modes, "Comma-separated subset of RF,MF,LMMSE,LMMSE-ideal");
    }
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> g;
    for (const auto& item : split(s)) {
        try {
            std::size_t used = 0;
            g.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad grid value '" + item + "'");
        }
    }
    return g;
}

std::vector<SensingMode> parse_modes(const std::string& s) {
    std::vector<SensingMode> out;
    for (const auto& item : split(s)) {
        bool found = false;
        for (auto m : {SensingMode::RF, SensingMode::MF, SensingMode::LMMSE, SensingMode::LMMSEIdeal}) {
            if (to_string(m) == item) {
                out.push_back(m);
                found = true;
            }
        }
        if (!found) throw ConfigError("unknown estimator '" + item + "'");
    }
    return out;
}

Scenario scenario_of(const Common& c) {
    Scenario s = c.scenario.empty() ? desk_scenario() : load_scenario(c.scenario);
    if (c.pad) s.sensing.pad = *c.pad;
    return s;
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw IoError("cannot open output file " + c.out);
    f << text;
    if (!f) throw IoError("write failed for " + c.out);
}

int run_campaign_cmd(const Common& c, CampaignKind kind) {
    Campaign camp;
    camp.scenario = scenario_of(c);
    camp.kind = kind;
    camp.grid = parse_grid(c.grid);
    camp.trials = c.trials;
    camp.seed = c.seed;
    camp.threads = c.threads;
    camp.mi_samples = c.mi_samples;
    if (!c.modes.empty()) camp.modes = parse_modes(c.modes);
    emit(c, run_campaign(camp).str());
    return 0;
}

int validate_cmd(const std::string& path) {
    const Scenario s = load_scenario(path);
    const auto violations = validate_scenario(s);
    if (violations.empty()) {
        std::cout << "ok " << path << " (hash " << scenario_hash(s) << ")\n";
        return 0;
    }
    for (const auto& v : violations) std::cout << v.path << ": " << v.message << "\n";
    return 1;
}

int ingest_cmd(const std::string& path, const Common& c) {
    const IngestedCube in = ingest_cube(path);
    const auto& m = in.meta;
    std::cout << "cube " << path << ": NR=" << m.rx_antennas << " N=" << m.subcarriers
              << " M=" << m.symbols << " df=" << m.subcarrier_spacing_hz << " Hz fc=" << m.carrier_hz
              << " Hz\n";
    for (std::size_t i = 0; i < in.cube.rx_antennas(); ++i) {
        double p = 0.0;
        for (auto v : in.cube.antennas[i].flat()) p += std::norm(v);
        p /= static_cast<double>(in.cube.antennas[i].size());
        std::cout << "  antenna " << i << ": mean power " << format_number(units::linear_to_db(p), 3)
                  << " dB\n";
    }
    if (c.out.empty()) return 0;

    // The payload is treated as per-antenna channel estimates; write the range
    // cut through the Doppler bin of the integrated-map peak.
    OfdmConfig cfg;
    cfg.subcarriers = m.subcarriers;
    cfg.symbols = m.symbols;
    cfg.subcarrier_spacing_hz = m.subcarrier_spacing_hz;
    cfg.carrier_hz = m.carrier_hz;
    std::vector<ChannelEstimate> est;
    for (std::size_t i = 0; i < in.cube.rx_antennas(); ++i)
        est.push_back({in.cube.antennas[i], EstimatorKind::MF, 0.0, i, 0});
    const std::size_t pad = c.pad.value_or(1);
    const DelayDopplerMap map = integrated_map(est, pad, cfg);
    std::size_t peak = 0;
    const auto flat = map.power.flat();
    for (std::size_t i = 1; i < flat.size(); ++i)
        if (flat[i] > flat[peak]) peak = i;
    const std::size_t q = peak % map.power.cols();
    CsvTable t{{"range_m", "magnitude_db"}};
    for (std::size_t p = 0; p < map.power.rows(); ++p) {
        const double v = map.power(p, q);
        t.rows.push_back({format_number(kSpeedOfLight * map.delay_of(p) / 2.0, 4),
                          v > 0.0 && flat[peak] > 0.0 ? format_number(units::linear_to_db(v / flat[peak]), 3)
                                                      : "-inf"});
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw IoError("cannot open output file " + c.out);
    f << t.str();
    return 0;
}

int synth_cube_cmd(const Common& c) {
    const Scenario s = scenario_of(c);
    require_valid(s);
    Rng rng(derive_seed(c.seed, {0}));
    const Constellation constel = make_constellation(s.modulation_order);
    const BeamPlan plan = make_beam_plan(s.ofdm, s.beams, s.strategy);
    const TxBeamMatrix F = build_beam_matrix(s.ofdm, plan, s.comm_beam_angle_deg(), s.strategy);
    const Frame frame = generate_frame(s.ofdm, s.strategy, constel, rng);
    const RadarCube cube = synthesize_radar_cube(s.targets, frame, F, s.ofdm, rng);
    export_cube(c.out, cube, s.ofdm.subcarrier_spacing_hz, s.ofdm.carrier_hz);
    std::cout << "wrote " << c.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OFDM ISAC sensing and rate simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "isac 1.0");
    bool show_kernels = false;
    app.add_flag("--kernels", show_kernels, "Print the active SIMD kernel set to stderr");

    Common common;
    std::string validate_path, cube_path;

    auto* validate = app.add_subcommand("validate", "Check a scenario file against all invariants");
    validate->add_option("scenario", validate_path, "Scenario file")->required();

    struct Entry {
        const char* name;
        const char* help;
        CampaignKind kind;
        bool sensing;
    };
    const Entry campaigns[] = {
        {"range-profile", "Trial-averaged range cuts per estimator and modulation", CampaignKind::RangeProfile, true},
        {"pd-vs-rcs", "Detection probability of the probe target versus its RCS (dBsm grid)", CampaignKind::PdVsRcs, true},
        {"pd-vs-mod", "Detection probability and rate versus modulation order", CampaignKind::PdVsModOrder, true},
        {"tradeoff-rho", "Rate and detection probability versus the ISAC weight", CampaignKind::TradeoffRho, true},
        {"tradeoff-timeshare", "Rate and detection probability versus |S|/M", CampaignKind::TradeoffTimeShare, true},
        {"concurrent-vs-timeshare", "Both trade-off sweeps on one grid", CampaignKind::ConcurrentVsTimeShare, true},
        {"rate", "Achievable rate versus modulation order", CampaignKind::Rate, false},
    };
    std::vector<std::pair<CLI::App*, CampaignKind>> campaign_cmds;
    for (const auto& e : campaigns) {
        auto* cmd = app.add_subcommand(e.name, e.help);
        add_common(cmd, common, e.sensing);
        campaign_cmds.emplace_back(cmd, e.kind);
    }

    auto* ingest = app.add_subcommand("ingest", "Read a radar cube file; --out writes its range profile");
    ingest->add_option("cube", cube_path, "Cube file")->required();
    ingest->add_option("--out", common.out, "Range-profile CSV path");
    ingest->add_option("--pad", common.pad, "Zero-pad factor")->check(CLI::PositiveNumber);

    auto* synth = app.add_subcommand("synth-cube", "Synthesize one noisy radar cube from a scenario");
    synth->add_option("--scenario", common.scenario, "Scenario file (.yaml or .json); default: desk scenario");
    synth->add_option("--seed", common.seed, "Noise and symbol seed");
    synth->add_option("--out", common.out, "Cube file path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (show_kernels) std::cerr << "kernels: " << kernels::active_kernels().name << "\n";

    try {
        if (*validate) return validate_cmd(validate_path);
        if (*ingest) return ingest_cmd(cube_path, common);
        if (*synth) return synth_cube_cmd(common);
        for (const auto& [cmd, kind] : campaign_cmds)
            if (*cmd) return run_campaign_cmd(common, kind);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
