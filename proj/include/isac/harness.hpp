#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "isac/channel.hpp"
#include "isac/detector.hpp"
#include "isac/scenario.hpp"

namespace isac {

// ---- detection scoring -------------------------------------------------------

struct ScoringGates {
    double range_m = 1.0;
    double velocity_mps = 1.0;
    double angle_deg = 2.0;
};

/// Gates from the scenario's range and per-beam velocity resolution.
ScoringGates scoring_gates(const Scenario& s);

/// Hit flags per target. A detection inside all three gates of a target may
/// claim it; pairs are assigned greedily by normalized distance, and each
/// detection claims at most one target.
std::vector<bool> score_detections(std::span<const Detection> detections,
                                   std::span<const Target> truth, const ScoringGates& gates);

// ---- CSV -------------------------------------------------------------------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows = {};

    std::string str() const;
    void write(const std::filesystem::path& path) const;
};

std::string format_number(double v, int decimals = 6);

// ---- campaigns -------------------------------------------------------------

enum class CampaignKind {
    RangeProfile,
    PdVsRcs,
    PdVsModOrder,
    TradeoffRho,
    TradeoffTimeShare,
    ConcurrentVsTimeShare,
    Rate,
};

struct Campaign {
    Scenario scenario;
    CampaignKind kind = CampaignKind::PdVsRcs;
    std::vector<double> grid;  // empty selects the kind's default grid
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::size_t mi_samples = 1000;
    std::vector<SensingMode> modes = {SensingMode::RF, SensingMode::MF, SensingMode::LMMSE,
                                      SensingMode::LMMSEIdeal};
};

std::vector<double> default_grid(CampaignKind kind);

/// Runs a campaign and returns its CSV. Output depends only on the campaign
/// fields other than `threads`.
CsvTable run_campaign(const Campaign& c);

CsvTable run_range_profile(const Campaign& c);
CsvTable run_pd_vs_rcs(const Campaign& c);
CsvTable run_pd_vs_mod(const Campaign& c);
CsvTable run_tradeoff(const Campaign& c);  // TradeoffRho, TradeoffTimeShare or ConcurrentVsTimeShare
CsvTable run_rate(const Campaign& c);

/// Per-mode detection probability of the probe target for one scenario.
struct PdPoint {
    std::vector<double> pd;          // aligned with the requested modes
    std::vector<double> false_alarms;  // mean unmatched detections per trial
    double snr_mean_db = 0.0;        // mean over beams of the true SNR_b
};

PdPoint estimate_pd(const Scenario& s, std::span<const SensingMode> modes, std::size_t trials,
                    std::uint64_t seed, std::size_t threads);

/// Achievable rate of the scenario's strategy under its comm channel.
double scenario_rate(const Scenario& s, std::size_t mi_samples, std::uint64_t seed,
                     std::size_t threads);

// ---- radar cube files --------------------------------------------------------

struct CubeMetadata {
    std::uint16_t version = 1;
    std::uint32_t rx_antennas = 0;
    std::uint32_t subcarriers = 0;
    std::uint32_t symbols = 0;
    double subcarrier_spacing_hz = 0.0;
    double carrier_hz = 0.0;
};

/// Layout: "OFDMCUBE", u16 version, u32 NR, N, M, f64 df, f64 fc, then
/// NR*N*M interleaved f32 (re, im), antenna-major then subcarrier then symbol;
/// all little-endian.
void export_cube(const std::filesystem::path& path, const RadarCube& cube, double df, double fc);
std::string encode_cube(const RadarCube& cube, double df, double fc);

struct IngestedCube {
    RadarCube cube;
    CubeMetadata meta;
};

/// Throws IoError naming the byte offset of the first problem.
IngestedCube ingest_cube(const std::filesystem::path& path);
IngestedCube decode_cube(std::string_view bytes);

}  // namespace isac
