#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "isac/types.hpp"

namespace isac {

/// OFDM numerology, array sizes and link budget of the ISAC transceiver.
struct OfdmConfig {
    double carrier_hz = 28e9;
    double subcarrier_spacing_hz = 120e3;
    std::size_t subcarriers = 512;
    std::size_t symbols = 256;
    // The cyclic-prefix length is a free parameter; 1/14 mirrors 5G NR.
    double cp_fraction = 1.0 / 14.0;
    double tx_power_w = 0.1;
    std::size_t tx_antennas = 8;
    std::size_t rx_antennas = 8;
    double noise_psd_w_per_hz = 3.981071705534972e-21;  // -174 dBm/Hz

    double elementary_duration_s() const { return 1.0 / subcarrier_spacing_hz; }
    double symbol_duration_s() const { return elementary_duration_s() * (1.0 + cp_fraction); }
    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
    double bandwidth_hz() const { return static_cast<double>(subcarriers) * subcarrier_spacing_hz; }
    double noise_variance() const { return noise_psd_w_per_hz * bandwidth_hz(); }
    double range_resolution_m() const { return kSpeedOfLight / (2.0 * bandwidth_hz()); }
};

struct Target {
    double range_m = 0.0;
    double velocity_mps = 0.0;
    double angle_deg = 0.0;
    double rcs_m2 = 1.0;

    double delay_s() const { return 2.0 * range_m / kSpeedOfLight; }
    double doppler_hz(double wavelength_m) const { return 2.0 * velocity_mps / wavelength_m; }
};

enum class PathKind { Los, Nlos };

/// One propagation path between the ISAC transmitter and the communication receiver.
struct CommPath {
    PathKind kind = PathKind::Los;
    double aod_deg = 0.0;
    double delay_s = 0.0;
    double doppler_hz = 0.0;
    double d0_m = 0.0;      // LOS length
    double d1_m = 0.0;      // TX -> scatterer
    double d2_m = 0.0;      // scatterer -> RX
    double rcs_m2 = 0.0;    // scatterer RCS (NLOS only)

    /// LOS path toward a receiver at (x, y) metres; x is the array broadside.
    static CommPath line_of_sight(double rx_x, double rx_y);
    /// Single-bounce path via a scatterer at (sx, sy).
    static CommPath single_bounce(double rx_x, double rx_y, double sx, double sy, double rcs_m2);
};

/// Square QAM alphabet normalized to unit mean power.
class Constellation {
public:
    static constexpr int kSupportedOrders[] = {4, 16, 64, 256, 1024};

    int order() const noexcept { return order_; }
    std::span<const cdouble> points() const noexcept { return points_; }
    double mean_power() const;

private:
    friend Constellation make_constellation(int order);
    int order_ = 0;
    std::vector<cdouble> points_;
};

/// Builds the square-QAM grid with odd integer coordinates, scaled to unit
/// mean power. Throws ConfigError for unsupported orders.
Constellation make_constellation(int order);

bool is_supported_order(int order);

struct Concurrent {
    double rho = 0.8;
};

struct TimeSharing {
    std::vector<std::size_t> sensing_symbols;  // S; the complement carries data
};

using Strategy = std::variant<Concurrent, TimeSharing>;

/// Prior on the unstructured per-beam radar channel (used by the LMMSE derivation).
struct ChannelPrior {
    double gain_variance = 1.0;
};

struct BeamSweep {
    std::size_t count = 8;
    double max_scan_deg = 70.0;
};

struct SensingSettings {
    double pfa = 1e-4;
    std::size_t guard_delay = 2;
    std::size_t guard_doppler = 2;
    std::size_t train_delay = 8;
    std::size_t train_doppler = 4;
    std::size_t pad = 1;
    double esprit_threshold = 0.1;
    std::size_t max_sources = 4;
    // SNR used by the first LMMSE pass before the gain bootstrap.
    double initial_snr = 1.0;
    // Keep only CFAR hits that are maxima of their 3x3 map neighborhood.
    bool local_maxima_only = true;
};

struct RateSettings {
    std::size_t samples = 10000;
    std::optional<double> comm_noise_var;  // defaults to N0 * N * df
};

struct Scenario {
    OfdmConfig ofdm;
    std::vector<Target> targets;
    std::vector<CommPath> comm_paths;
    Strategy strategy = Concurrent{0.8};
    int modulation_order = 1024;
    BeamSweep beams;
    std::optional<double> comm_angle_deg;  // defaults to the LOS departure angle
    SensingSettings sensing;
    RateSettings rate;
    std::size_t probe_target = 0;

    double comm_beam_angle_deg() const;
    double comm_noise_variance() const;
};

struct Violation {
    std::string path;
    std::string message;
};

/// Reports every violated invariant; never throws.
std::vector<Violation> validate_scenario(const Scenario& s);

/// Throws ConfigError listing all violations when the scenario is invalid.
void require_valid(const Scenario& s);

/// Sensing symbols for a time-sharing ratio: B contiguous blocks spread evenly
/// over the frame, block sizes differing by at most one.
TimeSharing make_time_sharing(std::size_t symbols, std::size_t beams, double fraction);

/// Full-scale simulation parameters (28 GHz, 120 kHz, N=3330, M=1120, 20 dBm, 8x8).
Scenario full_scale_scenario();

/// Laptop-scale scenario with the same carrier, spacing and arrays.
Scenario desk_scenario();

// Scenario files: YAML (human-editable) or JSON with the same schema.
Scenario load_scenario(const std::filesystem::path& path);
Scenario scenario_from_text(const std::string& text, bool json);
std::string scenario_to_json(const Scenario& s);
/// Stable 64-bit FNV-1a hash of the canonical JSON form, as 16 hex digits.
std::string scenario_hash(const Scenario& s);

}  // namespace isac
