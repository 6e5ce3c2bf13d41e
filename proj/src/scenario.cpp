#include "isac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isac/units.hpp"

namespace isac {

CommPath CommPath::line_of_sight(double rx_x, double rx_y) {
    CommPath p;
    p.kind = PathKind::Los;
    p.d0_m = std::hypot(rx_x, rx_y);
    p.aod_deg = rad_to_deg(std::atan2(rx_y, rx_x));
    p.delay_s = p.d0_m / kSpeedOfLight;
    return p;
}

CommPath CommPath::single_bounce(double rx_x, double rx_y, double sx, double sy, double rcs_m2) {
    CommPath p;
    p.kind = PathKind::Nlos;
    p.d1_m = std::hypot(sx, sy);
    p.d2_m = std::hypot(rx_x - sx, rx_y - sy);
    p.aod_deg = rad_to_deg(std::atan2(sy, sx));
    p.delay_s = (p.d1_m + p.d2_m) / kSpeedOfLight;
    p.rcs_m2 = rcs_m2;
    return p;
}

bool is_supported_order(int order) {
    return std::ranges::find(Constellation::kSupportedOrders, order) !=
           std::end(Constellation::kSupportedOrders);
}

double Constellation::mean_power() const {
    double acc = 0.0;
    for (auto p : points_) acc += std::norm(p);
    return acc / static_cast<double>(points_.size());
}

Constellation make_constellation(int order) {
    if (!is_supported_order(order))
        throw ConfigError("unsupported modulation order " + std::to_string(order) +
                          " (expected 4, 16, 64, 256 or 1024)");
    int side = 1;
    while (side * side < order) ++side;

    Constellation c;
    c.order_ = order;
    c.points_.reserve(static_cast<std::size_t>(order));
    double power = 0.0;
    for (int i = 0; i < side; ++i) {
        for (int q = 0; q < side; ++q) {
            double re = 2.0 * i - (side - 1);
            double im = 2.0 * q - (side - 1);
            c.points_.emplace_back(re, im);
            power += re * re + im * im;
        }
    }
    // mean power of the odd-integer grid is 2(side^2 - 1)/3; accumulate exactly instead
    double scale = 1.0 / std::sqrt(power / order);
    for (auto& p : c.points_) p *= scale;
    return c;
}

double Scenario::comm_beam_angle_deg() const {
    if (comm_angle_deg) return *comm_angle_deg;
    for (const auto& p : comm_paths)
        if (p.kind == PathKind::Los) return p.aod_deg;
    return 0.0;
}

double Scenario::comm_noise_variance() const {
    return rate.comm_noise_var.value_or(ofdm.noise_variance());
}

namespace {

class Collector {
public:
    void check(bool ok, std::string path, std::string message) {
        if (!ok) out.push_back({std::move(path), std::move(message)});
    }
    std::vector<Violation> out;
};

std::string indexed(const char* base, std::size_t i, const char* field) {
    return std::string(base) + "[" + std::to_string(i) + "]." + field;
}

}  // namespace

std::vector<Violation> validate_scenario(const Scenario& s) {
    Collector c;
    const auto& o = s.ofdm;
    c.check(o.carrier_hz > 0.0, "ofdm.carrier_hz", "fc>0 required");
    c.check(o.subcarrier_spacing_hz > 0.0, "ofdm.subcarrier_spacing_hz", "df>0 required");
    c.check(o.subcarriers >= 1, "ofdm.subcarriers", "N≥1 required");
    c.check(o.symbols >= 1, "ofdm.symbols", "M≥1 required");
    c.check(o.cp_fraction >= 0.0 && o.cp_fraction < 1.0, "ofdm.cp_fraction",
            "cp_fraction out of [0,1)");
    c.check(o.tx_power_w > 0.0, "ofdm.tx_power", "PT>0 required");
    c.check(o.tx_antennas >= 1, "ofdm.tx_antennas", "NT≥1 required");
    c.check(o.rx_antennas >= 1, "ofdm.rx_antennas", "NR≥1 required");
    c.check(o.noise_psd_w_per_hz > 0.0, "ofdm.noise_psd", "N0>0 required");

    for (std::size_t k = 0; k < s.targets.size(); ++k) {
        const auto& t = s.targets[k];
        c.check(t.range_m > 0.0, indexed("targets", k, "range_m"), "range must be > 0");
        c.check(std::abs(t.angle_deg) < 90.0, indexed("targets", k, "angle_deg"),
                "angle must satisfy |θ|<90°");
        c.check(t.rcs_m2 > 0.0, indexed("targets", k, "rcs"), "rcs must be > 0");
    }

    std::size_t los = 0;
    for (std::size_t k = 0; k < s.comm_paths.size(); ++k) {
        const auto& p = s.comm_paths[k];
        if (p.kind == PathKind::Los) {
            ++los;
            c.check(p.d0_m > 0.0, indexed("comm.paths", k, "d0_m"), "LOS distance must be > 0");
        } else {
            c.check(p.d1_m > 0.0 && p.d2_m > 0.0, indexed("comm.paths", k, "d1_m"),
                    "NLOS distances must be > 0");
            c.check(p.rcs_m2 > 0.0, indexed("comm.paths", k, "rcs"), "scatterer rcs must be > 0");
        }
        c.check(std::abs(p.aod_deg) <= 90.0, indexed("comm.paths", k, "aod_deg"),
                "departure angle must satisfy |θ|≤90°");
        c.check(p.delay_s >= 0.0, indexed("comm.paths", k, "delay_s"), "delay must be ≥ 0");
    }
    if (!s.comm_paths.empty())
        c.check(los == 1, "comm.paths", "exactly one LOS path required");

    if (const auto* con = std::get_if<Concurrent>(&s.strategy)) {
        c.check(con->rho >= 0.0 && con->rho <= 1.0, "transmission.rho", "rho out of [0,1]");
        c.check(s.beams.count <= o.symbols, "beams.count", "beam count exceeds symbol count");
    } else {
        const auto& ts = std::get<TimeSharing>(s.strategy);
        auto sorted = ts.sensing_symbols;
        std::ranges::sort(sorted);
        bool in_range = sorted.empty() || sorted.back() < o.symbols;
        bool unique = std::ranges::adjacent_find(sorted) == sorted.end();
        c.check(in_range, "transmission.sensing_symbols", "sensing symbol index ≥ M");
        c.check(unique, "transmission.sensing_symbols", "duplicate sensing symbol index");
    }

    c.check(is_supported_order(s.modulation_order), "transmission.modulation_order",
            "unsupported modulation order");
    c.check(s.beams.count >= 2, "beams.count", "B≥2 required");
    c.check(s.beams.max_scan_deg > 0.0 && s.beams.max_scan_deg < 90.0, "beams.max_scan_deg",
            "θmax out of (0°,90°)");
    if (s.comm_angle_deg)
        c.check(std::abs(*s.comm_angle_deg) <= 90.0, "comm.beam_angle_deg",
                "comm beam angle out of [-90°,90°]");

    const auto& se = s.sensing;
    c.check(se.pfa > 0.0 && se.pfa < 1.0, "sensing.pfa", "Pfa out of (0,1)");
    c.check(se.train_delay >= 1 && se.train_doppler >= 1, "sensing.training",
            "training window sizes must be ≥ 1");
    c.check(se.pad >= 1, "sensing.pad", "zero-pad factor must be ≥ 1");
    c.check(se.esprit_threshold > 0.0 && se.esprit_threshold < 1.0, "sensing.esprit_threshold",
            "ESPRIT threshold out of (0,1)");
    c.check(se.max_sources >= 1, "sensing.max_sources", "max_sources must be ≥ 1");
    c.check(se.initial_snr > 0.0, "sensing.initial_snr", "initial SNR must be > 0");

    c.check(s.rate.samples >= 1, "rate.samples", "Ns≥1 required");
    if (s.rate.comm_noise_var)
        c.check(*s.rate.comm_noise_var > 0.0, "comm.noise_var_w", "σc² must be > 0");
    if (!s.targets.empty())
        c.check(s.probe_target < s.targets.size(), "probe_target", "probe target index out of range");
    return c.out;
}

void require_valid(const Scenario& s) {
    auto v = validate_scenario(s);
    if (v.empty()) return;
    std::ostringstream os;
    os << "invalid scenario:";
    for (const auto& e : v) os << "\n  " << e.path << ": " << e.message;
    throw ConfigError(os.str());
}

TimeSharing make_time_sharing(std::size_t symbols, std::size_t beams, double fraction) {
    if (beams == 0) throw ConfigError("time sharing needs at least one beam");
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw ConfigError("sensing fraction out of [0,1]");
    auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(symbols)));
    TimeSharing ts;
    ts.sensing_symbols.reserve(count);
    for (std::size_t b = 0; b < beams; ++b) {
        std::size_t start = b * symbols / beams;
        std::size_t stop = (b + 1) * symbols / beams;
        std::size_t size = (b + 1) * count / beams - b * count / beams;
        size = std::min(size, stop - start);
        for (std::size_t m = start; m < start + size; ++m) ts.sensing_symbols.push_back(m);
    }
    // Block sizes can be clipped only when count does not divide evenly into
    // tiny blocks; top up from the remaining symbols so |S| stays exact.
    if (ts.sensing_symbols.size() < count) {
        std::vector<bool> used(symbols, false);
        for (auto m : ts.sensing_symbols) used[m] = true;
        for (std::size_t m = 0; m < symbols && ts.sensing_symbols.size() < count; ++m)
            if (!used[m]) ts.sensing_symbols.push_back(m);
        std::ranges::sort(ts.sensing_symbols);
    }
    return ts;
}

namespace {

std::vector<CommPath> reference_comm_paths() {
    // Receiver at (43, -25) m with three single-bounce scatterers.
    const double rx = 43.0, ry = -25.0;
    return {
        CommPath::line_of_sight(rx, ry),
        CommPath::single_bounce(rx, ry, 40.0, -20.0, units::dbsm_to_m2(-5.0)),
        CommPath::single_bounce(rx, ry, 42.0, -27.0, units::dbsm_to_m2(-10.0)),
        CommPath::single_bounce(rx, ry, 38.0, -30.0, units::dbsm_to_m2(-10.0)),
    };
}

}  // namespace

Scenario full_scale_scenario() {
    Scenario s;
    s.ofdm.carrier_hz = 28e9;
    s.ofdm.subcarrier_spacing_hz = 120e3;
    s.ofdm.subcarriers = 3330;
    s.ofdm.symbols = 1120;
    s.ofdm.tx_power_w = units::dbm_to_watt(20.0);
    s.ofdm.tx_antennas = 8;
    s.ofdm.rx_antennas = 8;
    s.ofdm.noise_psd_w_per_hz = units::dbm_to_watt(-174.0);
    s.targets = {{80.0, 15.0, 10.0, units::dbsm_to_m2(-2.0)}};
    s.comm_paths = reference_comm_paths();
    s.strategy = Concurrent{0.8};
    s.modulation_order = 1024;
    s.beams = {8, 70.0};
    return s;
}

Scenario desk_scenario() {
    Scenario s = full_scale_scenario();
    s.ofdm.subcarriers = 512;
    s.ofdm.symbols = 256;
    return s;
}

}  // namespace isac
