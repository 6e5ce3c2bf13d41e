#include "isac/txchain.hpp"

#include <algorithm>
#include <cmath>

#include "isac/channel.hpp"

namespace isac {

std::size_t Frame::data_columns() const {
    return static_cast<std::size_t>(std::ranges::count(column_labels, SymbolLabel::Data));
}

std::vector<double> sensing_beam_angles(std::size_t count, double max_scan_deg) {
    if (count < 2) throw ConfigError("beam sweep needs at least two beams");
    if (!(max_scan_deg > 0.0 && max_scan_deg < 90.0))
        throw ConfigError("maximum scan angle out of (0, 90) degrees");
    std::vector<double> out(count);
    for (std::size_t b = 0; b < count; ++b)
        out[b] = -max_scan_deg + 2.0 * static_cast<double>(b) / static_cast<double>(count - 1) *
                                     max_scan_deg;
    return out;
}

CVector transmit_beam(const OfdmConfig& cfg, double angle_deg) {
    CVector f = steering(angle_deg, cfg.tx_antennas);
    const double amp = std::sqrt(cfg.tx_power_w / static_cast<double>(cfg.tx_antennas));
    for (auto& v : f) v = amp * std::conj(v);
    return f;
}

std::vector<std::size_t> sensing_symbols(const OfdmConfig& cfg, const Strategy& strategy) {
    if (const auto* ts = std::get_if<TimeSharing>(&strategy)) {
        auto s = ts->sensing_symbols;
        std::ranges::sort(s);
        return s;
    }
    std::vector<std::size_t> all(cfg.symbols);
    for (std::size_t m = 0; m < all.size(); ++m) all[m] = m;
    return all;
}

BeamPlan make_beam_plan(const OfdmConfig& cfg, const BeamSweep& sweep, const Strategy& strategy) {
    BeamPlan plan;
    plan.angles_deg = sensing_beam_angles(sweep.count, sweep.max_scan_deg);
    const auto sens = sensing_symbols(cfg, strategy);
    const std::size_t B = sweep.count, S = sens.size();
    plan.symbol_sets.resize(B);
    plan.beams.reserve(B);
    for (std::size_t b = 0; b < B; ++b) {
        plan.symbol_sets[b].assign(sens.begin() + static_cast<std::ptrdiff_t>(b * S / B),
                                   sens.begin() + static_cast<std::ptrdiff_t>((b + 1) * S / B));
        plan.beams.push_back(transmit_beam(cfg, plan.angles_deg[b]));
    }
    return plan;
}

namespace {

CVector combine(const CVector& fs, const CVector& fc, double rho, double power) {
    if (rho >= 1.0) return fs;
    if (rho <= 0.0) return fc;
    CVector g(fs.size());
    const double ws = std::sqrt(rho), wc = std::sqrt(1.0 - rho);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = ws * fs[i] + wc * fc[i];
        norm2 += std::norm(g[i]);
    }
    if (norm2 <= 0.0) return fs;
    const double scale = std::sqrt(power / norm2);
    for (auto& v : g) v *= scale;
    return g;
}

}  // namespace

TxBeamMatrix build_beam_matrix(const OfdmConfig& cfg, const BeamPlan& plan, double comm_angle_deg,
                               const Strategy& strategy) {
    const CVector fc = transmit_beam(cfg, comm_angle_deg);
    TxBeamMatrix F(cfg.tx_antennas, cfg.symbols);
    auto set_column = [&](std::size_t m, const CVector& f) {
        for (std::size_t i = 0; i < f.size(); ++i) F(i, m) = f[i];
    };
    for (std::size_t m = 0; m < cfg.symbols; ++m) set_column(m, fc);

    const auto* con = std::get_if<Concurrent>(&strategy);
    for (std::size_t b = 0; b < plan.count(); ++b) {
        const CVector f = con ? combine(plan.beams[b], fc, con->rho, cfg.tx_power_w) : plan.beams[b];
        for (auto m : plan.symbol_sets[b]) set_column(m, f);
    }
    return F;
}

Frame generate_frame(const OfdmConfig& cfg, const Strategy& strategy, const Constellation& constel,
                     Rng& rng) {
    Frame frame;
    frame.symbols = CMatrix(cfg.subcarriers, cfg.symbols);
    frame.column_labels.assign(cfg.symbols, SymbolLabel::Data);
    if (const auto* ts = std::get_if<TimeSharing>(&strategy))
        for (auto m : ts->sensing_symbols) frame.column_labels[m] = SymbolLabel::Pilot;

    static const cdouble kPilots[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    const auto points = constel.points();
    std::uniform_int_distribution<std::size_t> pick_data(0, points.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_pilot(0, 3);
    for (std::size_t n = 0; n < cfg.subcarriers; ++n) {
        auto row = frame.symbols.row(n);
        for (std::size_t m = 0; m < cfg.symbols; ++m)
            row[m] = frame.column_labels[m] == SymbolLabel::Pilot ? kPilots[pick_pilot(rng)]
                                                                 : points[pick_data(rng)];
    }
    return frame;
}

}  // namespace isac
