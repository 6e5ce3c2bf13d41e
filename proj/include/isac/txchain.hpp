#pragma once

#include <cstdint>
#include <vector>

#include "isac/random.hpp"
#include "isac/scenario.hpp"

namespace isac {

enum class SymbolLabel : std::uint8_t { Data, Pilot };

/// Transmit grid X (N x M) with its data/pilot layout. Labels are constant
/// down each OFDM symbol, so they are stored per column.
struct Frame {
    CMatrix symbols;
    std::vector<SymbolLabel> column_labels;

    SymbolLabel label(std::size_t /*n*/, std::size_t m) const { return column_labels[m]; }
    std::size_t data_columns() const;
};

/// Sensing beam sweep: one beam per contiguous block of sensing symbols.
struct BeamPlan {
    std::vector<double> angles_deg;
    std::vector<std::vector<std::size_t>> symbol_sets;  // absolute symbol indices, ascending
    std::vector<CVector> beams;                          // ||f_b||^2 = PT

    std::size_t count() const { return angles_deg.size(); }
};

/// Column m holds the transmit beam f_m; NT x M.
using TxBeamMatrix = CMatrix;

/// theta_b = -theta_max + 2 b theta_max / (B - 1), b = 0..B-1.
std::vector<double> sensing_beam_angles(std::size_t count, double max_scan_deg);

/// sqrt(PT/NT) conj(a_T(theta)).
CVector transmit_beam(const OfdmConfig& cfg, double angle_deg);

/// Sensing symbols of the strategy: every symbol for Concurrent, S for TimeSharing.
std::vector<std::size_t> sensing_symbols(const OfdmConfig& cfg, const Strategy& strategy);

/// Splits the sensing symbols into B consecutive runs whose sizes differ by at most one.
BeamPlan make_beam_plan(const OfdmConfig& cfg, const BeamSweep& sweep, const Strategy& strategy);

TxBeamMatrix build_beam_matrix(const OfdmConfig& cfg, const BeamPlan& plan, double comm_angle_deg,
                               const Strategy& strategy);

/// Concurrent: i.i.d. uniform constellation symbols, all Data. TimeSharing:
/// columns in S carry unit-modulus QPSK pilots {1, j, -1, -j}, the rest data.
Frame generate_frame(const OfdmConfig& cfg, const Strategy& strategy, const Constellation& constel,
                     Rng& rng);

}  // namespace isac
