#pragma once

#include <map>
#include <span>
#include <vector>

#include "isac/estimators.hpp"

namespace isac {

/// Noncoherently integrated delay-Doppler power map. Rows are delay bins,
/// columns Doppler bins; Doppler bins at or above cols/2 are negative.
struct DelayDopplerMap {
    RMatrix power;
    double delay_bin_s = 0.0;     // 1 / (N' df)
    double doppler_bin_hz = 0.0;  // 1 / (M_b' Tsym)
    std::size_t pad = 1;

    double delay_of(std::size_t p) const { return static_cast<double>(p) * delay_bin_s; }
    double doppler_of(std::size_t q) const;
};

struct CfarConfig {
    double pfa = 1e-4;
    std::size_t guard_delay = 2, guard_doppler = 2;  // per side
    std::size_t train_delay = 8, train_doppler = 4;  // per side, beyond the guard band
};

struct CfarHit {
    std::size_t delay_bin = 0;
    std::size_t doppler_bin = 0;
    double statistic = 0.0;  // cell value / training mean
};

struct ClusterConfig {
    double range_res_m = 1.0;
    double velocity_res_mps = 1.0;
    double angle_res_deg = 2.0;
    double eps = 1.7320508075688772;  // sqrt(3) under W = diag(1/res^2)
};

enum class SensingMode { RF, MF, LMMSE, LMMSEIdeal };

std::string_view to_string(SensingMode mode);

struct Detection {
    double range_m = 0.0;
    double velocity_mps = 0.0;
    double angle_deg = 0.0;
    cdouble gain{};
    double delay_s = 0.0;
    double doppler_hz = 0.0;
    double statistic = 0.0;
    std::size_t beam = 0;
    EstimatorKind estimator = EstimatorKind::MF;
};

/// F_N'^H zeropad(h) F_M' with unitary DFTs; output is (pad N) x (pad M_b).
CMatrix delay_doppler_map_per_antenna(const CMatrix& h, std::size_t pad);

/// Sum of |map_i|^2 over antennas. Throws ConfigError on shape mismatch.
RMatrix noncoherent_integrate(std::span<const CMatrix> maps);

/// Per-antenna transform plus integration, with bin spacings filled in.
DelayDopplerMap integrated_map(std::span<const ChannelEstimate> estimates, std::size_t pad,
                               const OfdmConfig& cfg);

/// Number of training cells in the CA window.
std::size_t cfar_training_cells(const CfarConfig& cfg);

/// Threshold factor on the statistic (cell / training mean) giving the design
/// Pfa when every cell is a sum of `integrated` unit exponentials.
double cfar_threshold(const CfarConfig& cfg, std::size_t integrated);

/// Exact false-alarm probability of the CA test for a threshold factor.
double cfar_false_alarm(double threshold, std::size_t training_cells, std::size_t integrated);

/// 2-D cell-averaging CFAR with wrap-around windows. Hits are ordered by
/// delay bin, then Doppler bin.
std::vector<CfarHit> cfar_detect(const RMatrix& map, const CfarConfig& cfg, std::size_t integrated);

/// Keeps hits whose cell is a maximum of its wrapped 3x3 neighborhood.
std::vector<CfarHit> local_maxima(const RMatrix& map, std::span<const CfarHit> hits);

/// y_i = b(tau)^H H_i c_b(nu) / (N M_b) for every antenna.
CVector spatial_snapshot(std::span<const ChannelEstimate> estimates,
                         std::span<const std::size_t> symbols, double delay_s, double doppler_hz,
                         const OfdmConfig& cfg);

/// Evaluates b(tau)^H H_i c_b(nu) for every antenna of one beam. The slow-time
/// reduction H_i c_b(nu) is cached per distinct Doppler value, so many cells
/// sharing a Doppler bin cost one pass over the estimates.
class BeamProjector {
public:
    BeamProjector(std::span<const ChannelEstimate> estimates, std::span<const std::size_t> symbols,
                  const OfdmConfig& cfg);

    /// Unnormalized projections, one per antenna.
    CVector project(double delay_s, double doppler_hz);
    /// Projections scaled by 1 / (N M_b).
    CVector snapshot(double delay_s, double doppler_hz);

    std::span<const ChannelEstimate> estimates() const { return estimates_; }
    std::span<const std::size_t> symbols() const { return symbols_; }
    const OfdmConfig& config() const { return cfg_; }

private:
    const std::vector<CVector>& reduced(double doppler_hz);
    const CVector& delay(double delay_s);

    std::span<const ChannelEstimate> estimates_;
    std::span<const std::size_t> symbols_;
    OfdmConfig cfg_;
    std::map<double, std::vector<CVector>> reduced_;  // Doppler -> per-antenna H_i c
    std::map<double, CVector> delays_;                // delay -> b(tau)
};

/// Angles (deg) from the shift invariance of a smoothed Hankel matrix of y.
std::vector<double> esprit_angles(std::span<const cdouble> y, std::size_t max_sources,
                                  double threshold = 0.1);

struct PathParams {
    double delay_s = 0.0;
    double doppler_hz = 0.0;
    double angle_deg = 0.0;
};

struct LsGains {
    std::vector<std::size_t> kept;  // indices of params used, duplicates removed
    CVector gains;                  // aligned with kept
    std::vector<std::size_t> duplicates;
};

/// Least-squares gains of the separable delay/Doppler/angle model.
LsGains ls_gains(std::span<const ChannelEstimate> estimates, std::span<const std::size_t> symbols,
                 std::span<const PathParams> params, const OfdmConfig& cfg);
/// Same, reusing the projections already cached by `proj`.
LsGains ls_gains(BeamProjector& proj, std::span<const PathParams> params);

struct PipelineConfig {
    OfdmConfig ofdm;
    CfarConfig cfar;
    std::size_t pad = 1;
    double esprit_threshold = 0.1;
    std::size_t max_sources = 4;
    double initial_snr = 1.0;
    bool local_maxima_only = true;
    ClusterConfig cluster;
};

PipelineConfig make_pipeline_config(const Scenario& s);

/// Delay-Doppler imaging, CFAR, spatial snapshots, ESPRIT and LS gains for one beam.
std::vector<Detection> beam_pipeline(std::span<const ChannelEstimate> estimates,
                                     std::span<const std::size_t> symbols, const PipelineConfig& cfg);

struct Cluster {
    std::vector<std::size_t> members;
    std::size_t representative = 0;
};

/// DBSCAN with minPts = 1: connected components of the eps-neighborhood graph
/// under the weighted distance. Clusters are ordered by their smallest member.
/// The representative has the largest CFAR statistic, then the largest |gain|.
std::vector<Cluster> dbscan_cluster(std::span<const Detection> detections, const ClusterConfig& cfg);

/// One representative per cluster, ordered by range, velocity, angle.
std::vector<Detection> cluster_representatives(std::span<const Detection> detections,
                                               const ClusterConfig& cfg);

/// Runs the chosen sensing chain over every beam and clusters across beams.
/// LMMSE is the full bootstrapped chain; LMMSEIdeal uses ideal_snr[b].
std::vector<Detection> run_sensing(const RadarCube& cube, const Frame& frame, const BeamPlan& plan,
                                   const PipelineConfig& cfg, SensingMode mode,
                                   std::span<const double> ideal_snr = {});

/// The bootstrapped LMMSE chain.
std::vector<Detection> full_sensing(const RadarCube& cube, const Frame& frame, const BeamPlan& plan,
                                    const PipelineConfig& cfg);

/// sum_k |alpha_k a_T(theta_k)^T f_b|^2 / sigma^2 per beam, f_b being the
/// transmit beam on the beam's first symbol.
std::vector<double> true_beam_snr(std::span<const Target> targets, std::span<const cdouble> gains,
                                  const BeamPlan& plan, const TxBeamMatrix& F, double noise_var);

}  // namespace isac
