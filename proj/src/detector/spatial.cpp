#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Dense>

#include "isac/detector.hpp"

namespace isac {

namespace {

cdouble dot(const CVector& u, const CVector& v) {
    cdouble acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i];
    return acc;
}

// Index of each value in its sorted list of distinct values.
std::vector<std::size_t> distinct_index(const std::vector<double>& values, std::vector<double>& distinct) {
    distinct = values;
    std::ranges::sort(distinct);
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<std::size_t> idx(values.size());
    for (std::size_t k = 0; k < values.size(); ++k)
        idx[k] = static_cast<std::size_t>(std::ranges::lower_bound(distinct, values[k]) - distinct.begin());
    return idx;
}

}  // namespace

BeamProjector::BeamProjector(std::span<const ChannelEstimate> estimates,
                             std::span<const std::size_t> symbols, const OfdmConfig& cfg)
    : estimates_(estimates), symbols_(symbols), cfg_(cfg) {}

const std::vector<CVector>& BeamProjector::reduced(double doppler_hz) {
    auto it = reduced_.find(doppler_hz);
    if (it != reduced_.end()) return it->second;
    // c_b(nu) = conj of the slow-time phases
    CVector c = doppler_phases(doppler_hz, symbols_, cfg_.symbol_duration_s());
    for (auto& v : c) v = std::conj(v);
    const Eigen::Map<const Eigen::VectorXcd> cv(c.data(), static_cast<Eigen::Index>(c.size()));
    std::vector<CVector> out;
    out.reserve(estimates_.size());
    for (const auto& e : estimates_) {
        using RowMajor = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const Eigen::Map<const RowMajor> h(e.h.data(), static_cast<Eigen::Index>(e.h.rows()),
                                           static_cast<Eigen::Index>(e.h.cols()));
        CVector r(e.h.rows());
        Eigen::Map<Eigen::VectorXcd>(r.data(), static_cast<Eigen::Index>(r.size())).noalias() = h * cv;
        out.push_back(std::move(r));
    }
    return reduced_.emplace(doppler_hz, std::move(out)).first->second;
}

const CVector& BeamProjector::delay(double delay_s) {
    auto it = delays_.find(delay_s);
    if (it != delays_.end()) return it->second;
    return delays_.emplace(delay_s, delay_vector(delay_s, estimates_[0].h.rows(), cfg_.subcarrier_spacing_hz))
        .first->second;
}

CVector BeamProjector::project(double delay_s, double doppler_hz) {
    CVector y(estimates_.size());
    if (estimates_.empty()) return y;
    const auto& red = reduced(doppler_hz);
    const CVector& b = delay(delay_s);
    const auto n = static_cast<Eigen::Index>(b.size());
    const Eigen::Map<const Eigen::VectorXcd> bv(b.data(), n);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = bv.dot(Eigen::Map<const Eigen::VectorXcd>(red[i].data(), n));  // conjugates b
    return y;
}

CVector BeamProjector::snapshot(double delay_s, double doppler_hz) {
    CVector y = project(delay_s, doppler_hz);
    if (estimates_.empty()) return y;
    const double norm =
        1.0 / (static_cast<double>(estimates_[0].h.rows()) * static_cast<double>(symbols_.size()));
    for (auto& v : y) v *= norm;
    return y;
}

CVector spatial_snapshot(std::span<const ChannelEstimate> estimates,
                         std::span<const std::size_t> symbols, double delay_s, double doppler_hz,
                         const OfdmConfig& cfg) {
    return BeamProjector(estimates, symbols, cfg).snapshot(delay_s, doppler_hz);
}

std::vector<double> esprit_angles(std::span<const cdouble> y, std::size_t max_sources,
                                  double threshold) {
    const std::size_t nr = y.size();
    if (nr < 3) throw ConfigError("ESPRIT needs at least three antennas");
    double ynorm = 0.0;
    for (auto v : y) ynorm += std::norm(v);
    ynorm = std::sqrt(ynorm);
    if (ynorm == 0.0) return {};

    const std::size_t L = (nr + 2) / 2;  // ceil((nr + 1) / 2)
    const std::size_t cols = nr - L + 1;
    Eigen::MatrixXcd hank(L, cols);
    for (std::size_t r = 0; r < L; ++r)
        for (std::size_t c = 0; c < cols; ++c) hank(r, c) = y[r + c];

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(hank, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    if (s(0) <= 1e-12 * ynorm) return {};

    std::size_t order = 0;
    while (order < static_cast<std::size_t>(s.size()) && s(order) > threshold * s(0)) ++order;
    order = std::min({order, L - 1, cols, max_sources});
    if (order == 0) return {};

    const Eigen::MatrixXcd us = svd.matrixU().leftCols(order);
    const Eigen::MatrixXcd u1 = us.topRows(L - 1);
    const Eigen::MatrixXcd u2 = us.bottomRows(L - 1);
    const Eigen::MatrixXcd psi = u1.completeOrthogonalDecomposition().solve(u2);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(psi, false);

    std::vector<double> angles;
    angles.reserve(order);
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
        const double arg = std::arg(eig.eigenvalues()(k));
        angles.push_back(rad_to_deg(std::asin(std::clamp(arg / kPi, -1.0, 1.0))));
    }
    std::ranges::sort(angles);
    return angles;
}

LsGains ls_gains(std::span<const ChannelEstimate> estimates, std::span<const std::size_t> symbols,
                 std::span<const PathParams> params, const OfdmConfig& cfg) {
    BeamProjector proj(estimates, symbols, cfg);
    return ls_gains(proj, params);
}

LsGains ls_gains(BeamProjector& proj, std::span<const PathParams> params) {
    const auto estimates = proj.estimates();
    const auto symbols = proj.symbols();
    const OfdmConfig& cfg = proj.config();
    LsGains out;
    {
        std::map<std::tuple<double, double, double>, std::size_t> seen;
        for (std::size_t k = 0; k < params.size(); ++k) {
            const auto key = std::make_tuple(params[k].delay_s, params[k].doppler_hz, params[k].angle_deg);
            (seen.emplace(key, k).second ? out.kept : out.duplicates).push_back(k);
        }
    }
    const std::size_t K = out.kept.size();
    out.gains.assign(K, cdouble{});
    if (K == 0 || estimates.empty()) return out;

    const std::size_t N = estimates[0].h.rows();
    const std::size_t NR = estimates.size();

    // Columns are a_k = a_R(theta_k) (x) b(tau_k) (x) conj(c_b(nu_k)), so the Gram
    // matrix is the element-wise product of antenna, delay and slow-time Grams,
    // each needed only between distinct parameter values.
    std::vector<double> tau(K), nu(K), theta(K), tau_u, nu_u, theta_u;
    for (std::size_t k = 0; k < K; ++k) {
        tau[k] = params[out.kept[k]].delay_s;
        nu[k] = params[out.kept[k]].doppler_hz;
        theta[k] = params[out.kept[k]].angle_deg;
    }
    const auto ti = distinct_index(tau, tau_u);
    const auto vi = distinct_index(nu, nu_u);
    const auto ai = distinct_index(theta, theta_u);

    auto gram = [](const std::vector<CVector>& vecs) {
        Eigen::MatrixXcd g(vecs.size(), vecs.size());
        for (std::size_t k = 0; k < vecs.size(); ++k) {
            for (std::size_t l = k; l < vecs.size(); ++l) {
                g(k, l) = dot(vecs[k], vecs[l]);
                g(l, k) = std::conj(g(k, l));
            }
        }
        return g;
    };
    // b(t_k)^H b(t_l) = sum_n exp(j x n), x = 2 pi df (t_k - t_l): a geometric series.
    Eigen::MatrixXcd gb(tau_u.size(), tau_u.size());
    for (std::size_t k = 0; k < tau_u.size(); ++k) {
        for (std::size_t l = k; l < tau_u.size(); ++l) {
            const double x = 2.0 * kPi * cfg.subcarrier_spacing_hz * (tau_u[k] - tau_u[l]);
            const double half = std::sin(0.5 * x);
            cdouble g;
            if (std::abs(half) < 1e-6) {
                g = 0.0;
                for (std::size_t n = 0; n < N; ++n) g += std::polar(1.0, x * static_cast<double>(n));
            } else {
                const double nn = static_cast<double>(N);
                g = std::polar(std::sin(0.5 * nn * x) / half, 0.5 * (nn - 1.0) * x);
            }
            gb(k, l) = g;
            gb(l, k) = std::conj(g);
        }
    }
    std::vector<CVector> cvec, avec;
    for (double v : nu_u) {
        CVector c = doppler_phases(v, symbols, cfg.symbol_duration_s());
        for (auto& x : c) x = std::conj(x);
        cvec.push_back(std::move(c));
    }
    for (double a : theta_u) avec.push_back(steering(a, NR));
    const Eigen::MatrixXcd gc = gram(cvec), ga = gram(avec);

    Eigen::VectorXcd rhs(K);
    for (std::size_t k = 0; k < K; ++k) {
        const CVector y = proj.project(tau[k], nu[k]);
        cdouble acc = 0.0;
        for (std::size_t i = 0; i < NR; ++i) acc += std::conj(avec[ai[k]][i]) * y[i];
        rhs(k) = acc;
    }

    auto entry = [&](std::size_t k, std::size_t l) {
        // slow-time factor: sum_m conj(conj c_k) conj c_l = conj(c_k^H c_l)
        return ga(ai[k], ai[l]) * gb(ti[k], ti[l]) * std::conj(gc(vi[k], vi[l]));
    };

    // Columns on distinct grid cells are orthogonal up to rounding; solving each
    // connected block of the coupling graph separately gives the joint solution.
    // Pairs are enumerated only between delays whose delay factor is significant.
    constexpr double kCoupling = 1e-12;
    std::vector<double> diag(K);
    for (std::size_t k = 0; k < K; ++k) diag[k] = std::abs(entry(k, k));
    std::vector<std::vector<std::size_t>> by_delay(tau_u.size());
    for (std::size_t k = 0; k < K; ++k) by_delay[ti[k]].push_back(k);
    std::vector<std::size_t> parent(K);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    const double nn = static_cast<double>(N);
    for (std::size_t d1 = 0; d1 < tau_u.size(); ++d1) {
        for (std::size_t d2 = d1; d2 < tau_u.size(); ++d2) {
            // |b_k^H b_l| <= N; the other factors are bounded by NR and M_b.
            if (std::abs(gb(d1, d2)) <= kCoupling * nn) continue;
            for (auto k : by_delay[d1]) {
                for (auto l : by_delay[d2]) {
                    if (l <= k && d1 == d2) continue;
                    if (std::abs(entry(k, l)) > kCoupling * std::sqrt(diag[k] * diag[l])) {
                        const std::size_t a = find(k), b = find(l);
                        if (a != b) parent[std::max(a, b)] = std::min(a, b);
                    }
                }
            }
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> blocks;
    for (std::size_t k = 0; k < K; ++k) blocks[find(k)].push_back(k);
    for (const auto& [root, members] : blocks) {
        const auto n = static_cast<Eigen::Index>(members.size());
        Eigen::MatrixXcd G(n, n);
        Eigen::VectorXcd r(n);
        for (Eigen::Index a = 0; a < n; ++a) {
            r(a) = rhs(static_cast<Eigen::Index>(members[a]));
            for (Eigen::Index b = 0; b < n; ++b) G(a, b) = entry(members[a], members[b]);
        }
        const Eigen::VectorXcd alpha = G.completeOrthogonalDecomposition().solve(r);
        for (Eigen::Index a = 0; a < n; ++a) out.gains[members[a]] = alpha(a);
    }
    return out;
}

}  // namespace isac
