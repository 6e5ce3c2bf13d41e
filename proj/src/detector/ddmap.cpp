#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

#include <fftw3.h>

#include "isac/detector.hpp"
#include "isac/kernels.hpp"

namespace isac {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per shape and kept for the process.
class PlanCache {
public:
    struct Pair {
        fftw_plan delay;    // inverse DFT down each column
        fftw_plan doppler;  // forward DFT along each row
    };

    const Pair& get(int rows, int cols) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(rows, cols);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        auto* buf = fftw_alloc_complex(static_cast<std::size_t>(rows) * cols);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        Pair p;
        p.delay = fftw_plan_many_dft(1, &rows, cols, buf, nullptr, cols, 1, buf, nullptr, cols, 1,
                                     FFTW_BACKWARD, flags);
        p.doppler = fftw_plan_many_dft(1, &cols, rows, buf, nullptr, 1, cols, buf, nullptr, 1, cols,
                                       FFTW_FORWARD, flags);
        fftw_free(buf);
        return plans_.emplace(key, p).first->second;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, Pair> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace

double DelayDopplerMap::doppler_of(std::size_t q) const {
    const auto cols = static_cast<long long>(power.cols());
    auto s = static_cast<long long>(q);
    if (2 * s >= cols) s -= cols;
    return static_cast<double>(s) * doppler_bin_hz;
}

CMatrix delay_doppler_map_per_antenna(const CMatrix& h, std::size_t pad) {
    if (pad < 1) throw ConfigError("zero-pad factor must be at least 1");
    const std::size_t rows = h.rows() * pad, cols = h.cols() * pad;
    CMatrix out(rows, cols);
    for (std::size_t n = 0; n < h.rows(); ++n) {
        auto src = h.row(n);
        std::copy(src.begin(), src.end(), out.row(n).begin());
    }
    if (rows == 0 || cols == 0) return out;
    const auto& plan = plan_cache().get(static_cast<int>(rows), static_cast<int>(cols));
    auto* buf = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plan.delay, buf, buf);
    fftw_execute_dft(plan.doppler, buf, buf);
    const double scale = 1.0 / std::sqrt(static_cast<double>(rows) * static_cast<double>(cols));
    for (auto& v : out.flat()) v *= scale;
    return out;
}

RMatrix noncoherent_integrate(std::span<const CMatrix> maps) {
    if (maps.empty()) return {};
    RMatrix acc(maps[0].rows(), maps[0].cols());
    const auto& k = kernels::active_kernels();
    for (const auto& m : maps) {
        if (!m.same_shape(maps[0])) throw ConfigError("delay-Doppler maps differ in shape");
        k.accumulate_power(m.data(), acc.data(), m.size());
    }
    return acc;
}

DelayDopplerMap integrated_map(std::span<const ChannelEstimate> estimates, std::size_t pad,
                               const OfdmConfig& cfg) {
    DelayDopplerMap map;
    map.pad = pad;
    if (estimates.empty()) return map;
    const std::size_t rows = estimates[0].h.rows() * pad, cols = estimates[0].h.cols() * pad;
    map.power = RMatrix(rows, cols);
    const auto& k = kernels::active_kernels();
    for (const auto& e : estimates) {
        if (!e.h.same_shape(estimates[0].h)) throw ConfigError("channel estimates differ in shape");
        CMatrix dd = delay_doppler_map_per_antenna(e.h, pad);
        k.accumulate_power(dd.data(), map.power.data(), dd.size());
    }
    map.delay_bin_s = 1.0 / (static_cast<double>(rows) * cfg.subcarrier_spacing_hz);
    map.doppler_bin_hz = cols ? 1.0 / (static_cast<double>(cols) * cfg.symbol_duration_s()) : 0.0;
    return map;
}

}  // namespace isac
