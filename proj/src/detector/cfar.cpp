#include <cmath>
#include <limits>

#include "isac/detector.hpp"

namespace isac {

std::size_t cfar_training_cells(const CfarConfig& cfg) {
    const std::size_t full =
        (2 * (cfg.guard_delay + cfg.train_delay) + 1) * (2 * (cfg.guard_doppler + cfg.train_doppler) + 1);
    const std::size_t guard = (2 * cfg.guard_delay + 1) * (2 * cfg.guard_doppler + 1);
    return full - guard;
}

// Cell X ~ Gamma(R, 1), training sum S ~ Gamma(K, 1) with K = Nt R, so
//   P(X > c S) = sum_{j<R} C(K+j-1, j) c^j / (1+c)^(K+j).
// The statistic X / (S / Nt) exceeds T exactly when X > (T / Nt) S.
double cfar_false_alarm(double threshold, std::size_t training_cells, std::size_t integrated) {
    const double c = threshold / static_cast<double>(training_cells);
    const double K = static_cast<double>(training_cells * integrated);
    const double log_c = std::log(c), log_1pc = std::log1p(c);
    double p = 0.0;
    for (std::size_t j = 0; j < integrated; ++j) {
        const double jj = static_cast<double>(j);
        p += std::exp(std::lgamma(K + jj) - std::lgamma(K) - std::lgamma(jj + 1.0) + jj * log_c -
                      (K + jj) * log_1pc);
    }
    return p;
}

double cfar_threshold(const CfarConfig& cfg, std::size_t integrated) {
    if (!(cfg.pfa > 0.0 && cfg.pfa < 1.0)) throw ConfigError("CFAR Pfa out of (0,1)");
    if (integrated == 0) throw ConfigError("CFAR needs at least one integrated map");
    const std::size_t nt = cfar_training_cells(cfg);
    if (nt == 0) throw ConfigError("CFAR training window is empty");
    // P(T) decreases monotonically; bisect on log T.
    double lo = std::log(1e-12), hi = std::log(1e12);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cfar_false_alarm(std::exp(mid), nt, integrated) > cfg.pfa) lo = mid;
        else hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

namespace {

// Summed-area table with wrap-around rectangle queries.
class PeriodicSums {
public:
    explicit PeriodicSums(const RMatrix& m) : rows_(m.rows()), cols_(m.cols()), sat_(rows_ + 1, cols_ + 1) {
        for (std::size_t r = 0; r < rows_; ++r) {
            double run = 0.0;
            for (std::size_t c = 0; c < cols_; ++c) {
                run += m(r, c);
                sat_(r + 1, c + 1) = sat_(r, c + 1) + run;
            }
        }
    }

    // Sum over rows r0-h..r0+h and cols c0-w..c0+w (wrapped); 2h+1 <= rows, 2w+1 <= cols.
    double centered(std::size_t r0, std::size_t c0, std::size_t h, std::size_t w) const {
        double total = 0.0;
        for (auto [ra, rb] : split(r0, h, rows_))
            for (auto [ca, cb] : split(c0, w, cols_)) total += block(ra, rb, ca, cb);
        return total;
    }

private:
    struct Span {
        std::size_t a, b;  // [a, b)
    };
    struct Spans {
        Span s[2];
        int n = 0;
        const Span* begin() const { return s; }
        const Span* end() const { return s + n; }
    };

    static Spans split(std::size_t centre, std::size_t half, std::size_t len) {
        Spans out;
        const long long lo = static_cast<long long>(centre) - static_cast<long long>(half);
        const long long hi = static_cast<long long>(centre) + static_cast<long long>(half) + 1;
        const long long L = static_cast<long long>(len);
        if (lo < 0) {
            out.s[out.n++] = {static_cast<std::size_t>(lo + L), len};
            out.s[out.n++] = {0, static_cast<std::size_t>(hi)};
        } else if (hi > L) {
            out.s[out.n++] = {static_cast<std::size_t>(lo), len};
            out.s[out.n++] = {0, static_cast<std::size_t>(hi - L)};
        } else {
            out.s[out.n++] = {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
        }
        return out;
    }

    double block(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const {
        return sat_(r1, c1) - sat_(r0, c1) - sat_(r1, c0) + sat_(r0, c0);
    }

    std::size_t rows_, cols_;
    RMatrix sat_;
};

}  // namespace

std::vector<CfarHit> cfar_detect(const RMatrix& map, const CfarConfig& cfg, std::size_t integrated) {
    const std::size_t hd = cfg.guard_delay + cfg.train_delay;
    const std::size_t hv = cfg.guard_doppler + cfg.train_doppler;
    if (cfg.train_delay < 1 || cfg.train_doppler < 1)
        throw ConfigError("CFAR training sizes must be at least 1");
    if (2 * hd + 1 > map.rows() || 2 * hv + 1 > map.cols())
        throw ConfigError("CFAR window (" + std::to_string(2 * hd + 1) + "x" +
                          std::to_string(2 * hv + 1) + ") exceeds the map (" +
                          std::to_string(map.rows()) + "x" + std::to_string(map.cols()) + ")");

    const double alpha = cfar_threshold(cfg, integrated);
    const double nt = static_cast<double>(cfar_training_cells(cfg));
    const PeriodicSums sums(map);
    std::vector<CfarHit> hits;
    for (std::size_t p = 0; p < map.rows(); ++p) {
        for (std::size_t q = 0; q < map.cols(); ++q) {
            const double v = map(p, q);
            if (v <= 0.0) continue;
            const double train = sums.centered(p, q, hd, hv) -
                                 sums.centered(p, q, cfg.guard_delay, cfg.guard_doppler);
            const double mean = std::max(train, 0.0) / nt;
            if (v > alpha * mean) {
                const double stat = mean > 0.0 ? v / mean : std::numeric_limits<double>::infinity();
                hits.push_back({p, q, stat});
            }
        }
    }
    return hits;
}

std::vector<CfarHit> local_maxima(const RMatrix& map, std::span<const CfarHit> hits) {
    std::vector<CfarHit> out;
    const std::size_t R = map.rows(), C = map.cols();
    for (const auto& h : hits) {
        const double v = map(h.delay_bin, h.doppler_bin);
        bool peak = true;
        for (int dr = -1; dr <= 1 && peak; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                const std::size_t r = (h.delay_bin + R + static_cast<std::size_t>(dr + 1) - 1) % R;
                const std::size_t c = (h.doppler_bin + C + static_cast<std::size_t>(dc + 1) - 1) % C;
                const double u = map(r, c);
                // ties resolve toward the lower (delay, Doppler) index
                if (u > v || (u == v && (r < h.delay_bin || (r == h.delay_bin && c < h.doppler_bin)))) {
                    peak = false;
                    break;
                }
            }
        }
        if (peak) out.push_back(h);
    }
    return out;
}

}  // namespace isac
