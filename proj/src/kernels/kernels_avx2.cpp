// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "isac/kernels.hpp"

namespace isac::kernels {
namespace {

constexpr double kDenominatorFloor = 16.0 * std::numeric_limits<double>::epsilon();

// Interleaved complex pairs: v = [r0, i0, r1, i1].
inline __m256d conj_mul(__m256d y, __m256d x) {
    __m256d xr = _mm256_movedup_pd(x);              // r r
    __m256d xi = _mm256_permute_pd(x, 0xF);         // i i
    __m256d ys = _mm256_permute_pd(y, 0x5);         // swap re/im of y
    // even lanes: yr*xr + yi*xi, odd lanes: yi*xr - yr*xi
    return _mm256_fmsubadd_pd(y, xr, _mm256_mul_pd(ys, xi));
}

inline __m256d pair_norm(__m256d x) {
    __m256d sq = _mm256_mul_pd(x, x);
    return _mm256_hadd_pd(sq, sq);  // [|x0|^2, |x0|^2, |x1|^2, |x1|^2]
}

void rf(const cdouble* y, const cdouble* x, cdouble* out, std::size_t n) {
    const double* yp = reinterpret_cast<const double*>(y);
    const double* xp = reinterpret_cast<const double*>(x);
    double* op = reinterpret_cast<double*>(out);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d yv = _mm256_loadu_pd(yp + 2 * i);
        __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        __m256d inv = _mm256_div_pd(one, pair_norm(xv));
        _mm256_storeu_pd(op + 2 * i, _mm256_mul_pd(conj_mul(yv, xv), inv));
    }
    for (; i < n; ++i) {
        double xr = x[i].real(), xi = x[i].imag();
        double yr = y[i].real(), yi = y[i].imag();
        double inv = 1.0 / (xr * xr + xi * xi);
        out[i] = {(yr * xr + yi * xi) * inv, (yi * xr - yr * xi) * inv};
    }
}

void mf(const cdouble* y, const cdouble* x, cdouble* out, std::size_t n) {
    const double* yp = reinterpret_cast<const double*>(y);
    const double* xp = reinterpret_cast<const double*>(x);
    double* op = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        _mm256_storeu_pd(op + 2 * i,
                         conj_mul(_mm256_loadu_pd(yp + 2 * i), _mm256_loadu_pd(xp + 2 * i)));
    for (; i < n; ++i) {
        double xr = x[i].real(), xi = x[i].imag();
        double yr = y[i].real(), yi = y[i].imag();
        out[i] = {yr * xr + yi * xi, yi * xr - yr * xi};
    }
}

void lmmse(const cdouble* y, const cdouble* x, double inv_snr, cdouble* out, std::size_t n) {
    const double* yp = reinterpret_cast<const double*>(y);
    const double* xp = reinterpret_cast<const double*>(x);
    double* op = reinterpret_cast<double*>(out);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d reg = _mm256_set1_pd(inv_snr);
    const __m256d floor = _mm256_set1_pd(kDenominatorFloor);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d yv = _mm256_loadu_pd(yp + 2 * i);
        __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        __m256d den = _mm256_max_pd(_mm256_add_pd(pair_norm(xv), reg), floor);
        _mm256_storeu_pd(op + 2 * i, _mm256_mul_pd(conj_mul(yv, xv), _mm256_div_pd(one, den)));
    }
    for (; i < n; ++i) {
        double xr = x[i].real(), xi = x[i].imag();
        double yr = y[i].real(), yi = y[i].imag();
        double inv = 1.0 / std::max(xr * xr + xi * xi + inv_snr, kDenominatorFloor);
        out[i] = {(yr * xr + yi * xi) * inv, (yi * xr - yr * xi) * inv};
    }
}

void accumulate_power(const cdouble* in, double* acc, std::size_t n) {
    const double* ip = reinterpret_cast<const double*>(in);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(ip + 2 * i);
        __m256d b = _mm256_loadu_pd(ip + 2 * i + 4);
        __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));  // p0 p2 p1 p3
        h = _mm256_permute4x64_pd(h, 0xD8);
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), h));
    }
    for (; i < n; ++i) acc[i] += std::norm(in[i]);
}

// exp(x) for x <= 0, Cephes-style range reduction and Pade approximant.
// Inputs below -700 are clamped; the result is then below 1e-304.
inline __m256d exp_nonpositive(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
    const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
    const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
    const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
    const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
    const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
    const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
    const __m256d q3 = _mm256_set1_pd(2.00000000000000000009e0);

    x = _mm256_max_pd(x, _mm256_set1_pd(-700.0));
    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    x = _mm256_fnmadd_pd(n, c1, x);
    x = _mm256_fnmadd_pd(n, c2, x);
    __m256d xx = _mm256_mul_pd(x, x);
    __m256d px = _mm256_fmadd_pd(_mm256_fmadd_pd(p0, xx, p1), xx, p2);
    px = _mm256_mul_pd(px, x);
    __m256d qx = _mm256_fmadd_pd(_mm256_fmadd_pd(_mm256_fmadd_pd(q0, xx, q1), xx, q2), xx, q3);
    __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

    __m128i ni = _mm256_cvtpd_epi32(n);
    __m256i e = _mm256_add_epi64(_mm256_cvtepi32_epi64(ni), _mm256_set1_epi64x(1023));
    __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(e, 52));
    return _mm256_mul_pd(r, scale);
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmin(__m256d v) {
    __m128d lo = _mm_min_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
    return _mm_cvtsd_f64(_mm_min_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void mixture_logsum(const double* y_re, const double* y_im, std::size_t samples, const double* p_re,
                    const double* p_im, std::size_t points, double inv_var, double* out) {
    const std::size_t body = points - points % 4;
    const __m256d iv = _mm256_set1_pd(inv_var);
    for (std::size_t s = 0; s < samples; ++s) {
        const double yr = y_re[s], yi = y_im[s];
        const __m256d vyr = _mm256_set1_pd(yr), vyi = _mm256_set1_pd(yi);

        __m256d vmin = _mm256_set1_pd(std::numeric_limits<double>::infinity());
        for (std::size_t l = 0; l < body; l += 4) {
            __m256d dr = _mm256_sub_pd(vyr, _mm256_loadu_pd(p_re + l));
            __m256d di = _mm256_sub_pd(vyi, _mm256_loadu_pd(p_im + l));
            vmin = _mm256_min_pd(vmin, _mm256_fmadd_pd(dr, dr, _mm256_mul_pd(di, di)));
        }
        double dmin = hmin(vmin);
        for (std::size_t l = body; l < points; ++l) {
            double dr = yr - p_re[l], di = yi - p_im[l];
            dmin = std::min(dmin, dr * dr + di * di);
        }

        const __m256d vdmin = _mm256_set1_pd(dmin);
        __m256d vacc = _mm256_setzero_pd();
        for (std::size_t l = 0; l < body; l += 4) {
            __m256d dr = _mm256_sub_pd(vyr, _mm256_loadu_pd(p_re + l));
            __m256d di = _mm256_sub_pd(vyi, _mm256_loadu_pd(p_im + l));
            __m256d d = _mm256_fmadd_pd(dr, dr, _mm256_mul_pd(di, di));
            // d - dmin can round slightly negative under FMA; clamp to keep exp <= 1
            __m256d arg = _mm256_mul_pd(_mm256_min_pd(_mm256_sub_pd(vdmin, d), _mm256_setzero_pd()), iv);
            vacc = _mm256_add_pd(vacc, exp_nonpositive(arg));
        }
        double acc = hsum(vacc);
        for (std::size_t l = body; l < points; ++l) {
            double dr = yr - p_re[l], di = yi - p_im[l];
            acc += std::exp(-(dr * dr + di * di - dmin) * inv_var);
        }
        out[s] = -dmin * inv_var + std::log(acc);
    }
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable table{"avx2", rf, mf, lmmse, accumulate_power, mixture_logsum};
    return &table;
}

}  // namespace isac::kernels
