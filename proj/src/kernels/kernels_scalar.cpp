#include <algorithm>
#include <cmath>
#include <limits>

#include "isac/kernels.hpp"

namespace isac::kernels {
namespace {

constexpr double kDenominatorFloor = 16.0 * std::numeric_limits<double>::epsilon();

void rf(const cdouble* y, const cdouble* x, cdouble* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double xr = x[i].real(), xi = x[i].imag();
        double yr = y[i].real(), yi = y[i].imag();
        double inv = 1.0 / (xr * xr + xi * xi);
        out[i] = {(yr * xr + yi * xi) * inv, (yi * xr - yr * xi) * inv};
    }
}

void mf(const cdouble* y, const cdouble* x, cdouble* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double xr = x[i].real(), xi = x[i].imag();
        double yr = y[i].real(), yi = y[i].imag();
        out[i] = {yr * xr + yi * xi, yi * xr - yr * xi};
    }
}

void lmmse(const cdouble* y, const cdouble* x, double inv_snr, cdouble* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double xr = x[i].real(), xi = x[i].imag();
        double yr = y[i].real(), yi = y[i].imag();
        double inv = 1.0 / std::max(xr * xr + xi * xi + inv_snr, kDenominatorFloor);
        out[i] = {(yr * xr + yi * xi) * inv, (yi * xr - yr * xi) * inv};
    }
}

void accumulate_power(const cdouble* in, double* acc, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += std::norm(in[i]);
}

void mixture_logsum(const double* y_re, const double* y_im, std::size_t samples, const double* p_re,
                    const double* p_im, std::size_t points, double inv_var, double* out) {
    for (std::size_t s = 0; s < samples; ++s) {
        const double yr = y_re[s], yi = y_im[s];
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < points; ++l) {
            double dr = yr - p_re[l], di = yi - p_im[l];
            dmin = std::min(dmin, dr * dr + di * di);
        }
        double acc = 0.0;
        for (std::size_t l = 0; l < points; ++l) {
            double dr = yr - p_re[l], di = yi - p_im[l];
            acc += std::exp(-(dr * dr + di * di - dmin) * inv_var);
        }
        out[s] = -dmin * inv_var + std::log(acc);
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", rf, mf, lmmse, accumulate_power, mixture_logsum};
    return table;
}

}  // namespace isac::kernels
