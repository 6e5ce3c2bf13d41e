#pragma once

#include <cstddef>

#include "isac/types.hpp"

// Hot element-wise loops. Each kernel exists as a portable scalar reference and
// an AVX2/FMA variant; the variant is chosen once per process from CPUID.
// Setting ISAC_FORCE_SCALAR=1 in the environment pins the scalar set.
namespace isac::kernels {

struct KernelTable {
    const char* name;

    // out[i] = y[i] * conj(x[i]) / |x[i]|^2
    void (*rf)(const cdouble* y, const cdouble* x, cdouble* out, std::size_t n);
    // out[i] = y[i] * conj(x[i])
    void (*mf)(const cdouble* y, const cdouble* x, cdouble* out, std::size_t n);
    // out[i] = y[i] * conj(x[i]) / max(|x[i]|^2 + inv_snr, 16 eps)
    void (*lmmse)(const cdouble* y, const cdouble* x, double inv_snr, cdouble* out, std::size_t n);
    // acc[i] += |in[i]|^2
    void (*accumulate_power)(const cdouble* in, double* acc, std::size_t n);
    // out[s] = log sum_l exp(-|y_s - p_l|^2 * inv_var), evaluated with a max shift.
    // Samples and points are in split (SoA) layout.
    void (*mixture_logsum)(const double* y_re, const double* y_im, std::size_t samples,
                           const double* p_re, const double* p_im, std::size_t points,
                           double inv_var, double* out);
};

const KernelTable& scalar_kernels();
/// nullptr when the binary or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();
/// The table used by the library: AVX2 when available and not overridden.
const KernelTable& active_kernels();

}  // namespace isac::kernels
