#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace dkdv::fourier {

using cplx = std::complex<double>;

// Unnormalized DFTs between physical order (sample index j = 0..n-1) and
// mode-ascending order (slot i holds mode k = i - n/2). The caller applies
// quadrature factors. Plans are cached per thread; FFTW planning is guarded
// by a global mutex, execution runs concurrently.

// out[i] = sum_j in[j] exp(-2*pi*I*k(i)*j/n)
std::vector<cplx> forward_1d(const std::vector<cplx>& in);

// out[j] = sum_i in[i] exp(+2*pi*I*k(i)*j/n)
std::vector<cplx> inverse_1d(const std::vector<cplx>& in);

// Row-major (slow index first). Slow axis has n_rows samples, fast axis n_cols.
// out[(i_r, i_c)] = sum_{j_r, j_c} in exp(-2*pi*I*(k_r j_r/n_rows + k_c j_c/n_cols))
std::vector<cplx> forward_2d(std::int64_t n_rows, std::int64_t n_cols, const std::vector<cplx>& in);
std::vector<cplx> inverse_2d(std::int64_t n_rows, std::int64_t n_cols, const std::vector<cplx>& in);

}  // namespace dkdv::fourier
