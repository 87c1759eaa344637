#pragma once

#include <Eigen/Core>

// Thin wrappers over Eigen's FFT module so the rest of the library never
// touches the unsupported headers directly.

namespace ajwave {

// Smallest power of two >= n (n >= 1).
int next_pow2(int n);

// Forward DFT of x zero-padded to nfft (nfft >= x.size(), power of two).
Eigen::VectorXcd fft_forward(const Eigen::Ref<const Eigen::VectorXd>& x, int nfft);

// Inverse DFT; returns the real part of the first n_out samples. The input
// is expected to be (numerically) conjugate-even.
Eigen::VectorXd fft_inverse_real(const Eigen::Ref<const Eigen::VectorXcd>& spectrum, int n_out);

}  // namespace ajwave
