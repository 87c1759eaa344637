#include "ajwave/fft.hpp"

#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace ajwave {

int next_pow2(int n) {
  if (n < 1) throw std::invalid_argument("next_pow2: n must be >= 1");
  int p = 1;
  while (p < n) {
    if (p > (1 << 29)) throw std::invalid_argument("next_pow2: n too large");
    p <<= 1;
  }
  return p;
}

Eigen::VectorXcd fft_forward(const Eigen::Ref<const Eigen::VectorXd>& x, int nfft) {
  if (x.size() == 0) throw std::invalid_argument("fft_forward: empty input");
  if (nfft < x.size()) throw std::invalid_argument("fft_forward: nfft < input length");
  if (next_pow2(nfft) != nfft) throw std::invalid_argument("fft_forward: nfft not a power of two");
  std::vector<std::complex<double>> in(static_cast<std::size_t>(nfft));
  for (Eigen::Index k = 0; k < x.size(); ++k) in[static_cast<std::size_t>(k)] = x[k];
  std::vector<std::complex<double>> out(static_cast<std::size_t>(nfft));
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  Eigen::VectorXcd spec(nfft);
  for (int k = 0; k < nfft; ++k) spec[k] = out[static_cast<std::size_t>(k)];
  return spec;
}

Eigen::VectorXd fft_inverse_real(const Eigen::Ref<const Eigen::VectorXcd>& spectrum, int n_out) {
  const int n = static_cast<int>(spectrum.size());
  if (n == 0) throw std::invalid_argument("fft_inverse_real: empty input");
  if (n_out < 1 || n_out > n) throw std::invalid_argument("fft_inverse_real: bad n_out");
  std::vector<std::complex<double>> in(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) in[static_cast<std::size_t>(k)] = spectrum[k];
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
  Eigen::FFT<double> fft;
  fft.inv(out, in);
  Eigen::VectorXd y(n_out);
  for (int k = 0; k < n_out; ++k) y[k] = out[static_cast<std::size_t>(k)].real();
  return y;
}

}  // namespace ajwave
