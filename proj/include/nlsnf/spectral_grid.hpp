#pragma once

#include <complex>
#include <span>
#include <vector>

#include <fftw3.h>

namespace nlsnf {

/// Owns a pair of FFTW plans for one grid size. Not copyable; safe to use
/// from one thread at a time.
class SpectralGrid {
 public:
  explicit SpectralGrid(int gridsize);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int size() const { return n_; }

  // out[j] = sum_k in[k] e^{+2 pi i jk/n}
  void backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
  // out[k] = sum_j in[j] e^{-2 pi i jk/n}   (unnormalized)
  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

 private:
  int n_;
  fftw_complex* buf_in_;
  fftw_complex* buf_out_;
  fftw_plan plan_fwd_;
  fftw_plan plan_bwd_;
};

}  // namespace nlsnf
