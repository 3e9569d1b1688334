#include "nlsnf/spectral_grid.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace nlsnf {

namespace {
// FFTW's planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

SpectralGrid::SpectralGrid(int gridsize) : n_(gridsize) {
  if (gridsize < 1) throw std::invalid_argument("SpectralGrid: gridsize must be positive");
  std::lock_guard lock(planner_mutex());
  buf_in_ = fftw_alloc_complex(static_cast<std::size_t>(n_));
  buf_out_ = fftw_alloc_complex(static_cast<std::size_t>(n_));
  plan_fwd_ = fftw_plan_dft_1d(n_, buf_in_, buf_out_, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_1d(n_, buf_in_, buf_out_, FFTW_BACKWARD, FFTW_ESTIMATE);
}

SpectralGrid::~SpectralGrid() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan_fwd_);
  fftw_destroy_plan(plan_bwd_);
  fftw_free(buf_in_);
  fftw_free(buf_out_);
}

void SpectralGrid::backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  std::memcpy(buf_in_, in.data(), sizeof(fftw_complex) * static_cast<std::size_t>(n_));
  fftw_execute(plan_bwd_);
  std::memcpy(static_cast<void*>(out.data()), buf_out_, sizeof(fftw_complex) * static_cast<std::size_t>(n_));
}

void SpectralGrid::forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  std::memcpy(buf_in_, in.data(), sizeof(fftw_complex) * static_cast<std::size_t>(n_));
  fftw_execute(plan_fwd_);
  std::memcpy(static_cast<void*>(out.data()), buf_out_, sizeof(fftw_complex) * static_cast<std::size_t>(n_));
}

}  // namespace nlsnf
