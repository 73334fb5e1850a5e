#include "concdiff/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "concdiff/error.hpp"

namespace concdiff {

namespace {
// The FFTW planner keeps global state.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int& thread_cap() {
  static int n = 1;
  return n;
}

void ensure_threads_initialized() {
  static const bool ok = fftw_init_threads() != 0;
  if (!ok) throw Error(ErrorKind::Configuration, "FFTW thread support failed to initialize");
}
}  // namespace

void set_transform_threads(int threads) {
  std::lock_guard lock(planner_mutex());
  thread_cap() = std::max(1, threads);
}

struct SpectralTransform::Plans {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::size_t real_size = 0;
  std::size_t cplx_size = 0;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(cplx);
  }
};

SpectralTransform::SpectralTransform(const GridSpec& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  const int d = grid.dimension;
  const int n[3] = {grid.points, grid.points, grid.points};
  plans_->real_size = grid.physical_size();
  plans_->cplx_size = grid.mode_count();
  std::lock_guard lock(planner_mutex());
  ensure_threads_initialized();
  fftw_plan_with_nthreads(thread_cap());
  plans_->real = fftw_alloc_real(plans_->real_size);
  plans_->cplx = fftw_alloc_complex(plans_->cplx_size);
  if (!plans_->real || !plans_->cplx) throw Error(ErrorKind::Configuration, "transform buffer allocation failed");
  plans_->forward = fftw_plan_dft_r2c(d, n, plans_->real, plans_->cplx, FFTW_ESTIMATE);
  plans_->backward = fftw_plan_dft_c2r(d, n, plans_->cplx, plans_->real, FFTW_ESTIMATE);
  if (!plans_->forward || !plans_->backward) throw Error(ErrorKind::Configuration, "FFTW planning failed");
}

SpectralTransform::~SpectralTransform() = default;

void SpectralTransform::to_physical(std::span<const Complex> coeffs, std::span<double> values) {
  if (coeffs.size() != plans_->cplx_size || values.size() != plans_->real_size) {
    throw Error(ErrorKind::GridMismatch, "transform buffer sizes do not match the grid");
  }
  std::memcpy(plans_->cplx, coeffs.data(), coeffs.size_bytes());
  fftw_execute(plans_->backward);
  std::memcpy(values.data(), plans_->real, values.size_bytes());
}

void SpectralTransform::to_spectral(std::span<const double> values, std::span<Complex> coeffs) {
  if (coeffs.size() != plans_->cplx_size || values.size() != plans_->real_size) {
    throw Error(ErrorKind::GridMismatch, "transform buffer sizes do not match the grid");
  }
  std::memcpy(plans_->real, values.data(), values.size_bytes());
  fftw_execute(plans_->forward);
  const double scale = 1.0 / static_cast<double>(plans_->real_size);
  const auto* src = reinterpret_cast<const Complex*>(plans_->cplx);
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = src[i] * scale;
}

std::vector<std::vector<double>> SpectralTransform::to_physical(const SpectralField& field) {
  if (!(field.grid() == grid_)) throw Error(ErrorKind::GridMismatch, "field grid differs from transform grid");
  std::vector<std::vector<double>> out(field.dimension(), std::vector<double>(plans_->real_size));
  for (int c = 0; c < field.dimension(); ++c) to_physical(field.component(c), out[c]);
  return out;
}

}  // namespace concdiff
