#include "ptbands/fft.hpp"

#include <mutex>
#include <utility>

#include <fftw3.h>

#include "ptbands/error.hpp"

namespace ptbands {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Eigen::VectorXcd& v) { return reinterpret_cast<fftw_complex*>(v.data()); }
fftw_complex* as_fftw(const Eigen::VectorXcd& v) {
  return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(v.data()));
}

}  // namespace

Fft::Fft(int n) : n_(n) {
  if (n <= 0) throw SolverError("Fft: length must be positive");
  Eigen::VectorXcd a(n), b(n);
  std::lock_guard<std::mutex> lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_1d(n, as_fftw(a), as_fftw(b), FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft_1d(n, as_fftw(a), as_fftw(b), FFTW_BACKWARD, flags);
  if (!forward_plan_ || !backward_plan_) throw SolverError("Fft: FFTW planning failed");
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

Fft::Fft(Fft&& other) noexcept
    : n_(other.n_),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      backward_plan_(std::exchange(other.backward_plan_, nullptr)) {}

Fft& Fft::operator=(Fft&& other) noexcept {
  std::swap(n_, other.n_);
  std::swap(forward_plan_, other.forward_plan_);
  std::swap(backward_plan_, other.backward_plan_);
  return *this;
}

Eigen::VectorXcd Fft::forward(const Eigen::VectorXcd& in) const {
  Eigen::VectorXcd out(n_);
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(in), as_fftw(out));
  return out;
}

Eigen::VectorXcd Fft::inverse(const Eigen::VectorXcd& in) const {
  Eigen::VectorXcd out(n_);
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(in), as_fftw(out));
  return out / static_cast<double>(n_);
}

}  // namespace ptbands
