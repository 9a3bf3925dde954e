#pragma once

#include <Eigen/Dense>

namespace ptbands {

/// Complex 1D DFT of fixed length backed by FFTW. forward computes
/// U_q = sum_j u_j e^{-2 pi i q j / n}; backward is the unnormalized inverse.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&& other) noexcept;
  Fft& operator=(Fft&& other) noexcept;

  int size() const { return n_; }
  Eigen::VectorXcd forward(const Eigen::VectorXcd& in) const;
  /// Includes the 1/n factor, so backward(forward(u)) == u.
  Eigen::VectorXcd inverse(const Eigen::VectorXcd& in) const;

 private:
  int n_ = 0;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

}  // namespace ptbands
