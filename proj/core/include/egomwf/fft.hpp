#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace egomwf {

// Real-input FFT of fixed size backed by FFTW. Instances are not shared
// between threads; construct one per worker.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept;
  std::size_t bins() const noexcept { return size() / 2 + 1; }

  // Unnormalized one-sided forward transform; `in` may be shorter than size()
  // (zero-padded). `out` must hold bins() values.
  void forward(std::span<const double> in, std::span<std::complex<double>> out);

  // Inverse of forward() including the 1/size scaling. `out` holds size() values.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace egomwf
