#include "egomwf/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "egomwf/error.hpp"

namespace egomwf {

namespace {
// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Impl {
  std::size_t n;
  double* real;
  fftw_complex* spec;
  fftw_plan fwd;
  fftw_plan inv;

  explicit Impl(std::size_t size) : n(size) {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    const int len = static_cast<int>(n);
    fwd = fftw_plan_dft_r2c_1d(len, real, spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(len, spec, real, FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
  }
};

RealFft::RealFft(std::size_t size) {
  if (size < 2 || size % 2 != 0) throw Error("RealFft: size must be even and >= 2");
  impl_ = std::make_unique<Impl>(size);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

std::size_t RealFft::size() const noexcept { return impl_->n; }

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  const std::size_t n = impl_->n;
  if (in.size() > n || out.size() < bins()) throw Error("RealFft::forward: bad buffer sizes");
  std::copy(in.begin(), in.end(), impl_->real);
  std::fill(impl_->real + in.size(), impl_->real + n, 0.0);
  fftw_execute(impl_->fwd);
  for (std::size_t k = 0; k < bins(); ++k) out[k] = {impl_->spec[k][0], impl_->spec[k][1]};
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  const std::size_t n = impl_->n;
  if (in.size() < bins() || out.size() < n) throw Error("RealFft::inverse: bad buffer sizes");
  for (std::size_t k = 0; k < bins(); ++k) {
    impl_->spec[k][0] = in[k].real();
    impl_->spec[k][1] = in[k].imag();
  }
  // c2r ignores the imaginary part of DC/Nyquist; make that explicit.
  impl_->spec[0][1] = 0.0;
  impl_->spec[n / 2][1] = 0.0;
  fftw_execute(impl_->inv);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = impl_->real[t] * scale;
}

}  // namespace egomwf
