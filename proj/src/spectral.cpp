/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rfpipe/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

namespace rfpipe::spectral {

namespace {

// FFTW planning is not thread-safe; execution with new-array functions is.
// Plans are cached per (kind, n) and arrays always come from fftw_malloc so
// both the plan and every execution see the same alignment.
enum class PlanKind { Forward, Backward, R2C, C2R };

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan cached_plan(PlanKind kind, int n) {
  static std::map<std::pair<PlanKind, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = plans.find({kind, n});
  if (it != plans.end()) return it->second;

  double* r = fftw_alloc_real(n);
  fftw_complex* a = fftw_alloc_complex(n);
  fftw_complex* b = fftw_alloc_complex(n);
  fftw_plan p = nullptr;
  switch (kind) {
    case PlanKind::Forward: p = fftw_plan_dft_1d(n, a, b, FFTW_FORWARD, FFTW_ESTIMATE); break;
    case PlanKind::Backward: p = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, FFTW_ESTIMATE); break;
    case PlanKind::R2C: p = fftw_plan_dft_r2c_1d(n, r, a, FFTW_ESTIMATE); break;
    case PlanKind::C2R: p = fftw_plan_dft_c2r_1d(n, a, r, FFTW_ESTIMATE); break;
  }
  fftw_free(r);
  fftw_free(a);
  fftw_free(b);
  plans.emplace(std::make_pair(kind, n), p);
  return p;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuf = std::unique_ptr<double[], FftwDeleter>;
using ComplexBuf = std::unique_ptr<fftw_complex[], FftwDeleter>;

RealBuf real_buffer(std::size_t n) { return RealBuf(fftw_alloc_real(n)); }
ComplexBuf complex_buffer(std::size_t n) { return ComplexBuf(fftw_alloc_complex(n)); }

}  // namespace

std::vector<std::complex<double>> analytic_signal(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<std::complex<double>> out(x.size());
  if (n == 0) return out;
  auto in = complex_buffer(n);
  auto spec = complex_buffer(n);
  for (int k = 0; k < n; ++k) {
    in[k][0] = x[k];
    in[k][1] = 0.0;
  }
  fftw_execute_dft(cached_plan(PlanKind::Forward, n), in.get(), spec.get());

  // Weights: 1 at DC (and Nyquist for even n), 2 for positive, 0 for negative.
  const int half = n / 2;
  for (int k = 1; k < n; ++k) {
    double w;
    if (n % 2 == 0 && k == half) w = 1.0;
    else if (k <= (n - 1) / 2) w = 2.0;
    else w = 0.0;
    spec[k][0] *= w;
    spec[k][1] *= w;
  }
  fftw_execute_dft(cached_plan(PlanKind::Backward, n), spec.get(), in.get());
  const double scale = 1.0 / n;
  for (int k = 0; k < n; ++k) out[k] = {in[k][0] * scale, in[k][1] * scale};
  return out;
}

std::vector<double> amplitude_spectrum(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  auto in = real_buffer(n);
  auto spec = complex_buffer(n / 2 + 1);
  for (int k = 0; k < n; ++k) in[k] = x[k];
  fftw_execute_dft_r2c(cached_plan(PlanKind::R2C, n), in.get(), spec.get());
  std::vector<double> mag(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) mag[k] = std::hypot(spec[k][0], spec[k][1]);
  return mag;
}

std::vector<double> lowpass(std::span<const double> x, double cutoff_over_fs, double taper) {
  const int n = static_cast<int>(x.size());
  std::vector<double> out(x.size());
  if (n == 0) return out;
  auto buf = real_buffer(n);
  auto spec = complex_buffer(n / 2 + 1);
  for (int k = 0; k < n; ++k) buf[k] = x[k];
  fftw_execute_dft_r2c(cached_plan(PlanKind::R2C, n), buf.get(), spec.get());

  const double pass_edge = (1.0 - taper) * cutoff_over_fs;
  for (int k = 0; k <= n / 2; ++k) {
    const double f = static_cast<double>(k) / n;
    double g;
    if (f <= pass_edge) g = 1.0;
    else if (f >= cutoff_over_fs) g = 0.0;
    else g = 0.5 * (1.0 + std::cos(std::numbers::pi * (f - pass_edge) / (cutoff_over_fs - pass_edge)));
    spec[k][0] *= g;
    spec[k][1] *= g;
  }
  fftw_execute_dft_c2r(cached_plan(PlanKind::C2R, n), spec.get(), buf.get());
  const double scale = 1.0 / n;
  for (int k = 0; k < n; ++k) out[k] = buf[k] * scale;
  return out;
}

}  // namespace rfpipe::spectral
