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

#include <cmath>

#include "rfpipe/kernels.hpp"

namespace rfpipe::kernels {

double interp_zero_extended(std::span<const double> x, double u) {
  const double base = std::floor(u);
  const double frac = u - base;
  const auto n = static_cast<std::int64_t>(x.size());
  if (base < -1.0 || base > static_cast<double>(n - 1)) return 0.0;
  const auto i0 = static_cast<std::int64_t>(base);
  const double lo = (i0 >= 0) ? x[i0] : 0.0;
  if (frac == 0.0) return lo;
  const double hi = (i0 + 1 < n) ? x[i0 + 1] : 0.0;
  return (1.0 - frac) * lo + frac * hi;
}

void synth_reference(const SynthProblem& p, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t nt = p.n_t;
  for (std::size_t j = 0; j < p.n_e; ++j) {
    for (std::size_t i = 0; i < p.n_e; ++i) {
      const auto trace = p.fsa.subspan(nt * (j + p.n_e * i), nt);
      const double shift = (p.tx_shift[i] + p.rx_shift[j]) * p.fs;
      for (std::size_t k = 0; k < nt; ++k) {
        out[k + nt * j] += interp_zero_extended(trace, static_cast<double>(k) - shift);
      }
    }
  }
}

// Per (i, j) the delay is constant, so the interpolation weights are hoisted:
// with shift = m + f (m integer, 0 <= f < 1),
//   R(k - shift) = f R[k - m - 1] + (1 - f) R[k - m].
void synth_parallel(const SynthProblem& p, std::span<double> out) {
  const std::int64_t nt = p.n_t;
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < static_cast<std::int64_t>(p.n_e); ++j) {
    double* dst = out.data() + nt * j;
    std::fill(dst, dst + nt, 0.0);
    for (std::size_t i = 0; i < p.n_e; ++i) {
      const double* src = p.fsa.data() + nt * (j + static_cast<std::int64_t>(p.n_e) * i);
      const double shift = (p.tx_shift[i] + p.rx_shift[j]) * p.fs;
      const double mf = std::floor(shift);
      const double f = shift - mf;
      const auto m = static_cast<std::int64_t>(mf);
      // k - m in [0, nt) for the (1 - f) tap, k - m - 1 in [0, nt) for the f tap.
      const std::int64_t k_begin = std::max<std::int64_t>(0, m);
      const std::int64_t k_end = std::min<std::int64_t>(nt, nt + m + 1);
      if (f == 0.0) {
        for (std::int64_t k = std::max<std::int64_t>(0, m); k < std::min<std::int64_t>(nt, nt + m); ++k) {
          dst[k] += src[k - m];
        }
        continue;
      }
      const double g = 1.0 - f;
      for (std::int64_t k = k_begin; k < k_end; ++k) {
        const double hi = (k - m < nt) ? src[k - m] : 0.0;
        const double lo = (k - m - 1 >= 0) ? src[k - m - 1] : 0.0;
        dst[k] += g * hi + f * lo;
      }
    }
  }
}

}  // namespace rfpipe::kernels
