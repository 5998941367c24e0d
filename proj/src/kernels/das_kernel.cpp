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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rfpipe/kernels.hpp"

namespace rfpipe::kernels {

double das_pixel_x(const DasProblem& p, std::uint32_t ix) {
  return (static_cast<double>(ix) - 0.5 * (static_cast<double>(p.n_x) - 1.0)) * p.dx;
}

double das_pixel_z(const DasProblem& p, std::uint32_t iz) {
  return p.z_start + static_cast<double>(iz) * p.dz;
}

namespace {

inline bool in_aperture(double x, double xe, double half) { return std::abs(x - xe) <= half; }

inline double apod_weight(Apodization apod, double x, double xe, double half) {
  if (apod == Apodization::Rect) return 1.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (xe - x) / half));
}

inline double tx_time(const DasProblem& p, double x, double z) {
  if (p.angle_rad == 0.0) return z / p.c + p.tx_offset;
  return (z * std::cos(p.angle_rad) + x * std::sin(p.angle_rad)) / p.c + p.tx_offset;
}

inline double beamform_pixel(const DasProblem& p, double x, double z, std::size_t e_begin,
                             std::size_t e_end) {
  const double half = z / (2.0 * p.f_number);
  if (!(half > 0.0)) return 0.0;
  const double t_tx = tx_time(p, x, z);
  double acc = 0.0;
  for (std::size_t j = e_begin; j < e_end; ++j) {
    const double xe = p.ex[j];
    if (!in_aperture(x, xe, half)) continue;
    const double t = t_tx + std::hypot(x - xe, z) / p.c;
    const auto trace = p.channels.subspan(static_cast<std::size_t>(p.n_t) * j, p.n_t);
    acc += apod_weight(p.apod, x, xe, half) * interp_zero_extended(trace, (t - p.t0) * p.fs);
  }
  return acc;
}

}  // namespace

void das_reference(const DasProblem& p, std::span<double> out) {
  for (std::uint32_t ix = 0; ix < p.n_x; ++ix) {
    for (std::uint32_t iz = 0; iz < p.n_z; ++iz) {
      out[iz + static_cast<std::size_t>(p.n_z) * ix] =
          beamform_pixel(p, das_pixel_x(p, ix), das_pixel_z(p, iz), 0, p.ex.size());
    }
  }
}

// Rows in parallel; the element loop is narrowed to the aperture by binary
// search (with a one-element margin) and the exact aperture predicate is
// re-applied, so every pixel is bitwise-equal to the reference.
void das_parallel(const DasProblem& p, std::span<double> out) {
  const std::size_t ne = p.ex.size();
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t iz = 0; iz < static_cast<std::int64_t>(p.n_z); ++iz) {
    const double z = das_pixel_z(p, static_cast<std::uint32_t>(iz));
    const double half = z / (2.0 * p.f_number);
    for (std::uint32_t ix = 0; ix < p.n_x; ++ix) {
      const double x = das_pixel_x(p, ix);
      const auto lo = std::lower_bound(p.ex.begin(), p.ex.end(), x - half);
      const auto hi = std::upper_bound(p.ex.begin(), p.ex.end(), x + half);
      std::size_t e_begin = static_cast<std::size_t>(lo - p.ex.begin());
      std::size_t e_end = static_cast<std::size_t>(hi - p.ex.begin());
      e_begin = e_begin > 0 ? e_begin - 1 : 0;
      e_end = std::min(ne, e_end + 1);
      out[static_cast<std::size_t>(iz) + static_cast<std::size_t>(p.n_z) * ix] =
          beamform_pixel(p, x, z, e_begin, e_end);
    }
  }
}

}  // namespace rfpipe::kernels
