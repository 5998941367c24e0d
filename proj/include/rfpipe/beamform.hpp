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

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rfpipe/config.hpp"
#include "rfpipe/frame.hpp"
#include "rfpipe/kernels.hpp"

namespace rfpipe::bf {

using kernels::Apodization;

/// Reconstruction grid and receive settings. The lateral grid is centered on
/// x = 0: x_k = (k - (n_x - 1)/2) dx; depth rows z_r = z_start + r dz.
struct DasParams {
  std::uint32_t n_z = 0;
  std::uint32_t n_x = 0;
  double dx = 0.0;
  double dz = 0.0;
  double z_start = 0.0;
  double f_number = 1.0;
  Apodization apod = Apodization::Hann;
  double angle_rad = 0.0;

  double x_at(std::uint32_t ix) const;
  double z_at(std::uint32_t iz) const;
};

/// Grid covering |x| <= half_width_m and z in [z_start_m, z_end_m] with
/// dz = c / (2 fs) (one row per RF sample) and the given dx.
DasParams make_grid(double half_width_m, double z_start_m, double z_end_m, double dx_m, double fs,
                    double c);

/// Plane-wave delay-and-sum. Returns an Image frame holding beamformed RF
/// (pre-envelope).
RFFrame das(const RFFrame& channels, const ProbeGeometry& probe, const DasParams& params);
RFFrame das_reference(const RFFrame& channels, const ProbeGeometry& probe, const DasParams& params);

/// Magnitude of the per-column analytic signal.
RFFrame envelope(const RFFrame& image);

struct BModeImage {
  std::uint32_t n_z = 0;
  std::uint32_t n_x = 0;
  std::vector<double> db;  // [iz + n_z ix], within [-dynamic_range_db, 0]
  double dx = 0.0;
  double dz = 0.0;
  double x_start = 0.0;
  double z_start = 0.0;
  double dynamic_range_db = 50.0;

  double at(std::uint32_t iz, std::uint32_t ix) const { return db[iz + static_cast<std::size_t>(n_z) * ix]; }
  double x_at(std::uint32_t ix) const { return x_start + ix * dx; }
  double z_at(std::uint32_t iz) const { return z_start + iz * dz; }
};

/// 20 log10(env / max env), clipped to [-dynamic_range_db, 0].
BModeImage log_compress(const RFFrame& env, double dynamic_range_db = 50.0);

/// Binary 8-bit PGM, [-DR, 0] dB mapped linearly onto [0, 255], top row shallow.
void export_pgm(const BModeImage& bmode, const std::filesystem::path& path);
std::vector<std::uint8_t> pgm_bytes(const BModeImage& bmode);

}  // namespace rfpipe::bf
