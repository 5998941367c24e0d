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

#include "rfpipe/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "rfpipe/error.hpp"
#include "rfpipe/spectral.hpp"

namespace rfpipe::bf {

double DasParams::x_at(std::uint32_t ix) const {
  return (static_cast<double>(ix) - 0.5 * (static_cast<double>(n_x) - 1.0)) * dx;
}

double DasParams::z_at(std::uint32_t iz) const { return z_start + static_cast<double>(iz) * dz; }

DasParams make_grid(double half_width_m, double z_start_m, double z_end_m, double dx_m, double fs,
                    double c) {
  if (!(half_width_m >= 0) || !(dx_m > 0) || !(z_end_m > z_start_m) || !(fs > 0) || !(c > 0)) {
    throw Error(ErrorCode::GridOutOfRange, "invalid grid extent");
  }
  DasParams p;
  p.dx = dx_m;
  p.dz = c / (2.0 * fs);
  p.z_start = z_start_m;
  p.n_x = 2 * static_cast<std::uint32_t>(std::floor(half_width_m / dx_m + 1e-9)) + 1;
  p.n_z = static_cast<std::uint32_t>(std::floor((z_end_m - z_start_m) / p.dz + 1e-9)) + 1;
  return p;
}

namespace {

kernels::DasProblem das_problem(const RFFrame& channels, const ProbeGeometry& probe,
                                const DasParams& params) {
  if (channels.kind() != FrameKind::ChannelData || channels.dims().n2 != 1) {
    throw Error(ErrorCode::DimensionMismatch, "delay-and-sum needs a ChannelData frame");
  }
  if (channels.dims().n1 != probe.n_elements()) {
    throw Error(ErrorCode::DimensionMismatch,
                "frame has " + std::to_string(channels.dims().n1) + " channels, probe has " +
                    std::to_string(probe.n_elements()) + " elements");
  }
  if (params.n_z == 0 || params.n_x == 0 || !(params.dz > 0) || !(params.dx > 0) ||
      !(params.z_start >= 0) || !std::isfinite(params.z_start)) {
    throw Error(ErrorCode::GridOutOfRange, "grid needs n_z, n_x >= 1, dx, dz > 0 and z_start >= 0");
  }
  if (!(params.f_number > 0)) throw Error(ErrorCode::InvalidArgument, "f_number must be > 0");

  const Acquisition& acq = channels.acq();
  // The deepest on-axis pixel must be reachable within the record.
  const double z_max = params.z_at(params.n_z - 1);
  const double t_last = acq.t0 + static_cast<double>(channels.dims().n0 - 1) / acq.fs;
  if (2.0 * z_max / acq.c > t_last) {
    throw Error(ErrorCode::GridOutOfRange, "grid depth " + std::to_string(z_max) +
                                               " m exceeds the recorded time span");
  }

  kernels::DasProblem p;
  p.channels = channels.samples();
  p.ex = probe.positions();
  p.n_t = channels.dims().n0;
  p.fs = acq.fs;
  p.t0 = acq.t0;
  p.c = acq.c;
  p.angle_rad = params.angle_rad;
  if (params.angle_rad != 0.0) {
    const double s = std::sin(params.angle_rad);
    double lo = probe.positions().front() * s;
    for (double xe : probe.positions()) lo = std::min(lo, xe * s);
    p.tx_offset = -lo / acq.c;
  }
  p.n_z = params.n_z;
  p.n_x = params.n_x;
  p.z_start = params.z_start;
  p.dz = params.dz;
  p.dx = params.dx;
  p.f_number = params.f_number;
  p.apod = params.apod;
  return p;
}

RFFrame image_frame(const RFFrame& channels, const DasParams& params, std::vector<double> data) {
  Acquisition acq = channels.acq();
  acq.fs = acq.c / (2.0 * params.dz);
  acq.t0 = 2.0 * params.z_start / acq.c;
  acq.dx = params.dx;
  acq.dz = params.dz;
  return RFFrame(FrameKind::Image, {params.n_z, params.n_x, 1}, acq, std::move(data));
}

}  // namespace

RFFrame das(const RFFrame& channels, const ProbeGeometry& probe, const DasParams& params) {
  const auto p = das_problem(channels, probe, params);
  std::vector<double> data(static_cast<std::size_t>(params.n_z) * params.n_x);
  kernels::das_parallel(p, data);
  return image_frame(channels, params, std::move(data));
}

RFFrame das_reference(const RFFrame& channels, const ProbeGeometry& probe, const DasParams& params) {
  const auto p = das_problem(channels, probe, params);
  std::vector<double> data(static_cast<std::size_t>(params.n_z) * params.n_x);
  kernels::das_reference(p, data);
  return image_frame(channels, params, std::move(data));
}

RFFrame envelope(const RFFrame& image) {
  const Dims d = image.dims();
  if (d.n0 < 4) throw Error(ErrorCode::InvalidArgument, "envelope needs at least 4 axial samples");
  const std::size_t n_cols = static_cast<std::size_t>(d.n1) * d.n2;
  std::vector<double> out(image.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t col = 0; col < static_cast<std::int64_t>(n_cols); ++col) {
    const auto x = image.samples().subspan(static_cast<std::size_t>(col) * d.n0, d.n0);
    const auto analytic = spectral::analytic_signal(x);
    for (std::size_t k = 0; k < d.n0; ++k) {
      out[static_cast<std::size_t>(col) * d.n0 + k] = std::abs(analytic[k]);
    }
  }
  return image.with_samples(std::move(out));
}

BModeImage log_compress(const RFFrame& env, double dynamic_range_db) {
  if (!(dynamic_range_db > 0)) throw Error(ErrorCode::InvalidArgument, "dynamic range must be > 0");
  double peak = 0.0;
  for (double v : env.samples()) {
    if (!std::isfinite(v) || v < 0) {
      throw Error(ErrorCode::InvalidArgument, "envelope must be finite and nonnegative");
    }
    peak = std::max(peak, v);
  }
  if (peak == 0.0) throw Error(ErrorCode::AllZeroFrame, "envelope is all zero");

  BModeImage b;
  b.n_z = env.dims().n0;
  b.n_x = env.dims().n1 * env.dims().n2;
  b.dx = env.acq().dx;
  b.dz = env.acq().dz;
  b.x_start = -0.5 * (static_cast<double>(b.n_x) - 1.0) * b.dx;
  b.z_start = env.acq().t0 * env.acq().c / 2.0;
  b.dynamic_range_db = dynamic_range_db;
  b.db.resize(env.size());
  const auto s = env.samples();
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double level = s[k] > 0 ? 20.0 * std::log10(s[k] / peak) : -dynamic_range_db;
    b.db[k] = std::clamp(level, -dynamic_range_db, 0.0);
  }
  return b;
}

std::vector<std::uint8_t> pgm_bytes(const BModeImage& bmode) {
  const std::string header =
      "P5\n" + std::to_string(bmode.n_x) + " " + std::to_string(bmode.n_z) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + bmode.db.size());
  const double dr = bmode.dynamic_range_db;
  for (std::uint32_t iz = 0; iz < bmode.n_z; ++iz) {
    for (std::uint32_t ix = 0; ix < bmode.n_x; ++ix) {
      const double level = std::clamp(bmode.at(iz, ix), -dr, 0.0);
      out.push_back(static_cast<std::uint8_t>(std::lround(255.0 * (level + dr) / dr)));
    }
  }
  return out;
}

void export_pgm(const BModeImage& bmode, const std::filesystem::path& path) {
  const auto bytes = pgm_bytes(bmode);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace rfpipe::bf
