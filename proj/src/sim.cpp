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

#include "rfpipe/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rfpipe/error.hpp"
#include "rfpipe/kernels.hpp"
#include "rfpipe/rng.hpp"
#include "rfpipe/spectral.hpp"
#include "rfpipe/summation.hpp"

namespace rfpipe::sim {

namespace {

// Pulse truncated at +-6 sigma_t (envelope 1.5e-8 of peak).
constexpr double kSupportSigmas = 6.0;

const double kFwhmFactor = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

}  // namespace

PulseModel::PulseModel(double f0, double frac_bw) : f0_(f0), frac_bw_(frac_bw) {
  if (!(f0 > 0) || !(frac_bw > 0) || !std::isfinite(f0) || !std::isfinite(frac_bw)) {
    throw Error(ErrorCode::InvalidArgument, "pulse needs f0 > 0 and frac_bw > 0");
  }
  sigma_f_ = frac_bw * f0 / kFwhmFactor;
  sigma_t_ = 1.0 / (2.0 * std::numbers::pi * sigma_f_);
}

double PulseModel::fwhm() const noexcept { return kFwhmFactor * sigma_t_; }
double PulseModel::support() const noexcept { return kSupportSigmas * sigma_t_; }

double pulse_eval(const PulseModel& pulse, double t) {
  const double s = pulse.sigma_t();
  return std::exp(-t * t / (2.0 * s * s)) * std::cos(2.0 * std::numbers::pi * pulse.f0() * t);
}

ScattererCloud ScattererCloud::scaled(double alpha) const {
  ScattererCloud out = *this;
  for (double& a : out.amp) a *= alpha;
  return out;
}

ScattererCloud ScattererCloud::merged(const ScattererCloud& other) const {
  ScattererCloud out = *this;
  out.x.insert(out.x.end(), other.x.begin(), other.x.end());
  out.z.insert(out.z.end(), other.z.begin(), other.z.end());
  out.amp.insert(out.amp.end(), other.amp.begin(), other.amp.end());
  return out;
}

double point_target_amplitude(const ScattererCloud& diffuse, const Phantom& phantom) {
  const double gain_db = phantom.point_target ? phantom.point_target->gain_db : 0.0;
  const double ref = diffuse.size() > 0 ? rms(diffuse.amp) : phantom.amp_sigma;
  return std::pow(10.0, gain_db / 20.0) * ref;
}

ScattererCloud sample_phantom(const Phantom& phantom) {
  validate(phantom);
  const double area_mm2 = phantom.width_m * phantom.depth_m * 1e6;
  const auto count = static_cast<std::size_t>(std::llround(phantom.scatterer_density * area_mm2));

  Rng rng(phantom.seed);
  ScattererCloud cloud;
  cloud.x.reserve(count);
  cloud.z.reserve(count);
  cloud.amp.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    // Always draw all three values so the stream does not depend on the cysts.
    const double x = rng.uniform(-phantom.width_m / 2, phantom.width_m / 2);
    const double z = rng.uniform(0.0, phantom.depth_m);
    const double a = phantom.amp_sigma * rng.normal();
    const bool in_cyst = std::any_of(phantom.cysts.begin(), phantom.cysts.end(), [&](const Cyst& c) {
      return (x - c.x_m) * (x - c.x_m) + (z - c.z_m) * (z - c.z_m) < c.r_m * c.r_m;
    });
    if (in_cyst) continue;
    cloud.x.push_back(x);
    cloud.z.push_back(z);
    cloud.amp.push_back(a);
  }
  if (phantom.point_target) {
    const double a = point_target_amplitude(cloud, phantom);
    cloud.x.push_back(phantom.point_target->x_m);
    cloud.z.push_back(phantom.point_target->z_m);
    cloud.amp.push_back(a);
  }
  return cloud;
}

TimeSpan auto_span(const Phantom& phantom, const ProbeGeometry& probe, const PulseModel& pulse,
                   double fs, double c) {
  const double x_far = phantom.width_m / 2 + probe.aperture_half_width();
  const double d_max = std::hypot(x_far, phantom.depth_m);
  const double t_end = 2.0 * d_max / c + pulse.support();
  return {0.0, static_cast<std::uint32_t>(std::ceil(t_end * fs)) + 1};
}

namespace {

kernels::FsaProblem fsa_problem(const ScattererCloud& cloud, const ProbeGeometry& probe,
                                const PulseModel& pulse, const FsaSettings& settings,
                                const TimeSpan& span) {
  if (!(settings.fs > pulse.min_fs())) {
    throw Error(ErrorCode::Aliasing, "fs " + std::to_string(settings.fs) +
                                         " Hz must exceed 2 (1 + frac_bw) f0 = " +
                                         std::to_string(pulse.min_fs()) + " Hz");
  }
  if (!(settings.c > 0)) throw Error(ErrorCode::InvalidArgument, "sound speed must be > 0");
  if (span.n_samples == 0) throw Error(ErrorCode::EmptySpan, "time span holds no samples");
  if (cloud.x.size() != cloud.amp.size() || cloud.z.size() != cloud.amp.size()) {
    throw Error(ErrorCode::DimensionMismatch, "scatterer cloud arrays differ in length");
  }

  // Longest two-way path in the cloud must end inside the record.
  double t_max = 0.0;
  const auto& ex = probe.positions();
  for (std::size_t s = 0; s < cloud.size(); ++s) {
    const double far = std::max(std::hypot(cloud.x[s] - ex.front(), cloud.z[s]),
                                std::hypot(cloud.x[s] - ex.back(), cloud.z[s]));
    t_max = std::max(t_max, 2.0 * far / settings.c);
  }
  const double t_last = span.t0 + static_cast<double>(span.n_samples - 1) / settings.fs;
  if (t_max > t_last) {
    throw Error(ErrorCode::SpanTooShort, "time span ends at " + std::to_string(t_last) +
                                             " s, echoes arrive until " + std::to_string(t_max) + " s");
  }

  kernels::FsaProblem p;
  p.sx = cloud.x;
  p.sz = cloud.z;
  p.amp = cloud.amp;
  p.ex = probe.positions();
  p.c = settings.c;
  p.f0 = pulse.f0();
  p.sigma_t = pulse.sigma_t();
  p.half_width = pulse.support();
  p.fs = settings.fs;
  p.t0 = span.t0;
  p.n_t = span.n_samples;
  return p;
}

RFFrame fsa_frame(const ProbeGeometry& probe, const PulseModel& pulse, const FsaSettings& settings,
                  const TimeSpan& span, std::vector<double> data) {
  Acquisition acq;
  acq.fs = settings.fs;
  acq.f0 = pulse.f0();
  acq.c = settings.c;
  acq.t0 = span.t0;
  acq.pitch = probe.pitch();
  return RFFrame(FrameKind::FsaTensor, {span.n_samples, probe.n_elements(), probe.n_elements()}, acq,
                 std::move(data));
}

}  // namespace

RFFrame simulate_fsa(const ScattererCloud& cloud, const ProbeGeometry& probe,
                     const PulseModel& pulse, const FsaSettings& settings, const TimeSpan& span) {
  const auto p = fsa_problem(cloud, probe, pulse, settings, span);
  std::vector<double> data(static_cast<std::size_t>(span.n_samples) * probe.n_elements() *
                           probe.n_elements());
  kernels::fsa_parallel(p, data);
  return fsa_frame(probe, pulse, settings, span, std::move(data));
}

RFFrame simulate_fsa_reference(const ScattererCloud& cloud, const ProbeGeometry& probe,
                               const PulseModel& pulse, const FsaSettings& settings,
                               const TimeSpan& span) {
  const auto p = fsa_problem(cloud, probe, pulse, settings, span);
  std::vector<double> data(static_cast<std::size_t>(span.n_samples) * probe.n_elements() *
                           probe.n_elements());
  kernels::fsa_reference(p, data);
  return fsa_frame(probe, pulse, settings, span, std::move(data));
}

AberrationProfile gen_aberration(std::uint32_t n_elements, double rms_ns, double corr_len_elements,
                                 std::uint64_t seed) {
  if (n_elements == 0) throw Error(ErrorCode::InvalidArgument, "aberration needs n_elements >= 1");
  if (!(rms_ns >= 0) || !std::isfinite(rms_ns)) {
    throw Error(ErrorCode::InvalidArgument, "aberration rms_ns must be >= 0");
  }
  if (!(corr_len_elements > 0) || !std::isfinite(corr_len_elements)) {
    throw Error(ErrorCode::InvalidArgument, "aberration corr_len_elements must be > 0");
  }
  AberrationProfile prof;
  prof.rms_ns = rms_ns;
  prof.corr_len_elements = corr_len_elements;
  prof.seed = seed;
  prof.delays_s.assign(n_elements, 0.0);
  if (rms_ns == 0.0) return prof;

  // Noise is drawn over an extended support so every output element sees the
  // full kernel (no edge effects).
  const auto radius = static_cast<std::size_t>(std::ceil(4.0 * corr_len_elements));
  std::vector<double> kernel(2 * radius + 1);
  for (std::size_t k = 0; k < kernel.size(); ++k) {
    const double d = static_cast<double>(k) - static_cast<double>(radius);
    kernel[k] = std::exp(-d * d / (2.0 * corr_len_elements * corr_len_elements));
  }
  Rng rng(seed);
  std::vector<double> noise(n_elements + 2 * radius);
  for (double& v : noise) v = rng.normal();

  std::vector<double> smooth(n_elements);
  for (std::size_t e = 0; e < n_elements; ++e) {
    CompensatedSum acc;
    for (std::size_t k = 0; k < kernel.size(); ++k) acc.add(kernel[k] * noise[e + k]);
    smooth[e] = acc.value();
  }
  const double mean = compensated_mean(smooth);
  for (double& v : smooth) v -= mean;
  const double r = rms(smooth);
  if (r == 0.0) return prof;  // single element: mean removal leaves nothing
  const double scale = rms_ns * 1e-9 / r;
  for (std::size_t e = 0; e < n_elements; ++e) prof.delays_s[e] = smooth[e] * scale;
  return prof;
}

std::vector<double> PlaneWaveTx::delays(const ProbeGeometry& probe, double c) const {
  const auto& x = probe.positions();
  std::vector<double> d(x.size(), 0.0);
  if (angle_rad == 0.0) return d;
  const double s = std::sin(angle_rad);
  double lo = x.front() * s;
  for (double xe : x) lo = std::min(lo, xe * s);
  for (std::size_t e = 0; e < x.size(); ++e) d[e] = (x[e] * s - lo) / c;
  return d;
}

namespace {

struct SynthInputs {
  std::vector<double> tx_shift;
  std::vector<double> rx_shift;
  kernels::SynthProblem problem;
};

SynthInputs synth_inputs(const RFFrame& fsa, const PlaneWaveTx& tx, const AberrationProfile& ab,
                         const SynthOptions& options) {
  if (fsa.kind() != FrameKind::FsaTensor) {
    throw Error(ErrorCode::DimensionMismatch, "plane-wave synthesis needs an FSA tensor");
  }
  const std::uint32_t ne = fsa.dims().n1;
  if (fsa.dims().n2 != ne || ne < 2) {
    throw Error(ErrorCode::DimensionMismatch, "FSA tensor must be square in (receive, transmit)");
  }
  if (!ab.delays_s.empty() && ab.delays_s.size() != ne) {
    throw Error(ErrorCode::DimensionMismatch,
                "aberration has " + std::to_string(ab.delays_s.size()) + " delays for " +
                    std::to_string(ne) + " elements");
  }
  if (!(fsa.acq().pitch > 0)) throw Error(ErrorCode::InvalidArgument, "FSA header has no pitch");
  const ProbeGeometry probe(ne, fsa.acq().pitch);

  SynthInputs in;
  in.tx_shift = tx.delays(probe, fsa.acq().c);
  in.rx_shift.assign(ne, 0.0);
  if (!ab.delays_s.empty()) {
    for (std::uint32_t e = 0; e < ne; ++e) {
      if (options.aberrate_transmit) in.tx_shift[e] += ab.delays_s[e];
      if (options.aberrate_receive) in.rx_shift[e] = ab.delays_s[e];
    }
  }
  in.problem.fsa = fsa.samples();
  in.problem.tx_shift = in.tx_shift;
  in.problem.rx_shift = in.rx_shift;
  in.problem.fs = fsa.acq().fs;
  in.problem.n_t = fsa.dims().n0;
  in.problem.n_e = ne;
  return in;
}

RFFrame channel_frame(const RFFrame& fsa, std::vector<double> data) {
  return RFFrame(FrameKind::ChannelData, {fsa.dims().n0, fsa.dims().n1, 1}, fsa.acq(),
                 std::move(data));
}

}  // namespace

RFFrame synth_planewave(const RFFrame& fsa, const PlaneWaveTx& tx, const AberrationProfile& ab,
                        const SynthOptions& options) {
  const SynthInputs in = synth_inputs(fsa, tx, ab, options);
  std::vector<double> data(static_cast<std::size_t>(fsa.dims().n0) * fsa.dims().n1);
  kernels::synth_parallel(in.problem, data);
  return channel_frame(fsa, std::move(data));
}

RFFrame synth_planewave_reference(const RFFrame& fsa, const PlaneWaveTx& tx,
                                  const AberrationProfile& ab, const SynthOptions& options) {
  const SynthInputs in = synth_inputs(fsa, tx, ab, options);
  std::vector<double> data(static_cast<std::size_t>(fsa.dims().n0) * fsa.dims().n1);
  kernels::synth_reference(in.problem, data);
  return channel_frame(fsa, std::move(data));
}

RFFrame downsample(const RFFrame& frame, std::uint32_t factor, double frac_bw) {
  if (factor < 1) throw Error(ErrorCode::InvalidArgument, "downsample factor must be >= 1");
  if (factor == 1) return frame;
  const double fs_new = frame.acq().fs / factor;
  const double fs_min = 2.0 * (1.0 + frac_bw) * frame.acq().f0;
  if (!(fs_new > fs_min)) {
    throw Error(ErrorCode::Aliasing, "decimated rate " + std::to_string(fs_new) +
                                         " Hz must exceed " + std::to_string(fs_min) + " Hz");
  }
  const Dims in_dims = frame.dims();
  const std::uint32_t n_out = (in_dims.n0 + factor - 1) / factor;
  const std::size_t n_cols = static_cast<std::size_t>(in_dims.n1) * in_dims.n2;
  std::vector<double> out(n_out * n_cols);
  const double cutoff = 0.5 / factor;

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t col = 0; col < static_cast<std::int64_t>(n_cols); ++col) {
    const auto x = frame.samples().subspan(static_cast<std::size_t>(col) * in_dims.n0, in_dims.n0);
    const auto filtered = spectral::lowpass(x, cutoff, 0.05);
    for (std::uint32_t k = 0; k < n_out; ++k) {
      out[static_cast<std::size_t>(col) * n_out + k] = filtered[static_cast<std::size_t>(k) * factor];
    }
  }
  Acquisition acq = frame.acq();
  acq.fs = fs_new;
  if (frame.kind() == FrameKind::Image) acq.dz *= factor;
  return RFFrame(frame.kind(), {n_out, in_dims.n1, in_dims.n2}, acq, std::move(out));
}

}  // namespace rfpipe::sim
