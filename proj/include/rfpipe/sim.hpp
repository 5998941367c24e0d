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
#include <vector>

#include "rfpipe/config.hpp"
#include "rfpipe/frame.hpp"

namespace rfpipe::sim {

/// Gaussian-modulated cosine two-way pulse.
class PulseModel {
 public:
  /// frac_bw is the -6 dB fractional bandwidth of the amplitude spectrum.
  explicit PulseModel(double f0 = 5.208e6, double frac_bw = 0.6);

  double f0() const noexcept { return f0_; }
  double frac_bw() const noexcept { return frac_bw_; }
  double sigma_f() const noexcept { return sigma_f_; }
  double sigma_t() const noexcept { return sigma_t_; }

  /// Envelope -6 dB (half amplitude) duration.
  double fwhm() const noexcept;
  /// Half-width beyond which the simulator truncates the pulse.
  double support() const noexcept;

  /// Minimum sampling rate accepted by the simulator: 2 (1 + frac_bw) f0.
  double min_fs() const noexcept { return 2.0 * (1.0 + frac_bw_) * f0_; }

 private:
  double f0_;
  double frac_bw_;
  double sigma_f_;
  double sigma_t_;
};

/// exp(-t^2 / (2 sigma_t^2)) cos(2 pi f0 t)
double pulse_eval(const PulseModel& pulse, double t);

struct ScattererCloud {
  std::vector<double> x;
  std::vector<double> z;
  std::vector<double> amp;

  std::size_t size() const noexcept { return amp.size(); }
  ScattererCloud scaled(double alpha) const;
  /// Concatenation, this cloud's scatterers first.
  ScattererCloud merged(const ScattererCloud& other) const;
};

/// Uniform positions at the requested density (count = round(density * area
/// in mm^2)), amplitudes ~ N(0, amp_sigma^2), cyst interiors emptied, point
/// target appended last with amplitude 10^(gain/20) * RMS(diffuse).
ScattererCloud sample_phantom(const Phantom& phantom);

/// Amplitude sample_phantom assigns to the point target.
double point_target_amplitude(const ScattererCloud& diffuse, const Phantom& phantom);

/// Sample grid t_k = t0 + k / fs, k < n_samples.
struct TimeSpan {
  double t0 = 0.0;
  std::uint32_t n_samples = 0;
};

/// Span from t = 0 to the longest two-way path between any element and
/// any point of the phantom extent, plus the pulse support.
TimeSpan auto_span(const Phantom& phantom, const ProbeGeometry& probe, const PulseModel& pulse,
                   double fs, double c = 1540.0);

struct FsaSettings {
  double fs = 20.832e6;
  double c = 1540.0;
};

/// R[t, j, i] = sum_s a_s pulse(t - (d(i,s) + d(s,j)) / c), i transmits and
/// j receives. Output is a FsaTensor with dims (n_t, n_rx, n_tx).
RFFrame simulate_fsa(const ScattererCloud& cloud, const ProbeGeometry& probe,
                     const PulseModel& pulse, const FsaSettings& settings, const TimeSpan& span);

/// Same contract, evaluated by the plain serial reference kernel.
RFFrame simulate_fsa_reference(const ScattererCloud& cloud, const ProbeGeometry& probe,
                               const PulseModel& pulse, const FsaSettings& settings,
                               const TimeSpan& span);

/// Gaussian-smoothed white noise over the elements (kernel std = corr_len
/// elements), mean removed, rescaled to RMS = rms_ns.
AberrationProfile gen_aberration(std::uint32_t n_elements, double rms_ns,
                                 double corr_len_elements, std::uint64_t seed);

struct PlaneWaveTx {
  double angle_rad = 0.0;

  /// Non-negative firing delays; all zero at normal incidence.
  std::vector<double> delays(const ProbeGeometry& probe, double c) const;
};

struct SynthOptions {
  bool aberrate_transmit = true;
  bool aberrate_receive = true;
};

/// PW[t, j] = sum_i R[t - D_i - a_i - a_j, j, i] with linear interpolation in
/// time (samples outside the record read as zero).
RFFrame synth_planewave(const RFFrame& fsa, const PlaneWaveTx& tx, const AberrationProfile& ab,
                        const SynthOptions& options = {});

RFFrame synth_planewave_reference(const RFFrame& fsa, const PlaneWaveTx& tx,
                                  const AberrationProfile& ab, const SynthOptions& options = {});

/// Zero-phase low-pass at the new Nyquist (5% raised-cosine taper), then
/// every factor-th sample. Aliasing if the new rate is below
/// 2 (1 + frac_bw) f0.
RFFrame downsample(const RFFrame& frame, std::uint32_t factor, double frac_bw = 0.6);

}  // namespace rfpipe::sim
