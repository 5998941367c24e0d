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

// Compute kernels. Each has a plain serial reference, kept as the test oracle
// and benchmark baseline, and an OpenMP version used by the public API. Every
// output element of the parallel kernels is produced by exactly one worker in
// a fixed order, so results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <span>

namespace rfpipe::kernels {

/// Samples k with |t0 + k/fs - tau| <= half_width, clipped to [0, n).
struct SampleWindow {
  std::int64_t first = 0;
  std::int64_t last = -1;  // inclusive; empty when last < first
};
SampleWindow pulse_window(double tau, double half_width, double t0, double fs, std::int64_t n);

/// Linear interpolation at fractional index u; samples outside the record are zero.
double interp_zero_extended(std::span<const double> x, double u);

struct FsaProblem {
  std::span<const double> sx, sz, amp;  // scatterers
  std::span<const double> ex;           // element x positions (z = 0)
  double c = 1540.0;
  double f0 = 0.0;
  double sigma_t = 0.0;
  double half_width = 0.0;  // pulse truncation, seconds
  double fs = 0.0;
  double t0 = 0.0;
  std::uint32_t n_t = 0;
};

/// out has n_t * n_e * n_e entries, layout [k + n_t (j + n_e i)].
void fsa_reference(const FsaProblem& p, std::span<double> out);
void fsa_parallel(const FsaProblem& p, std::span<double> out);

struct SynthProblem {
  std::span<const double> fsa;       // [k + n_t (j + n_e i)]
  std::span<const double> tx_shift;  // seconds per transmit element
  std::span<const double> rx_shift;  // seconds per receive element
  double fs = 0.0;
  std::uint32_t n_t = 0;
  std::uint32_t n_e = 0;
};

/// out has n_t * n_e entries, layout [k + n_t j].
void synth_reference(const SynthProblem& p, std::span<double> out);
void synth_parallel(const SynthProblem& p, std::span<double> out);

enum class Apodization { Rect, Hann };

struct DasProblem {
  std::span<const double> channels;  // [k + n_t j]
  std::span<const double> ex;        // element x positions, ascending
  std::uint32_t n_t = 0;
  double fs = 0.0;
  double t0 = 0.0;
  double c = 1540.0;
  double angle_rad = 0.0;
  double tx_offset = 0.0;  // seconds added to the plane-wave arrival time
  std::uint32_t n_z = 0, n_x = 0;
  double z_start = 0.0, dz = 0.0, dx = 0.0;  // lateral grid centered on 0
  double f_number = 1.0;
  Apodization apod = Apodization::Hann;
};

double das_pixel_x(const DasProblem& p, std::uint32_t ix);
double das_pixel_z(const DasProblem& p, std::uint32_t iz);

/// out has n_z * n_x entries, layout [iz + n_z ix].
void das_reference(const DasProblem& p, std::span<double> out);
void das_parallel(const DasProblem& p, std::span<double> out);

}  // namespace rfpipe::kernels
