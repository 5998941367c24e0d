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

#include <filesystem>
#include <string>
#include <vector>

#include "rfpipe/analysis.hpp"
#include "rfpipe/beamform.hpp"
#include "rfpipe/config.hpp"
#include "rfpipe/sim.hpp"

namespace rfpipe::repro {

/// Fixed configuration behind the figure reproductions.
struct Setup {
  Phantom phantom = default_phantom(true, 20240607);  // target included
  ProbeGeometry probe = ProbeGeometry::linear64();
  sim::PulseModel pulse{};
  sim::FsaSettings fsa{};
  bf::DasParams grid{};
  double dynamic_range_db = 50.0;
  double rms_ns = 50.0;
  double corr_len_elements = 6.0;
  std::uint64_t aberration_seed = 77;
  std::uint32_t histogram_bins = 201;
};

/// Normalization pair: 64 elements at 0.3 mm pitch.
Setup pinned_setup();
/// Image-quality checks: 128 elements at 0.15 mm (half-wavelength) pitch,
/// same aperture; avoids the transmit grating lobe of the isotropic
/// element model at one-wavelength pitch.
Setup imaging_setup();

/// Spike-exclusion half-width: three pulse lengths, a pulse length being
/// the full duration of the truncated two-way pulse.
double spike_half_width(const sim::PulseModel& pulse);

/// Unaberrated beamformed RF images of the no-target (a) and with-target (b)
/// phantoms, plus the spike-excluded middle-column mask.
struct Pair {
  RFFrame a;
  RFFrame b;
  std::uint32_t column = 0;
  double t_target = 0.0;
  analysis::RegionMask mask;
};

/// FSA tensors for the two phantom variants (shared diffuse cloud).
struct PairFsa {
  RFFrame a;
  RFFrame b;
};

PairFsa simulate_pair_fsa(const Setup& setup);
/// 0-degree plane wave synthesized from `fsa` (with `ab` unless empty), then DAS.
RFFrame image_from_fsa(const Setup& setup, const RFFrame& fsa, const AberrationProfile& ab = {});
Pair make_pair(const Setup& setup, const PairFsa& fsa);
bf::BModeImage bmode(const Setup& setup, const RFFrame& image);

enum class Figure { Fig2, Fig3, Fig4 };
Figure parse_figure(const std::string& name);

struct FigureOutput {
  std::vector<std::filesystem::path> files;
  std::vector<analysis::Metric> metrics;
};

/// Writes the figure's CSV/PGM/JSON files into out_dir.
FigureOutput write_figure(Figure fig, const Setup& setup, const Pair& pair,
                          const std::filesystem::path& out_dir);

/// Full chain with the pinned setup.
FigureOutput run(Figure fig, const std::filesystem::path& out_dir);

}  // namespace rfpipe::repro
