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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rfpipe/beamform.hpp"
#include "rfpipe/frame.hpp"

namespace rfpipe::analysis {

struct Histogram {
  std::vector<double> edges;           // n_bins + 1, ascending
  std::vector<std::uint64_t> counts;   // n_bins
  std::uint64_t total = 0;

  std::size_t n_bins() const noexcept { return counts.size(); }
  /// Mean and population std computed from bin centers.
  double binned_mean() const;
  double binned_std() const;
  /// Fraction of the total in bins whose center lies within [lo, hi].
  double mass_within(double lo, double hi) const;
};

/// Axial half-open sample interval [begin, end).
struct Interval {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Comparison region: the chosen columns, axial samples in `include`
/// (whole column when empty) minus those in `exclude`.
struct RegionMask {
  std::vector<std::uint32_t> columns;
  std::vector<Interval> include;
  std::vector<Interval> exclude;

  /// Selected axial indices for column length n0, ascending.
  std::vector<std::size_t> axial_indices(std::size_t n0) const;
};

RegionMask parse_mask(std::string_view json_text);
nlohmann::json to_json(const RegionMask& mask);

/// Axial vector at column `col` (transmit `i2` for tensors).
std::vector<double> extract_column(const RFFrame& frame, std::uint32_t col, std::uint32_t i2 = 0);
inline std::uint32_t middle_column(const RFFrame& frame) { return frame.dims().n1 / 2; }

/// Counts over [min, max] of the finite samples, or over `range` with
/// out-of-range values clipped into the end bins.
Histogram histogram(std::span<const double> values, std::uint32_t n_bins,
                    std::optional<std::pair<double, double>> range = std::nullopt);
/// 201 bins over [-max|v|, max|v|].
Histogram symmetric_histogram(std::span<const double> values, std::uint32_t n_bins = 201);

/// RMS(a) / RMS(b) over the masked samples.
double amplitude_ratio(std::span<const double> a, std::span<const double> b,
                       std::span<const std::size_t> mask);
/// RMS(a - b) / RMS(a) over the masked samples.
double overlap_error(std::span<const double> a, std::span<const double> b,
                     std::span<const std::size_t> mask);

/// Frame-level forms: samples of every mask column pooled.
double amplitude_ratio(const RFFrame& a, const RFFrame& b, const RegionMask& mask);
double overlap_error(const RFFrame& a, const RFFrame& b, const RegionMask& mask);

/// Excludes samples within +-half_width_s of the two-way arrival `t_arrival`
/// at `column`.
RegionMask spike_exclusion_mask(const RFFrame& frame, std::uint32_t column, double t_arrival,
                                double half_width_s);

/// Pixel indices into BModeImage::db.
struct PixelRegion {
  std::vector<std::size_t> pixels;
};

PixelRegion disk_region(const bf::BModeImage& bmode, double cx, double cz, double r);
PixelRegion annulus_region(const bf::BModeImage& bmode, double cx, double cz, double r_in,
                           double r_out);

/// mean dB(cyst) - mean dB(background).
double contrast(const bf::BModeImage& bmode, const PixelRegion& cyst, const PixelRegion& background);

/// Cyst disk at 0.8 r against a same-area annulus starting at 1.2 r.
double cyst_contrast(const bf::BModeImage& bmode, double cx, double cz, double r);

struct Metric {
  std::string name;
  double value = 0.0;
};

// CSV/JSON writers. Numbers use the shortest round-trip representation.
std::string format_number(double v);
std::string trace_csv(std::span<const double> values, double t0, double fs);
std::string histogram_csv(const Histogram& h);
std::string metrics_json(const std::vector<Metric>& metrics);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rfpipe::analysis
