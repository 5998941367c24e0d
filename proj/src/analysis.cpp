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

#include "rfpipe/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "rfpipe/error.hpp"
#include "rfpipe/summation.hpp"

namespace rfpipe::analysis {

using nlohmann::json;

double Histogram::binned_mean() const {
  CompensatedSum s;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    s.add(static_cast<double>(counts[b]) * 0.5 * (edges[b] + edges[b + 1]));
  }
  return s.value() / static_cast<double>(total);
}

double Histogram::binned_std() const {
  const double m = binned_mean();
  CompensatedSum s;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const double d = 0.5 * (edges[b] + edges[b + 1]) - m;
    s.add(static_cast<double>(counts[b]) * d * d);
  }
  return std::sqrt(s.value() / static_cast<double>(total));
}

double Histogram::mass_within(double lo, double hi) const {
  std::uint64_t inside = 0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const double center = 0.5 * (edges[b] + edges[b + 1]);
    if (center >= lo && center <= hi) inside += counts[b];
  }
  return total ? static_cast<double>(inside) / static_cast<double>(total) : 0.0;
}

std::vector<std::size_t> RegionMask::axial_indices(std::size_t n0) const {
  std::vector<char> keep(n0, include.empty() ? 1 : 0);
  for (const Interval& iv : include) {
    for (std::size_t k = iv.begin; k < std::min(iv.end, n0); ++k) keep[k] = 1;
  }
  for (const Interval& iv : exclude) {
    for (std::size_t k = iv.begin; k < std::min(iv.end, n0); ++k) keep[k] = 0;
  }
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < n0; ++k) {
    if (keep[k]) idx.push_back(k);
  }
  return idx;
}

namespace {

std::vector<Interval> parse_intervals(const json& j, const std::string& key) {
  std::vector<Interval> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw Error(ErrorCode::Schema, "mask." + key + " must be an array");
  for (const json& iv : j[key]) {
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number_unsigned() ||
        !iv[1].is_number_unsigned() || iv[1].get<std::size_t>() < iv[0].get<std::size_t>()) {
      throw Error(ErrorCode::Schema, "mask." + key + " entries must be [begin, end) index pairs");
    }
    out.push_back({iv[0].get<std::size_t>(), iv[1].get<std::size_t>()});
  }
  return out;
}

struct MaskedPairs {
  std::vector<double> a;
  std::vector<double> b;
};

MaskedPairs gather(std::span<const double> a, std::span<const double> b,
                   std::span<const std::size_t> mask) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "compared signals differ in length");
  }
  if (mask.empty()) throw Error(ErrorCode::Region, "comparison mask is empty");
  MaskedPairs out;
  out.a.reserve(mask.size());
  out.b.reserve(mask.size());
  for (std::size_t k : mask) {
    if (k >= a.size()) throw Error(ErrorCode::Region, "mask index outside the signal");
    out.a.push_back(a[k]);
    out.b.push_back(b[k]);
  }
  return out;
}

MaskedPairs gather(const RFFrame& a, const RFFrame& b, const RegionMask& mask) {
  if (a.dims() != b.dims()) throw Error(ErrorCode::DimensionMismatch, "compared frames differ in shape");
  if (mask.columns.empty()) throw Error(ErrorCode::Region, "mask selects no columns");
  const auto axial = mask.axial_indices(a.dims().n0);
  MaskedPairs out;
  for (std::uint32_t col : mask.columns) {
    if (col >= a.dims().n1) throw Error(ErrorCode::Region, "mask column " + std::to_string(col) + " outside frame");
    const auto pa = gather(a.column(col), b.column(col), axial);
    out.a.insert(out.a.end(), pa.a.begin(), pa.a.end());
    out.b.insert(out.b.end(), pa.b.begin(), pa.b.end());
  }
  return out;
}

double ratio_of(const MaskedPairs& p) {
  const double den = rms(p.b);
  if (den == 0.0) throw Error(ErrorCode::ZeroDenominator, "reference signal is zero over the mask");
  return rms(p.a) / den;
}

double overlap_of(const MaskedPairs& p) {
  const double den = rms(p.a);
  if (den == 0.0) throw Error(ErrorCode::ZeroDenominator, "reference signal is zero over the mask");
  std::vector<double> diff(p.a.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = p.a[k] - p.b[k];
  return rms(diff) / den;
}

}  // namespace

RegionMask parse_mask(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Schema, std::string("malformed mask JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Schema, "mask must be a JSON object");
  for (const auto& item : j.items()) {
    if (item.key() != "columns" && item.key() != "include" && item.key() != "exclude") {
      throw Error(ErrorCode::Schema, "mask: unknown field '" + item.key() + "'");
    }
  }
  RegionMask m;
  if (!j.contains("columns") || !j["columns"].is_array()) {
    throw Error(ErrorCode::Schema, "mask.columns must be an array of column indices");
  }
  for (const json& c : j["columns"]) {
    if (!c.is_number_unsigned()) throw Error(ErrorCode::Schema, "mask.columns must hold indices");
    m.columns.push_back(c.get<std::uint32_t>());
  }
  m.include = parse_intervals(j, "include");
  m.exclude = parse_intervals(j, "exclude");
  return m;
}

json to_json(const RegionMask& mask) {
  json j;
  j["columns"] = mask.columns;
  auto intervals = [](const std::vector<Interval>& v) {
    json a = json::array();
    for (const Interval& iv : v) a.push_back({iv.begin, iv.end});
    return a;
  };
  j["include"] = intervals(mask.include);
  j["exclude"] = intervals(mask.exclude);
  return j;
}

std::vector<double> extract_column(const RFFrame& frame, std::uint32_t col, std::uint32_t i2) {
  if (col >= frame.dims().n1 || i2 >= frame.dims().n2) {
    throw Error(ErrorCode::IndexOutOfRange, "column " + std::to_string(col) + " outside frame with " +
                                                std::to_string(frame.dims().n1) + " columns");
  }
  const auto c = frame.column(col, i2);
  return {c.begin(), c.end()};
}

Histogram histogram(std::span<const double> values, std::uint32_t n_bins,
                    std::optional<std::pair<double, double>> range) {
  if (n_bins < 1) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  double lo, hi;
  if (range) {
    lo = range->first;
    hi = range->second;
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw Error(ErrorCode::InvalidArgument, "histogram range must be finite and ascending");
    }
  } else {
    lo = INFINITY;
    hi = -INFINITY;
    for (double v : values) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(hi >= lo)) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
  }

  Histogram h;
  h.edges.resize(n_bins + 1);
  for (std::uint32_t b = 0; b <= n_bins; ++b) {
    h.edges[b] = lo + (hi - lo) * (static_cast<double>(b) / n_bins);
  }
  h.edges[n_bins] = hi;
  h.counts.assign(n_bins, 0);
  const double scale = n_bins / (hi - lo);
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    const double pos = std::floor((v - lo) * scale);
    const auto bin = static_cast<std::int64_t>(std::clamp(pos, 0.0, static_cast<double>(n_bins - 1)));
    ++h.counts[static_cast<std::size_t>(bin)];
    ++h.total;
  }
  return h;
}

Histogram symmetric_histogram(std::span<const double> values, std::uint32_t n_bins) {
  double m = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) m = std::max(m, std::abs(v));
  }
  if (m == 0.0) m = 1.0;
  return histogram(values, n_bins, std::make_pair(-m, m));
}

double amplitude_ratio(std::span<const double> a, std::span<const double> b,
                       std::span<const std::size_t> mask) {
  return ratio_of(gather(a, b, mask));
}

double overlap_error(std::span<const double> a, std::span<const double> b,
                     std::span<const std::size_t> mask) {
  return overlap_of(gather(a, b, mask));
}

double amplitude_ratio(const RFFrame& a, const RFFrame& b, const RegionMask& mask) {
  return ratio_of(gather(a, b, mask));
}

double overlap_error(const RFFrame& a, const RFFrame& b, const RegionMask& mask) {
  return overlap_of(gather(a, b, mask));
}

RegionMask spike_exclusion_mask(const RFFrame& frame, std::uint32_t column, double t_arrival,
                                double half_width_s) {
  if (column >= frame.dims().n1) throw Error(ErrorCode::IndexOutOfRange, "mask column outside frame");
  const double fs = frame.acq().fs;
  const double t0 = frame.acq().t0;
  const double lo = std::ceil((t_arrival - half_width_s - t0) * fs);
  const double hi = std::floor((t_arrival + half_width_s - t0) * fs);
  RegionMask m;
  m.columns = {column};
  const double n0 = frame.dims().n0;
  if (hi >= 0 && lo < n0) {
    const auto b = static_cast<std::size_t>(std::max(lo, 0.0));
    const auto e = static_cast<std::size_t>(std::min(hi + 1, n0));
    m.exclude.push_back({b, e});
  }
  return m;
}

PixelRegion disk_region(const bf::BModeImage& bmode, double cx, double cz, double r) {
  return annulus_region(bmode, cx, cz, -1.0, r);
}

PixelRegion annulus_region(const bf::BModeImage& bmode, double cx, double cz, double r_in,
                           double r_out) {
  PixelRegion reg;
  for (std::uint32_t ix = 0; ix < bmode.n_x; ++ix) {
    for (std::uint32_t iz = 0; iz < bmode.n_z; ++iz) {
      const double d = std::hypot(bmode.x_at(ix) - cx, bmode.z_at(iz) - cz);
      if (d > r_in && d <= r_out) reg.pixels.push_back(iz + static_cast<std::size_t>(bmode.n_z) * ix);
    }
  }
  return reg;
}

double contrast(const bf::BModeImage& bmode, const PixelRegion& cyst, const PixelRegion& background) {
  if (cyst.pixels.empty() || background.pixels.empty()) {
    throw Error(ErrorCode::Region, "contrast regions must be nonempty");
  }
  auto sorted = [](std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto a = sorted(cyst.pixels);
  const auto b = sorted(background.pixels);
  if (a.back() >= bmode.db.size() || b.back() >= bmode.db.size()) {
    throw Error(ErrorCode::Region, "contrast region outside the image");
  }
  std::vector<std::size_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  if (!common.empty()) throw Error(ErrorCode::Region, "contrast regions overlap");

  auto mean_db = [&](const std::vector<std::size_t>& idx) {
    CompensatedSum s;
    for (std::size_t k : idx) s.add(bmode.db[k]);
    return s.value() / static_cast<double>(idx.size());
  };
  return mean_db(a) - mean_db(b);
}

double cyst_contrast(const bf::BModeImage& bmode, double cx, double cz, double r) {
  const double r_cyst = 0.8 * r;
  const double r_in = 1.2 * r;
  const double r_out = std::sqrt(r_in * r_in + r_cyst * r_cyst);
  return contrast(bmode, disk_region(bmode, cx, cz, r_cyst),
                  annulus_region(bmode, cx, cz, r_in, r_out));
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string trace_csv(std::span<const double> values, double t0, double fs) {
  std::string out = "sample_index,time_s,value\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    out += std::to_string(k);
    out += ',';
    out += format_number(t0 + static_cast<double>(k) / fs);
    out += ',';
    out += format_number(values[k]);
    out += '\n';
  }
  return out;
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_left,bin_right,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    out += format_number(h.edges[b]) + ',' + format_number(h.edges[b + 1]) + ',' +
           std::to_string(h.counts[b]) + '\n';
  }
  return out;
}

std::string metrics_json(const std::vector<Metric>& metrics) {
  json arr = json::array();
  for (const Metric& m : metrics) arr.push_back({{"name", m.name}, {"value", m.value}});
  return arr.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace rfpipe::analysis
