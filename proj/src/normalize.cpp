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

#include "rfpipe/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rfpipe/error.hpp"
#include "rfpipe/summation.hpp"

namespace rfpipe::norm {

using nlohmann::json;

namespace {

void require_finite(const RFFrame& frame) {
  const auto s = frame.samples();
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!std::isfinite(s[k])) {
      throw Error(ErrorCode::NonFiniteData, "sample " + std::to_string(k) + " is not finite");
    }
  }
}

double max_magnitude(std::span<const double> s) {
  double m = 0.0;
  for (double v : s) m = std::max(m, std::abs(v));
  return m;
}

RFFrame scaled(const RFFrame& frame, double divisor) {
  std::vector<double> out(frame.samples().begin(), frame.samples().end());
  for (double& v : out) v /= divisor;
  return frame.with_samples(std::move(out));
}

RFFrame affine(const RFFrame& frame, double lo_out, double hi_out) {
  require_finite(frame);
  const auto s = frame.samples();
  const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
  const double lo = *mn;
  const double hi = *mx;
  if (!(hi > lo)) throw Error(ErrorCode::ConstantFrame, "frame is constant");
  const double span = hi - lo;
  const double out_span = hi_out - lo_out;
  std::vector<double> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    out[k] = out_span * ((s[k] - lo) / span) + lo_out;
  }
  return frame.with_samples(std::move(out));
}

}  // namespace

json to_json(const DatasetStats& stats) {
  return {{"mean", stats.mean}, {"std", stats.std}, {"n_samples", stats.n_samples}};
}

DatasetStats parse_stats(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Schema, std::string("malformed stats JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("mean") || !j.contains("std") || !j.contains("n_samples") ||
      !j["mean"].is_number() || !j["std"].is_number() || !j["n_samples"].is_number_unsigned()) {
    throw Error(ErrorCode::Schema, "stats JSON needs numeric mean, std, n_samples");
  }
  DatasetStats s{j["mean"].get<double>(), j["std"].get<double>(), j["n_samples"].get<std::uint64_t>()};
  if (!std::isfinite(s.mean) || !(s.std > 0) || !std::isfinite(s.std) || s.n_samples == 0) {
    throw Error(ErrorCode::Schema, "stats need finite mean, std > 0, n_samples > 0");
  }
  return s;
}

RFFrame max_abs(const RFFrame& frame) {
  require_finite(frame);
  const double m = max_magnitude(frame.samples());
  if (m == 0.0) throw Error(ErrorCode::AllZeroFrame, "frame has no nonzero samples");
  return scaled(frame, m);
}

RFFrame robust(const RFFrame& frame) {
  if (frame.size() < 2) {
    throw Error(ErrorCode::ConstantFrame, "robust normalization needs at least 2 samples");
  }
  RFFrame unit = max_abs(frame);
  const double sigma = population_std(unit.samples());
  if (!(sigma > 0)) throw Error(ErrorCode::ConstantFrame, "frame is constant (sigma = 0)");
  return scaled(unit, sigma);
}

RFFrame minmax01(const RFFrame& frame) { return affine(frame, 0.0, 1.0); }
RFFrame minmax11(const RFFrame& frame) { return affine(frame, -1.0, 1.0); }

DatasetStats dataset_stats(std::span<const RFFrame> frames) {
  if (frames.empty()) throw Error(ErrorCode::EmptyDataset, "no frames");
  std::uint64_t n = 0;
  for (const RFFrame& f : frames) {
    require_finite(f);
    n += f.size();
  }
  if (n < 2) throw Error(ErrorCode::EmptyDataset, "dataset needs at least 2 samples");

  // Per-frame compensated partials merged in frame order; each partial is
  // accurate to ~1 ulp so the merge order does not matter at 1e-12.
  std::vector<CompensatedSum> partial(frames.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (double x : frames[f].samples()) partial[f].add(x);
  }
  CompensatedSum total;
  for (const auto& p : partial) total.merge(p);
  const double mean = total.value() / static_cast<double>(n);

  std::vector<CompensatedSum> squares(frames.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (double x : frames[f].samples()) squares[f].add((x - mean) * (x - mean));
  }
  CompensatedSum ss;
  for (const auto& p : squares) ss.merge(p);
  const double sd = std::sqrt(ss.value() / static_cast<double>(n));
  if (!(sd > 0)) throw Error(ErrorCode::ConstantDataset, "all samples identical");
  return {mean, sd, n};
}

RFFrame standardize(const RFFrame& frame, const DatasetStats& stats) {
  if (!std::isfinite(stats.mean) || !(stats.std > 0) || !std::isfinite(stats.std)) {
    throw Error(ErrorCode::InvalidArgument, "stats need finite mean and std > 0");
  }
  require_finite(frame);
  std::vector<double> out(frame.samples().begin(), frame.samples().end());
  for (double& v : out) v = (v - stats.mean) / stats.std;
  return frame.with_samples(std::move(out));
}

RFFrame apply(const NormMethod& method, const RFFrame& frame) {
  return std::visit(
      [&](const auto& m) -> RFFrame {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MaxAbs>) return max_abs(frame);
        else if constexpr (std::is_same_v<T, Robust>) return robust(frame);
        else if constexpr (std::is_same_v<T, MinMax01>) return minmax01(frame);
        else if constexpr (std::is_same_v<T, MinMax11>) return minmax11(frame);
        else return standardize(frame, m.stats);
      },
      method);
}

NormMethod parse_method(std::string_view name) {
  if (name == "max-abs") return MaxAbs{};
  if (name == "robust") return Robust{};
  if (name == "minmax01") return MinMax01{};
  if (name == "minmax11") return MinMax11{};
  throw Error(ErrorCode::InvalidArgument, "unknown normalization '" + std::string(name) + "'");
}

std::string_view method_name(const NormMethod& method) {
  constexpr std::string_view names[] = {"max-abs", "robust", "minmax01", "minmax11", "standardize"};
  return names[method.index()];
}

}  // namespace rfpipe::norm
