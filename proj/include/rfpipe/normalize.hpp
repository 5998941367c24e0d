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
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rfpipe/frame.hpp"

namespace rfpipe::norm {

/// Pooled statistics over every sample of every frame in a dataset.
struct DatasetStats {
  double mean = 0.0;
  double std = 1.0;  // population
  std::uint64_t n_samples = 0;
};

nlohmann::json to_json(const DatasetStats& stats);
DatasetStats parse_stats(std::string_view json_text);

/// Divides by max|x|. Output lies in [-1, 1] with at least one sample at +-1.
RFFrame max_abs(const RFFrame& frame);

/// max_abs followed by division by the population standard deviation of the
/// max-abs output. The frame mean is not subtracted.
RFFrame robust(const RFFrame& frame);

/// Affine map of [min, max] onto [0, 1].
RFFrame minmax01(const RFFrame& frame);
/// Affine map of [min, max] onto [-1, 1].
RFFrame minmax11(const RFFrame& frame);

DatasetStats dataset_stats(std::span<const RFFrame> frames);

/// (x - mean) / std
RFFrame standardize(const RFFrame& frame, const DatasetStats& stats);

struct MaxAbs {};
struct Robust {};
struct MinMax01 {};
struct MinMax11 {};
struct DatasetStandardize {
  DatasetStats stats;
};

using NormMethod = std::variant<MaxAbs, Robust, MinMax01, MinMax11, DatasetStandardize>;

RFFrame apply(const NormMethod& method, const RFFrame& frame);

/// "max-abs", "robust", "minmax01", "minmax11". Dataset standardization needs
/// stats and is built directly.
NormMethod parse_method(std::string_view name);
std::string_view method_name(const NormMethod& method);

}  // namespace rfpipe::norm
