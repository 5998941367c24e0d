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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rfpipe/frame.hpp"

namespace testutil {

// Test-side generator: deliberately std::mt19937_64 + std distributions,
// independent of the library's Rng.
inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = d(gen);
  return v;
}

inline rfpipe::RFFrame make_frame(rfpipe::Dims dims, std::vector<double> v,
                                  rfpipe::FrameKind kind = rfpipe::FrameKind::ChannelData) {
  rfpipe::Acquisition acq;
  acq.pitch = 0.3e-3;
  return rfpipe::RFFrame(kind, dims, acq, std::move(v));
}

inline rfpipe::RFFrame random_frame(rfpipe::Dims dims, std::uint64_t seed, double scale = 1.0) {
  return make_frame(dims, random_vector(dims.size(), seed, scale));
}

inline double max_rel_diff(std::span<const double> a, std::span<const double> b) {
  double peak = 0.0;
  for (double x : a) peak = std::max(peak, std::abs(x));
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return peak > 0 ? d / peak : d;
}

inline double naive_std(std::span<const double> v) {
  long double m = 0;
  for (double x : v) m += x;
  m /= v.size();
  long double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return static_cast<double>(std::sqrt(s / v.size()));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("rfpipe_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
