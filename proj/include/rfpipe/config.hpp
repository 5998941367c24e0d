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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rfpipe {

struct Cyst {
  double x_m = 0.0;
  double z_m = 0.0;
  double r_m = 0.0;
};

struct PointTarget {
  double x_m = 0.0;
  double z_m = 0.0;
  /// Amplitude relative to the RMS diffuse scatterer amplitude.
  double gain_db = 40.0;
};

/// Rectangular scatterer phantom; x spans [-width/2, width/2], z spans [0, depth].
struct Phantom {
  double width_m = 0.045;
  double depth_m = 0.040;
  double scatterer_density = 10.0;  // per mm^2
  double amp_sigma = 1.0;
  std::vector<Cyst> cysts;
  std::optional<PointTarget> point_target;
  std::uint64_t seed = 0;
};

/// Two anechoic cysts (r = 3 mm at x = +-8 mm, z = 20 mm), optional
/// 40 dB point target at (0, 27 mm).
Phantom default_phantom(bool with_point_target, std::uint64_t seed = 0);

/// Throws Geometry for cysts or target outside the extent and InvalidArgument
/// for non-positive sizes.
void validate(const Phantom& phantom);

/// Parses and validates. Omitted fields take the defaults above; unknown
/// keys and wrong types are Schema errors.
Phantom parse_phantom(std::string_view json_text);
nlohmann::json to_json(const Phantom& phantom);

/// Linear array at z = 0, element x-positions centered on 0.
class ProbeGeometry {
 public:
  ProbeGeometry(std::uint32_t n_elements, double pitch_m);

  /// 128 elements at 0.3 mm pitch (L11-5v-like).
  static ProbeGeometry linear128();
  /// 64-element desk-scale variant with the same pitch.
  static ProbeGeometry linear64();

  std::uint32_t n_elements() const noexcept { return n_; }
  double pitch() const noexcept { return pitch_; }
  const std::vector<double>& positions() const noexcept { return x_; }
  double aperture_half_width() const noexcept { return x_.back(); }

 private:
  std::uint32_t n_;
  double pitch_;
  std::vector<double> x_;
};

ProbeGeometry parse_probe(std::string_view json_text);
nlohmann::json to_json(const ProbeGeometry& probe);

struct AberrationParams {
  double rms_ns = 50.0;
  double corr_len_elements = 6.0;
  std::uint64_t seed = 0;
};

AberrationParams parse_aberration_params(std::string_view json_text);

/// Near-field phase screen: one delay per element.
struct AberrationProfile {
  std::vector<double> delays_s;
  double rms_ns = 0.0;
  double corr_len_elements = 1.0;
  std::uint64_t seed = 0;
};

AberrationProfile parse_aberration_profile(std::string_view json_text);
nlohmann::json to_json(const AberrationProfile& profile);

/// Reads a whole text file; Io error if missing.
std::string read_text_file(const std::string& path);

}  // namespace rfpipe
