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

#include "rfpipe/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rfpipe/error.hpp"

namespace rfpipe {

using nlohmann::json;

namespace {

// Strict field access: rejects unknown keys and mistyped values.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw Error(ErrorCode::Schema, context_ + " must be a JSON object");
  }

  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw Error(ErrorCode::Schema, context_ + ": unknown field '" + item.key() + "'");
      }
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw Error(ErrorCode::Schema, field(key) + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw Error(ErrorCode::Schema, field(key) + " must be finite");
    return d;
  }

  double required_number(const std::string& key) {
    if (!has(key)) throw Error(ErrorCode::Schema, field(key) + " is required");
    return number(key, 0.0);
  }

  std::uint64_t uint(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned()) {
      throw Error(ErrorCode::Schema, field(key) + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  const json& array(const std::string& key) {
    if (!has(key)) throw Error(ErrorCode::Schema, field(key) + " is required");
    const json& v = j_.at(key);
    if (!v.is_array()) throw Error(ErrorCode::Schema, field(key) + " must be an array");
    return v;
  }

  const json& object(const std::string& key) {
    const json& v = j_.at(key);
    if (!v.is_object()) throw Error(ErrorCode::Schema, field(key) + " must be an object");
    return v;
  }

 private:
  std::string field(const std::string& key) const { return context_ + "." + key; }

  const json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Schema, std::string("malformed JSON: ") + e.what());
  }
}

bool inside_extent(const Phantom& p, double x, double z) {
  return x >= -p.width_m / 2 && x <= p.width_m / 2 && z >= 0.0 && z <= p.depth_m;
}

}  // namespace

Phantom default_phantom(bool with_point_target, std::uint64_t seed) {
  Phantom p;
  p.cysts = {{-0.008, 0.020, 0.003}, {0.008, 0.020, 0.003}};
  if (with_point_target) p.point_target = PointTarget{0.0, 0.027, 40.0};
  p.seed = seed;
  return p;
}

void validate(const Phantom& p) {
  if (!(p.width_m > 0) || !(p.depth_m > 0)) {
    throw Error(ErrorCode::InvalidArgument, "phantom extent must be positive");
  }
  if (!(p.scatterer_density >= 0)) {
    throw Error(ErrorCode::InvalidArgument, "scatterer_density must be >= 0");
  }
  if (!(p.amp_sigma > 0)) throw Error(ErrorCode::InvalidArgument, "amp_sigma must be > 0");
  for (std::size_t k = 0; k < p.cysts.size(); ++k) {
    const Cyst& c = p.cysts[k];
    if (!(c.r_m > 0)) throw Error(ErrorCode::Geometry, "cyst " + std::to_string(k) + " radius must be > 0");
    if (!inside_extent(p, c.x_m - c.r_m, c.z_m - c.r_m) ||
        !inside_extent(p, c.x_m + c.r_m, c.z_m + c.r_m)) {
      throw Error(ErrorCode::Geometry, "cyst " + std::to_string(k) + " extends outside the phantom");
    }
  }
  if (p.point_target) {
    const PointTarget& t = *p.point_target;
    if (!inside_extent(p, t.x_m, t.z_m)) {
      throw Error(ErrorCode::Geometry, "point target outside the phantom");
    }
    for (const Cyst& c : p.cysts) {
      if (std::hypot(t.x_m - c.x_m, t.z_m - c.z_m) <= c.r_m) {
        throw Error(ErrorCode::Geometry, "point target inside a cyst");
      }
    }
  }
}

Phantom parse_phantom(std::string_view json_text) {
  const json j = parse_text(json_text);
  Phantom p;
  {
    ObjectReader r(j, "phantom");
    p.width_m = r.number("width_m", p.width_m);
    p.depth_m = r.number("depth_m", p.depth_m);
    p.scatterer_density = r.number("scatterer_density", p.scatterer_density);
    p.amp_sigma = r.number("amp_sigma", p.amp_sigma);
    p.seed = r.uint("seed", p.seed);
    if (r.has("cysts")) {
      std::size_t k = 0;
      for (const json& cj : r.array("cysts")) {
        ObjectReader cr(cj, "phantom.cysts[" + std::to_string(k++) + "]");
        p.cysts.push_back({cr.required_number("x_m"), cr.required_number("z_m"),
                           cr.required_number("r_m")});
      }
    }
    if (r.has("point_target")) {
      ObjectReader tr(r.object("point_target"), "phantom.point_target");
      PointTarget t;
      t.x_m = tr.required_number("x_m");
      t.z_m = tr.required_number("z_m");
      t.gain_db = tr.number("gain_db", t.gain_db);
      p.point_target = t;
    }
  }
  validate(p);
  return p;
}

json to_json(const Phantom& p) {
  json j;
  j["width_m"] = p.width_m;
  j["depth_m"] = p.depth_m;
  j["scatterer_density"] = p.scatterer_density;
  j["amp_sigma"] = p.amp_sigma;
  j["seed"] = p.seed;
  j["cysts"] = json::array();
  for (const Cyst& c : p.cysts) j["cysts"].push_back({{"x_m", c.x_m}, {"z_m", c.z_m}, {"r_m", c.r_m}});
  if (p.point_target) {
    j["point_target"] = {{"x_m", p.point_target->x_m},
                         {"z_m", p.point_target->z_m},
                         {"gain_db", p.point_target->gain_db}};
  }
  return j;
}

ProbeGeometry::ProbeGeometry(std::uint32_t n_elements, double pitch_m)
    : n_(n_elements), pitch_(pitch_m) {
  if (n_ < 2) throw Error(ErrorCode::InvalidArgument, "probe needs at least 2 elements");
  if (!(pitch_ > 0) || !std::isfinite(pitch_)) {
    throw Error(ErrorCode::InvalidArgument, "probe pitch must be > 0");
  }
  x_.resize(n_);
  // (e - (n-1)/2) is an exact half-integer, so mirrored elements are exact negations.
  const double center = 0.5 * (static_cast<double>(n_) - 1.0);
  for (std::uint32_t e = 0; e < n_; ++e) x_[e] = (static_cast<double>(e) - center) * pitch_;
}

ProbeGeometry ProbeGeometry::linear128() { return ProbeGeometry(128, 0.3e-3); }
ProbeGeometry ProbeGeometry::linear64() { return ProbeGeometry(64, 0.3e-3); }

ProbeGeometry parse_probe(std::string_view json_text) {
  const json j = parse_text(json_text);
  ObjectReader r(j, "probe");
  const std::uint64_t n = r.uint("n_elements", 128);
  const double pitch = r.number("pitch_m", 0.3e-3);
  if (n > 65535) throw Error(ErrorCode::Schema, "probe.n_elements too large");
  return ProbeGeometry(static_cast<std::uint32_t>(n), pitch);
}

json to_json(const ProbeGeometry& probe) {
  return {{"n_elements", probe.n_elements()}, {"pitch_m", probe.pitch()}};
}

AberrationParams parse_aberration_params(std::string_view json_text) {
  const json j = parse_text(json_text);
  AberrationParams a;
  ObjectReader r(j, "aberration");
  a.rms_ns = r.number("rms_ns", a.rms_ns);
  a.corr_len_elements = r.number("corr_len_elements", a.corr_len_elements);
  a.seed = r.uint("seed", a.seed);
  if (!(a.rms_ns >= 0)) throw Error(ErrorCode::Schema, "aberration.rms_ns must be >= 0");
  if (!(a.corr_len_elements > 0)) {
    throw Error(ErrorCode::Schema, "aberration.corr_len_elements must be > 0");
  }
  return a;
}

AberrationProfile parse_aberration_profile(std::string_view json_text) {
  const json j = parse_text(json_text);
  AberrationProfile a;
  ObjectReader r(j, "aberration_profile");
  const std::uint64_t n = r.uint("n_elements", 0);
  a.rms_ns = r.number("rms_ns", 0.0);
  a.corr_len_elements = r.number("corr_len_elements", 1.0);
  a.seed = r.uint("seed", 0);
  for (const json& v : r.array("delays_s")) {
    if (!v.is_number()) throw Error(ErrorCode::Schema, "aberration_profile.delays_s must hold numbers");
    a.delays_s.push_back(v.get<double>());
  }
  if (n != a.delays_s.size()) {
    throw Error(ErrorCode::Schema, "aberration_profile.n_elements does not match delays_s length");
  }
  return a;
}

json to_json(const AberrationProfile& a) {
  return {{"n_elements", a.delays_s.size()},
          {"rms_ns", a.rms_ns},
          {"corr_len_elements", a.corr_len_elements},
          {"seed", a.seed},
          {"delays_s", a.delays_s}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rfpipe
