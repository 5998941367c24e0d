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

#include "rfpipe/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "rfpipe/checksum.hpp"
#include "rfpipe/error.hpp"
#include "rfpipe/rng.hpp"
#include "rfpipe/usrf.hpp"

namespace rfpipe::dataset {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Child seed streams derived from the dataset seed.
constexpr std::uint64_t kHeldOutStream = 1;
constexpr std::uint64_t kPairingStream = 2;
constexpr std::uint64_t kAberrationStreamBase = 1000;

std::string version_id(std::uint32_t k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "v%03u", k);
  return buf;
}

}  // namespace

const FrameEntry& DatasetManifest::frame(const std::string& id) const {
  for (const FrameEntry& f : frames) {
    if (f.id == id) return f;
  }
  throw Error(ErrorCode::Manifest, "manifest has no frame '" + id + "'");
}

PairingTable pairing_schedule(std::uint32_t n_ids, std::uint32_t n_epochs, std::uint64_t seed) {
  if (n_ids < 2) throw Error(ErrorCode::InvalidArgument, "pairing needs at least 2 ids");
  Rng rng(seed);
  PairingTable table(n_epochs);
  std::vector<std::uint32_t> perm(n_ids);
  for (auto& row : table) {
    // Rejection sampling of uniform permutations; accepts ~1/e of draws.
    for (;;) {
      std::iota(perm.begin(), perm.end(), 0u);
      for (std::uint32_t k = n_ids - 1; k > 0; --k) {
        std::swap(perm[k], perm[rng.below(k + 1)]);
      }
      bool fixed = false;
      for (std::uint32_t k = 0; k < n_ids && !fixed; ++k) fixed = perm[k] == k;
      if (!fixed) break;
    }
    row = perm;
  }
  return table;
}

DatasetManifest generate(const GenerateConfig& cfg, const fs::path& out_dir) {
  if (cfg.n_versions < 2) throw Error(ErrorCode::InvalidArgument, "dataset needs n_versions >= 2");
  if (!cfg.phantom.point_target) {
    throw Error(ErrorCode::InvalidArgument, "dataset phantom must define a point target");
  }
  validate(cfg.phantom);

  std::error_code ec;
  fs::create_directories(out_dir / "frames", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + (out_dir / "frames").string());

  // Same seed for both variants, so the diffuse cloud is shared and the
  // target is the only extra scatterer.
  Phantom diffuse_phantom = cfg.phantom;
  diffuse_phantom.point_target.reset();
  const sim::ScattererCloud diffuse = sim::sample_phantom(diffuse_phantom);
  const sim::ScattererCloud with_target = sim::sample_phantom(cfg.phantom);

  const auto span = sim::auto_span(cfg.phantom, cfg.probe, cfg.pulse, cfg.fsa.fs, cfg.fsa.c);
  const RFFrame fsa_clean = sim::simulate_fsa(diffuse, cfg.probe, cfg.pulse, cfg.fsa, span);
  const RFFrame fsa_target = sim::simulate_fsa(with_target, cfg.probe, cfg.pulse, cfg.fsa, span);

  const std::uint32_t n = cfg.n_versions;
  Rng pick(derive_seed(cfg.seed, kHeldOutStream));
  const auto held = static_cast<std::uint32_t>(pick.below(n));

  std::vector<AberrationProfile> profiles(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    profiles[k] = sim::gen_aberration(cfg.probe.n_elements(), cfg.rms_ns, cfg.corr_len_elements,
                                      derive_seed(cfg.seed, kAberrationStreamBase + k));
  }

  struct Job {
    std::string id;
    const RFFrame* fsa;
    std::optional<AberrationProfile> ab;
    bool target;
  };
  std::vector<Job> jobs;
  for (std::uint32_t k = 0; k < n; ++k) jobs.push_back({version_id(k), &fsa_clean, profiles[k], false});
  jobs.push_back({version_id(held) + "_target", &fsa_target, profiles[held], true});
  jobs.push_back({"ref_clean", &fsa_clean, std::nullopt, false});
  jobs.push_back({"ref_target", &fsa_target, std::nullopt, true});

  const sim::PlaneWaveTx tx{};
  std::vector<FrameEntry> entries(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t jj = 0; jj < static_cast<std::int64_t>(jobs.size()); ++jj) {
    const Job& job = jobs[jj];
    const AberrationProfile none;
    const RFFrame pw = sim::synth_planewave(*job.fsa, tx, job.ab ? *job.ab : none, cfg.synth);
    FrameEntry& e = entries[jj];
    e.id = job.id;
    e.file = "frames/" + job.id + ".usrf";
    e.point_target = job.target;
    e.aberration = job.ab;
    const auto bytes = usrf::encode(pw);
    e.sha256 = sha256_hex(bytes);
    usrf::write_frame(pw, out_dir / e.file);
  }

  DatasetManifest m;
  m.seed = cfg.seed;
  json acq_cfg;
  acq_cfg["phantom"] = to_json(cfg.phantom);
  acq_cfg["probe"] = to_json(cfg.probe);
  acq_cfg["pulse"] = {{"f0", cfg.pulse.f0()}, {"frac_bw", cfg.pulse.frac_bw()}};
  acq_cfg["acquisition"] = {{"fs", cfg.fsa.fs}, {"c", cfg.fsa.c}, {"t0", span.t0},
                            {"n_samples", span.n_samples}};
  acq_cfg["aberration"] = {{"rms_ns", cfg.rms_ns},
                           {"corr_len_elements", cfg.corr_len_elements},
                           {"transmit", cfg.synth.aberrate_transmit},
                           {"receive", cfg.synth.aberrate_receive}};
  acq_cfg["n_versions"] = n;
  m.config = acq_cfg;
  m.frames = std::move(entries);
  for (std::uint32_t k = 0; k < n; ++k) {
    if (k != held) m.split_train.push_back(version_id(k));
  }
  m.held_out = version_id(held);
  m.held_out_target = version_id(held) + "_target";
  m.split_test = {m.held_out, m.held_out_target, "ref_clean", "ref_target"};
  m.pairing_seed = derive_seed(cfg.seed, kPairingStream);
  if (m.split_train.size() >= 2) {
    m.pairing = pairing_schedule(static_cast<std::uint32_t>(m.split_train.size()), cfg.n_epochs,
                                 m.pairing_seed);
  }

  const std::string text = to_json(m).dump(2) + "\n";
  {
    std::FILE* f = std::fopen((out_dir / "manifest.json").string().c_str(), "wb");
    if (!f) throw Error(ErrorCode::Io, "cannot create manifest.json");
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    std::fclose(f);
    if (!ok) throw Error(ErrorCode::Io, "write failed: manifest.json");
  }
  return m;
}

json to_json(const DatasetManifest& m) {
  json j;
  j["format"] = "rfpipe-dataset";
  j["version"] = 1;
  j["seed"] = m.seed;
  j["config"] = m.config;
  j["frames"] = json::array();
  for (const FrameEntry& f : m.frames) {
    json e = {{"id", f.id}, {"file", f.file}, {"sha256", f.sha256}, {"point_target", f.point_target}};
    e["aberration"] = f.aberration ? to_json(*f.aberration) : json(nullptr);
    j["frames"].push_back(e);
  }
  j["split"] = {{"train", m.split_train}, {"test", m.split_test}};
  j["held_out"] = {{"id", m.held_out}, {"target_replica", m.held_out_target}};
  j["pairing"] = {{"seed", m.pairing_seed}, {"epochs", m.pairing}};
  return j;
}

DatasetManifest parse_manifest(std::string_view text) {
  try {
    const json j = json::parse(text.begin(), text.end());
    if (j.value("format", "") != "rfpipe-dataset" || j.value("version", 0) != 1) {
      throw Error(ErrorCode::Manifest, "not an rfpipe-dataset v1 manifest");
    }
    DatasetManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = j.at("config");
    for (const json& e : j.at("frames")) {
      FrameEntry f;
      f.id = e.at("id").get<std::string>();
      f.file = e.at("file").get<std::string>();
      f.sha256 = e.at("sha256").get<std::string>();
      f.point_target = e.at("point_target").get<bool>();
      if (!e.at("aberration").is_null()) f.aberration = parse_aberration_profile(e.at("aberration").dump());
      m.frames.push_back(std::move(f));
    }
    m.split_train = j.at("split").at("train").get<std::vector<std::string>>();
    m.split_test = j.at("split").at("test").get<std::vector<std::string>>();
    m.held_out = j.at("held_out").at("id").get<std::string>();
    m.held_out_target = j.at("held_out").at("target_replica").get<std::string>();
    m.pairing_seed = j.at("pairing").at("seed").get<std::uint64_t>();
    m.pairing = j.at("pairing").at("epochs").get<PairingTable>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Manifest, std::string("malformed manifest: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Manifest) throw;
    throw Error(ErrorCode::Manifest, std::string("malformed manifest: ") + e.what());
  }
}

DatasetManifest load_manifest(const fs::path& path) {
  return parse_manifest(read_text_file(path.string()));
}

void verify(const DatasetManifest& m, const fs::path& dir) {
  std::set<std::string> ids;
  for (const FrameEntry& f : m.frames) {
    if (!ids.insert(f.id).second) throw Error(ErrorCode::Manifest, "duplicate frame id " + f.id);
  }
  std::multiset<std::string> split(m.split_train.begin(), m.split_train.end());
  split.insert(m.split_test.begin(), m.split_test.end());
  if (split != std::multiset<std::string>(ids.begin(), ids.end())) {
    throw Error(ErrorCode::Manifest, "split is not a partition of the frame ids");
  }
  const auto n = m.split_train.size();
  for (std::size_t e = 0; e < m.pairing.size(); ++e) {
    const auto& row = m.pairing[e];
    std::vector<std::uint32_t> sorted(row.begin(), row.end());
    std::sort(sorted.begin(), sorted.end());
    bool ok = row.size() == n;
    for (std::size_t k = 0; ok && k < n; ++k) ok = sorted[k] == k && row[k] != k;
    if (!ok) throw Error(ErrorCode::Manifest, "pairing epoch " + std::to_string(e) + " is not a derangement");
  }
  const FrameEntry& held = m.frame(m.held_out);
  const FrameEntry& replica = m.frame(m.held_out_target);
  if (!held.aberration || !replica.aberration ||
      held.aberration->delays_s != replica.aberration->delays_s) {
    throw Error(ErrorCode::Manifest, "held-out replica does not share the aberration profile");
  }
  for (const FrameEntry& f : m.frames) {
    if (sha256_file(dir / f.file) != f.sha256) {
      throw Error(ErrorCode::Manifest, "checksum mismatch for " + f.file);
    }
  }
}

}  // namespace rfpipe::dataset
