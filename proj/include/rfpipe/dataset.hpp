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
#include <string>
#include <vector>

#include <json.hpp>

#include "rfpipe/config.hpp"
#include "rfpipe/sim.hpp"

namespace rfpipe::dataset {

struct GenerateConfig {
  /// Must carry a point target; it is added only to the held-out replica
  /// and the with-target reference.
  Phantom phantom = default_phantom(true);
  ProbeGeometry probe = ProbeGeometry::linear64();
  sim::PulseModel pulse{};
  sim::FsaSettings fsa{};
  std::uint32_t n_versions = 20;
  double rms_ns = 50.0;
  double corr_len_elements = 6.0;
  sim::SynthOptions synth{};
  std::uint32_t n_epochs = 100;
  std::uint64_t seed = 0;
};

struct FrameEntry {
  std::string id;
  std::string file;  // relative to the dataset directory
  std::string sha256;
  bool point_target = false;
  std::optional<AberrationProfile> aberration;  // absent for references
};

/// table[epoch][k] is the index (into split_train) of the frame that
/// split_train[k] is mapped to in that epoch.
using PairingTable = std::vector<std::vector<std::uint32_t>>;

struct DatasetManifest {
  nlohmann::json config;  // phantom, probe, pulse, acquisition, aberration settings
  std::uint64_t seed = 0;
  std::vector<FrameEntry> frames;
  std::vector<std::string> split_train;
  std::vector<std::string> split_test;
  std::string held_out;        // id of the held-out aberrated version
  std::string held_out_target; // its with-target replica
  std::uint64_t pairing_seed = 0;
  PairingTable pairing;

  const FrameEntry& frame(const std::string& id) const;
};

nlohmann::json to_json(const DatasetManifest& manifest);
DatasetManifest parse_manifest(std::string_view json_text);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// One scatterer realization, n_versions aberrated plane-wave frames, the
/// held-out version replicated with the point target, and unaberrated
/// references with and without the target. Writes frames/ and manifest.json.
DatasetManifest generate(const GenerateConfig& config, const std::filesystem::path& out_dir);

/// One derangement of [0, n_ids) per epoch.
PairingTable pairing_schedule(std::uint32_t n_ids, std::uint32_t n_epochs, std::uint64_t seed);

/// Split is a partition of the frame ids, every pairing row is a
/// derangement and every file matches its checksum. Throws Manifest.
void verify(const DatasetManifest& manifest, const std::filesystem::path& dir);

}  // namespace rfpipe::dataset
