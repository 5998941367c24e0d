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

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "rfpipe/frame.hpp"

namespace rfpipe::usrf {

// Little-endian container:
//   0-3  magic "USRF"      4-5 version u16 = 1    6-7 flags u16 = 0
//   8    kind u8           9-11 reserved zero      12-23 n0, n1, n2 u32
//   24-79 f64 fs, f0, c, t0, pitch, dx, dz
//   80-  f32 payload, n0 fastest
inline constexpr std::size_t kHeaderSize = 80;
inline constexpr std::uint16_t kVersion = 1;

/// Serializes a frame. Samples are rounded to 32-bit storage. Throws
/// NonFiniteData before producing any output.
std::vector<std::byte> encode(const RFFrame& frame);

RFFrame decode(std::span<const std::byte> bytes);

RFFrame read_frame(const std::filesystem::path& path);
void write_frame(const RFFrame& frame, const std::filesystem::path& path);

}  // namespace rfpipe::usrf
