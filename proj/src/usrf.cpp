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

#include "rfpipe/usrf.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "rfpipe/error.hpp"

namespace rfpipe::usrf {

static_assert(std::endian::native == std::endian::little,
              "USRF codec assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'U', 'S', 'R', 'F'};

template <typename T>
void put(std::vector<std::byte>& out, std::size_t offset, T value) {
  std::memcpy(out.data() + offset, &value, sizeof(T));
}

template <typename T>
T get(std::span<const std::byte> in, std::size_t offset) {
  T value;
  std::memcpy(&value, in.data() + offset, sizeof(T));
  return value;
}

}  // namespace

std::vector<std::byte> encode(const RFFrame& frame) {
  const auto samples = frame.samples();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!std::isfinite(static_cast<float>(samples[k]))) {
      throw Error(ErrorCode::NonFiniteData,
                  "sample " + std::to_string(k) + " is not finite in 32-bit storage",
                  kHeaderSize + 4 * static_cast<std::uint64_t>(k));
    }
  }

  std::vector<std::byte> out(kHeaderSize + 4 * samples.size(), std::byte{0});
  std::memcpy(out.data(), kMagic, 4);
  put<std::uint16_t>(out, 4, kVersion);
  put<std::uint16_t>(out, 6, 0);
  put<std::uint8_t>(out, 8, static_cast<std::uint8_t>(frame.kind()));
  put<std::uint32_t>(out, 12, frame.dims().n0);
  put<std::uint32_t>(out, 16, frame.dims().n1);
  put<std::uint32_t>(out, 20, frame.dims().n2);
  const Acquisition& a = frame.acq();
  const double fields[7] = {a.fs, a.f0, a.c, a.t0, a.pitch, a.dx, a.dz};
  for (int k = 0; k < 7; ++k) put<double>(out, 24 + 8 * k, fields[k]);

  for (std::size_t k = 0; k < samples.size(); ++k) {
    put<float>(out, kHeaderSize + 4 * k, static_cast<float>(samples[k]));
  }
  return out;
}

RFFrame decode(std::span<const std::byte> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "missing USRF magic", 0);
  }
  if (bytes.size() < kHeaderSize) {
    throw Error(ErrorCode::TruncatedPayload,
                "header truncated: " + std::to_string(bytes.size()) + " of 80 bytes",
                bytes.size());
  }
  const auto version = get<std::uint16_t>(bytes, 4);
  if (version != kVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "USRF version " + std::to_string(version), 4);
  }
  if (get<std::uint16_t>(bytes, 6) != 0) {
    throw Error(ErrorCode::BadHeader, "flags must be zero", 6);
  }
  const auto kind = get<std::uint8_t>(bytes, 8);
  if (kind > 2) {
    throw Error(ErrorCode::BadHeader, "unknown frame kind " + std::to_string(kind), 8);
  }
  for (std::size_t k = 9; k < 12; ++k) {
    if (bytes[k] != std::byte{0}) throw Error(ErrorCode::BadHeader, "reserved byte not zero", k);
  }
  const Dims dims{get<std::uint32_t>(bytes, 12), get<std::uint32_t>(bytes, 16),
                  get<std::uint32_t>(bytes, 20)};
  if (dims.n0 == 0 || dims.n1 == 0 || dims.n2 == 0) {
    throw Error(ErrorCode::BadHeader, "zero dimension", 12);
  }
  double f[7];
  for (int k = 0; k < 7; ++k) f[k] = get<double>(bytes, 24 + 8 * k);
  const Acquisition acq{f[0], f[1], f[2], f[3], f[4], f[5], f[6]};
  bool finite = true;
  for (double v : f) finite = finite && std::isfinite(v);
  if (!finite || !(acq.fs > 0) || !(acq.f0 > 0) || !(acq.c > 0) || !(acq.pitch >= 0)) {
    throw Error(ErrorCode::BadHeader, "invalid acquisition metadata", 24);
  }

  const std::uint64_t n = dims.size();
  const std::uint64_t expected = kHeaderSize + 4 * n;
  if (bytes.size() < expected) {
    throw Error(ErrorCode::TruncatedPayload,
                "payload holds " + std::to_string((bytes.size() - kHeaderSize) / 4) + " of " +
                    std::to_string(n) + " samples",
                bytes.size());
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::TrailingData, "unexpected bytes after payload", expected);
  }

  std::vector<double> samples(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    const float v = get<float>(bytes, kHeaderSize + 4 * k);
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteData, "sample " + std::to_string(k) + " is not finite",
                  kHeaderSize + 4 * k);
    }
    samples[k] = v;
  }
  return RFFrame(static_cast<FrameKind>(kind), dims, acq, std::move(samples));
}

RFFrame read_frame(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "read failed: " + path.string());
  return decode(std::as_bytes(std::span<const char>(raw)));
}

void write_frame(const RFFrame& frame, const std::filesystem::path& path) {
  const auto bytes = encode(frame);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace rfpipe::usrf
