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
#include <cstdint>
#include <span>
#include <vector>

namespace rfpipe {

enum class FrameKind : std::uint8_t { ChannelData = 0, FsaTensor = 1, Image = 2 };

/// Tensor shape, n0 fastest-varying.
///  ChannelData: (time samples, receive channels, 1)
///  FsaTensor:   (time samples, receive element, transmit element)
///  Image:       (depth rows, lateral columns, 1)
struct Dims {
  std::uint32_t n0 = 1;
  std::uint32_t n1 = 1;
  std::uint32_t n2 = 1;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n0) * n1 * n2;
  }
  bool operator==(const Dims&) const = default;
};

/// Acquisition metadata carried in every frame header.
/// For Image frames fs is the axial two-way sampling rate c/(2 dz), t0 the
/// two-way time of the first row, and the lateral grid is centered on x = 0.
struct Acquisition {
  double fs = 20.832e6;
  double f0 = 5.208e6;
  double c = 1540.0;
  double t0 = 0.0;
  double pitch = 0.0;
  double dx = 0.0;
  double dz = 0.0;

  bool operator==(const Acquisition&) const = default;
};

/// Immutable RF sample tensor with metadata. Construction checks shape and
/// metadata; finiteness of samples is checked at I/O and processing boundaries.
class RFFrame {
 public:
  RFFrame(FrameKind kind, Dims dims, Acquisition acq, std::vector<double> samples);

  FrameKind kind() const noexcept { return kind_; }
  const Dims& dims() const noexcept { return dims_; }
  const Acquisition& acq() const noexcept { return acq_; }
  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }

  double at(std::size_t i0, std::size_t i1 = 0, std::size_t i2 = 0) const {
    return samples_[i0 + dims_.n0 * (i1 + static_cast<std::size_t>(dims_.n1) * i2)];
  }

  /// Contiguous axial vector at (i1, i2).
  std::span<const double> column(std::size_t i1, std::size_t i2 = 0) const;

  /// Same kind, shape and metadata with a new payload.
  RFFrame with_samples(std::vector<double> samples) const;

  bool all_finite() const noexcept;

  /// Bitwise equality of header and payload.
  bool operator==(const RFFrame& other) const;

 private:
  FrameKind kind_;
  Dims dims_;
  Acquisition acq_;
  std::vector<double> samples_;
};

}  // namespace rfpipe
