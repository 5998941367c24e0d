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

#include "rfpipe/frame.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "rfpipe/error.hpp"

namespace rfpipe {

namespace {

bool bitwise_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

}  // namespace

RFFrame::RFFrame(FrameKind kind, Dims dims, Acquisition acq, std::vector<double> samples)
    : kind_(kind), dims_(dims), acq_(acq), samples_(std::move(samples)) {
  if (dims_.n0 < 1 || dims_.n1 < 1 || dims_.n2 < 1) {
    throw Error(ErrorCode::InvalidArgument, "frame dims must all be >= 1");
  }
  if (samples_.size() != dims_.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "payload has " + std::to_string(samples_.size()) + " samples, dims require " +
                    std::to_string(dims_.size()));
  }
  if (!(acq_.fs > 0) || !(acq_.f0 > 0) || !(acq_.c > 0) || !(acq_.pitch >= 0) ||
      !std::isfinite(acq_.fs) || !std::isfinite(acq_.f0) || !std::isfinite(acq_.c) ||
      !std::isfinite(acq_.t0) || !std::isfinite(acq_.pitch) || !std::isfinite(acq_.dx) ||
      !std::isfinite(acq_.dz)) {
    throw Error(ErrorCode::InvalidArgument, "frame metadata requires fs, f0, c > 0 and pitch >= 0");
  }
}

std::span<const double> RFFrame::column(std::size_t i1, std::size_t i2) const {
  if (i1 >= dims_.n1 || i2 >= dims_.n2) {
    throw Error(ErrorCode::IndexOutOfRange,
                "column (" + std::to_string(i1) + ", " + std::to_string(i2) + ") outside frame");
  }
  const std::size_t offset = dims_.n0 * (i1 + static_cast<std::size_t>(dims_.n1) * i2);
  return std::span<const double>(samples_).subspan(offset, dims_.n0);
}

RFFrame RFFrame::with_samples(std::vector<double> samples) const {
  return RFFrame(kind_, dims_, acq_, std::move(samples));
}

bool RFFrame::all_finite() const noexcept {
  for (double v : samples_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool RFFrame::operator==(const RFFrame& other) const {
  if (kind_ != other.kind_ || dims_ != other.dims_) return false;
  const double lhs[] = {acq_.fs, acq_.f0, acq_.c, acq_.t0, acq_.pitch, acq_.dx, acq_.dz};
  const double rhs[] = {other.acq_.fs, other.acq_.f0, other.acq_.c, other.acq_.t0,
                        other.acq_.pitch, other.acq_.dx, other.acq_.dz};
  for (int k = 0; k < 7; ++k) {
    if (!bitwise_equal(lhs[k], rhs[k])) return false;
  }
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    if (!bitwise_equal(samples_[k], other.samples_[k])) return false;
  }
  return true;
}

}  // namespace rfpipe
