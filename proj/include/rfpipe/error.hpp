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
#include <stdexcept>
#include <string>
#include <string_view>

namespace rfpipe {

enum class ErrorCode {
  BadMagic,
  UnsupportedVersion,
  BadHeader,
  TruncatedPayload,
  TrailingData,
  NonFiniteData,
  Io,
  Schema,
  Geometry,
  InvalidArgument,
  AllZeroFrame,
  ConstantFrame,
  EmptyDataset,
  ConstantDataset,
  Aliasing,
  EmptySpan,
  SpanTooShort,
  DimensionMismatch,
  GridOutOfRange,
  IndexOutOfRange,
  ZeroDenominator,
  Region,
  Manifest,
};

/// Stable machine-readable name, e.g. "E_ALL_ZERO".
std::string_view error_code_name(ErrorCode code);

/// Every domain failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::uint64_t> byte_offset = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::uint64_t> byte_offset() const noexcept { return offset_; }

 private:
  ErrorCode code_;
  std::optional<std::uint64_t> offset_;
};

}  // namespace rfpipe
