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

#include "rfpipe/error.hpp"

namespace rfpipe {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic: return "E_BAD_MAGIC";
    case ErrorCode::UnsupportedVersion: return "E_UNSUPPORTED_VERSION";
    case ErrorCode::BadHeader: return "E_BAD_HEADER";
    case ErrorCode::TruncatedPayload: return "E_TRUNCATED_PAYLOAD";
    case ErrorCode::TrailingData: return "E_TRAILING_DATA";
    case ErrorCode::NonFiniteData: return "E_NON_FINITE";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::Schema: return "E_SCHEMA";
    case ErrorCode::Geometry: return "E_GEOMETRY";
    case ErrorCode::InvalidArgument: return "E_INVALID_ARGUMENT";
    case ErrorCode::AllZeroFrame: return "E_ALL_ZERO";
    case ErrorCode::ConstantFrame: return "E_CONSTANT_FRAME";
    case ErrorCode::EmptyDataset: return "E_EMPTY_DATASET";
    case ErrorCode::ConstantDataset: return "E_CONSTANT_DATASET";
    case ErrorCode::Aliasing: return "E_ALIASING";
    case ErrorCode::EmptySpan: return "E_EMPTY_SPAN";
    case ErrorCode::SpanTooShort: return "E_SPAN_TOO_SHORT";
    case ErrorCode::DimensionMismatch: return "E_DIMENSION_MISMATCH";
    case ErrorCode::GridOutOfRange: return "E_GRID_OUT_OF_RANGE";
    case ErrorCode::IndexOutOfRange: return "E_INDEX_OUT_OF_RANGE";
    case ErrorCode::ZeroDenominator: return "E_ZERO_DENOMINATOR";
    case ErrorCode::Region: return "E_REGION";
    case ErrorCode::Manifest: return "E_MANIFEST";
  }
  return "E_UNKNOWN";
}

namespace {

std::string with_offset(const std::string& message, std::optional<std::uint64_t> offset) {
  if (!offset) return message;
  return message + " (at byte " + std::to_string(*offset) + ")";
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::uint64_t> byte_offset)
    : std::runtime_error(with_offset(message, byte_offset)), code_(code), offset_(byte_offset) {}

}  // namespace rfpipe
