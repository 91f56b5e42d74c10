// Copyright 2026 The rs2ad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace rs2ad {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rotation matrix failed the orthonormality / determinant check.
class NonOrthonormalInput : public Error {
 public:
  using Error::Error;
};

/// A cloud arrived in a different frame than the operation expects.
class FrameMismatch : public Error {
 public:
  using Error::Error;
};

/// A ray or beam index is outside the model's grid.
class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// An operation that needs points received an empty cloud.
class EmptyCloud : public Error {
 public:
  using Error::Error;
};

/// Two sequences that must be the same length are not.
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// The ground set cannot support a plane fit.
class DegenerateGround : public Error {
 public:
  using Error::Error;
};

/// Two generated points claim the same ray; the occlusion contract was violated upstream.
class DuplicateRay : public Error {
 public:
  using Error::Error;
};

/// A histogram with zero total weight cannot be normalized.
class ZeroTotal : public Error {
 public:
  using Error::Error;
};

/// Cosine similarity is undefined for a zero vector.
class ZeroVector : public Error {
 public:
  using Error::Error;
};

/// A binary cloud file's length is not a whole number of records.
class TruncatedFile : public Error {
 public:
  using Error::Error;
};

/// Generic read/write failure.
class IoFailure : public Error {
 public:
  using Error::Error;
};

/// A JSON document does not match the expected schema; the message names the field path.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A sensor config file could not be parsed; the message names the key and line.
class ConfigParseError : public Error {
 public:
  using Error::Error;
};

/// The requested target label id does not exist in the frame.
class TargetNotFound : public Error {
 public:
  using Error::Error;
};

}  // namespace rs2ad
