// Copyright 2026 The oodsim Authors
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

namespace oodsim
{

/// Base of every error raised by the library. The CLI maps these to exit
/// code 2 (data/validation) except InvariantViolation, which maps to 3.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Tensor or image dimensions that do not compose.
class ShapeError : public Error
{
public:
  using Error::Error;
};

/// Malformed or truncated file content.
class FormatError : public Error
{
public:
  using Error::Error;
};

/// A precondition or configuration invariant was violated by the caller.
class ValidationError : public Error
{
public:
  using Error::Error;
};

/// NaN or Inf produced where only finite values are allowed.
class NumericError : public Error
{
public:
  using Error::Error;
};

/// Pipeline stage timestamps recorded out of order.
class OrderingError : public Error
{
public:
  using Error::Error;
};

/// Internal property that must hold by construction did not.
class InvariantViolation : public Error
{
public:
  using Error::Error;
};

}  // namespace oodsim
