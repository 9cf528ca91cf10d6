// Copyright 2026 The Synergy Sim Authors
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

#ifndef SYNERGY__ERROR_HPP_
#define SYNERGY__ERROR_HPP_

#include <stdexcept>
#include <string>

namespace synergy
{

/// Raised when an argument violates a documented precondition or type invariant.
class InvalidInput : public std::invalid_argument
{
public:
  explicit InvalidInput(const std::string & what) : std::invalid_argument(what) {}
};

/// Raised by the configuration loader (bad syntax, unknown keys, bad values).
class ConfigError : public std::runtime_error
{
public:
  explicit ConfigError(const std::string & what) : std::runtime_error(what) {}
};

namespace detail
{
inline void require(bool condition, const char * message)
{
  if (!condition) {
    throw InvalidInput(message);
  }
}
}  // namespace detail

}  // namespace synergy

#endif  // SYNERGY__ERROR_HPP_
