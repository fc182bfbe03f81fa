// Copyright 2026 The GLP Authors
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

#ifndef GLP_ERROR_HPP_
#define GLP_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace glp {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition.
class InvalidRequest : public Error {
 public:
  using Error::Error;
};

// An oracle could not produce a result at all (as opposed to reporting a
// failed trial). Searches abort on this after persisting completed work.
class OracleError : public Error {
 public:
  using Error::Error;
};

// Malformed persisted data or wire traffic. `offset` locates the problem in
// the byte stream it was read from.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        reason_(what),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }
  // The message without the offset suffix.
  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
  std::size_t offset_;
};

}  // namespace glp

#endif  // GLP_ERROR_HPP_
