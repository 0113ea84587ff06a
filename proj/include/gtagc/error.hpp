// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace gtagc {

/// Error class names printed by the CLI as the first token of a failure line.
enum class ErrorKind {
  Io,
  Parse,
  DimensionMismatch,
  NonFinite,
  InvalidArgument,
  Config,
  Convergence,
  CollapsedCluster,
  Format,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gtagc
