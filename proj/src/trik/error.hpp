// SPDX-License-Identifier: Apache-2.0

#ifndef TRIK_ERROR_HPP
#define TRIK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace trik
{

enum class ErrorKind
{
  InvalidArgument,
  Domain,
  NonConvergence,
  Singular,
  Coalescence,
  DimensionMismatch,
};

// Single exception type for the core library; the C API maps `kind()` onto status codes.
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace trik

#endif  // TRIK_ERROR_HPP
