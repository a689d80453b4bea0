#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qkdfinite {

enum class ErrorKind {
  kDomain,
  kUnphysicalInput,
  kMissingWeight,
  kInvalidWeights,
  kInfeasibleTraceOut,
  kScale,
  kNoPositiveRate,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the
// optimizer in particular) can tell "skip this point" from "bad input".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qkdfinite
