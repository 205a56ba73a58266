#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blockpki {

enum class ErrorCode {
  EmptyAggregation,
  DuplicateSigner,
  NonceReuse,
  InvalidScalar,
  InvalidElement,
  EmptyBlock,
  BadIndex,
  InsufficientBalance,
  UnknownSender,
  UnknownTx,
  Unmined,
  InvalidParams,
  NoControl,
  AssemblyFailed,
  ParseError,
  ChainIntegrity,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const { return code_; }
  // Message without the code prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace blockpki
