#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace morphpiece {

enum class ErrorCode {
  Io,
  InvalidUtf8,
  ColumnOutOfRange,
  ZeroValidRecords,
  EmptyEffectiveCorpus,
  InvalidArgument,
  ParseError,
  DuplicateToken,
  NonDenseIds,
  UnknownToken,
  UnknownId,
  ArtifactMissing,
  EmptyCorpus,
  InconsistentArtifacts,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Error(ErrorCode code, const std::string& message, std::size_t line)
      : std::runtime_error(std::string(to_string(code)) + ": line " + std::to_string(line) + ": " +
                           message),
        code_(code),
        line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  // 1-based line number for parse errors, 0 when not applicable.
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_ = 0;
};

}  // namespace morphpiece
