#pragma once

#include <stdexcept>
#include <string>

namespace wbplan {

enum class ErrorCode {
  kParse,
  kInvalidMap,
  kInvalidArgument,
  kInvalidAnchor,
  kInvalidTime,
  kSingularSystem,
  kDomain,
  kConfiguration,
  kOptimizationFailed,
  kUnsafeTrajectory,
};

const char* toString(ErrorCode code) noexcept;

/// Library-wide exception. Every throwing entry point in wbplan raises this
/// type; callers branch on code() rather than on the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with the 1-based line and 0-based byte offset into the
/// document where the problem was found.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t byte_offset)
      : Error(ErrorCode::kParse, what + " (line " + std::to_string(line) +
                                     ", byte " + std::to_string(byte_offset) + ")"),
        line_(line),
        byte_offset_(byte_offset) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t byteOffset() const noexcept { return byte_offset_; }

 private:
  std::size_t line_;
  std::size_t byte_offset_;
};

}  // namespace wbplan
