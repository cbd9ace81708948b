#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace msacheck {

enum class ErrorKind {
  InvalidArgument,
  MalformedInput,
  ConfigError,
  EmptyDocument,
  TooLong,
  IndexOutOfRange,
  IncompleteMapping,
  DegenerateHead,
  BackendUnavailable,
  MalformedReply,
  TooManyTokens,
  SingularSystem,
  DomainError,
  NotRelevant,
  LengthMismatch,
  ArityError,
  EmptySlice,
  MissingMetadata,
  NotFound,
  VersionConflict,
  UnknownTarget,
  StaleRevision,
  InvalidDetermination,
};

std::string_view to_string(ErrorKind kind);
std::optional<ErrorKind> parse_error_kind(std::string_view name);

// Every failure raised by the library carries a kind so callers (CLI, HTTP
// layer, per-cell error markers) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace msacheck
