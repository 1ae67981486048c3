#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gaitemo {

enum class Errc {
  // ingestion
  MalformedHeader,
  BadFieldCount,
  NonFiniteValue,
  NonMonotonicIndex,
  DuplicateWalkId,
  UnknownLabel,
  MissingFile,
  WidthMismatch,
  MalformedRow,
  UnknownModelKind,
  VersionMismatch,
  CorruptPayload,
  Io,
  // preprocessing
  InvalidWalk,
  EmptyWalk,
  WrongStage,
  TooShort,
  StageMismatch,
  LabelLengthMismatch,
  NoSegments,
  InvalidConfig,
  // features
  EmptyInput,
  EmptyDirection,
  BothSidesEmpty,
  MissingSide,
  // classify
  DegenerateClass,
  SingleClass,
  NotBinary,
  TooFewPerClass,
  // synthgait
  InvalidParams,
};

inline constexpr std::string_view errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::BadFieldCount: return "BadFieldCount";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::NonMonotonicIndex: return "NonMonotonicIndex";
    case Errc::DuplicateWalkId: return "DuplicateWalkId";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::MissingFile: return "MissingFile";
    case Errc::WidthMismatch: return "WidthMismatch";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::UnknownModelKind: return "UnknownModelKind";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::CorruptPayload: return "CorruptPayload";
    case Errc::Io: return "Io";
    case Errc::InvalidWalk: return "InvalidWalk";
    case Errc::EmptyWalk: return "EmptyWalk";
    case Errc::WrongStage: return "WrongStage";
    case Errc::TooShort: return "TooShort";
    case Errc::StageMismatch: return "StageMismatch";
    case Errc::LabelLengthMismatch: return "LabelLengthMismatch";
    case Errc::NoSegments: return "NoSegments";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::EmptyDirection: return "EmptyDirection";
    case Errc::BothSidesEmpty: return "BothSidesEmpty";
    case Errc::MissingSide: return "MissingSide";
    case Errc::DegenerateClass: return "DegenerateClass";
    case Errc::SingleClass: return "SingleClass";
    case Errc::NotBinary: return "NotBinary";
    case Errc::TooFewPerClass: return "TooFewPerClass";
    case Errc::InvalidParams: return "InvalidParams";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable error kind. `line` and `column`
/// are 1-based positions for parse errors and 0 when not applicable.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code),
        line_(line),
        column_(column) {}

  Errc code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  Errc code_;
  std::size_t line_;
  std::size_t column_;
};

/// Process exit code for an error: 1 for environment/I/O, 2 for bad input.
inline constexpr int exit_code_for(Errc c) noexcept {
  return (c == Errc::Io || c == Errc::MissingFile) ? 1 : 2;
}

}  // namespace gaitemo
