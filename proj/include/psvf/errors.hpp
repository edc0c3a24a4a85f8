#pragma once

#include <stdexcept>
#include <string>

namespace psvf {

enum class ErrorCode {
  InvalidArgument = 1,
  ParseError,
  NotOnSwitchingManifold,
  NotATangency,
  DegenerateTangency,
  UndefinedSliding,
  EventLocationFailure,
  BranchBudgetExceeded,
  InadmissibleWord,
  OffInvariantSet,
  SectionNotReached,
  AlphabetMismatch,
  EmptyCurve,
  FamilyMismatch,
  DegenerateCurve,
  SkeletonMismatch,
  IoError,
};

const char* error_code_name(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// C layer can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by trajectory synthesis; `index` is the position (within the
/// window, zero based) of the first symbol of the forbidden pair.
class InadmissibleWordError : public Error {
 public:
  InadmissibleWordError(long long index, long long from, long long to)
      : Error(ErrorCode::InadmissibleWord,
              "inadmissible word: transition " + std::to_string(from) + " -> " + std::to_string(to) +
                  " at index " + std::to_string(index)),
        index_(index), from_(from), to_(to) {}
  long long index() const noexcept { return index_; }
  long long from() const noexcept { return from_; }
  long long to() const noexcept { return to_; }

 private:
  long long index_, from_, to_;
};

}  // namespace psvf
