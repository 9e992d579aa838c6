#pragma once

#include <stdexcept>
#include <string>

namespace navmine {

// Failure classes surfaced by the library. The CLI maps them onto its two
// non-zero exit codes depending on whether they were raised while loading
// configuration or while processing data.
enum class Errc {
  invalid_argument,
  invalid_config,
  unreadable_input,
  begin_not_in_pages,
  final_not_in_pages,
  begin_equals_final,
  too_few_pages,
  no_transitions,
  final_unreachable_from_begin,
  singular_system,
  unknown_page,
  empty_population,
  no_candidate_pages,
  missing_label,
  no_predecessor,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument:              return "InvalidArgument";
    case Errc::invalid_config:                return "InvalidConfig";
    case Errc::unreadable_input:              return "UnreadableInput";
    case Errc::begin_not_in_pages:            return "BeginNotInPages";
    case Errc::final_not_in_pages:            return "FinalNotInPages";
    case Errc::begin_equals_final:            return "BeginEqualsFinal";
    case Errc::too_few_pages:                 return "TooFewPages";
    case Errc::no_transitions:                return "NoTransitions";
    case Errc::final_unreachable_from_begin:  return "FinalUnreachableFromBegin";
    case Errc::singular_system:               return "SingularSystem";
    case Errc::unknown_page:                  return "UnknownPage";
    case Errc::empty_population:              return "EmptyPopulation";
    case Errc::no_candidate_pages:            return "NoCandidatePages";
    case Errc::missing_label:                 return "MissingLabel";
    case Errc::no_predecessor:                return "NoPredecessor";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace navmine
