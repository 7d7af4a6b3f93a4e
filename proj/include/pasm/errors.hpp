#ifndef PASM_ERRORS_HPP
#define PASM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pasm {

enum class ErrorKind {
  Vocabulary,
  Clash,
  Isomorphism,
  Stratification,
  Eval,
  Range,
  Rule,
  Scale,
  Criticality,
  Coverage,
  Fixture,
  Inconclusive,
  Parse,
  Io,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

#define PASM_DEFINE_ERROR(Name, Kind)                                       \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& message) : Error(Kind, message) {}     \
  }

PASM_DEFINE_ERROR(VocabularyError, ErrorKind::Vocabulary);
PASM_DEFINE_ERROR(ClashError, ErrorKind::Clash);
PASM_DEFINE_ERROR(IsomorphismError, ErrorKind::Isomorphism);
PASM_DEFINE_ERROR(StratificationError, ErrorKind::Stratification);
PASM_DEFINE_ERROR(EvalError, ErrorKind::Eval);
PASM_DEFINE_ERROR(RangeError, ErrorKind::Range);
PASM_DEFINE_ERROR(RuleError, ErrorKind::Rule);
PASM_DEFINE_ERROR(ScaleError, ErrorKind::Scale);
PASM_DEFINE_ERROR(CriticalityViolation, ErrorKind::Criticality);
PASM_DEFINE_ERROR(CoverageGap, ErrorKind::Coverage);
PASM_DEFINE_ERROR(FixtureError, ErrorKind::Fixture);
PASM_DEFINE_ERROR(InconclusiveError, ErrorKind::Inconclusive);
PASM_DEFINE_ERROR(ParseError, ErrorKind::Parse);
PASM_DEFINE_ERROR(IoError, ErrorKind::Io);

#undef PASM_DEFINE_ERROR

}  // namespace pasm

#endif
