#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bli {

/// Broad failure class; the CLI maps it onto process exit codes.
enum class ErrorKind {
  Config = 2,
  Data = 3,
  Backend = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A data error tied to a 1-based line of an input file.
class LineError : public Error {
 public:
  LineError(const std::string& name, std::size_t line, const std::string& detail = {})
      : Error(ErrorKind::Data,
              name + " at line " + std::to_string(line) + (detail.empty() ? "" : ": " + detail)),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

#define BLI_DEFINE_ERROR(Name, Kind)                                         \
  class Name : public Error {                                                \
   public:                                                                   \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

#define BLI_DEFINE_LINE_ERROR(Name)                                  \
  class Name : public LineError {                                    \
   public:                                                           \
    explicit Name(std::size_t line, const std::string& detail = {})  \
        : LineError(#Name, line, detail) {}                          \
  };

// lexicon_io
BLI_DEFINE_LINE_ERROR(MalformedRow)
BLI_DEFINE_LINE_ERROR(DuplicateRow)
BLI_DEFINE_ERROR(PairMismatch, Data)
BLI_DEFINE_ERROR(UnsupportedLanguage, Config)

// embedding_store
BLI_DEFINE_ERROR(BadHeader, Data)
BLI_DEFINE_LINE_ERROR(NonFiniteValue)
BLI_DEFINE_LINE_ERROR(ZeroVector)
BLI_DEFINE_LINE_ERROR(BadToken)

// DimMismatch is raised both by the .vec parser (with a line) and by
// retrieval (without one).
class DimMismatch : public Error {
 public:
  explicit DimMismatch(const std::string& what) : Error(ErrorKind::Data, what) {}
  DimMismatch(std::size_t line, const std::string& detail)
      : Error(ErrorKind::Data, "DimMismatch at line " + std::to_string(line) + ": " + detail),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

// prompt_engine
BLI_DEFINE_ERROR(SlotMismatch, Config)
BLI_DEFINE_ERROR(UnknownModel, Config)
BLI_DEFINE_ERROR(UnknownTemplate, Config)
BLI_DEFINE_ERROR(InsufficientSeeds, Data)

// generation
BLI_DEFINE_ERROR(BackendUnavailable, Backend)
BLI_DEFINE_ERROR(MalformedResponse, Backend)

// evaluation
BLI_DEFINE_ERROR(UnknownQuery, Data)
BLI_DEFINE_ERROR(SchemaMismatch, Data)

// baseline
BLI_DEFINE_ERROR(InsufficientPairs, Data)
BLI_DEFINE_ERROR(QueryNotInEmbeddings, Data)

// cli / config
BLI_DEFINE_ERROR(ConfigError, Config)
BLI_DEFINE_ERROR(IoError, Data)

#undef BLI_DEFINE_ERROR
#undef BLI_DEFINE_LINE_ERROR

}  // namespace bli
