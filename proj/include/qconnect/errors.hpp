#pragma once

#include <stdexcept>
#include <string>

namespace qconnect {

enum class ErrorKind { Domain, Pole, Resonance, Convergence, Index, Word, Config, IO };

const char* error_kind_name(ErrorKind kind);

class QError : public std::runtime_error {
 public:
  QError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

#define QCONNECT_ERROR(Name, Kind)                                   \
  class Name : public QError {                                       \
   public:                                                           \
    explicit Name(const std::string& what) : QError(Kind, what) {}   \
  };

QCONNECT_ERROR(DomainError, ErrorKind::Domain)
QCONNECT_ERROR(PoleError, ErrorKind::Pole)
QCONNECT_ERROR(ResonanceError, ErrorKind::Resonance)
QCONNECT_ERROR(ConvergenceError, ErrorKind::Convergence)
QCONNECT_ERROR(IndexError, ErrorKind::Index)
QCONNECT_ERROR(WordError, ErrorKind::Word)
QCONNECT_ERROR(ConfigError, ErrorKind::Config)
QCONNECT_ERROR(IOError, ErrorKind::IO)

#undef QCONNECT_ERROR

// Throws an exception of the given kind, so callers can relabel an error
// without losing its type.
[[noreturn]] void throw_error(ErrorKind kind, const std::string& what);

}  // namespace qconnect
