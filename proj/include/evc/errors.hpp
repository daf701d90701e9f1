#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evc {

enum class ErrorKind {
  Parameter,
  Decode,
  EnvelopeAuth,
  Freshness,
  Duplicate,
  UnknownPseudonym,
  Auth,
  DoubleSpend,
  Admission,
  ChainExhausted,
  Protocol,
  Lookup,
  Settlement,
  Config,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by wire decoders; carries the offending field name.
class DecodeError : public Error {
 public:
  DecodeError(std::string field, const std::string& what)
      : Error(ErrorKind::Decode, field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace evc
