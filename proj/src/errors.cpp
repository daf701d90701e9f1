#include "evc/errors.hpp"

namespace evc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter: return "ParameterError";
    case ErrorKind::Decode: return "DecodeError";
    case ErrorKind::EnvelopeAuth: return "EnvelopeAuthError";
    case ErrorKind::Freshness: return "FreshnessError";
    case ErrorKind::Duplicate: return "DuplicateError";
    case ErrorKind::UnknownPseudonym: return "UnknownPseudonymError";
    case ErrorKind::Auth: return "AuthError";
    case ErrorKind::DoubleSpend: return "DoubleSpendError";
    case ErrorKind::Admission: return "AdmissionError";
    case ErrorKind::ChainExhausted: return "ChainExhaustedError";
    case ErrorKind::Protocol: return "ProtocolError";
    case ErrorKind::Lookup: return "LookupError";
    case ErrorKind::Settlement: return "SettlementError";
    case ErrorKind::Config: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace evc
