#include "fkising/error.hpp"

namespace fkising {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyDomain: return "EmptyDomain";
    case ErrorKind::UnknownSite: return "UnknownSite";
    case ErrorKind::InvalidBondConfig: return "InvalidBondConfig";
    case ErrorKind::IncompatibleState: return "IncompatibleState";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::DegenerateWeights: return "DegenerateWeights";
    case ErrorKind::UnsupportedBC: return "UnsupportedBC";
    case ErrorKind::EmptyCluster: return "EmptyCluster";
    case ErrorKind::MissingSign: return "MissingSign";
    case ErrorKind::DegenerateLoop: return "DegenerateLoop";
    case ErrorKind::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorKind::EmptyCollection: return "EmptyCollection";
    case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::AtomOutsideDomain: return "AtomOutsideDomain";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::DomainTooLarge: return "DomainTooLarge";
    case ErrorKind::InsufficientStatistics: return "InsufficientStatistics";
    case ErrorKind::CorrelationLengthTooLarge: return "CorrelationLengthTooLarge";
    case ErrorKind::IncompatibleLambda: return "IncompatibleLambda";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace fkising
