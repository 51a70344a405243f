#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fkising {

enum class ErrorKind {
  EmptyDomain,
  UnknownSite,
  InvalidBondConfig,
  IncompatibleState,
  InvalidParameter,
  DegenerateWeights,
  UnsupportedBC,
  EmptyCluster,
  MissingSign,
  DegenerateLoop,
  EmptyEnsemble,
  EmptyCollection,
  TruncationTooSmall,
  AtomOutsideDomain,
  InsufficientSamples,
  DomainTooLarge,
  InsufficientStatistics,
  CorrelationLengthTooLarge,
  IncompatibleLambda,
  ParseError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fkising
