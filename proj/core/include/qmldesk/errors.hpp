#pragma once

#include <stdexcept>
#include <string>

namespace qmldesk {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define QMLDESK_ERROR_TYPE(Name)                              \
  class Name : public Error {                                 \
   public:                                                    \
    explicit Name(const std::string& what) : Error(what) {}   \
  }

// State preparation / simulator contract violations.
QMLDESK_ERROR_TYPE(ZeroVector);
QMLDESK_ERROR_TYPE(DimensionOverflow);
QMLDESK_ERROR_TYPE(DimensionMismatch);
QMLDESK_ERROR_TYPE(TargetOutOfRange);
QMLDESK_ERROR_TYPE(NonUnitaryGate);
QMLDESK_ERROR_TYPE(EmptyKeepSet);
QMLDESK_ERROR_TYPE(InvalidState);

// Linear-system solving.
QMLDESK_ERROR_TYPE(SingularSystem);
QMLDESK_ERROR_TYPE(PostSelectionFailed);
QMLDESK_ERROR_TYPE(NotPositiveDefinite);
QMLDESK_ERROR_TYPE(EigenvalueOutOfRange);

// Training / data.
QMLDESK_ERROR_TYPE(EmptyTrainingSet);
QMLDESK_ERROR_TYPE(ZeroTarget);
QMLDESK_ERROR_TYPE(SizeCapExceeded);
QMLDESK_ERROR_TYPE(NoMarkedItems);
QMLDESK_ERROR_TYPE(MeanFieldNonConvergence);

// Front end.
QMLDESK_ERROR_TYPE(UnknownAlgorithm);
QMLDESK_ERROR_TYPE(ParseError);
QMLDESK_ERROR_TYPE(InsufficientRuns);

#undef QMLDESK_ERROR_TYPE

}  // namespace qmldesk
