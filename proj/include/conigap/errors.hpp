#ifndef CONIGAP_ERRORS_HPP
#define CONIGAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace conigap {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define CONIGAP_ERROR(Name)                                                    \
  struct Name : Error {                                                        \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {}       \
  }

// ratseries
CONIGAP_ERROR(VariableMismatch);
CONIGAP_ERROR(DivisionByZeroSeries);
CONIGAP_ERROR(CompositionDomain);
CONIGAP_ERROR(NotReversible);
CONIGAP_ERROR(ExpLogDomain);
CONIGAP_ERROR(ThetaIntegrationConstant);
CONIGAP_ERROR(TruncationExceeded);
CONIGAP_ERROR(ParseError);
// mirror
CONIGAP_ERROR(RingClosureFailure);
CONIGAP_ERROR(FrobeniusRecurrenceSingular);
// hae
CONIGAP_ERROR(MissingLowerGenus);
CONIGAP_ERROR(RegularityViolation);
CONIGAP_ERROR(InsufficientOrder);
CONIGAP_ERROR(SingularGapSystem);
// elliptic
CONIGAP_ERROR(NomeOutOfRange);
CONIGAP_ERROR(PoleProximity);
CONIGAP_ERROR(BisectionFailure);
CONIGAP_ERROR(QuadratureSeriesMismatch);
CONIGAP_ERROR(BranchAmbiguity);
CONIGAP_ERROR(OutsideSupport);
CONIGAP_ERROR(DiagonalSingularity);
CONIGAP_ERROR(NonPositiveArgument);
// tr
CONIGAP_ERROR(DegenerateRamification);
CONIGAP_ERROR(KernelPole);
CONIGAP_ERROR(QuadratureNonConvergent);
CONIGAP_ERROR(GridTooCoarse);
// coulomb
CONIGAP_ERROR(CoincidentEigenvalues);
CONIGAP_ERROR(AcceptanceCollapse);
CONIGAP_ERROR(InvalidConfig);
CONIGAP_ERROR(FrameMismatch);

#undef CONIGAP_ERROR

} // namespace conigap

#endif
