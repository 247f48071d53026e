#ifndef HSCS_ERRORS_HPP
#define HSCS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hscs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define HSCS_DEFINE_ERROR(Name)                                              \
    struct Name : Error {                                                    \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

// construction / geometry
HSCS_DEFINE_ERROR(NonPositiveInput);
HSCS_DEFINE_ERROR(IdenticalParticles);
HSCS_DEFINE_ERROR(DegenerateCharges);
HSCS_DEFINE_ERROR(GeometryViolation);
HSCS_DEFINE_ERROR(ContinuumState);

// eigensolvers
HSCS_DEFINE_ERROR(NoConvergence);
HSCS_DEFINE_ERROR(NoBracket);
HSCS_DEFINE_ERROR(OutOfDomain);
HSCS_DEFINE_ERROR(AmbiguousLabel);
HSCS_DEFINE_ERROR(StepTooLarge);

// basis / quadrature
HSCS_DEFINE_ERROR(IndexOutOfRange);
HSCS_DEFINE_ERROR(MMismatch);
HSCS_DEFINE_ERROR(GridOverflow);

// radial system
HSCS_DEFINE_ERROR(NoOpenChannel);
HSCS_DEFINE_ERROR(AboveBreakup);
HSCS_DEFINE_ERROR(RhoOutOfRange);
HSCS_DEFINE_ERROR(StiffnessFailure);
HSCS_DEFINE_ERROR(LinearDependence);
HSCS_DEFINE_ERROR(ClosedChannelContamination);
HSCS_DEFINE_ERROR(IllConditionedMatch);
HSCS_DEFINE_ERROR(SingularMatrix);

// cli
HSCS_DEFINE_ERROR(ValidationError);

#undef HSCS_DEFINE_ERROR

} // namespace hscs

#endif
