#ifndef HEUN_ERRORS_HPP
#define HEUN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace heun {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define HEUN_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& what) : Error(what) {}   \
    }

HEUN_DEFINE_ERROR(NonConvergent);       // a series or AGM-style iteration failed to settle
HEUN_DEFINE_ERROR(NoConvergence);       // a Newton search exhausted its seeds
HEUN_DEFINE_ERROR(PoleAt);              // evaluation requested too close to a pole
HEUN_DEFINE_ERROR(DomainError);         // argument outside the admissible domain
HEUN_DEFINE_ERROR(DegenerateLattice);   // two branch points e_i coincide
HEUN_DEFINE_ERROR(IllConditioned);      // collocation system condition number too large
HEUN_DEFINE_ERROR(AmbiguousNullspace);  // two smallest singular values too close
HEUN_DEFINE_ERROR(InterpolationInconsistent); // extra sample off the fitted polynomial
HEUN_DEFINE_ERROR(SpectralDegenerate);  // |Q(E)| below threshold, Bethe form breaks down
HEUN_DEFINE_ERROR(InconsistentState);   // two energy formulas disagree
HEUN_DEFINE_ERROR(MaxIterations);       // Newton iteration cap reached
HEUN_DEFINE_ERROR(SingularJacobian);    // Newton linear solve failed
HEUN_DEFINE_ERROR(PathLost);            // continuation step diverged or roots collided
HEUN_DEFINE_ERROR(DenominatorZero);     // rational recursion hit a vanishing denominator
HEUN_DEFINE_ERROR(RootCollision);       // polynomial roots not distinct where required
HEUN_DEFINE_ERROR(ResidualTooLarge);    // constructed state fails its residual bound
HEUN_DEFINE_ERROR(NotProportional);     // sampled ratio of two functions is not constant
HEUN_DEFINE_ERROR(CutoffTooSmall);      // banded operator leaks past the mode cutoff

#undef HEUN_DEFINE_ERROR

} // namespace heun

#endif
