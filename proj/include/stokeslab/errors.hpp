#pragma once

#include <stdexcept>
#include <string>

namespace stokeslab {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ode
struct NonConvergence : Error { using Error::Error; };
struct InvalidContour : Error { using Error::Error; };
struct MismatchedPoint : Error { using Error::Error; };
struct Overflow : Error { using Error::Error; };

// sibuya
struct OutsideSector : Error { using Error::Error; };
struct RadiusTooSmall : Error { using Error::Error; };
struct DegenerateWronskian : Error { using Error::Error; };

// oscillator
struct NotConverged : Error { using Error::Error; };
struct BranchCollision : Error { using Error::Error; };

// stokes_solver
struct NewtonDiverged : Error { using Error::Error; };
struct ConditionViolated : Error { using Error::Error; };
struct ZeroB2 : Error { using Error::Error; };

// geometry
struct NotOnSigma : Error { using Error::Error; };

// family
struct InsufficientSeparation : Error { using Error::Error; };

} // namespace stokeslab
