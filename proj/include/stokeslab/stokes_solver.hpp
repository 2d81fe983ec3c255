#pragma once

// Solves the matching equation that produces xi0(lambda): in the variable
// zeta = beta^{-2/5},
//
//   omega^3 zeta^6 + (27/2) E(zeta^{-5/2}) omega^3 zeta
//     + (3/8) omega^4 zeta^8 lambda^{-2} + (9/4) b0 omega^2 zeta^4 lambda^{-3}
//   = (27/2) b2 lambda - (27/8) b1^2 lambda^{-4},
//
// with E the level-k eigenvalue branch of the cubic-perturbed oscillator.
// The admissible solution satisfies |arg zeta| < pi/4 - eps and
// Im(omega^2 zeta^4) > 0, equivalently Im xi0 < 0 with
// 2 xi0 = -(omega^2/3) beta^{-8/5} = -(omega^2/3) zeta^4.

#include <functional>

#include "stokeslab/oscillator.hpp"

namespace stokeslab {

struct OperatorCoeffs {
    cplx b0{0.0, 0.0};
    cplx b1{0.0, 0.0};
    cplx b2{0.0, 0.0};
};

struct MatchSolution {
    double lambda = 0.0;
    cplx z{0.0, 0.0};
    cplx zeta{0.0, 0.0};
    cplx beta{0.0, 0.0};
    cplx xi0{0.0, 0.0};
    int branch = 0;        // 0: e^{-i pi/5} ansatz, 1: e^{2 pi i/15} ansatz
    bool flipped = false;  // coordinates were flipped to admit arg b2
    double residual = 0.0; // |reduced equation| at the solution
    int level = 0;         // a0 = 2*level + 1
};

// arg b2 must lie in (0, pi) or [-pi, -pi/2); otherwise the coordinate
// change (x0, x1, x2) -> (-x0, x1, -x2) replaces (b0, b1, b2) by
// (-b0, b1, -b2), which does. Throws ZeroB2.
std::pair<OperatorCoeffs, bool> normalize_b2(const OperatorCoeffs& c);

// LHS - RHS of the reduced equation at zeta; E evaluated through the
// supplied eigenvalue callback at beta = zeta^{-5/2}
cplx reduced_residual(cplx zeta, double lambda, const OperatorCoeffs& c,
                      const std::function<cplx(cplx)>& eigenvalue);

struct SolveOptions {
    int basis_size = 160;    // oscillator basis for the eigenvalue callback
    double eps_cond = 1e-3;  // margin in the |arg zeta| < pi/4 - eps check
    double lambda_min = 50.0;
    bool enforce_lambda_min = true;
};

// Newton iteration on z in zeta = phase * A^{1/6} (1 + lambda^{-5/6} z)
// lambda^{1/6}, seeded at z0 = -a0/(6A). Flips coordinates first when arg b2
// requires it. Verifies the admissibility conditions and the residual bound
// |residual| < 1e-10 |A| lambda, else throws ConditionViolated.
MatchSolution solve_match(double lambda, const OperatorCoeffs& c, int level,
                          const SolveOptions& opts = {});

// a(lambda) = 2 xi0 lambda^{-2/3};
// b(lambda) = (b2 l - xi0^2 l^{-2} + b0 xi0 l^{-3} - b1^2 l^{-4}/4) / l,
// both for the effective (possibly flipped) coefficients
std::pair<cplx, cplx> scaled_coeffs(const MatchSolution& sol, const OperatorCoeffs& c);

// coefficients of the cubic ODE the family member solves
PotentialParams family_potential(const MatchSolution& sol, const OperatorCoeffs& c);

// |W[Y0,Y2](a2, a3)| at the solution, relative to its value with a3 offset
// by half an eigenvalue spacing: the quality of the Stokes zero
double stokes_zero_check(const MatchSolution& sol, const OperatorCoeffs& c);

// level-k eigenvalue callback backed by the spectral route (radial
// continuation from beta = 0, fixed basis)
std::function<cplx(cplx)> spectral_eigenvalue_callback(int level, int basis_size);

} // namespace stokeslab
