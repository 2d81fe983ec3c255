#pragma once

// Eigenvalues E_k(beta) of H(beta) = p^2 + x^2 + i beta x^3 by two
// independent routes: truncation in the harmonic-oscillator eigenbasis
// (spectral route, the ground truth at small |beta|) and a zero of the
// Stokes multiplier of the scaled cubic ODE (the construct under test).

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stokeslab/numeric.hpp"
#include "stokeslab/sibuya.hpp"

namespace stokeslab {

struct EigenQuery {
    cplx beta{0.0, 0.0};
    int k = 0;
    int basis_size = 256;
};

struct EigenBranch {
    int k = 0;
    std::vector<cplx> beta_samples;
    std::vector<cplx> E_samples;
    std::string method;  // "spectral" | "stokes"
};

// H(beta) in the orthonormal oscillator basis: diag(2n+1) + i beta X3, where
// X3 couples n -> n+-1, n+-3 through ladder-operator algebra. Complex
// symmetric.
Eigen::MatrixXcd build_matrix(cplx beta, int N);

// eigenvalue nearest 2k+1 after continuation from beta = 0; converged when
// doubling the basis moves it by < 1e-9 (throws NotConverged past N = 2048)
cplx eigen_spectral(const EigenQuery& q);

// fixed-basis spectral evaluation (no doubling validation); same radial
// continuation from beta = 0
cplx eigen_spectral_fixed(const EigenQuery& q);

// zero of E -> C0(-(omega^2/3) beta^{-8/5}, omega^3 {(2/27) beta^{-12/5} +
// beta^{-2/5} E}) by a secant iteration seeded at 2k+1; branch beta^{+-1/5}
// principal. tol bounds the relative residual |C0| against the C0 scale at
// E + 1/2.
cplx eigen_stokes(const EigenQuery& q, double tol = 1e-8);

// predictor-corrector continuation along a beta path; neighbours k-1, k+1
// are tracked alongside and a level approach below 1e-3 aborts loudly
EigenBranch trace_branch(int k, const std::vector<cplx>& beta_path, int basis_size = 256);

// potential coefficients of the scaled cubic ODE whose Stokes multiplier
// vanishes exactly at eigenvalues of H(beta)
PotentialParams oscillator_potential(cplx beta, cplx E);

} // namespace stokeslab
