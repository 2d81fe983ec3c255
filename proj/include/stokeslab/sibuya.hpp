#pragma once

// The subdominant solution Y0(x; a) of u'' = (x^3 + a2 x + a3) u, its sector
// rotations Yk, and the Stokes multiplier C0 defined by the connection
// identity Yk = Ck Y{k+1} - omega Y{k+2}.
//
// Y0 is normalized by
//   Y0(x) ~ x^{-3/4} [1 + sum_N B_N x^{-N/2}] exp(-(2/5)x^{5/2} - a2 x^{1/2})
// as x -> +inf in |arg x| < 3pi/5. Internally the representation may carry
// more WKB terms in the exponent (exponent_terms below); folding the
// x^{-1/2}, x^{-3/2}, ... terms of the phase integral into the exponent keeps
// the prefactor series well behaved when |a2|, |a3| are large. All such
// representations agree with the normalization above as x -> +inf.

#include <optional>
#include <vector>

#include "stokeslab/ode.hpp"

namespace stokeslab {

struct AsymptoticSeries {
    PotentialParams a;
    int order = 0;           // N: highest retained prefactor coefficient B_N
    int exponent_terms = 2;  // J: exponent carries x^{(5-2j)/2}, j = 0..J

    std::vector<cplx> sqrt_coeffs;  // s_j: E'(x) = sum_j s_j x^{(3-2j)/2}
    std::vector<cplx> residual;     // c_r: E'^2 - q = sum_r c_r x^{3-r}
    std::vector<cplx> B;            // B_0 = 1, ..., B_N

    cplx exponent(cplx x) const;             // E(x)
    cplx exponent_derivative(cplx x) const;  // E'(x)
};

// Coefficients by substitution of the ansatz into the ODE and matching powers
// of x^{-1/2}. J = 2 is the classical normalization above.
AsymptoticSeries series_coeffs(const PotentialParams& a, int N, int J = 2);

struct SeriesEvalInfo {
    double min_term_rel = 0.0;  // smallest retained term / |sum|
    int min_term_index = 0;
};

// Truncated asymptotic representation at x, principal branches throughout
// (cut along the negative real axis). Throws OutsideSector when
// |arg x| >= 3pi/5 and RadiusTooSmall when the smallest retained term is not
// below 1e-16 of the sum.
ScaledWave eval_Y0_asymptotic_scaled(cplx x, const AsymptoticSeries& ser,
                                     SeriesEvalInfo* info = nullptr);
WaveState eval_Y0_asymptotic(cplx x, const PotentialParams& a, int N, int J = 2);

// Smallest radius R >= 6 (and beyond the turning-point scale) at which the
// series satisfies the 1e-16 smallest-term criterion.
double matching_radius(const AsymptoticSeries& ser, double rel_target = 1e-16);

struct StokesOptions {
    double tol = 1e-10;        // requested relative accuracy of C0
    int N = 40;                // prefactor truncation
    int J = 10;                // exponent terms
    double ode_tol = 1e-12;
    double radius_factor = 1.0;  // scales the matching radius (stability re-runs)
    int extra_terms = 0;         // added to N (stability re-runs)
    bool estimate_error = true;  // recompute at (1.25 R, N+2) and compare
};

// Where a pairwise Wronskian was evaluated: either the origin or the point
// r * exp(i theta_x).
struct MatchPoint {
    bool origin = true;
    double r = 0.0;
    double theta_x = 0.0;
    double digits_lost = 0.0;  // log10(product scale / |W|), cancellation cost
};

struct StokesData {
    PotentialParams a;
    cplx C0{0.0, 0.0};       // plain value (may over/underflow for extreme a)
    ScaledComplex C0_scaled; // always valid
    double matching_radius = 0.0;
    int truncation = 0;
    double error_estimate = 0.0;
    MatchPoint w02_point, w12_point;
};

// C0 = W[Y0,Y2] / W[Y1,Y2]; each Wronskian is constant, so the two factors
// may be evaluated at different points. Candidate matching points are scanned
// and the least cancellation-prone one is used for each pair. Throws
// DegenerateWronskian when W[Y1,Y2] cannot be resolved.
StokesData stokes_C0(const PotentialParams& a, const StokesOptions& opts = {});

// Yk(x; a) = Y0(omega^{-k} x; omega^{-2k} a2, omega^{-3k} a3), with the
// chain-rule factor omega^{-k} in the derivative.
ScaledWave eval_Yk_scaled(cplx x, const PotentialParams& a, int k, const StokesOptions& opts = {});
WaveState eval_Yk(cplx x, const PotentialParams& a, int k, double tol);

// Scaled W[Y0, Y2](a): vanishes exactly at the zeros of C0 and is the
// numerically robust object for zero hunting at large |a|. The matching
// configuration chosen on the first call can be reused for nearby parameters
// so that root iterations see a smooth function.
struct W02Config {
    MatchPoint point;
    double R = 0.0;
};
ScaledComplex stokes_w02(const PotentialParams& a, const StokesOptions& opts = {},
                         W02Config* reuse = nullptr);

} // namespace stokeslab
