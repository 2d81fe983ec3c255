#include "stokeslab/stokes_solver.hpp"

#include "stokeslab/errors.hpp"

namespace stokeslab {

namespace {

bool arg_admissible(double th) {
    // (0, pi) or [-pi, -pi/2); std::arg returns pi for the negative real
    // axis, which is the same ray as -pi and admissible
    if (th > 0.0 && th < pi) return true;
    if (th >= pi) return true;
    return th < -0.5 * pi;
}

cplx zeta_of(cplx phase, cplx A16, double lambda, cplx z) {
    return phase * A16 * (1.0 + std::pow(lambda, -5.0 / 6.0) * z) * std::pow(lambda, 1.0 / 6.0);
}

} // namespace

std::pair<OperatorCoeffs, bool> normalize_b2(const OperatorCoeffs& c) {
    if (c.b2 == cplx(0.0, 0.0)) throw ZeroB2("normalize_b2: b2 = 0");
    if (arg_admissible(std::arg(c.b2))) return {c, false};
    return {OperatorCoeffs{-c.b0, c.b1, -c.b2}, true};
}

cplx reduced_residual(cplx zeta, double lambda, const OperatorCoeffs& c,
                      const std::function<cplx(cplx)>& eigenvalue) {
    cplx z2 = zeta * zeta;
    cplx z4 = z2 * z2;
    cplx z6 = z4 * z2;
    cplx z8 = z4 * z4;
    cplx beta = std::pow(zeta, -2.5);
    cplx E = eigenvalue(beta);
    cplx lhs = omega_pow(3) * z6 + 13.5 * E * omega_pow(3) * zeta +
               0.375 * omega_pow(4) * z8 / (lambda * lambda) +
               2.25 * c.b0 * omega_pow(2) * z4 / (lambda * lambda * lambda);
    cplx rhs = 13.5 * c.b2 * lambda - 3.375 * c.b1 * c.b1 * std::pow(lambda, -4.0);
    return lhs - rhs;
}

std::function<cplx(cplx)> spectral_eigenvalue_callback(int level, int basis_size) {
    return [level, basis_size](cplx beta) {
        EigenQuery q;
        q.beta = beta;
        q.k = level;
        q.basis_size = basis_size;
        return eigen_spectral_fixed(q);
    };
}

MatchSolution solve_match(double lambda, const OperatorCoeffs& coeffs, int level,
                          const SolveOptions& opts) {
    if (opts.enforce_lambda_min && lambda < opts.lambda_min)
        throw Error("solve_match: lambda below the validated range");
    auto [c, flipped] = normalize_b2(coeffs);

    const cplx A = 13.5 * c.b2;
    double argA = std::arg(A);
    int branch;
    cplx phase;
    if (argA > 0.0 && argA < pi) {
        branch = 0;
        phase = std::polar(1.0, -pi / 5.0);
    } else {
        branch = 1;
        phase = std::polar(1.0, 2.0 * pi / 15.0);
    }
    const cplx A16 = std::pow(A, 1.0 / 6.0);
    const double a0 = double(2 * level + 1);

    auto eigenvalue = spectral_eigenvalue_callback(level, opts.basis_size);
    auto G = [&](cplx z) {
        return reduced_residual(zeta_of(phase, A16, lambda, z), lambda, c, eigenvalue);
    };

    cplx z = -a0 / (6.0 * A);
    const double bound = 1e-10 * std::abs(A) * lambda;
    cplx g = G(z);
    bool ok = false;
    for (int it = 0; it < 40; ++it) {
        double h = 1e-7 * std::max(1.0, std::abs(z));
        cplx dg = (G(z + h) - G(z - h)) / (2.0 * h);
        if (dg == cplx(0.0, 0.0)) throw NewtonDiverged("solve_match: flat derivative");
        cplx step = -g / dg;
        z += step;
        g = G(z);
        if (std::abs(g) < 0.01 * bound || std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) {
            ok = true;
            break;
        }
        if (std::abs(z) > 50.0 * (1.0 + std::abs(a0 / (6.0 * A))))
            throw NewtonDiverged("solve_match: iterate escaped");
    }
    if (!ok && !(std::abs(g) < bound)) throw NewtonDiverged("solve_match: no convergence");

    MatchSolution sol;
    sol.lambda = lambda;
    sol.level = level;
    sol.flipped = flipped;
    sol.branch = branch;
    sol.z = z;
    sol.zeta = zeta_of(phase, A16, lambda, z);
    sol.beta = std::pow(sol.zeta, -2.5);
    cplx z4 = sol.zeta * sol.zeta * sol.zeta * sol.zeta;
    sol.xi0 = -omega_pow(2) / 6.0 * z4;
    sol.residual = std::abs(g);

    if (!(std::abs(std::arg(sol.zeta)) < 0.25 * pi - opts.eps_cond))
        throw ConditionViolated("solve_match: |arg zeta| >= pi/4 - eps");
    if (!((omega_pow(2) * z4).imag() > 0.0))
        throw ConditionViolated("solve_match: Im(omega^2 zeta^4) <= 0");
    if (!(sol.residual < bound))
        throw ConditionViolated("solve_match: residual above 1e-10 |A| lambda");
    return sol;
}

std::pair<cplx, cplx> scaled_coeffs(const MatchSolution& sol, const OperatorCoeffs& coeffs) {
    OperatorCoeffs c = sol.flipped ? normalize_b2(coeffs).first : coeffs;
    double l = sol.lambda;
    cplx a = 2.0 * sol.xi0 * std::pow(l, -2.0 / 3.0);
    cplx b = (c.b2 * l - sol.xi0 * sol.xi0 / (l * l) + c.b0 * sol.xi0 / (l * l * l) -
              0.25 * c.b1 * c.b1 / (l * l * l * l)) /
             l;
    return {a, b};
}

PotentialParams family_potential(const MatchSolution& sol, const OperatorCoeffs& coeffs) {
    auto [a, b] = scaled_coeffs(sol, coeffs);
    double l = sol.lambda;
    return {2.0 * sol.xi0, b * l};
}

double stokes_zero_check(const MatchSolution& sol, const OperatorCoeffs& coeffs) {
    PotentialParams a = family_potential(sol, coeffs);
    // a3 offset equivalent to E -> E + 1/2 (half a level spacing)
    cplx t = std::pow(sol.beta, -0.2);
    cplx da3 = omega_pow(3) * (t * t) * 0.5;
    PotentialParams ap = a;
    ap.a3 += da3;

    StokesOptions so;
    so.N = 38;
    so.estimate_error = false;
    // the match point must be picked where W02 is generic (the perturbed
    // parameters); near the zero the cancellation is the signal and cannot
    // guide the selection
    W02Config cfg;
    ScaledComplex wref = stokes_w02(ap, so, &cfg);
    ScaledComplex w = stokes_w02(a, so, &cfg);
    return std::exp(w.log_abs() - wref.log_abs());
}

} // namespace stokeslab
