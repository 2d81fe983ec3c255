#pragma once

// Propagation of u'' = (x^3 + a2 x + a3) u along straight rays in the
// complex plane, with a logarithmic normalization so that solutions spanning
// e^{+-1e5} and far beyond stay representable.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "stokeslab/errors.hpp"
#include "stokeslab/numeric.hpp"

namespace stokeslab {

struct PotentialParams {
    cplx a2{0.0, 0.0};
    cplx a3{0.0, 0.0};

    cplx q(cplx x) const { return (x * x + a2) * x + a3; }
    cplx dq(cplx x) const { return 3.0 * x * x + a2; }
    cplx d2q(cplx x) const { return 6.0 * x; }
    // d3q = 6, higher derivatives vanish

    PotentialParams rotated(int k) const {
        // coefficient rotation that matches x -> omega^{-k} x
        return {omega_pow(-2 * k) * a2, omega_pow(-3 * k) * a3};
    }
    PotentialParams conj() const { return {std::conj(a2), std::conj(a3)}; }
};

struct WaveState {
    cplx x{0.0, 0.0};
    cplx u{0.0, 0.0};
    cplx du{0.0, 0.0};
};

struct Ray {
    cplx origin{0.0, 0.0};
    cplx direction{1.0, 0.0};  // unit modulus
    double length = 0.0;
};

// A wave state whose (u, du) carry a shared log scale: the represented values
// are u = m_u * e^s, du = m_du * e^s.
struct ScaledWave {
    cplx x{0.0, 0.0};
    cplx u{0.0, 0.0};
    cplx du{0.0, 0.0};
    double s = 0.0;

    ScaledComplex value() const { return {u, s}; }
    ScaledComplex derivative() const { return {du, s}; }
    WaveState unscaled() const { return {x, u * std::exp(s), du * std::exp(s)}; }
    static ScaledWave from(const WaveState& w) { return {w.x, w.u, w.du, 0.0}; }
    void renormalize() {
        double a = std::max(std::abs(u), std::abs(du));
        if (a > 0.0 && (a > 1e6 || a < 1e-6)) {
            double d = std::log(a);
            double f = 1.0 / a;
            u *= f;
            du *= f;
            s += d;
        }
    }
};

struct PropagateOptions {
    double tol = 1e-12;
    // states are additionally reported at these ray parameters (fractions of
    // the segment, strictly increasing in (0,1))
    std::vector<double> checkpoints{};
};

struct PropagateStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
};

// Integrates along the straight segment start.x -> target. Checkpoint states
// (if requested) are appended to *record in order. Throws NonConvergence when
// the step size collapses, InvalidContour on a non-finite target.
ScaledWave propagate_scaled(const PotentialParams& params, const ScaledWave& start, cplx target,
                            const PropagateOptions& opts = {},
                            std::vector<ScaledWave>* record = nullptr,
                            PropagateStats* stats = nullptr);

// Plain interface; zero-length propagation returns the start state.
// If global_error != nullptr, a tolerance-refinement estimate of the global
// error (max over u, du, relative) is stored there.
WaveState propagate(const PotentialParams& params, const WaveState& start, cplx target,
                    double tol, double* global_error = nullptr);

// Two solutions advanced through the identical step sequence (one linear
// system). The numerical flow is then a single linear map for both, so their
// Wronskian drifts only at the local-error level even across strong
// dominant/subdominant growth. Both states share one log scale.
std::pair<ScaledWave, ScaledWave> propagate_pair(const PotentialParams& params,
                                                 const ScaledWave& s1, const ScaledWave& s2,
                                                 cplx target, const PropagateOptions& opts = {});

// s1.u * s2.du - s1.du * s2.u; requires s1.x == s2.x
cplx wronskian(const WaveState& s1, const WaveState& s2);
ScaledComplex wronskian(const ScaledWave& s1, const ScaledWave& s2);

// Exact derivative recursion u^{(n+2)} = sum_j binom(n,j) q^{(j)} u^{(n-j)},
// returned as (u, u', ..., u^{(K)}). Throws Overflow past 1e300.
std::vector<cplx> derivative_tower(const PotentialParams& params, const WaveState& s, int K);

// Same recursion carried in log scale; entry k represents u^{(k)}.
std::vector<ScaledComplex> derivative_tower_scaled(const PotentialParams& params,
                                                   const ScaledWave& s, int K);

} // namespace stokeslab
