#include "stokeslab/ode.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>

namespace stokeslab {

namespace {

namespace od = boost::numeric::odeint;

// first-order system for NSOL solutions of u'' = q u along x(t) = x0 + dir*t
template <int NSOL>
struct SegmentSystem {
    PotentialParams params;
    cplx x0;
    cplx dir;

    void operator()(const std::array<cplx, 2 * NSOL>& y, std::array<cplx, 2 * NSOL>& dydt,
                    double t) const {
        cplx q = params.q(x0 + dir * t);
        for (int i = 0; i < NSOL; ++i) {
            dydt[2 * i] = dir * y[2 * i + 1];
            dydt[2 * i + 1] = dir * (q * y[2 * i]);
        }
    }
};

template <int NSOL>
void integrate_segment(const PotentialParams& params, cplx x0, cplx target,
                       std::array<cplx, 2 * NSOL>& y, double& logscale,
                       const PropagateOptions& opts, std::vector<ScaledWave>* record,
                       PropagateStats* stats) {
    SegmentSystem<NSOL> sys{params, x0, target - x0};
    const double L = std::abs(sys.dir);

    auto stepper = od::make_controlled(opts.tol * 1e-30, opts.tol,
                                       od::runge_kutta_fehlberg78<std::array<cplx, 2 * NSOL>>());

    double t = 0.0;
    double qs = std::abs(params.q(x0));
    double dt = std::min(1.0, 0.1 / (L * (std::sqrt(qs) + 1.0) + 1.0));
    const double dt_min = 1e-12;

    std::size_t next_cp = 0;
    std::size_t nsteps = 0, nrej = 0;
    while (t < 1.0) {
        double limit =
            (next_cp < opts.checkpoints.size()) ? opts.checkpoints[next_cp] : 1.0;
        if (dt > limit - t) dt = limit - t;
        if (dt <= 0.0) dt = dt_min;

        od::controlled_step_result res = stepper.try_step(sys, y, t, dt);
        if (res == od::fail) {
            ++nrej;
            if (dt < dt_min)
                throw NonConvergence("propagate: step size collapsed below 1e-12 of contour");
            continue;
        }
        ++nsteps;

        double a = 0.0;
        for (const cplx& c : y) a = std::max(a, std::abs(c));
        if (a > 1e6 || a < 1e-6) {
            if (a == 0.0) throw NonConvergence("propagate: state vanished");
            double d = std::log(a);
            for (cplx& c : y) c /= a;
            logscale += d;
        }

        while (next_cp < opts.checkpoints.size() && t >= opts.checkpoints[next_cp] - 1e-15) {
            if (record)
                record->push_back(
                    {x0 + sys.dir * opts.checkpoints[next_cp], y[0], y[1], logscale});
            ++next_cp;
        }
        if (nsteps > 400000000ul) throw NonConvergence("propagate: step budget exhausted");
    }
    if (stats) {
        stats->steps = nsteps;
        stats->rejected = nrej;
    }
}

} // namespace

ScaledWave propagate_scaled(const PotentialParams& params, const ScaledWave& start, cplx target,
                            const PropagateOptions& opts, std::vector<ScaledWave>* record,
                            PropagateStats* stats) {
    if (!finite(target)) throw InvalidContour("propagate: non-finite target");
    ScaledWave w = start;
    w.renormalize();
    if (target == start.x) {
        if (record)
            for (std::size_t i = 0; i < opts.checkpoints.size(); ++i) record->push_back(w);
        return w;
    }
    std::array<cplx, 2> y{w.u, w.du};
    integrate_segment<1>(params, start.x, target, y, w.s, opts, record, stats);
    w.x = target;
    w.u = y[0];
    w.du = y[1];
    return w;
}

std::pair<ScaledWave, ScaledWave> propagate_pair(const PotentialParams& params,
                                                 const ScaledWave& s1, const ScaledWave& s2,
                                                 cplx target, const PropagateOptions& opts) {
    if (!finite(target)) throw InvalidContour("propagate: non-finite target");
    if (s1.x != s2.x) throw MismatchedPoint("propagate_pair: different starting points");
    if (target == s1.x) return {s1, s2};
    // bring both onto a common scale
    double s = std::max(s1.s, s2.s);
    std::array<cplx, 4> y{s1.u * std::exp(s1.s - s), s1.du * std::exp(s1.s - s),
                          s2.u * std::exp(s2.s - s), s2.du * std::exp(s2.s - s)};
    integrate_segment<2>(params, s1.x, target, y, s, opts, nullptr, nullptr);
    return {ScaledWave{target, y[0], y[1], s}, ScaledWave{target, y[2], y[3], s}};
}

WaveState propagate(const PotentialParams& params, const WaveState& start, cplx target, double tol,
                    double* global_error) {
    if (tol < 1e-14 || tol > 1e-6) throw Error("propagate: tol outside [1e-14, 1e-6]");
    PropagateOptions opts;
    opts.tol = tol;
    ScaledWave res = propagate_scaled(params, ScaledWave::from(start), target, opts);
    if (global_error) {
        opts.tol = std::max(1e-14, tol / 16.0);
        ScaledWave ref = propagate_scaled(params, ScaledWave::from(start), target, opts);
        double scale = std::max(std::abs(ref.u), std::abs(ref.du));
        double du_ = std::abs(res.u * std::exp(res.s - ref.s) - ref.u);
        double ddu = std::abs(res.du * std::exp(res.s - ref.s) - ref.du);
        *global_error = std::max(du_, ddu) / scale;
    }
    return res.unscaled();
}

namespace {

// compensated 4-term dot product sum_i a_i b_i (Ogita-Rump style): each
// product is split with an fma, partial sums with two-sum, all error terms
// folded back in. Keeps the heavy cancellation in u1 du2 - du1 u2 accurate
// relative to the small result, not to the large operands.
double dot4_compensated(const double* a, const double* b) {
    double s = 0.0, comp = 0.0;
    for (int i = 0; i < 4; ++i) {
        double p = a[i] * b[i];
        double ep = std::fma(a[i], b[i], -p);
        double t = s + p;
        double es = (std::abs(s) >= std::abs(p)) ? (s - t) + p : (p - t) + s;
        s = t;
        comp += ep + es;
    }
    return s + comp;
}

cplx det2_compensated(cplx a, cplx b, cplx c, cplx d) {
    // a*b - c*d
    const double re1[4] = {a.real(), -a.imag(), -c.real(), c.imag()};
    const double re2[4] = {b.real(), b.imag(), d.real(), d.imag()};
    const double im1[4] = {a.real(), a.imag(), -c.real(), -c.imag()};
    const double im2[4] = {b.imag(), b.real(), d.imag(), d.real()};
    return {dot4_compensated(re1, re2), dot4_compensated(im1, im2)};
}

} // namespace

cplx wronskian(const WaveState& s1, const WaveState& s2) {
    if (s1.x != s2.x) throw MismatchedPoint("wronskian: states at different points");
    return det2_compensated(s1.u, s2.du, s1.du, s2.u);
}

ScaledComplex wronskian(const ScaledWave& s1, const ScaledWave& s2) {
    if (s1.x != s2.x) throw MismatchedPoint("wronskian: states at different points");
    return {det2_compensated(s1.u, s2.du, s1.du, s2.u), s1.s + s2.s};
}

std::vector<cplx> derivative_tower(const PotentialParams& params, const WaveState& s, int K) {
    if (K < 0 || K > 200) throw Error("derivative_tower: K outside [0,200]");
    std::vector<cplx> d(std::size_t(K) + 1);
    d[0] = s.u;
    if (K >= 1) d[1] = s.du;
    const cplx q0 = params.q(s.x), q1 = params.dq(s.x), q2 = params.d2q(s.x), q3 = 6.0;
    for (int n = 0; n + 2 <= K; ++n) {
        cplx acc = q0 * d[n];
        if (n >= 1) acc += double(n) * q1 * d[n - 1];
        if (n >= 2) acc += 0.5 * double(n) * double(n - 1) * q2 * d[n - 2];
        if (n >= 3) acc += double(n) * double(n - 1) * double(n - 2) / 6.0 * q3 * d[n - 3];
        d[std::size_t(n) + 2] = acc;
        if (std::abs(d[std::size_t(n) + 2]) > 1e300)
            throw Overflow("derivative_tower: magnitude beyond 1e300");
    }
    return d;
}

std::vector<ScaledComplex> derivative_tower_scaled(const PotentialParams& params,
                                                   const ScaledWave& s, int K) {
    if (K < 0) throw Error("derivative_tower_scaled: negative K");
    std::vector<ScaledComplex> d(std::size_t(K) + 1);
    d[0] = ScaledComplex(s.u, s.s);
    if (K >= 1) d[1] = ScaledComplex(s.du, s.s);
    const cplx q0 = params.q(s.x), q1 = params.dq(s.x), q2 = params.d2q(s.x), q3 = 6.0;
    for (int n = 0; n + 2 <= K; ++n) {
        ScaledComplex acc = d[n] * q0;
        if (n >= 1) acc = acc + d[n - 1] * (double(n) * q1);
        if (n >= 2) acc = acc + d[n - 2] * (0.5 * double(n) * double(n - 1) * q2);
        if (n >= 3) acc = acc + d[n - 3] * (double(n) * double(n - 1) * double(n - 2) / 6.0 * q3);
        d[std::size_t(n) + 2] = acc;
    }
    return d;
}

} // namespace stokeslab
