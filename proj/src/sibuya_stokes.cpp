#include "stokeslab/sibuya.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace stokeslab {

namespace {

// Evaluation pipeline for the solutions Yk entering C0 = W[Y0,Y2]/W[Y1,Y2].
// Each Yk is computed in its rotated coordinate y = omega^{-k} x, where it is
// subdominant on the positive real axis: seeded from the asymptotic series at
// y = R and integrated inward, the direction in which it grows relative to
// contamination.
//
// The descent must stop at the safe radius: where arg q(y), continued from
// the seed, reaches +-pi, the local growth direction flips (an anti-Stokes
// crossing) and further inward transport would amplify contamination like
// e^{2 int |Re sqrt(q)|}. Wronskians of a pair are therefore taken at anchor
// points on each member's own ray at its safe radius, or at scanned points
// r e^{i theta}; the partner reaches the match point by a chord, which moves
// it toward dominance and is stable. The candidate with the least
// cancellation wins; Wronskian constancy across candidates cross-checks the
// transport.
struct Pipeline {
    PotentialParams a;
    StokesOptions opts;
    std::array<AsymptoticSeries, 3> ser;
    double R = 0.0;
    std::array<double, 3> safe{0.0, 0.0, 0.0};
    std::vector<double> scan_radii;  // descending

    std::array<std::map<double, ScaledWave>, 3> on_ray;  // own-ray states by radius
    std::array<bool, 3> built{false, false, false};
    std::map<std::tuple<int, long long, long long>, ScaledWave> chords;

    Pipeline(const PotentialParams& a_, const StokesOptions& o) : a(a_), opts(o) {
        int N = std::min(40, o.N + o.extra_terms);
        for (int k = 0; k < 3; ++k) {
            ser[std::size_t(k)] = series_coeffs(a.rotated(k), N, o.J);
            R = std::max(R, matching_radius(ser[std::size_t(k)]));
        }
        R *= o.radius_factor;
        for (int k = 0; k < 3; ++k) safe[std::size_t(k)] = safe_radius(ser[std::size_t(k)].a);

        double tc = 1.0;
        for (int k = 0; k < 3; ++k) {
            const auto& ak = ser[std::size_t(k)].a;
            tc = std::max({tc, std::sqrt(std::abs(ak.a2)), std::cbrt(std::abs(ak.a3))});
        }
        // beyond ~the turning scale the sectors separate exponentially and
        // candidate points stop being useful; keep the scan in the benign zone
        double rmin = std::max({0.05, 1.05 * safe[0], 1.05 * safe[1], 1.05 * safe[2]});
        double rmax = std::max(std::min(1.3 * tc, 0.75 * R), 1.5 * rmin);
        const int n_r = 6;
        for (int i = 0; i < n_r; ++i)
            scan_radii.push_back(rmax * std::pow(rmin / rmax, double(i) / double(n_r - 1)));
    }

    // largest radius at which arg q, unwrapped inward from the seed, reaches
    // +-(pi - margin); zero when it never does
    double safe_radius(const PotentialParams& ak) const {
        const int n = 4000;
        double prev = std::arg(ak.q(R));
        double acc = prev;
        for (int i = 1; i <= n; ++i) {
            double t = R * (1.0 - double(i) / double(n));
            double cur = std::arg(ak.q(cplx(t, 0.0)));
            double d = cur - prev;
            while (d > pi) d -= 2.0 * pi;
            while (d < -pi) d += 2.0 * pi;
            acc += d;
            prev = cur;
            if (std::abs(acc) >= pi - 0.15) return t;
        }
        return 0.0;
    }

    double anchor(int k) const { return std::max(safe[std::size_t(k)], 0.02); }

    void build(int k) {
        if (built[std::size_t(k)]) return;
        ScaledWave seed = eval_Y0_asymptotic_scaled(R, ser[std::size_t(k)]);
        double stop = anchor(k);
        std::vector<double> want;  // radii to record, descending
        for (double r : scan_radii)
            if (r > stop + 1e-9 && r < R) want.push_back(r);
        for (int kk = 0; kk < 3; ++kk) {
            double r = anchor(kk);
            if (r > stop + 1e-9 && r < R) want.push_back(r);
        }
        std::sort(want.begin(), want.end(), std::greater<>());
        want.erase(std::unique(want.begin(), want.end()), want.end());
        want.push_back(stop);
        PropagateOptions po;
        po.tol = opts.ode_tol;
        for (double r : want) po.checkpoints.push_back((R - r) / (R - stop));
        std::vector<ScaledWave> rec;
        propagate_scaled(ser[std::size_t(k)].a, seed, cplx(stop, 0.0), po, &rec);
        auto& m = on_ray[std::size_t(k)];
        for (std::size_t i = 0; i < want.size() && i < rec.size(); ++i) m[want[i]] = rec[i];
        built[std::size_t(k)] = true;
    }

    // state of Yk (own rotated coordinate) at the x-plane point P. Transport
    // off the own ray goes along the circle |y| = r in arc hops of at most
    // pi/5 (plus a short radial tail when r sits between recorded radii):
    // constant-radius transport never dives into the inner region, and the
    // angular direction moves Yk toward dominance.
    ScaledWave state_at(int k, cplx P) {
        build(k);
        cplx y = omega_pow(-k) * P;
        double r = std::abs(y);
        double phi = std::arg(y);
        auto key = std::make_tuple(k, llround(y.real() * 1e9), llround(y.imag() * 1e9));
        auto it = chords.find(key);
        if (it != chords.end()) return it->second;

        // nearest recorded own-ray radius at or outside max(r, safe)
        const auto& m = on_ray[std::size_t(k)];
        double need = std::max(r, anchor(k)) - 1e-9;
        double rstart = -1.0;
        for (const auto& [rr, st] : m)
            if (rr >= need && (rstart < 0.0 || rr < rstart)) rstart = rr;
        if (rstart < 0.0) rstart = m.rbegin()->first;
        ScaledWave cur = m.at(rstart);

        PropagateOptions po;
        po.tol = opts.ode_tol;
        int hops = std::max(1, int(std::ceil(std::abs(phi) / (0.2 * pi))));
        for (int h = 1; h <= hops; ++h) {
            cplx target = std::polar(rstart, phi * double(h) / double(hops));
            cur = propagate_scaled(ser[std::size_t(k)].a, cur, target, po);
        }
        if (std::abs(y - cur.x) > 1e-12 * (1.0 + std::abs(y)))
            cur = propagate_scaled(ser[std::size_t(k)].a, cur, y, po);
        chords.emplace(key, cur);
        return cur;
    }

    struct WEval {
        ScaledComplex w;
        double digits_lost = 0.0;
    };

    // Wronskian of (Yi, Yj) in the x coordinate at P
    WEval wronskian_at(int i, int j, cplx P) {
        ScaledWave si = state_at(i, P);
        ScaledWave sj = state_at(j, P);
        cplx t1 = si.u * (omega_pow(-j) * sj.du);
        cplx t2 = (omega_pow(-i) * si.du) * sj.u;
        cplx d = t1 - t2;
        WEval ev;
        ev.w = ScaledComplex(d, si.s + sj.s);
        double prod = std::max(std::abs(t1), std::abs(t2));
        ev.digits_lost =
            std::log10(std::max(prod, 1e-300)) - std::log10(std::max(std::abs(d), 1e-300));
        return ev;
    }

    std::vector<MatchPoint> candidates(int i, int j) const {
        std::vector<MatchPoint> c;
        double ranc = std::max(anchor(i), anchor(j));
        double bis = pi * double(i + j) / 5.0;
        c.push_back({false, ranc, 2.0 * pi * double(i) / 5.0, 0.0});
        c.push_back({false, ranc, 2.0 * pi * double(j) / 5.0, 0.0});
        c.push_back({false, ranc, bis, 0.0});
        for (double r : scan_radii) {
            c.push_back({false, r, bis, 0.0});
            c.push_back({false, r, 2.0 * pi * double(i) / 5.0, 0.0});
        }
        return c;
    }

    struct PairResult {
        ScaledComplex w;
        MatchPoint point;
        double spread = 0.0;
    };

    // The Wronskian is a constant: candidates whose evaluations agree
    // identify themselves as trustworthy, while transport failures scatter
    // wildly. Pick the largest agreeing cluster, then the least cancellation
    // within it.
    PairResult best_wronskian(int i, int j) {
        struct Cand {
            MatchPoint mp;
            WEval ev;
        };
        std::vector<Cand> cs;
        for (const MatchPoint& mp : candidates(i, j)) {
            cplx P = std::polar(mp.r, mp.theta_x);
            cs.push_back({mp, wronskian_at(i, j, P)});
        }
        auto agree = [](const ScaledComplex& a, const ScaledComplex& b) {
            if (a.zero() || b.zero()) return a.zero() && b.zero();
            cplx r = (a / b).value();
            return std::abs(r - 1.0) < 1e-3;
        };
        std::size_t best_i = 0, best_n = 0;
        double best_digits = 1e30;
        for (std::size_t p = 0; p < cs.size(); ++p) {
            std::size_t n = 0;
            for (std::size_t q = 0; q < cs.size(); ++q)
                if (agree(cs[p].ev.w, cs[q].ev.w)) ++n;
            if (n > best_n || (n == best_n && cs[p].ev.digits_lost < best_digits)) {
                best_n = n;
                best_i = p;
                best_digits = cs[p].ev.digits_lost;
            }
        }
        PairResult best;
        best.w = cs[best_i].ev.w;
        best.point = cs[best_i].mp;
        best.point.digits_lost = cs[best_i].ev.digits_lost;
        for (const Cand& c : cs) {
            if (!agree(c.ev.w, best.w)) continue;
            cplx r = (c.ev.w / best.w).value();
            best.spread = std::max(best.spread, std::abs(r - 1.0));
        }
        if (best_n < 2) best.spread = std::max(best.spread, 1.0);  // unvalidated
        return best;
    }
};

} // namespace

StokesData stokes_C0(const PotentialParams& a, const StokesOptions& opts) {
    Pipeline pl(a, opts);
    auto w02 = pl.best_wronskian(0, 2);
    auto w12 = pl.best_wronskian(1, 2);
    if (w12.point.digits_lost > 13.0 || w12.w.zero())
        throw DegenerateWronskian("stokes_C0: W[Y1,Y2] unresolved (dependent pair)");

    StokesData sd;
    sd.a = a;
    sd.C0_scaled = w02.w / w12.w;
    sd.C0 = sd.C0_scaled.value();
    sd.matching_radius = pl.R;
    sd.truncation = std::min(40, opts.N + opts.extra_terms);
    sd.w02_point = w02.point;
    sd.w12_point = w12.point;

    double est = w02.spread + w12.spread;
    est += std::pow(10.0, std::max(w02.point.digits_lost, w12.point.digits_lost) - 15.5);
    if (opts.estimate_error) {
        StokesOptions o2 = opts;
        o2.estimate_error = false;
        o2.radius_factor = opts.radius_factor * 1.25;
        o2.extra_terms = opts.extra_terms + 2;
        StokesData ref = stokes_C0(a, o2);
        if (!ref.C0_scaled.zero() && !sd.C0_scaled.zero()) {
            ScaledComplex ratio = sd.C0_scaled / ref.C0_scaled;
            est = std::max(est, std::abs(ratio.value() - 1.0));
        }
    }
    sd.error_estimate = est;
    return sd;
}

ScaledComplex stokes_w02(const PotentialParams& a, const StokesOptions& opts, W02Config* reuse) {
    StokesOptions o = opts;
    o.estimate_error = false;
    Pipeline pl(a, o);
    if (reuse && reuse->R > 0.0) {
        cplx P = std::polar(reuse->point.r, reuse->point.theta_x);
        return pl.wronskian_at(0, 2, P).w;
    }
    auto res = pl.best_wronskian(0, 2);
    if (reuse) {
        reuse->R = pl.R;
        reuse->point = res.point;
    }
    return res.w;
}

ScaledWave eval_Yk_scaled(cplx x, const PotentialParams& a, int k, const StokesOptions& opts) {
    PotentialParams ak = a.rotated(k);
    cplx y = omega_pow(-k) * x;
    int N = std::min(40, opts.N + opts.extra_terms);
    AsymptoticSeries ser = series_coeffs(ak, N, opts.J);
    double R = matching_radius(ser) * opts.radius_factor;

    ScaledWave res;
    if (std::abs(y) >= R && std::abs(std::arg(y)) < 0.6 * pi - 1e-9) {
        res = eval_Y0_asymptotic_scaled(y, ser);
    } else {
        ScaledWave seed = eval_Y0_asymptotic_scaled(R, ser);
        PropagateOptions po;
        po.tol = opts.ode_tol;
        double r = std::abs(y);
        if (r < 1e-300) {
            res = propagate_scaled(ak, seed, 0.0, po);
        } else {
            ScaledWave mid = propagate_scaled(ak, seed, cplx(r, 0.0), po);
            res = (y == cplx(r, 0.0)) ? mid : propagate_scaled(ak, mid, y, po);
        }
    }
    // back to the x coordinate: Yk(x) = Y0(y), Yk'(x) = omega^{-k} Y0'(y)
    res.x = x;
    res.du *= omega_pow(-k);
    return res;
}

WaveState eval_Yk(cplx x, const PotentialParams& a, int k, double tol) {
    StokesOptions o;
    o.ode_tol = std::clamp(tol, 1e-14, 1e-6);
    return eval_Yk_scaled(x, a, k, o).unscaled();
}

} // namespace stokeslab
