#include "doctest.h"

#include <cmath>

#include "stokeslab/sibuya.hpp"

using namespace stokeslab;

namespace {
// matching powers of x^{-1/2} in u'' = (x^3+a2 x+a3)u with the classical
// two-term exponent gives (worked out by hand, frozen here):
//   B1 = a3
//   B2 = a3^2/2
//   B3 = a3^3/6 - a2^2/12
//   B4 = a3^4/24 - a2^2 a3/12 - a2/4
//   B5(a=0) = -21/80
cplx B1(cplx, cplx a3) { return a3; }
cplx B2(cplx, cplx a3) { return a3 * a3 / 2.0; }
cplx B3(cplx a2, cplx a3) { return a3 * a3 * a3 / 6.0 - a2 * a2 / 12.0; }
cplx B4(cplx a2, cplx a3) {
    return a3 * a3 * a3 * a3 / 24.0 - a2 * a2 * a3 / 12.0 - a2 / 4.0;
}
} // namespace

TEST_CASE("prefactor coefficients match the hand-derived recurrence values") {
    cplx a2(0.7, -0.3), a3(1.1, 0.4);
    AsymptoticSeries ser = series_coeffs({a2, a3}, 5);
    CHECK(std::abs(ser.B[1] - B1(a2, a3)) < 1e-14);
    CHECK(std::abs(ser.B[2] - B2(a2, a3)) < 1e-14);
    CHECK(std::abs(ser.B[3] - B3(a2, a3)) < 1e-14);
    CHECK(std::abs(ser.B[4] - B4(a2, a3)) < 1e-14);

    AsymptoticSeries zero = series_coeffs({0.0, 0.0}, 5);
    CHECK(std::abs(zero.B[1]) < 1e-15);
    CHECK(std::abs(zero.B[5] - cplx(-21.0 / 80.0, 0.0)) < 1e-14);
}

TEST_CASE("B_n are polynomials of degree <= n in (a2,a3)") {
    // finite-difference degree test: (n+1)-th forward difference of
    // t -> B_n(t*a) along a scaling direction must vanish for a polynomial
    // of degree <= n
    cplx a2(0.9, 0.2), a3(-0.5, 0.8);
    const int N = 6;
    for (int n = 1; n <= N; ++n) {
        int pts = n + 2;
        std::vector<cplx> vals;
        for (int i = 0; i < pts; ++i) {
            double t = double(i);
            vals.push_back(series_coeffs({t * a2, t * a3}, N).B[std::size_t(n)]);
        }
        // (n+1)-th forward difference annihilates degree <= n
        double scale = std::abs(vals.back()) + 1.0;
        for (int d = 0; d < n + 1; ++d)
            for (int i = 0; i + d + 1 < pts; ++i)
                vals[std::size_t(i)] = vals[std::size_t(i) + 1] - vals[std::size_t(i)];
        CHECK(std::abs(vals[0]) / scale < 1e-9);
    }
}

TEST_CASE("re-substitution residual matches the first dropped order") {
    // Substituting u = x^{-3/4}(sum B_n x^{-n/2}) e^{-E} with coefficients
    // through B_N leaves u'' - qu = -(N+1) B_{N+1} x^{-3/4-N/2} e^{-E} (1 +
    // O(x^{-1/2})): the first unmatched order carries the would-be B_{N+1}.
    PotentialParams a{cplx(1.0, 0.0), cplx(1.0, 0.0)};
    const int N = 8;
    AsymptoticSeries ser = series_coeffs(a, N);
    cplx B_next = series_coeffs(a, N + 1).B[std::size_t(N) + 1];

    // residual in units of x^{-3/4} e^{-E}
    auto residual_scaled = [&](double x) {
        cplx xi = 1.0 / std::sqrt(cplx(x, 0.0));
        cplx S0 = 0.0, S1 = 0.0, S2 = 0.0, pw = 1.0;
        for (int n = 0; n <= N; ++n) {
            double nu = -0.75 - 0.5 * double(n);
            S0 += ser.B[std::size_t(n)] * pw;
            S1 += nu * ser.B[std::size_t(n)] * pw;
            S2 += nu * (nu - 1.0) * ser.B[std::size_t(n)] * pw;
            pw *= xi;
        }
        cplx dE = ser.exponent_derivative(x);
        cplx d2E = 1.5 * std::sqrt(cplx(x, 0.0)) - 0.25 * a.a2 * std::pow(cplx(x, 0.0), -1.5);
        // E'^2 - q from the exact residual coefficients (no cancellation)
        cplx cres = 0.0;
        for (std::size_t r = 0; r < ser.residual.size(); ++r)
            cres += ser.residual[r] * std::pow(x, 3.0 - double(r));
        return S2 / (x * x) - 2.0 * dE * S1 / x + (cres - d2E) * S0;
    };

    double x1 = 100.0, x2 = 200.0;
    cplx r1 = residual_scaled(x1), r2 = residual_scaled(x2);
    cplx lead1 = -double(N + 1) * B_next * std::pow(x1, -0.5 * N);
    cplx lead2 = -double(N + 1) * B_next * std::pow(x2, -0.5 * N);
    CHECK(std::abs(r2 / lead2 - 1.0) < 0.25);
    CHECK(std::abs(r1 / lead1 - 1.0) < 0.35);

    // two-point order fit in powers of x^{1/2}
    double order = 2.0 * std::log(std::abs(r1 / r2)) / std::log(x2 / x1);
    CHECK(order > double(N) - 0.5);
    CHECK(order < double(N) + 0.5);
}

TEST_CASE("representation is independent of the exponent split") {
    // J = 2 (classical) and J = 10 must evaluate to the same function
    PotentialParams a{cplx(1.5, 0.5), cplx(-2.0, 1.0)};
    AsymptoticSeries s2 = series_coeffs(a, 36, 2);
    AsymptoticSeries s10 = series_coeffs(a, 36, 10);
    double R = std::max(matching_radius(s2), matching_radius(s10));
    for (double arg : {0.0, 0.4, -1.2}) {
        cplx x = R * cplx(std::cos(arg), std::sin(arg));
        ScaledWave w2 = eval_Y0_asymptotic_scaled(x, s2);
        ScaledWave w10 = eval_Y0_asymptotic_scaled(x, s10);
        cplx r = (w2.u / w10.u) * std::exp(w2.s - w10.s);
        cplx rd = (w2.du / w10.du) * std::exp(w2.s - w10.s);
        CHECK(std::abs(r - 1.0) < 1e-12);
        CHECK(std::abs(rd - 1.0) < 1e-12);
    }
}

TEST_CASE("real positive axis with real coefficients gives real values") {
    PotentialParams a{cplx(0.8, 0.0), cplx(-0.6, 0.0)};
    AsymptoticSeries ser = series_coeffs(a, 24, 6);
    double R = matching_radius(ser);
    ScaledWave w = eval_Y0_asymptotic_scaled(R, ser);
    CHECK(std::abs(w.u.imag()) < 1e-13 * std::abs(w.u.real()));
    CHECK(std::abs(w.du.imag()) < 1e-13 * std::abs(w.du.real()));
}

TEST_CASE("Schwarz reflection across the real axis") {
    PotentialParams a{0.0, 0.0};
    AsymptoticSeries ser = series_coeffs(a, 24, 6);
    double R = matching_radius(ser) * 1.2;
    double th = 0.59 * pi;
    ScaledWave up = eval_Y0_asymptotic_scaled(R * cplx(std::cos(th), std::sin(th)), ser);
    ScaledWave dn = eval_Y0_asymptotic_scaled(R * cplx(std::cos(th), -std::sin(th)), ser);
    CHECK(std::abs(std::conj(dn.u) - up.u) < 1e-12 * std::abs(up.u));
    CHECK(std::abs(dn.s - up.s) < 1e-9 * std::abs(up.s));
}

TEST_CASE("sector and radius guards") {
    PotentialParams a{0.0, 0.0};
    AsymptoticSeries ser = series_coeffs(a, 20, 6);
    CHECK_THROWS_AS((void)eval_Y0_asymptotic_scaled(cplx(-5.0, 0.1), ser), OutsideSector);
    CHECK_THROWS_AS((void)eval_Y0_asymptotic_scaled(cplx(2.0, 0.0), ser), RadiusTooSmall);
}

TEST_CASE("asymptotic seed against an outer propagated seed") {
    // value at x = R consistent with seeding at 1.6 R and integrating inward
    PotentialParams a{0.0, 0.0};
    AsymptoticSeries ser = series_coeffs(a, 32, 8);
    double R = matching_radius(ser);
    ScaledWave inner = eval_Y0_asymptotic_scaled(R, ser);
    ScaledWave outer = eval_Y0_asymptotic_scaled(1.6 * R, ser);
    ScaledWave prop = propagate_scaled(a, outer, cplx(R, 0.0), {1e-13, {}});
    cplx ru = (prop.u / inner.u) * std::exp(prop.s - inner.s);
    cplx rd = (prop.du / inner.du) * std::exp(prop.s - inner.s);
    CHECK(std::abs(ru - 1.0) < 1e-10);
    CHECK(std::abs(rd - 1.0) < 1e-10);
}
