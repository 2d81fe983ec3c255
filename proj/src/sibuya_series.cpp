#include "stokeslab/sibuya.hpp"

#include <algorithm>
#include <cmath>

namespace stokeslab {

namespace {

// q(x)/x^3 = 1 + a2 x^{-2} + a3 x^{-3} =: 1 + p2 y^2 + p3 y^3 in y = 1/x
cplx p_coeff(const PotentialParams& a, int n) {
    if (n == 0) return 1.0;
    if (n == 2) return a.a2;
    if (n == 3) return a.a3;
    return 0.0;
}

} // namespace

cplx AsymptoticSeries::exponent(cplx x) const {
    cplx L = std::log(x);
    cplx acc = 0.0;
    for (int j = 0; j <= exponent_terms; ++j) {
        double pw = 0.5 * double(5 - 2 * j);
        cplx e_j = sqrt_coeffs[std::size_t(j)] * (2.0 / double(5 - 2 * j));
        acc += e_j * std::exp(pw * L);
    }
    return acc;
}

cplx AsymptoticSeries::exponent_derivative(cplx x) const {
    cplx L = std::log(x);
    cplx acc = 0.0;
    for (int j = 0; j <= exponent_terms; ++j) {
        double pw = 0.5 * double(3 - 2 * j);
        acc += sqrt_coeffs[std::size_t(j)] * std::exp(pw * L);
    }
    return acc;
}

AsymptoticSeries series_coeffs(const PotentialParams& a, int N, int J) {
    if (N < 1 || N > 40) throw Error("series_coeffs: N outside [1,40]");
    if (J < 2 || J > 24) throw Error("series_coeffs: J outside [2,24]");
    AsymptoticSeries ser;
    ser.a = a;
    ser.order = N;
    ser.exponent_terms = J;

    // sqrt-of-series: sum_{i+j=n} s_i s_j = p_n
    auto& s = ser.sqrt_coeffs;
    s.assign(std::size_t(J) + 1, 0.0);
    s[0] = 1.0;
    for (int n = 1; n <= J; ++n) {
        cplx acc = p_coeff(a, n);
        for (int i = 1; i < n; ++i) acc -= s[std::size_t(i)] * s[std::size_t(n - i)];
        s[std::size_t(n)] = acc / 2.0;
    }

    // E'^2 - q in powers x^{3-r}; zero through r = J by construction
    auto& c = ser.residual;
    c.assign(std::size_t(2 * J) + 1, 0.0);
    for (int r = 0; r <= 2 * J; ++r) {
        cplx acc = -p_coeff(a, r);
        for (int i = std::max(0, r - J); i <= std::min(J, r); ++i)
            acc += s[std::size_t(i)] * s[std::size_t(r - i)];
        c[std::size_t(r)] = acc;
    }

    // prefactor recurrence; nu_n = -3/4 - n/2
    auto nu = [](int n) { return -0.75 - 0.5 * double(n); };
    auto& B = ser.B;
    B.assign(std::size_t(N) + 1, 0.0);
    B[0] = 1.0;
    for (int M = 0; M < N; ++M) {
        cplx acc = 0.0;
        for (int j = 1; j <= J; ++j) {
            int n = M - 2 * j + 1;
            if (n < 0) continue;
            acc += s[std::size_t(j)] * (2.0 * nu(n) + 0.5 * double(3 - 2 * j)) * B[std::size_t(n)];
        }
        if (M - 4 >= 0) acc -= nu(M - 4) * (nu(M - 4) - 1.0) * B[std::size_t(M - 4)];
        for (int r = J + 1; r <= 2 * J; ++r) {
            int n = M - 2 * r + 6;
            if (n < 0 || n > M) continue;
            acc -= c[std::size_t(r)] * B[std::size_t(n)];
        }
        B[std::size_t(M) + 1] = acc / double(M + 1);
    }
    return ser;
}

ScaledWave eval_Y0_asymptotic_scaled(cplx x, const AsymptoticSeries& ser, SeriesEvalInfo* info) {
    double argx = std::arg(x);
    if (std::abs(argx) >= 0.6 * pi) throw OutsideSector("eval_Y0_asymptotic: |arg x| >= 3pi/5");

    const cplx L = std::log(x);
    const cplx xi = std::exp(-0.5 * L);  // x^{-1/2}, principal
    const int N = ser.order;

    // optimal truncation: sum up to the smallest term
    std::vector<cplx> terms(std::size_t(N) + 1);
    double min_mag = 1.0;
    int min_idx = 0;
    {
        cplx pw = 1.0;
        for (int n = 0; n <= N; ++n) {
            terms[std::size_t(n)] = ser.B[std::size_t(n)] * pw;
            double m = std::abs(terms[std::size_t(n)]);
            // absent (zero) coefficients are not terms
            if (n > 0 && m > 0.0 && m < min_mag) {
                min_mag = m;
                min_idx = n;
            }
            pw *= xi;
        }
    }
    cplx S0 = 0.0, S1 = 0.0;
    for (int n = 0; n <= min_idx; ++n) {
        S0 += terms[std::size_t(n)];
        S1 += (-0.75 - 0.5 * double(n)) * terms[std::size_t(n)];
    }
    double rel = min_mag / std::max(1e-300, std::abs(S0));
    if (info) {
        info->min_term_rel = rel;
        info->min_term_index = min_idx;
    }
    if (rel > 1e-16) throw RadiusTooSmall("eval_Y0_asymptotic: smallest term above 1e-16 of sum");

    // u  = x^{-3/4} S0 e^{-E},  u' = x^{-3/4} (S1/x - E' S0) e^{-E}
    cplx E = ser.exponent(x);
    cplx dE = ser.exponent_derivative(x);
    cplx pref_log = -E - 0.75 * L;
    ScaledWave w;
    w.x = x;
    w.s = pref_log.real();
    cplx phase(std::cos(pref_log.imag()), std::sin(pref_log.imag()));
    w.u = S0 * phase;
    w.du = (S1 / x - dE * S0) * phase;
    w.renormalize();
    return w;
}

WaveState eval_Y0_asymptotic(cplx x, const PotentialParams& a, int N, int J) {
    return eval_Y0_asymptotic_scaled(x, series_coeffs(a, N, J)).unscaled();
}

double matching_radius(const AsymptoticSeries& ser, double rel_target) {
    double tc = std::max({std::sqrt(std::abs(ser.a.a2)), std::cbrt(std::abs(ser.a.a3)), 1.0});
    double R = std::max(6.0, 1.5 * tc);
    const int N = ser.order;
    for (; R < 2e5; R *= 1.12) {
        double xi = 1.0 / std::sqrt(R);
        double pw = xi, mn = 1.0;
        for (int n = 1; n <= N; ++n) {
            double b = std::abs(ser.B[std::size_t(n)]);
            if (b > 0.0) mn = std::min(mn, b * pw);
            pw *= xi;
        }
        if (mn < rel_target) return R;
    }
    throw RadiusTooSmall("matching_radius: no admissible radius below 2e5");
}

} // namespace stokeslab
