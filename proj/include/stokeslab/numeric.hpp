#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace stokeslab {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// omega = exp(2*pi*i/5), the sector rotation of the cubic y'' = (x^3+...)y.
inline cplx omega_pow(int k) {
    // exact reduction mod 5 keeps phases clean under repeated rotation
    int r = ((k % 5) + 5) % 5;
    double th = 2.0 * pi * double(r) / 5.0;
    return {std::cos(th), std::sin(th)};
}
inline const cplx omega = omega_pow(1);

// A complex magnitude m*exp(s) with |m| kept near 1; represents values far
// outside double range (s is a natural log scale).
struct ScaledComplex {
    cplx m{0.0, 0.0};
    double s = 0.0;

    ScaledComplex() = default;
    ScaledComplex(cplx mantissa, double scale) : m(mantissa), s(scale) { normalize(); }
    explicit ScaledComplex(cplx v) : m(v), s(0.0) { normalize(); }

    void normalize() {
        double a = std::abs(m);
        if (a == 0.0) { s = 0.0; return; }
        if (a > 1e8 || a < 1e-8) {
            double d = std::log(a);
            m /= a;
            s += d;
        }
    }

    bool zero() const { return m == cplx(0.0, 0.0); }

    // natural log of |value|; -inf for zero
    double log_abs() const {
        if (zero()) return -std::numeric_limits<double>::infinity();
        return std::log(std::abs(m)) + s;
    }

    cplx value() const {  // may overflow/underflow of course
        return m * std::exp(s);
    }

    ScaledComplex operator*(const ScaledComplex& o) const { return {m * o.m, s + o.s}; }
    ScaledComplex operator*(cplx c) const { return {m * c, s}; }
    ScaledComplex operator*(double c) const { return {m * c, s}; }
    ScaledComplex operator/(const ScaledComplex& o) const { return {m / o.m, s - o.s}; }
    ScaledComplex operator-() const { return {-m, s}; }

    ScaledComplex operator+(const ScaledComplex& o) const {
        if (zero()) return o;
        if (o.zero()) return *this;
        if (s >= o.s) {
            double d = o.s - s;
            cplx add = (d < -745.0) ? cplx(0.0) : o.m * std::exp(d);
            return {m + add, s};
        }
        return o + *this;
    }
    ScaledComplex operator-(const ScaledComplex& o) const { return *this + (-o); }
};

inline ScaledComplex exp_scaled(cplx z) {
    // e^z with the real part carried in the scale
    return {cplx(std::cos(z.imag()), std::sin(z.imag())), z.real()};
}

// Least-squares line a + b*t through (t_i, y_i); returns slope b, intercept a
// and the standard error of the slope.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double residual_rms = 0.0;
};

inline LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
    const size_t n = t.size();
    double st = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) { st += t[i]; sy += y[i]; }
    double tbar = st / double(n), ybar = sy / double(n);
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (t[i] - tbar) * (t[i] - tbar);
        sxy += (t[i] - tbar) * (y[i] - ybar);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = ybar - f.slope * tbar;
    double ss = 0;
    for (size_t i = 0; i < n; ++i) {
        double r = y[i] - (f.intercept + f.slope * t[i]);
        ss += r * r;
    }
    f.residual_rms = std::sqrt(ss / double(n));
    if (n > 2) f.slope_stderr = std::sqrt(ss / double(n - 2) / sxx);
    return f;
}

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

} // namespace stokeslab
