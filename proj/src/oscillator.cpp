#include "stokeslab/oscillator.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "stokeslab/errors.hpp"

namespace stokeslab {

namespace {

// <n|x^3|n+1> and <n|x^3|n+3> from x = (a + a^dag)/sqrt(2)
double x3_band1(int n) { return 3.0 * std::pow(0.5 * double(n + 1), 1.5); }
double x3_band3(int n) {
    return std::sqrt(double(n + 1) * double(n + 2) * double(n + 3) / 8.0);
}

using SpMat = Eigen::SparseMatrix<cplx>;

SpMat build_sparse(cplx beta, int N) {
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(std::size_t(5 * N));
    const cplx ib = cplx(0.0, 1.0) * beta;
    for (int n = 0; n < N; ++n) {
        trip.emplace_back(n, n, cplx(double(2 * n + 1), 0.0));
        if (n + 1 < N) {
            cplx v = ib * x3_band1(n);
            trip.emplace_back(n, n + 1, v);
            trip.emplace_back(n + 1, n, v);
        }
        if (n + 3 < N) {
            cplx v = ib * x3_band3(n);
            trip.emplace_back(n, n + 3, v);
            trip.emplace_back(n + 3, n, v);
        }
    }
    SpMat H(N, N);
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
}

Eigen::VectorXcd apply_H(cplx beta, const Eigen::VectorXcd& v) {
    const int N = int(v.size());
    Eigen::VectorXcd w(N);
    const cplx ib = cplx(0.0, 1.0) * beta;
    for (int n = 0; n < N; ++n) {
        cplx acc = double(2 * n + 1) * v[n];
        if (n + 1 < N) acc += ib * x3_band1(n) * v[n + 1];
        if (n - 1 >= 0) acc += ib * x3_band1(n - 1) * v[n - 1];
        if (n + 3 < N) acc += ib * x3_band3(n) * v[n + 3];
        if (n - 3 >= 0) acc += ib * x3_band3(n - 3) * v[n - 3];
        w[n] = acc;
    }
    return w;
}

// inverse iteration with Rayleigh updates; the banded-sparse factorization
// keeps each pass cheap
cplx rqi(cplx beta, int N, cplx shift, int start_index) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(N);
    v[std::min(start_index, N - 1)] = 1.0;
    cplx mu = shift;
    SpMat I(N, N);
    I.setIdentity();
    for (int it = 0; it < 60; ++it) {
        SpMat A = build_sparse(beta, N) - mu * I;
        Eigen::SparseLU<SpMat> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) {
            mu += 1e-8 * (1.0 + std::abs(mu));  // shift landed on an eigenvalue
            continue;
        }
        Eigen::VectorXcd w = lu.solve(v);
        double nw = w.norm();
        if (!(nw > 0.0) || !std::isfinite(nw))
            throw NotConverged("rqi: inverse iteration broke down");
        v = w / nw;
        Eigen::VectorXcd Hv = apply_H(beta, v);
        cplx mu_ray = v.dot(Hv);
        double res = (Hv - mu_ray * v).norm();
        if (res < 1e-12 * (1.0 + std::abs(mu_ray))) return mu_ray;
        if (it >= 2) mu = mu_ray;
    }
    throw NotConverged("rqi: no convergence in 60 iterations");
}

cplx spectral_at_basis(cplx beta, int k, int N) {
    // radial continuation from beta = 0 keeps the branch identity
    int m = std::max(1, int(std::ceil(std::abs(beta) / 0.05)));
    cplx E = double(2 * k + 1);
    for (int j = 1; j <= m; ++j) {
        cplx bj = beta * (double(j) / double(m));
        E = rqi(bj, N, E, k);
    }
    return E;
}

} // namespace

Eigen::MatrixXcd build_matrix(cplx beta, int N) {
    if (N < 32) throw Error("build_matrix: basis size below 32");
    return Eigen::MatrixXcd(build_sparse(beta, N));
}

cplx eigen_spectral(const EigenQuery& q) {
    if (q.basis_size < 32) throw Error("eigen_spectral: basis size below 32");
    int N = q.basis_size;
    cplx E = spectral_at_basis(q.beta, q.k, N);
    while (true) {
        if (2 * N > 2048) throw NotConverged("eigen_spectral: doubling test fails at N = 2048");
        cplx E2 = spectral_at_basis(q.beta, q.k, 2 * N);
        if (std::abs(E2 - E) < 1e-9) return E2;
        N *= 2;
        E = E2;
    }
}

cplx eigen_spectral_fixed(const EigenQuery& q) {
    if (q.basis_size < 32) throw Error("eigen_spectral_fixed: basis size below 32");
    return spectral_at_basis(q.beta, q.k, q.basis_size);
}

PotentialParams oscillator_potential(cplx beta, cplx E) {
    // branch: beta^{-j/5} = (beta^{-1/5})^j, principal fifth root
    cplx t = std::pow(beta, -0.2);
    cplx t2 = t * t;
    cplx b85 = t2 * t2 * t2 * t2;  // beta^{-8/5}
    cplx b125 = b85 * t2 * t2;     // beta^{-12/5}
    cplx b25 = t2;                 // beta^{-2/5}
    return {-omega_pow(2) / 3.0 * b85, omega_pow(3) * (2.0 / 27.0 * b125 + b25 * E)};
}

cplx eigen_stokes(const EigenQuery& q, double tol) {
    StokesOptions so;
    so.N = 38;
    so.estimate_error = false;
    W02Config cfg;
    auto f = [&](cplx E) { return stokes_w02(oscillator_potential(q.beta, E), so, &cfg); };
    // fix the matching configuration away from the zeros (midway between
    // levels) before iterating
    (void)f(double(2 * q.k + 1) + 1.0);

    cplx E0 = double(2 * q.k + 1);
    cplx E1 = E0 + 0.05;
    ScaledComplex f0 = f(E0), f1 = f(E1);
    cplx E = E1;
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        ScaledComplex df = f1 - f0;
        if (df.zero()) throw NewtonDiverged("eigen_stokes: flat secant");
        cplx step = -(f1 / df).value() * (E1 - E0);
        E = E1 + step;
        if (std::abs(E - cplx(double(2 * q.k + 1))) > 0.8)
            throw NewtonDiverged("eigen_stokes: left the seed basin");
        E0 = E1;
        f0 = f1;
        E1 = E;
        f1 = f(E);
        if (std::abs(step) < 1e-12 * (1.0 + std::abs(E))) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NewtonDiverged("eigen_stokes: no root after 50 iterations");
    // residual quality against the C0 scale half a level away
    ScaledComplex fref = f(E + 0.5);
    double quality = std::exp(f1.log_abs() - fref.log_abs());
    if (!(quality < tol))
        throw NewtonDiverged("eigen_stokes: residual above tol of the local C0 scale");
    return E;
}

EigenBranch trace_branch(int k, const std::vector<cplx>& beta_path, int basis_size) {
    if (beta_path.empty()) throw Error("trace_branch: empty path");
    if (std::abs(beta_path.front()) > 0.05 + 1e-12 || beta_path.front().real() <= 0.0)
        throw Error("trace_branch: path must start at |beta| <= 0.05, Re beta > 0");
    for (std::size_t i = 1; i < beta_path.size(); ++i)
        if (std::abs(beta_path[i] - beta_path[i - 1]) > 0.02 + 1e-12)
            throw Error("trace_branch: step above 0.02");

    EigenBranch br;
    br.k = k;
    br.method = "spectral";
    const int N = std::max(64, basis_size);

    std::vector<int> levels;
    if (k > 0) levels.push_back(k - 1);
    levels.push_back(k);
    levels.push_back(k + 1);
    std::vector<cplx> E(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i)
        E[i] = spectral_at_basis(beta_path.front(), levels[i], N);

    for (std::size_t step = 0; step < beta_path.size(); ++step) {
        cplx b = beta_path[step];
        for (std::size_t i = 0; i < levels.size(); ++i) {
            cplx En = rqi(b, N, E[i], levels[i]);
            if (std::abs(En - E[i]) > 0.5)
                throw BranchCollision("trace_branch: level jump above 0.5");
            E[i] = En;
        }
        for (std::size_t i = 0; i + 1 < levels.size(); ++i)
            if (std::abs(E[i] - E[i + 1]) < 1e-3)
                throw BranchCollision("trace_branch: levels within 1e-3");
        std::size_t ik = (k > 0) ? 1 : 0;
        br.beta_samples.push_back(b);
        br.E_samples.push_back(E[ik]);
    }
    return br;
}

} // namespace stokeslab
