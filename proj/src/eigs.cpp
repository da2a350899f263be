#include "freelab/eigs.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <stdexcept>
#include <vector>

namespace freelab {

VecR hermitian_eigenvalues(const MatC& h) {
    Eigen::SelfAdjointEigenSolver<MatC> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("hermitian eigensolver failed");
    return es.eigenvalues();
}

double operator_norm_dense(const MatC& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    if (m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-13 * (1.0 + m.cwiseAbs().maxCoeff())) {
        VecR ev = hermitian_eigenvalues(m);
        return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    }
    if (m.rows() <= 64 && m.cols() <= 64) {
        Eigen::JacobiSVD<MatC> svd(m);
        return svd.singularValues()(0);
    }
    // largest singular value via the Gram matrix; JacobiSVD is impractical here
    MatC gram = (m.rows() <= m.cols()) ? MatC(m * m.adjoint()) : MatC(m.adjoint() * m);
    VecR ev = hermitian_eigenvalues(gram);
    return std::sqrt(std::max(0.0, ev(ev.size() - 1)));
}

MatC hermitian_sqrt_psd(const MatC& h, double neg_tol, double clip_tol) {
    Eigen::SelfAdjointEigenSolver<MatC> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("hermitian eigensolver failed");
    VecR ev = es.eigenvalues();
    double scale = std::max(1.0, std::abs(ev(ev.size() - 1)));
    VecR root(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        double v = ev(i);
        if (v < -neg_tol * scale) throw std::runtime_error("matrix is not PSD within tolerance");
        if (v < 0.0) v = 0.0;
        (void)clip_tol;
        root(i) = std::sqrt(v);
    }
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

LanczosResult lanczos_extremes(const HermOp& op, std::ptrdiff_t dim, Rng rng,
                               double rel_tol, int max_basis) {
    LanczosResult out;
    if (dim <= 0) return out;
    const int m_cap = static_cast<int>(std::min<std::ptrdiff_t>(max_basis, dim));

    std::vector<VecC> basis;
    basis.reserve(m_cap);
    VecC v(dim);
    for (std::ptrdiff_t i = 0; i < dim; ++i) v(i) = rng.cnormal();
    v /= v.norm();
    basis.push_back(v);

    std::vector<double> alpha, beta;  // tridiagonal
    VecC w(dim);
    double prev_lo = 0.0, prev_hi = 0.0;
    for (int j = 0; j < m_cap; ++j) {
        op(basis[j].data(), w.data());
        cx a = basis[j].dot(w);
        alpha.push_back(a.real());
        w -= a * basis[j];
        if (j > 0) w -= cx(beta[j - 1]) * basis[j - 1];
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) w -= q.dot(w) * q;
        double b = w.norm();

        // Ritz values of the tridiagonal so far
        int k = j + 1;
        MatR t = MatR::Zero(k, k);
        for (int i = 0; i < k; ++i) t(i, i) = alpha[i];
        for (int i = 0; i + 1 < k; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
        Eigen::SelfAdjointEigenSolver<MatR> es(t, Eigen::EigenvaluesOnly);
        double lo = es.eigenvalues()(0), hi = es.eigenvalues()(k - 1);
        out.lambda_min = lo;
        out.lambda_max = hi;
        out.iterations = k;
        double scale = std::max({std::abs(lo), std::abs(hi), 1e-300});
        if (j > 2 && std::abs(lo - prev_lo) < rel_tol * scale && std::abs(hi - prev_hi) < rel_tol * scale) {
            out.converged = true;
            return out;
        }
        prev_lo = lo;
        prev_hi = hi;
        if (b < 1e-14 * scale) {  // invariant subspace exhausted
            out.converged = true;
            return out;
        }
        if (j + 1 < m_cap) {
            beta.push_back(b);
            basis.push_back(w / b);
        }
    }
    return out;
}

double lanczos_max_abs(const HermOp& op, std::ptrdiff_t dim, Rng rng, double rel_tol) {
    LanczosResult r = lanczos_extremes(op, dim, rng, rel_tol);
    return std::max(std::abs(r.lambda_min), std::abs(r.lambda_max));
}

}  // namespace freelab
