#include "freelab/coeffs.hpp"

#include <json.hpp>
#include <stdexcept>

#include "freelab/eigs.hpp"
#include "freelab/freegroup.hpp"

namespace freelab {

double CoefficientFamily::selfadjoint_residual() const {
    double r = (a[0] - a[0].adjoint()).cwiseAbs().maxCoeff();
    for (int i = 1; i <= 2 * d; ++i) {
        int is = fg::star(i, d);
        double v = (a[i].adjoint() - a[is]).cwiseAbs().maxCoeff();
        if (v > r) r = v;
    }
    return r;
}

bool CoefficientFamily::check_bistochastic(double tol) const {
    VecC f = fixed_vector;
    if (f.size() == 0) f = VecC::Constant(n, cx(1.0 / std::sqrt(double(n)), 0.0));
    for (int i = 1; i <= 2 * d; ++i) {
        if (a[i].cwiseAbs().maxCoeff() > 0 && a[i].imag().cwiseAbs().maxCoeff() > tol) return false;
        if (a[i].real().minCoeff() < -tol) return false;
        double nrm = operator_norm_dense(a[i]);
        if ((a[i] * f - nrm * f).cwiseAbs().maxCoeff() > tol) return false;
        if ((a[i].adjoint() * f - nrm * f).cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

bool CoefficientFamily::check_unitary_tensor(double tol) const {
    if (!witness) return false;
    const auto& w = *witness;
    if (w.m <= 0 || n % w.m != 0) return false;
    for (int i = 1; i <= 2 * d; ++i) {
        const MatC& u = w.u[i];
        if (u.rows() != w.m || u.cols() != w.m) return false;
        if ((u * u.adjoint() - MatC::Identity(w.m, w.m)).cwiseAbs().maxCoeff() > tol) return false;
        MatC kron = MatC::Zero(n, n);
        int nb = n / w.m;
        if (w.b[i].rows() != nb) return false;
        for (int r = 0; r < nb; ++r)
            for (int c = 0; c < nb; ++c)
                kron.block(r * w.m, c * w.m, w.m, w.m) = w.b[i](r, c) * u;
        if ((kron - a[i]).cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

void CoefficientFamily::validate(double tol) const {
    if (d < 1 || n < 1) throw std::invalid_argument("CoefficientFamily: need d >= 1, n >= 1");
    if (static_cast<int>(a.size()) != 2 * d + 1)
        throw std::invalid_argument("CoefficientFamily: expected 2d+1 matrices");
    for (const auto& m : a)
        if (m.rows() != n || m.cols() != n)
            throw std::invalid_argument("CoefficientFamily: matrix dimension mismatch");
    if (selfadjoint && selfadjoint_residual() > tol)
        throw std::invalid_argument("CoefficientFamily: symmetry condition fails");
    if (bistochastic && !check_bistochastic())
        throw std::invalid_argument("CoefficientFamily: bistochastic check fails");
    if (unitary_tensor && !check_unitary_tensor())
        throw std::invalid_argument("CoefficientFamily: unitary tensor witness fails");
}

double CoefficientFamily::coeff_norm_sum() const {
    double s = 0.0;
    for (const auto& m : a) s += operator_norm_dense(m);
    return s;
}

CoefficientFamily CoefficientFamily::isotropic_scalar(int d, double c, double c0) {
    CoefficientFamily f(d, 1);
    f.a[0](0, 0) = c0;
    for (int i = 1; i <= 2 * d; ++i) f.a[i](0, 0) = c;
    f.selfadjoint = true;
    return f;
}

bool CoefficientFamily::is_isotropic_scalar() const {
    if (n != 1) return false;
    if (std::abs(a[0](0, 0).imag()) > 0) return false;
    cx c = a[1](0, 0);
    if (std::abs(c.imag()) > 0) return false;
    for (int i = 2; i <= 2 * d; ++i)
        if (a[i](0, 0) != c) return false;
    return true;
}

namespace {
nlohmann::json mat_to_json(const MatC& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            rows.push_back({m(r, c).real(), m(r, c).imag()});
    return rows;
}
MatC mat_from_json(const nlohmann::json& j, int n) {
    MatC m(n, n);
    if (static_cast<int>(j.size()) != n * n) throw std::invalid_argument("matrix entry count mismatch");
    for (int k = 0; k < n * n; ++k)
        m(k / n, k % n) = cx(j[k][0].get<double>(), j[k][1].get<double>());
    return m;
}
}  // namespace

std::string CoefficientFamily::to_json() const {
    nlohmann::json j;
    j["d"] = d;
    j["n"] = n;
    nlohmann::json mats = nlohmann::json::array();
    for (const auto& m : a) mats.push_back(mat_to_json(m));
    j["matrices"] = mats;
    j["flags"] = {{"selfadjoint", selfadjoint},
                  {"bistochastic", bistochastic},
                  {"unitary_tensor", unitary_tensor}};
    return j.dump();
}

CoefficientFamily CoefficientFamily::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CoefficientFamily f(j.at("d").get<int>(), j.at("n").get<int>());
    const auto& mats = j.at("matrices");
    if (static_cast<int>(mats.size()) != 2 * f.d + 1)
        throw std::invalid_argument("CoefficientFamily: expected 2d+1 matrices");
    for (int i = 0; i <= 2 * f.d; ++i) f.a[i] = mat_from_json(mats[i], f.n);
    if (j.contains("flags")) {
        f.selfadjoint = j["flags"].value("selfadjoint", false);
        f.bistochastic = j["flags"].value("bistochastic", false);
        f.unitary_tensor = j["flags"].value("unitary_tensor", false);
    }
    return f;
}

CoefficientFamily selfadjointize(const CoefficientFamily& c) {
    CoefficientFamily out(c.d, 2 * c.n);
    auto dbl = [&](const MatC& x, const MatC& ystar) {
        MatC m = MatC::Zero(2 * c.n, 2 * c.n);
        m.block(0, c.n, c.n, c.n) = x;
        m.block(c.n, 0, c.n, c.n) = ystar;
        return m;
    };
    out.a[0] = dbl(c.a[0], c.a[0].adjoint());
    for (int i = 1; i <= 2 * c.d; ++i)
        out.a[i] = dbl(c.a[i], c.a[fg::star(i, c.d)].adjoint());
    out.selfadjoint = true;
    return out;
}

}  // namespace freelab
