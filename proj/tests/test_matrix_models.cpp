#include <doctest.h>

#include <cstdio>

#include "freelab/eigs.hpp"
#include "freelab/matrix_models.hpp"

using namespace freelab;

namespace {
CoefficientFamily random_selfadjoint(int d, int n, std::uint64_t seed) {
    Rng rng(seed);
    CoefficientFamily c(d, n);
    auto rmat = [&]() {
        MatC m(n, n);
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s) m(r, s) = 0.5 * rng.cnormal();
        return m;
    };
    MatC a0 = rmat();
    c.a[0] = (a0 + a0.adjoint()) / 2;
    for (int i = 1; i <= d; ++i) {
        c.a[i] = rmat();
        c.a[fg::star(i, d)] = c.a[i].adjoint();
    }
    c.selfadjoint = true;
    return c;
}
}  // namespace

TEST_CASE("sampling: determinism, unitarity, bijectivity") {
    auto s1 = models::sample(models::Kind::haar_unitary, 12, 2, 99);
    auto s2 = models::sample(models::Kind::haar_unitary, 12, 2, 99);
    for (int i = 0; i < 2; ++i) CHECK((s1.U[i] - s2.U[i]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s1.unitarity_defect() < 1e-12);

    auto o = models::sample(models::Kind::haar_orthogonal, 9, 3, 4);
    CHECK(o.unitarity_defect() < 1e-12);
    for (const auto& u : o.U) CHECK(u.imag().cwiseAbs().maxCoeff() == 0.0);

    auto p = models::sample(models::Kind::uniform_permutation, 50, 2, 7);
    for (const auto& sg : p.sigma) {
        std::vector<bool> hit(50, false);
        for (int v : sg) {
            CHECK(v >= 0);
            CHECK(v < 50);
            CHECK_FALSE(hit[v]);
            hit[v] = true;
        }
    }
    // different seeds differ
    auto s3 = models::sample(models::Kind::haar_unitary, 12, 2, 100);
    CHECK((s1.U[0] - s3.U[0]).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("empirical E|U_11|^2 = 1/N") {
    const int N = 8, reps = 4000;
    double sum = 0, sumsq = 0;
    for (int r = 0; r < reps; ++r) {
        auto s = models::sample(models::Kind::haar_unitary, N, 1, 1000 + r);
        double v = std::norm(s.U[0](0, 0));
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / reps;
    double se = std::sqrt(std::max(0.0, sumsq / reps - mean * mean) / reps);
    CHECK(std::abs(mean - 1.0 / N) <= 4 * se);
}

TEST_CASE("assemble") {
    // d=1, n=1, a_1 = a_2 = 1: A = U + U^*, spectrum in [-2,2]
    CoefficientFamily c(1, 1);
    c.a[1](0, 0) = 1.0;
    c.a[2](0, 0) = 1.0;
    auto s = models::sample(models::Kind::haar_unitary, 20, 1, 3);
    MatC a = models::assemble(c, s);
    CHECK((a - a.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    VecR ev = hermitian_eigenvalues(a);
    CHECK(ev(0) >= -2.0 - 1e-10);
    CHECK(ev(ev.size() - 1) <= 2.0 + 1e-10);

    // zero coefficients -> zero operator
    CoefficientFamily z(2, 2);
    MatC az = models::assemble(z, models::sample(models::Kind::haar_unitary, 6, 2, 5));
    CHECK(az.cwiseAbs().maxCoeff() == 0.0);

    // random selfadjoint family -> Hermitian assembly
    auto cr = random_selfadjoint(2, 2, 12);
    MatC ar = models::assemble(cr, models::sample(models::Kind::haar_unitary, 10, 2, 6));
    CHECK((ar - ar.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    // permutation model: invariant vector A_N (f x ones) = (A_1 f) x ones
    auto sp = models::sample(models::Kind::uniform_permutation, 14, 2, 8);
    MatC ap = models::assemble(cr, sp);
    MatC a1 = cr.a[0];
    for (int i = 1; i <= 4; ++i) a1 += cr.a[i];
    VecC f(2);
    f << cx(0.3, 0.1), cx(-0.7, 0.2);
    VecC big = VecC::Zero(2 * 14);
    for (int v = 0; v < 14; ++v) big.segment(v * 2, 2) = f;
    VecC lhs = ap * big;
    VecC a1f = a1 * f;
    double worst = 0;
    for (int v = 0; v < 14; ++v) worst = std::max(worst, (lhs.segment(v * 2, 2) - a1f).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-12);
}

TEST_CASE("operator norms") {
    CHECK(operator_norm_dense(MatC::Identity(7, 7)) == doctest::Approx(1.0));

    auto c = random_selfadjoint(2, 1, 21);
    auto sp = models::sample(models::Kind::uniform_permutation, 60, 2, 31);
    MatC ap = models::assemble(c, sp);
    double dense_proj = models::operator_norm(ap, 1, 60, true);
    double sparse_proj = models::operator_norm_perm(c, sp, true, 1e-10);
    CHECK(dense_proj == doctest::Approx(sparse_proj).epsilon(1e-7));
    double dense_plain = models::operator_norm(ap, 1, 60, false);
    double sparse_plain = models::operator_norm_perm(c, sp, false, 1e-10);
    CHECK(dense_plain == doctest::Approx(sparse_plain).epsilon(1e-7));

    // n = 2 agreement as well
    auto c2 = random_selfadjoint(2, 2, 22);
    auto sp2 = models::sample(models::Kind::uniform_permutation, 30, 2, 32);
    MatC ap2 = models::assemble(c2, sp2);
    CHECK(models::operator_norm(ap2, 2, 30, true) ==
          doctest::Approx(models::operator_norm_perm(c2, sp2, true, 1e-10)).epsilon(1e-7));
}

TEST_CASE("schatten sandwich") {
    CHECK(models::schatten_norm(MatC::Identity(9, 9), 4) == doctest::Approx(1.0));
    auto c = random_selfadjoint(2, 2, 41);
    MatC a = models::assemble(c, models::sample(models::Kind::haar_unitary, 12, 2, 42));
    double frob = a.norm() / std::sqrt(double(a.rows()));
    CHECK(models::schatten_norm(a, 2) == doctest::Approx(frob));
    for (int p : {2, 4, 6}) {
        double sp = models::schatten_norm(a, p);
        double on = operator_norm_dense(a);
        CHECK(sp <= on + 1e-10);
        CHECK(on <= models::schatten_lift(sp, 2, 12, p) + 1e-10);
    }
}

TEST_CASE("mc trace moments") {
    auto kes = CoefficientFamily::isotropic_scalar(2);
    CHECK(models::mc_trace_moment(kes, 0, 10, models::Kind::haar_unitary, 3, 1).mean == 1.0);
    auto m2 = models::mc_trace_moment(kes, 2, 30, models::Kind::haar_unitary, 40, 2);
    CHECK(std::abs(m2.mean - 4.0) <= 4 * m2.se + 1e-9);
    auto m4 = models::mc_trace_moment(kes, 4, 60, models::Kind::haar_unitary, 60, 3);
    CHECK(std::abs(m4.mean - 28.0) <= 4 * m4.se + 30.0 / (60.0 * 60.0));
}

TEST_CASE("concentration probe") {
    auto kes = CoefficientFamily::isotropic_scalar(2);
    auto rep = models::concentration_probe(kes, 40, 4, 12, 5);
    CHECK(rep.values.size() == 12);
    CHECK(rep.pass);
    auto repinf = models::concentration_probe(kes, 40, 0, 12, 6);
    CHECK(repinf.pass);

    // d=1 trivial coefficients: degenerate distribution (norm is exactly 2)
    CoefficientFamily triv(1, 1);
    triv.a[1](0, 0) = 1.0;
    triv.a[2](0, 0) = 1.0;
    auto rept = models::concentration_probe(triv, 30, 0, 8, 7);
    CHECK(rept.stddev < 0.2);
}

TEST_CASE("tensor leg model") {
    star::TensorFamily t;
    t.d = 2;
    t.k = 2;
    t.n = 1;
    t.a0 = MatC::Zero(1, 1);
    t.leg.assign(2, std::vector<MatC>(5, MatC::Ones(1, 1)));

    std::vector<models::ModelSample> legs{
        models::sample(models::Kind::haar_unitary, 12, 2, 1),
        models::sample(models::Kind::haar_unitary, 12, 2, 2)};
    MatC a = models::tensor_leg_model(t, legs);
    CHECK(a.rows() == 144);
    CHECK((a - a.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    // cross-leg generators commute exactly
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) {
            MatC v1 = MatC::Zero(144, 144), v2 = MatC::Zero(144, 144);
            MatC u1 = legs[0].dense_generator(i), u2 = legs[1].dense_generator(j);
            for (int r = 0; r < 12; ++r)
                for (int c2 = 0; c2 < 12; ++c2) {
                    v1.block(r * 12, c2 * 12, 12, 12) = u1(r, c2) * MatC::Identity(12, 12);
                    v2.block(r * 12, c2 * 12, 12, 12).diagonal().setConstant(0);
                }
            for (int b = 0; b < 12; ++b) v2.block(b * 12, b * 12, 12, 12) = u2;
            CHECK((v1 * v2 - v2 * v1).cwiseAbs().maxCoeff() < 1e-13);
        }

    // k=1 reduces to assemble
    star::TensorFamily t1 = t;
    t1.k = 1;
    t1.leg.resize(1);
    auto kes = CoefficientFamily::isotropic_scalar(2);
    MatC via_tensor = models::tensor_leg_model(t1, {legs[0]});
    MatC via_assemble = models::assemble(kes, legs[0]);
    CHECK((via_tensor - via_assemble).cwiseAbs().maxCoeff() < 1e-13);

    // norm of the two-leg sum is within the free bracket window at moderate N
    double nrm = operator_norm_dense(a);
    CHECK(nrm > 5.5);
    CHECK(nrm < 4 * std::sqrt(3.0) + 0.5);
}

TEST_CASE("sample serialization round trip") {
    auto s = models::sample(models::Kind::haar_unitary, 7, 2, 123);
    models::write_sample(s, "/tmp/freelab_sample_test.bin");
    auto r = models::read_sample("/tmp/freelab_sample_test.bin");
    CHECK(r.N == s.N);
    CHECK(r.seed == s.seed);
    for (int i = 0; i < 2; ++i) CHECK((r.U[i] - s.U[i]).cwiseAbs().maxCoeff() == 0.0);

    auto p = models::sample(models::Kind::uniform_permutation, 9, 2, 5);
    models::write_sample(p, "/tmp/freelab_sample_test2.bin");
    auto rp = models::read_sample("/tmp/freelab_sample_test2.bin");
    CHECK(rp.sigma == p.sigma);
    std::remove("/tmp/freelab_sample_test.bin");
    std::remove("/tmp/freelab_sample_test2.bin");
}
