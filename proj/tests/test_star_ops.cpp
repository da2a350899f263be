#include <doctest.h>

#include "freelab/rng.hpp"
#include "freelab/star_ops.hpp"

using namespace freelab;
using fg::Word;

namespace {

// word-enumeration oracle: (A^ell)_{g,unit} = sum over w in {0..2d}^ell with
// [w] = g of a_{w_ell} ... a_{w_1}; optionally forbids visiting the unit at
// intermediate times and pins the first letter (the corner-operator filter).
MatC enum_entry(const CoefficientFamily& c, int ell, const Word& g,
                bool avoid_unit = false, int first = -1) {
    MatC acc = MatC::Zero(c.n, c.n);
    std::vector<int> w(ell, 0);
    while (true) {
        Word pos(c.d, {});
        bool ok = true;
        MatC prod = MatC::Identity(c.n, c.n);
        for (int t = 0; t < ell && ok; ++t) {
            if (t == 0 && first >= 0 && w[0] != first) ok = false;
            if (!ok) break;
            if (w[t] > 0) pos = fg::concat_reduce(Word(c.d, {w[t]}), pos);
            if (avoid_unit && pos.is_unit()) ok = false;
            prod = c.a[w[t]] * prod;
        }
        if (ok && pos == g) acc += prod;
        // odometer over {0..2d}^ell
        int t = 0;
        while (t < ell && ++w[t] > 2 * c.d) w[t++] = 0;
        if (t == ell) break;
    }
    return acc;
}

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
    c.validate();
    return c;
}

}  // namespace

TEST_CASE("power_entry trivial values") {
    auto kes = CoefficientFamily::isotropic_scalar(2);
    // unit coefficients d=2: # of inverse pairs at ell=2 is 2d = 4
    CHECK(star::power_entry(kes, 2, Word(2, {}))(0, 0).real() == doctest::Approx(4.0));
    // ell=0: identity at the unit, zero elsewhere
    CHECK(star::power_entry(kes, 0, Word(2, {}))(0, 0).real() == doctest::Approx(1.0));
    CHECK(star::power_entry(kes, 0, Word(2, {1})).cwiseAbs().maxCoeff() == 0.0);
    // |g| > ell vanishes
    CHECK(star::power_entry(kes, 1, Word(2, {1, 2})).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("power_entry ell=4 word count oracle") {
    auto kes = CoefficientFamily::isotropic_scalar(2);
    // enumerate all 4^4 = 256 length-4 words over the generators, count those
    // reducing to the unit (no a_0 here since a_0 = 0)
    MatC v = enum_entry(kes, 4, Word(2, {}));
    CHECK(v(0, 0).real() == doctest::Approx(28.0));
    CHECK(star::power_entry(kes, 4, Word(2, {}))(0, 0).real() == doctest::Approx(28.0));
    CHECK(star::free_moment(kes, 4).real() == doctest::Approx(28.0));
    CHECK(star::free_moment(kes, 3).real() == doctest::Approx(0.0));
    CHECK(star::free_moment(kes, 2).real() == doctest::Approx(4.0));
}

TEST_CASE("power_entries match enumeration oracle on random families") {
    for (std::uint64_t seed : {11u, 22u}) {
        for (int d : {1, 2}) {
            auto c = random_selfadjoint(d, 2, seed * 7 + d);
            int ell = 4;
            star::PowerTable t = star::power_entries(c, ell);
            const auto& B = *t.ball;
            for (std::int64_t g = 0; g < B.size(); ++g) {
                MatC oracle = enum_entry(c, ell, B.word(g));
                CHECK((t.val[g] - oracle).cwiseAbs().maxCoeff() < 1e-12);
            }
        }
    }
}

TEST_CASE("nb decomposition sums to power entries") {
    auto c = random_selfadjoint(2, 2, 99);
    int ell = 4;
    star::PowerTable t = star::power_entries(c, ell);
    const auto& B = *t.ball;
    // sum_m of the m-sphere components reassembles the full table
    double worst = 0.0;
    for (int m = 0; m <= ell; ++m) {
        auto comp = star::nb_component(c, ell, m);
        for (const auto& [w, v] : comp) {
            std::int64_t idx = B.index(w);
            worst = std::max(worst, (v - t.val[idx]).cwiseAbs().maxCoeff());
        }
    }
    CHECK(worst < 1e-12);

    // trivial sphere values for unit coefficients
    auto kes = CoefficientFamily::isotropic_scalar(2);
    auto c22 = star::nb_component(kes, 2, 2);
    CHECK(c22.size() == 12);
    for (const auto& [w, v] : c22) CHECK(v(0, 0).real() == doctest::Approx(1.0));
    auto c20 = star::nb_component(kes, 2, 0);
    CHECK(c20.at(Word(2, {}))(0, 0).real() == doctest::Approx(4.0));
}

TEST_CASE("corner operator entries") {
    auto kes = CoefficientFamily::isotropic_scalar(2);
    // C^{(1,i)}_{g_i, unit} = a_i
    CHECK(star::c_entry(kes, 1, 1, Word(2, {1}))(0, 0).real() == doctest::Approx(1.0));
    // zero off V_i
    CHECK(star::c_entry(kes, 3, 1, Word(2, {2})).cwiseAbs().maxCoeff() == 0.0);

    // d=2 scalar unit, k=3, g = g_1: walks avoiding the unit with first step 1
    MatC oracle = enum_entry(kes, 3, Word(2, {1}), /*avoid_unit=*/true, /*first=*/1);
    CHECK(star::c_entry(kes, 3, 1, Word(2, {1}))(0, 0).real() ==
          doctest::Approx(oracle(0, 0).real()));

    // random family: C entries match the filtered enumeration
    auto c = random_selfadjoint(2, 2, 5);
    star::PowerTable ct = star::c_entries(c, 3, 2);
    const auto& B = *ct.ball;
    for (std::int64_t g = 0; g < B.size(); ++g) {
        MatC oc = enum_entry(c, 3, B.word(g), true, 2);
        CHECK((ct.val[g] - oc).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("last-passage path decomposition") {
    // g = unit: single block, identity check
    auto kes = CoefficientFamily::isotropic_scalar(2);
    CHECK(star::path_decomposition_residual(kes, 4, Word(2, {}), {0}) < 1e-12);

    // g = g_1, k=3: both sides equal the corner count
    CHECK(star::path_decomposition_residual(kes, 3, Word(2, {1}), {0, 1}) < 1e-12);

    // random n=2 coefficients, several cuts
    auto c = random_selfadjoint(2, 2, 42);
    CHECK(star::path_decomposition_residual(c, 5, Word(2, {1, 2, 1}), {0, 1, 2}) < 1e-10);
    CHECK(star::path_decomposition_residual(c, 5, Word(2, {1, 2, 1}), {1, 2}) < 1e-10);
    CHECK(star::path_decomposition_residual(c, 6, Word(2, {2, 1, 4, 1}), {0, 2, 2}) < 1e-10);
    auto c3 = random_selfadjoint(3, 2, 43);
    CHECK(star::path_decomposition_residual(c3, 6, Word(3, {5, 1, 2, 3}), {1, 1, 2}) < 1e-10);
}

namespace {

// walks start -> target of length ell avoiding the unit at every time >= 1
MatC enum_restricted(const CoefficientFamily& c, int ell, const Word& start, const Word& target) {
    MatC acc = MatC::Zero(c.n, c.n);
    std::vector<int> w(ell, 0);
    while (true) {
        Word pos = start;
        bool ok = true;
        MatC prod = MatC::Identity(c.n, c.n);
        for (int t = 0; t < ell && ok; ++t) {
            if (w[t] > 0) pos = fg::concat_reduce(Word(c.d, {w[t]}), pos);
            if (pos.is_unit()) ok = false;
            prod = c.a[w[t]] * prod;
        }
        if (ok && pos == target) acc += prod;
        int t = 0;
        while (t < ell && ++w[t] > 2 * c.d) w[t++] = 0;
        if (t == ell) break;
    }
    return acc;
}

}  // namespace

TEST_CASE("diagonal series matches ball DP and restricted oracle") {
    for (std::uint64_t seed : {3u, 14u}) {
        auto c = random_selfadjoint(2, 2, seed);
        auto s = star::diagonal_series(c, 8);
        for (int k = 0; k <= 8; ++k) {
            MatC viaDP = star::power_entry(c, k, Word(2, {}));
            MatC viaFR = s.G[k] * std::pow(s.scale, k);
            CHECK((viaDP - viaFR).cwiseAbs().maxCoeff() < 1e-10);
        }
        for (int i : {1, 3}) {
            Word gi(c.d, {i});
            for (int k = 1; k <= 5; ++k) {
                MatC oracle = enum_restricted(c, k, gi, gi);
                MatC viaFR = s.F[i - 1][k] * std::pow(s.scale, k);
                CHECK((viaFR - oracle).cwiseAbs().maxCoeff() < 1e-10);
            }
        }
    }
}
