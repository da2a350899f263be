#include <doctest.h>

#include <numeric>

#include "freelab/haar.hpp"
#include "freelab/weingarten.hpp"

using namespace freelab;
using wg::Rational;

TEST_CASE("weingarten small values") {
    // k=1: Wg(id, N) = 1/N
    for (long long N : {2, 5, 11}) {
        const auto& t = wg::table(1, N);
        CHECK(t.value({0}) == Rational(1, N));
    }
    // k=2: Wg(id) = 1/(N^2-1), Wg(transposition) = -1/(N(N^2-1))
    for (long long N : {2, 3, 8}) {
        const auto& t = wg::table(2, N);
        CHECK(t.value({0, 1}) == Rational(1, N * N - 1));
        CHECK(t.value({1, 0}) == Rational(-1, N * (N * N - 1)));
    }
    const auto& t2 = wg::table(2, 2);
    CHECK(t2.value({0, 1}) == Rational(1, 3));
    CHECK_THROWS(wg::WeingartenTable(3, 2));  // N < k
}

TEST_CASE("weingarten defining system exact") {
    for (int k = 1; k <= 5; ++k) {
        wg::WeingartenTable t(k, 8);
        CHECK(t.verify_full_system());
    }
    wg::WeingartenTable t52(5, 7);
    CHECK(t52.verify_full_system());
}

TEST_CASE("balancedness predicate") {
    wg::EntrySpec s;
    // |U_11|^2
    s.x = {1, 1}; s.y = {1, 1}; s.conj = {false, true}; s.matrix_id = {1, 1};
    CHECK(wg::is_balanced(s, wg::GroupKind::unitary));
    // U_11 U_22 without conjugates
    wg::EntrySpec u;
    u.x = {1, 2}; u.y = {1, 2}; u.conj = {false, false}; u.matrix_id = {1, 1};
    CHECK_FALSE(wg::is_balanced(u, wg::GroupKind::unitary));
    CHECK(wg::is_balanced(u, wg::GroupKind::orthogonal) == false);  // index 1 odd
    // U_11 U_11: even counts -> orthogonal-balanced
    wg::EntrySpec o;
    o.x = {1, 1}; o.y = {1, 1}; o.conj = {false, false}; o.matrix_id = {1, 1};
    CHECK(wg::is_balanced(o, wg::GroupKind::orthogonal));
    CHECK_FALSE(wg::is_balanced(o, wg::GroupKind::unitary));
}

TEST_CASE("unitary entry expectations") {
    // E|U_11|^2 = 1/N
    wg::EntrySpec s;
    s.x = {1, 1}; s.y = {1, 1}; s.conj = {false, true}; s.matrix_id = {1, 1};
    CHECK(wg::unitary_entry_expectation(s, 7) == Rational(1, 7));
    // E U_11 conj(U_12) = 0
    wg::EntrySpec z;
    z.x = {1, 1}; z.y = {1, 2}; z.conj = {false, true}; z.matrix_id = {1, 1};
    CHECK(wg::unitary_entry_expectation(z, 7) == 0);
    // E|U_11|^2 |U_22|^2 = 1/(N^2-1)
    wg::EntrySpec q;
    q.x = {1, 1, 2, 2}; q.y = {1, 1, 2, 2};
    q.conj = {false, true, false, true}; q.matrix_id = {1, 1, 1, 1};
    CHECK(wg::unitary_entry_expectation(q, 5) == Rational(1, 24));
    // E U_11 U_22 conj(U_12 U_21) = -1/(N(N^2-1))
    wg::EntrySpec w;
    w.x = {1, 2, 1, 2}; w.y = {1, 2, 2, 1};
    w.conj = {false, false, true, true}; w.matrix_id = {1, 1, 1, 1};
    CHECK(wg::unitary_entry_expectation(w, 5) == Rational(-1, 5 * 24));
    // independent matrices factorize
    wg::EntrySpec f;
    f.x = {1, 1, 3, 3}; f.y = {2, 2, 1, 1};
    f.conj = {false, true, false, true}; f.matrix_id = {1, 1, 2, 2};
    CHECK(wg::unitary_entry_expectation(f, 4) == Rational(1, 16));
}

TEST_CASE("unitary expectations vs Monte Carlo at N=8") {
    const long long N = 8;
    const int samples = 20000;
    // a handful of balanced specs with k <= 3
    std::vector<wg::EntrySpec> specs;
    {
        wg::EntrySpec s;  // |U_12|^2
        s.x = {1, 1}; s.y = {2, 2}; s.conj = {false, true}; s.matrix_id = {1, 1};
        specs.push_back(s);
        wg::EntrySpec t;  // U_11 U_12 conj(U_11 U_12)
        t.x = {1, 1, 1, 1}; t.y = {1, 2, 1, 2};
        t.conj = {false, false, true, true}; t.matrix_id = {1, 1, 1, 1};
        specs.push_back(t);
        wg::EntrySpec u;  // U_12 U_23 U_31 conj(...) cyclic
        u.x = {1, 2, 3, 1, 2, 3}; u.y = {2, 3, 1, 2, 3, 1};
        u.conj = {false, false, false, true, true, true}; u.matrix_id = {1, 1, 1, 1, 1, 1};
        specs.push_back(u);
    }
    Rng rng(2024);
    for (std::size_t si = 0; si < specs.size(); ++si) {
        const auto& s = specs[si];
        double exact = static_cast<double>(wg::unitary_entry_expectation(s, N));
        double sum = 0, sumsq = 0;
        for (int rep = 0; rep < samples; ++rep) {
            Rng sub = rng.split(rep + si * samples);
            MatC u = haar::unitary(N, sub);
            cx prod = 1.0;
            for (int t = 0; t < s.size(); ++t) {
                cx e = u(s.x[t] - 1, s.y[t] - 1);
                prod *= s.conj[t] ? std::conj(e) : e;
            }
            sum += prod.real();
            sumsq += prod.real() * prod.real();
        }
        double mean = sum / samples;
        double se = std::sqrt(std::max(0.0, sumsq / samples - mean * mean) / samples);
        CHECK(std::abs(mean - exact) <= 4 * se + 1e-12);
    }
}

TEST_CASE("permutation expectations") {
    using PC = wg::PermConstraint;
    // single constraint
    CHECK(wg::permutation_entry_expectation({PC{1, 1, 2}}, {}, 9, false) == Rational(1, 9));
    // two constraints sharing a row with different columns
    CHECK(wg::permutation_entry_expectation({PC{1, 1, 2}, PC{1, 1, 3}}, {}, 9, false) == 0);
    // two consistent constraints
    CHECK(wg::permutation_entry_expectation({PC{1, 1, 2}, PC{1, 3, 4}}, {}, 9, false) ==
          Rational(1, 72));
    // injectivity: two rows to the same column
    CHECK(wg::permutation_entry_expectation({PC{1, 1, 2}, PC{1, 3, 2}}, {}, 9, false) == 0);

    // exhaustive check against averaging over all N! permutations, N <= 7
    const int N = 6;
    std::vector<int> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<PC>> cases = {
        {PC{1, 1, 1}},
        {PC{1, 1, 2}, PC{1, 2, 1}},
        {PC{1, 1, 2}, PC{1, 2, 3}, PC{1, 3, 1}},
        {PC{1, 1, 1}, PC{1, 2, 3}},
    };
    for (const auto& cons : cases) {
        for (bool centered : {false, true}) {
            Rational exact = wg::permutation_entry_expectation(cons, {}, N, centered);
            // brute force
            Rational acc = 0;
            std::vector<int> p(perm);
            long long count = 0;
            do {
                Rational prod = 1;
                for (const auto& c : cons) {
                    Rational ind = (p[c.x - 1] == c.y - 1) ? 1 : 0;
                    prod *= centered ? (ind - Rational(1, N)) : ind;
                }
                acc += prod;
                ++count;
            } while (std::next_permutation(p.begin(), p.end()));
            acc /= count;
            CHECK(acc == exact);
        }
    }
    // centered with multiplicity 2: E (delta - 1/N)^2 = (1/N)(1-1/N)
    Rational v = wg::permutation_entry_expectation({PC{1, 1, 1}}, {2}, N, true);
    CHECK(v == Rational(1, N) * Rational(N - 1, N));
}

TEST_CASE("path weights") {
    // m=1 loop, unitary: zero
    ColoredPath loop{2, {1, 1}, {1}};
    CHECK(wg::path_weight(loop, 10, wg::ModelKind::haar_unitary).value == 0);

    // every m=2 closed NB path has zero unitary weight
    for (int i1 = 1; i1 <= 4; ++i1)
        for (int i2 = 1; i2 <= 4; ++i2) {
            if (i2 == fg::star(i1, 2)) continue;
            for (int x1 : {1, 2}) {
                ColoredPath g{2, {1, x1, 1}, {i1, i2}};
                CHECK(wg::path_weight(g, 8, wg::ModelKind::haar_unitary).value == 0);
            }
        }

    // d=2, (x,1,x,2,x,1*,x,2*,x): product of |U_xx|^2 means -> 1/N^2
    ColoredPath w4{2, {1, 1, 1, 1, 1}, {1, 2, 3, 4}};
    CHECK(wg::path_weight(w4, 10, wg::ModelKind::haar_unitary).value == Rational(1, 100));

    // permutation model: w = E prod indicators
    ColoredPath ploop{2, {1, 1}, {1}};
    CHECK(wg::path_weight(ploop, 10, wg::ModelKind::uniform_permutation).value == Rational(1, 10));

    // orthogonal Monte Carlo: |O_11|^2 loop pair has mean 1/N
    ColoredPath o2{1, {1, 1, 1}, {1, 2}};  // d=1: colors 1, 1* -> (O_11)^2
    auto mc = wg::path_weight(o2, 6, wg::ModelKind::haar_orthogonal, 4000, 5);
    CHECK_FALSE(mc.exact);
    CHECK(std::abs(mc.mc_value - 1.0 / 6) <= 4 * mc.mc_stderr + 1e-3);
}

TEST_CASE("weight bound check") {
    // v > m/2 forces zero
    ColoredPath g{2, {1, 2, 1}, {1, 2}};  // m=2, v=2 > 1
    auto rep = wg::weight_bound_check(g, 10);
    CHECK(rep.forced_zero);
    CHECK(rep.pass);

    ColoredPath w4{2, {1, 1, 1, 1, 1}, {1, 2, 3, 4}};
    auto rep4 = wg::weight_bound_check(w4, 10);
    CHECK_FALSE(rep4.forced_zero);
    CHECK(rep4.pass);
}
