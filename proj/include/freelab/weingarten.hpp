#pragma once
// Exact Haar expectations of products of matrix entries: Weingarten calculus
// for U(N), exact constraint counting for uniform permutations, a balancedness
// predicate, and path weights w(gamma). Unitary and permutation expectations
// are exact rationals; the orthogonal group is served by seeded Monte Carlo.
#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <vector>

#include "freelab/colored_path.hpp"
#include "freelab/rng.hpp"

namespace freelab::wg {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

using Perm = std::vector<int>;  // images of 0..k-1

int cycle_count(const Perm& p);
std::vector<int> cycle_type(const Perm& p);  // sorted descending

class WeingartenTable {
public:
    WeingartenTable() = default;
    // exact table by inversion of the class-collapsed Gram system
    WeingartenTable(int k, long long N);

    int k() const { return k_; }
    long long N() const { return N_; }
    const Rational& value(const Perm& sigma) const;        // Wg(sigma, N)
    const Rational& value_type(const std::vector<int>& type) const;

    // residual of the defining system sum_tau N^{#cycles(sigma tau^-1)} Wg(tau)
    // = [sigma = id], exact over all sigma in S_k (use k <= 6)
    bool verify_full_system() const;

private:
    int k_ = 0;
    long long N_ = 0;
    std::map<std::vector<int>, Rational> values_;
};

// process-wide cache of tables keyed by (k, N)
const WeingartenTable& table(int k, long long N, int k_max = 8);

enum class GroupKind { unitary, orthogonal };

struct EntrySpec {
    std::vector<int> x, y;        // row/column index sequences
    std::vector<bool> conj;       // conjugation flag per factor
    std::vector<int> matrix_id;   // which independent matrix each factor uses
    int size() const { return static_cast<int>(x.size()); }
};

// unitary: per row and per column index, plain count == conj count;
// orthogonal: per index, total counts even (conj flags ignored)
bool is_balanced(const EntrySpec& spec, GroupKind group);

// exact E prod_t U^{eps_t}_{x_t y_t}, factorized over independent matrices
Rational unitary_entry_expectation(const EntrySpec& spec, long long N, int k_max = 8);

struct PermConstraint {
    int matrix_id;
    int x, y;  // sigma_{matrix_id}(x) = y
};

// uncentered: E prod 1(sigma(x_j) = y_j) = 1/(N)_r for consistent constraint
// sets, 0 otherwise. centered: every factor is (1(...) - 1/N), expanded by
// inclusion-exclusion; `mult` repeats a factor.
Rational permutation_entry_expectation(const std::vector<PermConstraint>& constraints,
                                       const std::vector<int>& mult, long long N, bool centered);

enum class ModelKind { haar_unitary, haar_orthogonal, uniform_permutation };

struct PathWeight {
    bool exact = true;
    Rational value;      // exact models
    double mc_value = 0; // orthogonal Monte Carlo
    double mc_stderr = 0;
    double as_double() const;
};

// w(gamma) = E prod_t (U_{i_t})_{x_{t-1} x_t}
PathWeight path_weight(const ColoredPath& gamma, long long N, ModelKind model,
                       int mc_samples = 20000, std::uint64_t seed = 1);

// per-matrix entry specs of a path (exposed for the trace-method oracle)
std::map<int, EntrySpec> path_entry_specs(const ColoredPath& gamma);

struct WeightBoundReport {
    bool pass = false;
    bool forced_zero = false;  // v > m/2 case
    double ratio = 0.0;        // |w| / bound
};

// vanishing when v > m/2, and |w| <= c e^{m eta} N^{-m/2} eta^{e1} m^{2 chi}
// with eta = m N^{-1/4}; c is a calibration constant, not a paper assertion
WeightBoundReport weight_bound_check(const ColoredPath& gamma, long long N, double c = 40.0);

}  // namespace freelab::wg
