#pragma once
// Exact computation with the free operator A = a_0 (x) 1 + sum_i a_i (x) lambda(g_i):
// entries of powers by dynamic programming on the ball, the non-backtracking
// decomposition, corner operators, free moments and Schatten norms, Haagerup
// upper bounds, truncation lower bounds, and the certified norm bracket.
#include <map>
#include <memory>
#include <vector>

#include "freelab/coeffs.hpp"
#include "freelab/freegroup.hpp"
#include "freelab/types.hpp"

namespace freelab::star {

// ---------------------------------------------------------------------------
// entries of powers

// Values (A^ell)_{g,unit} for all g in B_ell. Exact: the DP ball radius
// equals ell, so no walk is truncated.
struct PowerTable {
    int ell = 0;
    int n = 0;
    std::shared_ptr<const fg::Ball> ball;
    std::vector<MatC> val;  // indexed by ball index

    const MatC& at(std::int64_t idx) const { return val[idx]; }
};

PowerTable power_entries(const CoefficientFamily& c, int ell,
                         std::shared_ptr<const fg::Ball> ball = nullptr,
                         std::uint64_t cap = 20'000'000);

MatC power_entry(const CoefficientFamily& c, int ell, const fg::Word& g);

cx free_moment(const CoefficientFamily& c, int ell);

// {g in S_m} -> (A^ell)_{g,unit}
std::map<fg::Word, MatC> nb_component(const CoefficientFamily& c, int ell, int m);

// ---------------------------------------------------------------------------
// corner operators C^{(k,i)}

// Values (C^{(k,i)})_{g,unit} over the ball of radius k (zero outside V_i).
PowerTable c_entries(const CoefficientFamily& c, int k, int i,
                     std::shared_ptr<const fg::Ball> ball = nullptr);

MatC c_entry(const CoefficientFamily& c, int k, int i, const fg::Word& g);

// Last-passage decomposition residual (max entry) for g split as
// h_r ... h_1 h_0 at the given cut positions of the letter array
// (cut positions are letter counts from the right; h_0 is the rightmost chunk).
double path_decomposition_residual(const CoefficientFamily& c, int k,
                                   const fg::Word& g, const std::vector<int>& cuts);

// ---------------------------------------------------------------------------
// diagonal series by first-return recursion (exact, O(d K^2) matrix products)

struct DiagonalSeries {
    // G[k] = (A^k)_{unit,unit} * scale^{-k}
    // F[i-1][k] = ((A^o)^k)_{g_i g_i} * scale^{-k}  (restriction to F_d minus unit)
    double scale = 1.0;
    std::vector<MatC> G;
    std::vector<std::vector<MatC>> F;
};

DiagonalSeries diagonal_series(const CoefficientFamily& c, int kmax);

// ---------------------------------------------------------------------------
// norms and brackets

// Normalized Schatten norm ||A||_p for even p, exact (computed through the
// self-adjointization when the family is not self-adjoint).
double schatten_norm_star(const CoefficientFamily& c, int p);

// Certified upper bound (p^3 * sum_g ||(A^{p/2})_{g,unit}||^2)^{1/p}, even p.
double haagerup_upper(const CoefficientFamily& c, int p, std::uint64_t cap = 20'000'000);

// Sharper certified upper bound: per-sphere Haagerup plus triangle inequality,
// (sum_l (l+1) sqrt(sum_{g in S_l} ||(A^{k})_{g,unit}||^2))^{1/k} with k = p/2.
double haagerup_upper_layered(const CoefficientFamily& c, int p, std::uint64_t cap = 20'000'000);

// Largest singular value of the ball truncation at radius L (a lower bound
// on ||A||; at radius l-1 it is >= (1-2/l)||A||).
double truncated_norm_lower(const CoefficientFamily& c, int L,
                            std::uint64_t cap = 20'000'000, std::uint64_t seed = 7);

// Dense assembly of the ball operator (coefficients (x) l^2(B_L)).
MatC ball_operator_dense(const CoefficientFamily& c, const fg::Ball& ball);

struct BracketBudget {
    int max_L = 8;                        // truncation radius ladder cap (generic path)
    int max_p = 16;                       // Haagerup p ladder cap (generic path)
    std::uint64_t max_words = 60'000;     // ball capacity for generic DP / eigensolves
    int max_L_isotropic = 256;            // deep ladder caps for scalar isotropic families
    int max_p_isotropic = 2048;
};

struct Bracket {
    double lower = 0.0;
    double upper = 0.0;
    bool achieved = false;  // upper - lower <= tol
    int L_used = 0;
    int p_used = 0;
};

Bracket norm_bracket(const CoefficientFamily& c, double tol, BracketBudget budget = {});

// ||(C^{(k,i)})_{g,unit}|| <= upper^k for all |g| <= k, and truncated operator
// norm <= k * upper^k, with upper from norm_bracket.
bool c_norm_bound_check(const CoefficientFamily& c, int k, int i, double slack = 1e-9);

// ---------------------------------------------------------------------------
// isotropic scalar fast paths (radial reduction); exact for families with
// n=1, a_i = c real for all i, a_0 real. Cross-validated against the generic
// path in tests.
namespace radial {

// lambda_max of the depth-L truncated (2d)-regular tree adjacency
double tree_ball_lambda_max(int d, int L);

// e_k(r) = (A^k)_{g,unit} for |g| = r, scaled by scale^{-k}, for the family
// a_i = c, a_0 = c0. Row k of the table is the vector over r = 0..kmax.
struct RadialTable {
    int d = 1;
    double c = 1.0, c0 = 0.0;
    double scale = 1.0;
    int kmax = 0;
    std::vector<std::vector<double>> e;  // e[k][r]
};
RadialTable radial_entries(int d, double c, double c0, int kmax);

double haagerup_upper(const RadialTable& t, int p);
double haagerup_upper_layered(const RadialTable& t, int p);

}  // namespace radial

// ---------------------------------------------------------------------------
// tensor legs: A = a_0 (x) 1 + sum_{i,j} a_{i,j} (x) lambda(g_{i,j}) on F_d^k

struct TensorFamily {
    int d = 1;
    int k = 1;  // legs
    int n = 1;
    MatC a0;
    std::vector<std::vector<MatC>> leg;  // leg[j][i], j in 0..k-1, i in 0..2d (index 0 unused)

    bool is_isotropic_scalar() const;
};

// tau(A^ell) on F_d^k, exact via DP over the product of balls.
cx tensor_free_moment(const TensorFamily& t, int ell, std::uint64_t state_cap = 5'000'000);

// certified upper bound on ||A_{star^k}||; even p. Uses the tensorized
// Haagerup inequality; isotropic scalar families take the deep radial path.
double tensor_haagerup_upper(const TensorFamily& t, int p, std::uint64_t state_cap = 5'000'000);

// product-ball truncation lower bound at radius L per leg
double tensor_truncated_lower(const TensorFamily& t, int L, std::uint64_t state_cap = 5'000'000,
                              std::uint64_t seed = 7);

}  // namespace freelab::star
