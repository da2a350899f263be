#pragma once
// Random model sampling (Haar unitary/orthogonal, uniform permutation),
// assembly of A_N = a_0 (x) 1 + sum a_i (x) U_i, operator and Schatten norms,
// Monte Carlo moments, concentration probes, and tensor-leg models.
#include <string>
#include <vector>

#include "freelab/coeffs.hpp"
#include "freelab/rng.hpp"
#include "freelab/star_ops.hpp"

namespace freelab::models {

enum class Kind { haar_unitary, haar_orthogonal, uniform_permutation };

struct ModelSample {
    Kind kind = Kind::haar_unitary;
    int N = 0, d = 0;
    std::uint64_t seed = 0;
    std::vector<MatC> U;                   // dense kinds: U_1..U_d
    std::vector<std::vector<int>> sigma;   // permutation kind: index maps

    bool is_permutation() const { return kind == Kind::uniform_permutation; }
    double unitarity_defect() const;  // max ||U U^* - 1||_max over the tuple
    MatC dense_generator(int i) const;  // U_i for i in [2d] (adjoints for i > d)
};

ModelSample sample(Kind kind, int N, int d, std::uint64_t seed);

// binary float64 payload with a JSON header line (permutations are stored as
// index arrays in the header itself)
void write_sample(const ModelSample& s, const std::string& path);
ModelSample read_sample(const std::string& path);

MatC assemble(const CoefficientFamily& c, const ModelSample& s);

// largest singular value; `project` composes with Pi_N = 1 (x) (1 - ones ones^*)
double operator_norm(const MatC& op, int n, int N, bool project = false);

// matvec-based norm for permutation samples (never densified)
double operator_norm_perm(const CoefficientFamily& c, const ModelSample& s,
                          bool project = true, double rel_tol = 1e-8);

// normalized Schatten p-norm of a dense operator (p even)
double schatten_norm(const MatC& op, int p);
// certified lift ||T|| <= (nN)^{1/p} ||T||_p
double schatten_lift(double schatten_p, int n, int N, int p);

struct McMoment {
    double mean = 0, se = 0;
    int samples = 0;
};
McMoment mc_trace_moment(const CoefficientFamily& c, int ell, int N, Kind kind,
                         int samples, std::uint64_t seed);

struct ConcentrationReport {
    std::vector<double> values;  // ||A_N||_p per sample
    double mean = 0, stddev = 0;
    double bound = 0;  // C sqrt(d) ||A_star|| N^{-1/2 - 1/p}
    bool pass = false;
};
// p <= 0 means the operator norm (p = infinity)
ConcentrationReport concentration_probe(const CoefficientFamily& c, int N, int p,
                                        int samples, std::uint64_t seed, double slack = 10.0);

// A on the k-fold tensor: a_0 (x) 1 + sum_{i,j} a_{i,j} (x) V_{i,j}
// (dense; dimension n N^k, capped)
MatC tensor_leg_model(const star::TensorFamily& t, const std::vector<ModelSample>& legs,
                      std::uint64_t dense_cap = 200'000);

// norm of the tensor-leg operator restricted to the per-leg complement of the
// constant vector (permutation variant)
double tensor_restricted_norm(const MatC& op, int n, int N, int k);

}  // namespace freelab::models
