#pragma once
// Coefficient families (a_0, a_1, ..., a_{2d}) of n x n complex matrices.
#include <optional>
#include <string>
#include <vector>

#include "freelab/types.hpp"

namespace freelab {

struct UnitaryTensorWitness {
    int m = 0;                 // unitary factor dimension
    std::vector<MatC> b;       // 2d+1 entries, b[0] unused
    std::vector<MatC> u;       // u[i] unitary, u[star(i)] = u[i]^*
};

struct CoefficientFamily {
    int d = 1;
    int n = 1;
    std::vector<MatC> a;  // 2d+1 matrices, a[0] is the identity coefficient

    bool selfadjoint = false;
    bool bistochastic = false;
    bool unitary_tensor = false;
    std::optional<UnitaryTensorWitness> witness;  // required when unitary_tensor
    VecC fixed_vector;  // bistochastic common fixed unit vector (default: all-ones/sqrt(n))

    CoefficientFamily() = default;
    CoefficientFamily(int d_, int n_) : d(d_), n(n_), a(2 * d_ + 1, MatC::Zero(n_, n_)) {}

    // residual of the symmetry condition a_i^* = a_{i*}, a_0^* = a_0
    double selfadjoint_residual() const;
    // checks a_i f = a_i^* f = ||a_i|| f for the common fixed vector, to tol
    bool check_bistochastic(double tol = 1e-10) const;
    // checks the explicit witness a_i = b_i (x) u_i with u_i unitary
    bool check_unitary_tensor(double tol = 1e-10) const;

    // throws std::invalid_argument when a declared flag fails its check
    void validate(double tol = 1e-12) const;

    double coeff_norm_sum() const;  // sum over i=0..2d of ||a_i||

    std::string to_json() const;
    static CoefficientFamily from_json(const std::string& text);

    // scalar family with a_i = c for all i in [2d], a_0 = c0 (Kesten-type)
    static CoefficientFamily isotropic_scalar(int d, double c = 1.0, double c0 = 0.0);

    // true when the family is n=1 with all a_i equal real and a_0 real
    bool is_isotropic_scalar() const;
};

// 2x2 self-adjointization: a_i -> ((0, a_i), (a_{i*}^*, 0)); doubles n.
CoefficientFamily selfadjointize(const CoefficientFamily& c);

}  // namespace freelab
