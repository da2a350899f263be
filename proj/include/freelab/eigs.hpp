#pragma once
// Dense and iterative extremal-eigenvalue helpers shared across modules.
#include <functional>
#include "freelab/types.hpp"
#include "freelab/rng.hpp"

namespace freelab {

// All eigenvalues of a Hermitian matrix, ascending.
VecR hermitian_eigenvalues(const MatC& h);

// Largest singular value of a dense matrix (Hermitian input detected and
// routed through the symmetric solver).
double operator_norm_dense(const MatC& m);

// Hermitian square root of a PSD matrix. Eigenvalues below -neg_tol are an
// error; in [-neg_tol, 0) they are clipped to 0.
MatC hermitian_sqrt_psd(const MatC& h, double neg_tol = 1e-8, double clip_tol = 1e-12);

using HermOp = std::function<void(const cx* in, cx* out)>;

// Extremal eigenvalues of a Hermitian operator given as a matvec, by Lanczos
// with full reorthogonalization. Returns {lambda_min, lambda_max}.
// Deterministic for a fixed rng stream.
struct LanczosResult {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    int iterations = 0;
    bool converged = false;
};
LanczosResult lanczos_extremes(const HermOp& op, std::ptrdiff_t dim, Rng rng,
                               double rel_tol = 1e-9, int max_basis = 220);

// max |eigenvalue| of a Hermitian operator.
double lanczos_max_abs(const HermOp& op, std::ptrdiff_t dim, Rng rng,
                       double rel_tol = 1e-9);

}  // namespace freelab
