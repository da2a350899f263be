#pragma once
// Haar samplers shared by the model and Monte Carlo layers.
#include <vector>

#include "freelab/rng.hpp"
#include "freelab/types.hpp"

namespace freelab::haar {

// Haar unitary: QR of a complex Ginibre matrix, columns rescaled so the R
// diagonal is positive real.
MatC unitary(int N, Rng& rng);

// Haar orthogonal: same recipe over the reals.
MatR orthogonal(int N, Rng& rng);

// uniform permutation as an index map y = sigma[x] (Fisher-Yates)
std::vector<int> permutation(int N, Rng& rng);

}  // namespace freelab::haar
