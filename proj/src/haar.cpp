#include "freelab/haar.hpp"

#include <Eigen/QR>

namespace freelab::haar {

MatC unitary(int N, Rng& rng) {
    MatC g(N, N);
    for (int c = 0; c < N; ++c)
        for (int r = 0; r < N; ++r) g(r, c) = rng.cnormal();
    Eigen::HouseholderQR<MatC> qr(g);
    MatC q = qr.householderQ();
    MatC r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < N; ++c) {
        cx z = r(c, c);
        double a = std::abs(z);
        q.col(c) *= (a > 0) ? z / a : cx(1.0, 0.0);
    }
    return q;
}

MatR orthogonal(int N, Rng& rng) {
    MatR g(N, N);
    for (int c = 0; c < N; ++c)
        for (int r = 0; r < N; ++r) g(r, c) = rng.normal();
    Eigen::HouseholderQR<MatR> qr(g);
    MatR q = qr.householderQ();
    MatR r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < N; ++c)
        if (r(c, c) < 0) q.col(c) = -q.col(c);
    return q;
}

std::vector<int> permutation(int N, Rng& rng) {
    std::vector<int> p(N);
    for (int i = 0; i < N; ++i) p[i] = i;
    for (int i = N - 1; i > 0; --i) {
        int j = static_cast<int>(rng.uniform_int(i + 1));
        std::swap(p[i], p[j]);
    }
    return p;
}

}  // namespace freelab::haar
