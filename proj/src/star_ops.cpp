#include "freelab/star_ops.hpp"

#include <stdexcept>

namespace freelab::star {

PowerTable power_entries(const CoefficientFamily& c, int ell,
                         std::shared_ptr<const fg::Ball> ball, std::uint64_t cap) {
    if (ell < 0) throw std::invalid_argument("power_entries: ell >= 0");
    if (!ball || ball->radius() < ell || ball->d() != c.d)
        ball = std::make_shared<const fg::Ball>(c.d, ell, cap);
    const auto& B = *ball;
    const int n = c.n, q = 2 * c.d;
    const std::int64_t sz = B.size();

    PowerTable out;
    out.ell = ell;
    out.n = n;
    out.ball = ball;

    std::vector<MatC> cur(sz, MatC::Zero(n, n)), nxt;
    cur[0] = MatC::Identity(n, n);
    nxt = cur;
    for (int k = 1; k <= ell; ++k) {
        // only indices inside B_min(k, L) can be nonzero after k steps
        std::int64_t active = B.sphere_offset(std::min(k, B.radius()) + 1);
        for (std::int64_t g = 0; g < active; ++g) {
            MatC acc = c.a[0] * cur[g];
            for (int i = 1; i <= q; ++i) {
                std::int64_t h = B.step(g, fg::star(i, c.d));  // g_i^{-1} g
                if (h >= 0) acc.noalias() += c.a[i] * cur[h];
            }
            nxt[g] = std::move(acc);
        }
        std::fill(nxt.begin() + active, nxt.end(), MatC::Zero(n, n));
        std::swap(cur, nxt);
    }
    out.val = std::move(cur);
    return out;
}

MatC power_entry(const CoefficientFamily& c, int ell, const fg::Word& g) {
    if (g.length() > ell) return MatC::Zero(c.n, c.n);
    PowerTable t = power_entries(c, ell);
    std::int64_t idx = t.ball->index(g);
    if (idx < 0) throw std::invalid_argument("power_entry: word not reduced");
    return t.val[idx];
}

cx free_moment(const CoefficientFamily& c, int ell) {
    DiagonalSeries s = diagonal_series(c, ell);
    cx v = s.G[ell].trace() / double(c.n);
    return v * std::pow(s.scale, ell);
}

std::map<fg::Word, MatC> nb_component(const CoefficientFamily& c, int ell, int m) {
    if (m < 0 || m > ell) return {};
    PowerTable t = power_entries(c, ell);
    std::map<fg::Word, MatC> out;
    const auto& B = *t.ball;
    for (std::int64_t g = B.sphere_offset(m); g < B.sphere_offset(m + 1); ++g)
        out.emplace(B.word(g), t.val[g]);
    return out;
}

PowerTable c_entries(const CoefficientFamily& c, int k, int i,
                     std::shared_ptr<const fg::Ball> ball) {
    if (k < 1) throw std::invalid_argument("c_entries: k >= 1");
    if (i < 1 || i > 2 * c.d) throw std::invalid_argument("c_entries: generator out of range");
    if (!ball || ball->radius() < k || ball->d() != c.d)
        ball = std::make_shared<const fg::Ball>(c.d, k);
    const auto& B = *ball;
    const int n = c.n, q = 2 * c.d;
    const std::int64_t sz = B.size();

    // (C^{(k,i)})_{g,unit} = ((A^o)^{k-1})_{g g_i} a_i on V_i: walk DP started
    // at g_i with transitions through the unit removed.
    std::vector<MatC> cur(sz, MatC::Zero(n, n)), nxt(sz, MatC::Zero(n, n));
    std::int64_t start = B.step(0, i);
    cur[start] = MatC::Identity(n, n);
    for (int t = 1; t < k; ++t) {
        for (std::int64_t g = 1; g < sz; ++g) {  // g = unit excluded
            MatC acc = c.a[0] * cur[g];
            for (int j = 1; j <= q; ++j) {
                std::int64_t h = B.step(g, fg::star(j, c.d));
                if (h > 0) acc.noalias() += c.a[j] * cur[h];  // h = unit excluded
            }
            nxt[g] = std::move(acc);
        }
        std::swap(cur, nxt);
        std::fill(nxt.begin(), nxt.end(), MatC::Zero(n, n));
    }
    PowerTable out;
    out.ell = k;
    out.n = n;
    out.ball = ball;
    out.val.assign(sz, MatC::Zero(n, n));
    for (std::int64_t g = 1; g < sz; ++g)
        if (!cur[g].isZero(0.0)) out.val[g] = cur[g] * c.a[i];
    return out;
}

MatC c_entry(const CoefficientFamily& c, int k, int i, const fg::Word& g) {
    if (g.is_unit() || g.letters.back() != i || g.length() > k) return MatC::Zero(c.n, c.n);
    PowerTable t = c_entries(c, k, i);
    std::int64_t idx = t.ball->index(g);
    if (idx < 0) throw std::invalid_argument("c_entry: word not reduced");
    return t.val[idx];
}

double path_decomposition_residual(const CoefficientFamily& c, int k,
                                   const fg::Word& g, const std::vector<int>& cuts) {
    if (!fg::is_reduced(g)) throw std::invalid_argument("path_decomposition_residual: word not reduced");
    const int m = g.length();
    // split letters (leftmost-first storage) into chunks h_r ... h_1 h_0,
    // h_0 rightmost; cuts[j] = length of chunk h_j, j = 0..r
    std::vector<fg::Word> chunks;
    {
        int used = 0;
        for (int len : cuts) {
            if (len < 0 || used + len > m) throw std::invalid_argument("bad cut lengths");
            used += len;
        }
        if (used != m) throw std::invalid_argument("cut lengths must sum to |g|");
        int pos = m;  // letters index past the current chunk (from the right)
        for (int len : cuts) {
            fg::Word h(c.d, {});
            h.letters.assign(g.letters.begin() + (pos - len), g.letters.begin() + pos);
            pos -= len;
            chunks.push_back(h);
        }
    }
    const int r = static_cast<int>(chunks.size()) - 1;
    for (int j = 1; j <= r; ++j)
        if (chunks[j].is_unit()) throw std::invalid_argument("h_j must be nonempty for j >= 1");

    MatC lhs = power_entry(c, k, g);

    // f_j(kappa) = sum over compositions of the partial product
    auto ball = std::make_shared<const fg::Ball>(c.d, k);
    std::vector<MatC> f(k + 1, MatC::Zero(c.n, c.n));
    {
        PowerTable p0 = power_entries(c, k, ball);
        // (A^kappa)_{h_0, unit} for all kappa <= k requires per-kappa tables
        for (int kap = 0; kap <= k; ++kap) {
            if (chunks[0].length() > kap) continue;
            PowerTable pk = power_entries(c, kap, ball);
            std::int64_t idx = ball->index(chunks[0]);
            f[kap] = pk.val[idx];
        }
    }
    for (int j = 1; j <= r; ++j) {
        int i = chunks[j].letters.back();
        std::vector<MatC> nf(k + 1, MatC::Zero(c.n, c.n));
        std::int64_t idx = ball->index(chunks[j]);
        for (int kap = 1; kap <= k; ++kap) {
            PowerTable ck = c_entries(c, kap, i, ball);
            const MatC& cv = ck.val[idx];
            if (cv.isZero(0.0)) continue;
            for (int rest = 0; rest + kap <= k; ++rest)
                nf[rest + kap].noalias() += cv * f[rest];
        }
        f = std::move(nf);
    }
    return (lhs - f[k]).cwiseAbs().maxCoeff();
}

DiagonalSeries diagonal_series(const CoefficientFamily& c, int kmax) {
    DiagonalSeries out;
    double s = c.coeff_norm_sum();
    if (s <= 0.0) s = 1.0;
    out.scale = s;
    const int n = c.n, q = 2 * c.d;
    std::vector<MatC> ah(q + 1);
    for (int i = 0; i <= q; ++i) ah[i] = c.a[i] / s;

    const MatC id = MatC::Identity(n, n);
    const MatC zero = MatC::Zero(n, n);
    out.G.assign(kmax + 1, zero);
    out.F.assign(q, std::vector<MatC>(kmax + 1, zero));
    out.G[0] = id;
    for (int i = 0; i < q; ++i) out.F[i][0] = id;

    // first-return weights E_i(j) and E_unit(j), built from F at lower depth
    std::vector<std::vector<MatC>> E(q + 1, std::vector<MatC>(kmax + 1, zero));
    // E[q] is the unit-rooted one
    for (int k = 1; k <= kmax; ++k) {
        for (int i = 1; i <= q + 1; ++i) {
            MatC& e = E[i - 1][k];
            if (k == 1) {
                e = ah[0];
            } else {
                int istar = (i <= q) ? fg::star(i, c.d) : 0;  // none for the unit root
                for (int j = 1; j <= q; ++j) {
                    if (i <= q && j == istar) continue;
                    e.noalias() += ah[fg::star(j, c.d)] * out.F[j - 1][k - 2] * ah[j];
                }
            }
        }
        for (int i = 1; i <= q; ++i) {
            MatC acc = zero;
            for (int j = 1; j <= k; ++j) acc.noalias() += out.F[i - 1][k - j] * E[i - 1][j];
            out.F[i - 1][k] = acc;
        }
        MatC acc = zero;
        for (int j = 1; j <= k; ++j) acc.noalias() += out.G[k - j] * E[q][j];
        out.G[k] = acc;
    }
    return out;
}

}  // namespace freelab::star
