#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "freelab/eigs.hpp"
#include "freelab/star_ops.hpp"

namespace freelab::star {

namespace {

double block_opnorm(const MatC& m) { return operator_norm_dense(m); }

// sum over g of ||(A^{p/2})_{g,unit}||^2, grouped by sphere
std::vector<double> sphere_square_sums(const CoefficientFamily& c, int k, std::uint64_t cap) {
    PowerTable t = power_entries(c, k, nullptr, cap);
    const auto& B = *t.ball;
    std::vector<double> s(k + 1, 0.0);
    for (int l = 0; l <= k; ++l)
        for (std::int64_t g = B.sphere_offset(l); g < B.sphere_offset(l + 1); ++g) {
            double v = block_opnorm(t.val[g]);
            s[l] += v * v;
        }
    return s;
}

}  // namespace

double schatten_norm_star(const CoefficientFamily& c, int p) {
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("schatten_norm_star: p even >= 2");
    CoefficientFamily cc = (c.selfadjoint_residual() < 1e-12) ? c : selfadjointize(c);
    DiagonalSeries s = diagonal_series(cc, p);
    double f = s.G[p].trace().real() / double(cc.n);
    if (f < 0) f = 0.0;  // tau(A^p) >= 0 up to roundoff for self-adjoint A
    return s.scale * std::pow(f, 1.0 / p);
}

double haagerup_upper(const CoefficientFamily& c, int p, std::uint64_t cap) {
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("haagerup_upper: p even >= 2");
    CoefficientFamily cc = (c.selfadjoint_residual() < 1e-12) ? c : selfadjointize(c);
    if (cc.is_isotropic_scalar() && p > 8) {
        auto t = radial::radial_entries(cc.d, cc.a[1](0, 0).real(), cc.a[0](0, 0).real(), p / 2);
        return radial::haagerup_upper(t, p);
    }
    auto s = sphere_square_sums(cc, p / 2, cap);
    double total = 0.0;
    for (double v : s) total += v;
    return std::pow(double(p) * p * p * total, 1.0 / p);
}

double haagerup_upper_layered(const CoefficientFamily& c, int p, std::uint64_t cap) {
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("haagerup_upper_layered: p even >= 2");
    CoefficientFamily cc = (c.selfadjoint_residual() < 1e-12) ? c : selfadjointize(c);
    if (cc.is_isotropic_scalar() && p > 8) {
        auto t = radial::radial_entries(cc.d, cc.a[1](0, 0).real(), cc.a[0](0, 0).real(), p / 2);
        return radial::haagerup_upper_layered(t, p);
    }
    const int k = p / 2;
    auto s = sphere_square_sums(cc, k, cap);
    double total = 0.0;
    for (int l = 0; l <= k; ++l) total += (l + 1) * std::sqrt(s[l]);
    return std::pow(total, 1.0 / k);
}

MatC ball_operator_dense(const CoefficientFamily& c, const fg::Ball& ball) {
    const int n = c.n, q = 2 * c.d;
    const std::int64_t sz = ball.size();
    MatC m = MatC::Zero(sz * n, sz * n);
    for (std::int64_t h = 0; h < sz; ++h) {
        m.block(h * n, h * n, n, n) = c.a[0];
        for (int i = 1; i <= q; ++i) {
            std::int64_t g = ball.step(h, i);
            if (g >= 0) m.block(g * n, h * n, n, n) += c.a[i];
        }
    }
    return m;
}

namespace {

// matvec of the ball operator on flattened (ball index, coefficient index) vectors
struct BallMatvec {
    const CoefficientFamily* c;
    const fg::Ball* ball;
    void operator()(const cx* in, cx* out) const {
        const int n = c->n, q = 2 * c->d;
        const std::int64_t sz = ball->size();
        if (n == 1) {
            const cx a0 = c->a[0](0, 0);
            std::vector<cx> ai(q + 1);
            for (int i = 1; i <= q; ++i) ai[i] = c->a[i](0, 0);
            for (std::int64_t g = 0; g < sz; ++g) {
                cx acc = a0 * in[g];
                for (int i = 1; i <= q; ++i) {
                    std::int64_t h = ball->step(g, fg::star(i, c->d));
                    if (h >= 0) acc += ai[i] * in[h];
                }
                out[g] = acc;
            }
            return;
        }
        for (std::int64_t g = 0; g < sz; ++g) {
            Eigen::Map<VecC> o(out + g * n, n);
            o = c->a[0] * Eigen::Map<const VecC>(in + g * n, n);
            for (int i = 1; i <= q; ++i) {
                std::int64_t h = ball->step(g, fg::star(i, c->d));
                if (h >= 0) o.noalias() += c->a[i] * Eigen::Map<const VecC>(in + h * n, n);
            }
        }
    }
};

}  // namespace

double truncated_norm_lower(const CoefficientFamily& c, int L, std::uint64_t cap, std::uint64_t seed) {
    if (c.is_isotropic_scalar()) {
        double cc = c.a[1](0, 0).real(), c0 = c.a[0](0, 0).real();
        return std::abs(c0) + std::abs(cc) * radial::tree_ball_lambda_max(c.d, L);
    }
    auto ball = std::make_shared<const fg::Ball>(c.d, L, cap);
    std::int64_t dim = ball->size() * c.n;
    bool herm = c.selfadjoint_residual() < 1e-12;
    if (dim <= 2000) {
        MatC m = ball_operator_dense(c, *ball);
        return operator_norm_dense(m);
    }
    BallMatvec mv{&c, ball.get()};
    if (herm) return lanczos_max_abs(mv, dim, Rng(seed), 1e-9);
    // largest singular value via T^* T
    std::vector<cx> tmp(dim);
    HermOp op = [&](const cx* in, cx* out) {
        mv(in, tmp.data());
        // adjoint matvec: conjugate-transpose of the ball operator
        const int n = c.n, q = 2 * c.d;
        const std::int64_t sz = ball->size();
        for (std::int64_t g = 0; g < sz; ++g) {
            Eigen::Map<VecC> o(out + g * n, n);
            o = c.a[0].adjoint() * Eigen::Map<const VecC>(tmp.data() + g * n, n);
            for (int i = 1; i <= q; ++i) {
                std::int64_t h = ball->step(g, i);  // (A^*)_{g,h} = a_i^* when h = g_i g
                if (h >= 0) o.noalias() += c.a[i].adjoint() * Eigen::Map<const VecC>(tmp.data() + h * n, n);
            }
        }
    };
    double lam = lanczos_max_abs(op, dim, Rng(seed), 1e-9);
    return std::sqrt(std::max(0.0, lam));
}

namespace radial {

double tree_ball_lambda_max(int d, int L) {
    if (L == 0) return 0.0;
    // radial (Perron) reduction of the depth-L tree ball adjacency
    MatR j = MatR::Zero(L + 1, L + 1);
    for (int r = 0; r < L; ++r) {
        double b = (r == 0) ? std::sqrt(2.0 * d) : std::sqrt(2.0 * d - 1.0);
        j(r, r + 1) = j(r + 1, r) = b;
    }
    Eigen::SelfAdjointEigenSolver<MatR> es(j, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(L);
}

RadialTable radial_entries(int d, double c, double c0, int kmax) {
    RadialTable t;
    t.d = d;
    t.c = c;
    t.c0 = c0;
    t.kmax = kmax;
    double s = std::abs(c0) + 2 * d * std::abs(c);
    if (s <= 0) s = 1.0;
    t.scale = s;
    const double ch = c / s, c0h = c0 / s;
    const double q = 2.0 * d - 1.0;
    t.e.assign(kmax + 1, std::vector<double>(kmax + 2, 0.0));
    t.e[0][0] = 1.0;
    for (int k = 1; k <= kmax; ++k) {
        const auto& p = t.e[k - 1];
        auto& e = t.e[k];
        e[0] = c0h * p[0] + ch * 2 * d * p[1];
        for (int r = 1; r <= k; ++r)
            e[r] = c0h * p[r] + ch * (p[r - 1] + q * p[r + 1]);
    }
    return t;
}

double haagerup_upper(const RadialTable& t, int p) {
    const int k = p / 2;
    if (k > t.kmax) throw std::invalid_argument("radial table too shallow");
    double total = 0.0;
    for (int r = 0; r <= k; ++r) {
        double sl = double(fg::sphere_size(t.d, r));
        total += sl * t.e[k][r] * t.e[k][r];
    }
    // (p^3 * scale^{2k} * total)^{1/p}
    return t.scale * std::pow(double(p) * p * p * total, 1.0 / p);
}

double haagerup_upper_layered(const RadialTable& t, int p) {
    const int k = p / 2;
    if (k > t.kmax) throw std::invalid_argument("radial table too shallow");
    double total = 0.0;
    for (int r = 0; r <= k; ++r) {
        double sl = double(fg::sphere_size(t.d, r));
        total += (r + 1) * std::sqrt(sl) * std::abs(t.e[k][r]);
    }
    return t.scale * std::pow(total, 1.0 / k);
}

}  // namespace radial

Bracket norm_bracket(const CoefficientFamily& c, double tol, BracketBudget budget) {
    CoefficientFamily cc = (c.selfadjoint_residual() < 1e-12) ? c : selfadjointize(c);
    Bracket b;
    b.upper = cc.coeff_norm_sum();  // triangle inequality start
    if (b.upper == 0.0) {           // zero operator
        b.achieved = true;
        return b;
    }
    const bool iso = cc.is_isotropic_scalar();

    auto exactness_lift = [](double lower, int L) {
        return L >= 2 ? lower / (1.0 - 2.0 / (L + 1)) : std::numeric_limits<double>::infinity();
    };

    if (iso) {
        const double cs = cc.a[1](0, 0).real(), c0 = cc.a[0](0, 0).real();
        for (int L = 4; L <= budget.max_L_isotropic; L *= 2) {
            double lo = std::abs(c0) + std::abs(cs) * radial::tree_ball_lambda_max(cc.d, L);
            if (lo > b.lower) { b.lower = lo; b.L_used = L; }
            b.upper = std::min(b.upper, exactness_lift(lo, L));
            if (b.upper - b.lower <= tol) break;
            int p = 2 * L;  // grow p with L
            if (p >= 8 && p <= budget.max_p_isotropic) {
                auto t = radial::radial_entries(cc.d, cs, c0, p / 2);
                double up = std::min(radial::haagerup_upper(t, p), radial::haagerup_upper_layered(t, p));
                if (up < b.upper) { b.upper = up; b.p_used = p; }
            }
            if (b.upper - b.lower <= tol) break;
        }
    } else {
        for (int L = 1; L <= budget.max_L; ++L) {
            if (fg::ball_size(cc.d, L) * static_cast<std::uint64_t>(cc.n) > budget.max_words) break;
            double lo = truncated_norm_lower(cc, L, budget.max_words);
            if (lo > b.lower) { b.lower = lo; b.L_used = L; }
            b.upper = std::min(b.upper, exactness_lift(lo, L));
            int p = 2 * L;
            if (p >= 2 && p <= budget.max_p &&
                fg::ball_size(cc.d, p / 2) <= budget.max_words) {
                double up = std::min(haagerup_upper(cc, p, budget.max_words),
                                     haagerup_upper_layered(cc, p, budget.max_words));
                if (up < b.upper) { b.upper = up; b.p_used = p; }
            }
            if (b.upper - b.lower <= tol) break;
        }
    }
    b.achieved = (b.upper - b.lower <= tol);
    return b;
}

bool c_norm_bound_check(const CoefficientFamily& c, int k, int i, double slack) {
    Bracket br = norm_bracket(c, 0.05, {.max_L = 6, .max_p = 12, .max_words = 30'000});
    double bound = std::pow(br.upper, k);
    PowerTable ct = c_entries(c, k, i);
    const auto& B = *ct.ball;
    for (std::int64_t g = 0; g < B.size(); ++g)
        if (operator_norm_dense(ct.val[g]) > bound * (1.0 + slack)) return false;

    // truncated operator norm of C^{(k,i)} (a lower bound on ||C||) vs k*upper^k
    int L = 0;
    while (L + 1 <= k && fg::ball_size(c.d, L + 1) * static_cast<std::uint64_t>(c.n) <= 3000) ++L;
    fg::Ball ball(c.d, L);
    const std::int64_t sz = ball.size();
    MatC m = MatC::Zero(sz * c.n, sz * c.n);
    for (std::int64_t x = 0; x < sz; ++x) {
        fg::Word wx = ball.word(x);
        for (std::int64_t y = 0; y < sz; ++y) {
            fg::Word wxy = fg::concat_reduce(wx, fg::inverse(ball.word(y)));
            if (wxy.length() > k) continue;
            std::int64_t idx = ct.ball->index(wxy);
            if (idx >= 0) m.block(x * c.n, y * c.n, c.n, c.n) = ct.val[idx];
        }
    }
    double trunc = operator_norm_dense(m);
    return trunc <= k * bound * (1.0 + slack);
}

// ---------------------------------------------------------------------------
// tensor legs

bool TensorFamily::is_isotropic_scalar() const {
    if (n != 1) return false;
    if (std::abs(a0(0, 0).imag()) > 0) return false;
    cx c = leg[0][1](0, 0);
    if (std::abs(c.imag()) > 0) return false;
    for (int j = 0; j < k; ++j)
        for (int i = 1; i <= 2 * d; ++i)
            if (leg[j][i](0, 0) != c) return false;
    return true;
}

namespace {

// hashed product-ball DP state: packed ball indices, 21 bits each (k <= 3)
using StateMap = std::unordered_map<std::uint64_t, MatC>;

std::uint64_t pack(const std::vector<std::int64_t>& idx) {
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < idx.size(); ++j) key |= static_cast<std::uint64_t>(idx[j]) << (21 * j);
    return key;
}

StateMap tensor_power_map(const TensorFamily& t, int ell, const fg::Ball& ball,
                          std::uint64_t state_cap) {
    const int q = 2 * t.d;
    StateMap cur;
    cur.emplace(0, MatC::Identity(t.n, t.n));
    std::vector<std::int64_t> idx(t.k);
    for (int step = 1; step <= ell; ++step) {
        StateMap nxt;
        nxt.reserve(cur.size() * 2);
        for (const auto& [key, val] : cur) {
            for (int j = 0; j < t.k; ++j) idx[j] = (key >> (21 * j)) & ((1ull << 21) - 1);
            if (!t.a0.isZero(0.0)) {
                auto& acc = nxt.try_emplace(key, MatC::Zero(t.n, t.n)).first->second;
                acc.noalias() += t.a0 * val;
            }
            for (int j = 0; j < t.k; ++j) {
                std::int64_t old = idx[j];
                for (int i = 1; i <= q; ++i) {
                    std::int64_t ni = ball.step(old, i);
                    if (ni < 0) continue;
                    std::uint64_t nkey = key + (static_cast<std::uint64_t>(ni - old) << (21 * j));
                    auto& acc = nxt.try_emplace(nkey, MatC::Zero(t.n, t.n)).first->second;
                    acc.noalias() += t.leg[j][i] * val;
                }
            }
        }
        if (nxt.size() > state_cap) throw std::runtime_error("tensor DP: state cap exceeded");
        cur = std::move(nxt);
    }
    return cur;
}

}  // namespace

cx tensor_free_moment(const TensorFamily& t, int ell, std::uint64_t state_cap) {
    if (t.k > 3) throw std::invalid_argument("tensor_free_moment: k <= 3");
    fg::Ball ball(t.d, ell);
    auto m = tensor_power_map(t, ell, ball, state_cap);
    auto it = m.find(0);
    if (it == m.end()) return 0.0;
    return it->second.trace() / double(t.n);
}

namespace {

// radial product grid for isotropic scalar tensor families: e[k][(r1..rk)] scaled
struct TensorRadial {
    int d, k, kmax;
    double scale;
    std::vector<double> e;  // flat, stride (kmax+2) per leg, at final depth
    std::vector<double> sphere_sz_sqrt;
};

TensorRadial tensor_radial_entries(const TensorFamily& t, int kmax) {
    TensorRadial out;
    out.d = t.d;
    out.k = t.k;
    out.kmax = kmax;
    double c = t.leg[0][1](0, 0).real(), c0 = t.a0(0, 0).real();
    double s = std::abs(c0) + t.k * 2 * t.d * std::abs(c);
    if (s <= 0) s = 1.0;
    out.scale = s;
    const double ch = c / s, c0h = c0 / s;
    const double q = 2.0 * t.d - 1.0;
    const std::size_t stride = kmax + 2;
    std::size_t total = 1;
    for (int j = 0; j < t.k; ++j) total *= stride;
    std::vector<double> cur(total, 0.0), nxt(total, 0.0);
    cur[0] = 1.0;
    std::vector<std::size_t> pw(t.k);
    for (int j = 0; j < t.k; ++j) pw[j] = (j == 0) ? 1 : pw[j - 1] * stride;
    std::vector<int> r(t.k);
    for (int step = 1; step <= kmax; ++step) {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        // iterate states with sum r_j <= step (superset is fine: values are zero outside)
        for (std::size_t s_i = 0; s_i < total; ++s_i) {
            std::size_t rem = s_i;
            int rsum = 0;
            for (int j = t.k - 1; j >= 0; --j) {
                r[j] = static_cast<int>(rem / pw[j]);
                rem %= pw[j];
                rsum += r[j];
            }
            if (rsum > step || r[0] > kmax || rsum > kmax) continue;
            double acc = c0h * cur[s_i];
            for (int j = 0; j < t.k; ++j) {
                if (r[j] >= 1) acc += ch * cur[s_i - pw[j]];  // arrived by an up-step? no: neighbor below
                double mult = (r[j] == 0) ? 2.0 * t.d : q;
                if (r[j] + 1 <= kmax) acc += ch * mult * cur[s_i + pw[j]];
            }
            nxt[s_i] = acc;
        }
        std::swap(cur, nxt);
    }
    out.e = std::move(cur);
    out.sphere_sz_sqrt.resize(kmax + 2, 0.0);
    for (int l = 0; l <= kmax; ++l) out.sphere_sz_sqrt[l] = std::sqrt(double(fg::sphere_size(t.d, l)));
    return out;
}

}  // namespace

double tensor_haagerup_upper(const TensorFamily& t, int p, std::uint64_t state_cap) {
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("tensor_haagerup_upper: p even >= 2");
    const int k2 = p / 2;
    if (t.is_isotropic_scalar()) {
        int kmax = k2;
        TensorRadial tr = tensor_radial_entries(t, kmax);
        const std::size_t stride = tr.kmax + 2;
        // layered: sum over (l1..lk) of prod (l_j + 1) sqrt(prod |S_lj|) |e|
        double layered = 0.0, frob = 0.0;
        std::size_t total = tr.e.size();
        std::vector<int> r(t.k);
        std::vector<std::size_t> pw(t.k);
        for (int j = 0; j < t.k; ++j) pw[j] = (j == 0) ? 1 : pw[j - 1] * stride;
        for (std::size_t s_i = 0; s_i < total; ++s_i) {
            double v = tr.e[s_i];
            if (v == 0.0) continue;
            std::size_t rem = s_i;
            double w = 1.0;
            for (int j = t.k - 1; j >= 0; --j) {
                int rj = static_cast<int>(rem / pw[j]);
                rem %= pw[j];
                w *= (rj + 1) * tr.sphere_sz_sqrt[rj];
            }
            layered += w * std::abs(v);
            double sq = 1.0;
            rem = s_i;
            for (int j = t.k - 1; j >= 0; --j) {
                int rj = static_cast<int>(rem / pw[j]);
                rem %= pw[j];
                sq *= tr.sphere_sz_sqrt[rj] * tr.sphere_sz_sqrt[rj];
            }
            frob += sq * v * v;
        }
        double up_layered = tr.scale * std::pow(layered, 1.0 / k2);
        // ||A||^p <= 2 n p^{3k} ||A||_p^p with ||A||_p^p = scale^{2k2} * frob
        double up_schatten = tr.scale *
            std::pow(2.0 * t.n * std::pow(double(p), 3.0 * t.k) * frob, 1.0 / p);
        return std::min(up_layered, up_schatten);
    }
    fg::Ball ball(t.d, k2);
    if (ball.size() >= (1ll << 21)) throw std::runtime_error("tensor_haagerup_upper: ball too large");
    auto m = tensor_power_map(t, k2, ball, state_cap);
    // group ||(A^{k2})_{g,unit}||^2 by the length vector (l_1..l_k)
    std::unordered_map<std::uint64_t, double> shell;
    double frob = 0.0;
    for (const auto& [key, val] : m) {
        double nrm = block_opnorm(val);
        std::uint64_t lkey = 0;
        for (int j = 0; j < t.k; ++j) {
            std::int64_t idx = (key >> (21 * j)) & ((1ull << 21) - 1);
            lkey |= static_cast<std::uint64_t>(ball.word_length(idx)) << (8 * j);
        }
        shell[lkey] += nrm * nrm;
        frob += nrm * nrm;
    }
    double layered = 0.0;
    for (const auto& [lkey, sq] : shell) {
        double w = 1.0;
        for (int j = 0; j < t.k; ++j) w *= ((lkey >> (8 * j)) & 0xff) + 1;
        layered += w * std::sqrt(sq);
    }
    double up_layered = std::pow(layered, 1.0 / k2);
    double up_schatten = std::pow(2.0 * t.n * std::pow(double(p), 3.0 * t.k) * frob, 1.0 / p);
    return std::min(up_layered, up_schatten);
}

double tensor_truncated_lower(const TensorFamily& t, int L, std::uint64_t state_cap,
                              std::uint64_t seed) {
    if (t.is_isotropic_scalar()) {
        double c = t.leg[0][1](0, 0).real(), c0 = t.a0(0, 0).real();
        return std::abs(c0) + std::abs(c) * t.k * radial::tree_ball_lambda_max(t.d, L);
    }
    fg::Ball ball(t.d, L);
    std::uint64_t sz = static_cast<std::uint64_t>(ball.size());
    std::uint64_t dim = t.n;
    for (int j = 0; j < t.k; ++j) {
        dim *= sz;
        if (dim > state_cap) throw std::runtime_error("tensor_truncated_lower: state cap exceeded");
    }
    const int q = 2 * t.d;
    // matvec on flattened (n, ball^k) entries; assumes self-adjoint family
    HermOp op = [&](const cx* in, cx* out) {
        // layout: x = ((idx_k ... idx_1) * n + coeff)
        std::vector<std::int64_t> idx(t.k);
        for (std::int64_t x = 0; x < static_cast<std::int64_t>(dim); x += t.n) {
            std::int64_t cell = x / t.n;
            for (int j = 0; j < t.k; ++j) {
                idx[j] = cell % sz;
                cell /= sz;
            }
            Eigen::Map<VecC> o(out + x, t.n);
            o = t.a0 * Eigen::Map<const VecC>(in + x, t.n);
            for (int j = 0; j < t.k; ++j) {
                std::int64_t strd = t.n;
                for (int jj = 0; jj < j; ++jj) strd *= sz;
                for (int i = 1; i <= q; ++i) {
                    std::int64_t h = ball.step(idx[j], fg::star(i, t.d));
                    if (h < 0) continue;
                    std::int64_t src = x + (h - idx[j]) * strd;
                    o.noalias() += t.leg[j][i] * Eigen::Map<const VecC>(in + src, t.n);
                }
            }
        }
    };
    return lanczos_max_abs(op, dim, Rng(seed), 1e-9);
}

}  // namespace freelab::star
