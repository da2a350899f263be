#include "freelab/weingarten.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "freelab/haar.hpp"

namespace freelab::wg {

int cycle_count(const Perm& p) {
    const int k = static_cast<int>(p.size());
    std::vector<bool> seen(k, false);
    int c = 0;
    for (int i = 0; i < k; ++i) {
        if (seen[i]) continue;
        ++c;
        for (int j = i; !seen[j]; j = p[j]) seen[j] = true;
    }
    return c;
}

std::vector<int> cycle_type(const Perm& p) {
    const int k = static_cast<int>(p.size());
    std::vector<bool> seen(k, false);
    std::vector<int> type;
    for (int i = 0; i < k; ++i) {
        if (seen[i]) continue;
        int len = 0;
        for (int j = i; !seen[j]; j = p[j]) {
            seen[j] = true;
            ++len;
        }
        type.push_back(len);
    }
    std::sort(type.rbegin(), type.rend());
    return type;
}

namespace {

void partitions_rec(int rest, int maxpart, std::vector<int>& cur,
                    std::vector<std::vector<int>>& out) {
    if (rest == 0) {
        out.push_back(cur);
        return;
    }
    for (int p = std::min(rest, maxpart); p >= 1; --p) {
        cur.push_back(p);
        partitions_rec(rest - p, p, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> partitions(int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    partitions_rec(k, k, cur, out);
    return out;
}

Perm class_representative(const std::vector<int>& type) {
    Perm p;
    int base = 0;
    for (int len : type) {
        for (int j = 0; j < len; ++j) p.push_back(base + (j + 1) % len);
        base += len;
    }
    return p;
}

BigInt ipow(long long n, int e) {
    BigInt r = 1;
    for (int i = 0; i < e; ++i) r *= n;
    return r;
}

// exact rational linear solve (Gaussian elimination with full pivoting not
// needed; the Gram system is well-conditioned in exact arithmetic)
std::vector<Rational> solve(std::vector<std::vector<Rational>> m, std::vector<Rational> rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (m[r][col] != 0) { piv = r; break; }
        if (piv < 0) throw std::runtime_error("weingarten: singular defining system");
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int r = 0; r < n; ++r) {
            if (r == col || m[r][col] == 0) continue;
            Rational f = m[r][col] / m[col][col];
            for (int c2 = col; c2 < n; ++c2) m[r][c2] -= f * m[col][c2];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<Rational> x(n);
    for (int i = 0; i < n; ++i) x[i] = rhs[i] / m[i][i];
    return x;
}

}  // namespace

WeingartenTable::WeingartenTable(int k, long long N) : k_(k), N_(N) {
    if (k < 1) throw std::invalid_argument("weingarten: k >= 1");
    if (N < k) throw std::invalid_argument("weingarten: need N >= k (Gram matrix invertible)");

    auto parts = partitions(k);
    const int P = static_cast<int>(parts.size());
    std::map<std::vector<int>, int> type_index;
    for (int t = 0; t < P; ++t) type_index[parts[t]] = t;
    std::vector<Perm> reps(P);
    for (int t = 0; t < P; ++t) reps[t] = class_representative(parts[t]);

    // M[s][t] = sum over tau of class t of N^{#cycles(sigma_s tau^{-1})}
    std::vector<std::vector<BigInt>> M(P, std::vector<BigInt>(P, 0));
    Perm tau(k);
    std::iota(tau.begin(), tau.end(), 0);
    Perm tinv(k), comp(k);
    do {
        int t = type_index.at(cycle_type(tau));
        for (int i = 0; i < k; ++i) tinv[tau[i]] = i;
        for (int s = 0; s < P; ++s) {
            for (int i = 0; i < k; ++i) comp[i] = reps[s][tinv[i]];
            M[s][t] += ipow(N, cycle_count(comp));
        }
    } while (std::next_permutation(tau.begin(), tau.end()));

    std::vector<std::vector<Rational>> Mr(P, std::vector<Rational>(P));
    for (int s = 0; s < P; ++s)
        for (int t = 0; t < P; ++t) Mr[s][t] = Rational(M[s][t]);
    std::vector<Rational> rhs(P, 0);
    std::vector<int> id_type(k, 1);
    for (int s = 0; s < P; ++s)
        if (parts[s] == id_type) rhs[s] = 1;
    auto w = solve(std::move(Mr), std::move(rhs));
    for (int t = 0; t < P; ++t) values_[parts[t]] = w[t];
}

const Rational& WeingartenTable::value(const Perm& sigma) const {
    return value_type(cycle_type(sigma));
}

const Rational& WeingartenTable::value_type(const std::vector<int>& type) const {
    auto it = values_.find(type);
    if (it == values_.end()) throw std::invalid_argument("weingarten: bad cycle type");
    return it->second;
}

bool WeingartenTable::verify_full_system() const {
    Perm sigma(k_);
    std::iota(sigma.begin(), sigma.end(), 0);
    do {
        Rational acc = 0;
        Perm tau(k_), tinv(k_), comp(k_);
        std::iota(tau.begin(), tau.end(), 0);
        do {
            for (int i = 0; i < k_; ++i) tinv[tau[i]] = i;
            for (int i = 0; i < k_; ++i) comp[i] = sigma[tinv[i]];
            acc += Rational(ipow(N_, cycle_count(comp))) * value(tau);
        } while (std::next_permutation(tau.begin(), tau.end()));
        bool is_id = true;
        for (int i = 0; i < k_; ++i) is_id &= (sigma[i] == i);
        if (acc != Rational(is_id ? 1 : 0)) return false;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return true;
}

const WeingartenTable& table(int k, long long N, int k_max) {
    if (k > k_max) throw std::invalid_argument("weingarten: k exceeds k_max");
    static std::map<std::pair<int, long long>, WeingartenTable> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(k, N);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, WeingartenTable(k, N)).first;
    return it->second;
}

bool is_balanced(const EntrySpec& spec, GroupKind group) {
    std::map<std::pair<int, int>, int> row, col;  // (matrix, index) -> signed/total count
    const int k = spec.size();
    for (int t = 0; t < k; ++t) {
        int sgn = (group == GroupKind::unitary) ? (spec.conj[t] ? -1 : 1) : 1;
        row[{spec.matrix_id[t], spec.x[t]}] += sgn;
        col[{spec.matrix_id[t], spec.y[t]}] += sgn;
    }
    if (group == GroupKind::unitary) {
        for (auto& [key, v] : row)
            if (v != 0) return false;
        for (auto& [key, v] : col)
            if (v != 0) return false;
        return true;
    }
    for (auto& [key, v] : row)
        if (v % 2 != 0) return false;
    for (auto& [key, v] : col)
        if (v % 2 != 0) return false;
    return true;
}

namespace {

Rational single_matrix_unitary(const std::vector<int>& a, const std::vector<int>& b,
                               const std::vector<int>& c, const std::vector<int>& d,
                               long long N, int k_max) {
    const int k = static_cast<int>(a.size());
    if (k != static_cast<int>(c.size())) return 0;
    if (k == 0) return 1;
    const WeingartenTable& wt = table(k, N, k_max);
    Rational acc = 0;
    Perm sigma(k);
    std::iota(sigma.begin(), sigma.end(), 0);
    do {
        bool ok = true;
        for (int t = 0; t < k && ok; ++t) ok = (a[t] == c[sigma[t]]);
        if (!ok) continue;
        Perm tau(k);
        std::iota(tau.begin(), tau.end(), 0);
        do {
            bool okt = true;
            for (int t = 0; t < k && okt; ++t) okt = (b[t] == d[tau[t]]);
            if (!okt) continue;
            // Wg(sigma tau^{-1})
            Perm tinv(k), comp(k);
            for (int i = 0; i < k; ++i) tinv[tau[i]] = i;
            for (int i = 0; i < k; ++i) comp[i] = sigma[tinv[i]];
            acc += wt.value(comp);
        } while (std::next_permutation(tau.begin(), tau.end()));
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return acc;
}

}  // namespace

Rational unitary_entry_expectation(const EntrySpec& spec, long long N, int k_max) {
    if (!is_balanced(spec, GroupKind::unitary)) return 0;
    std::map<int, std::array<std::vector<int>, 4>> by_matrix;  // a,b (plain), c,d (conj)
    for (int t = 0; t < spec.size(); ++t) {
        auto& m = by_matrix[spec.matrix_id[t]];
        if (!spec.conj[t]) {
            m[0].push_back(spec.x[t]);
            m[1].push_back(spec.y[t]);
        } else {
            m[2].push_back(spec.x[t]);
            m[3].push_back(spec.y[t]);
        }
    }
    Rational out = 1;
    for (auto& [id, m] : by_matrix) {
        Rational v = single_matrix_unitary(m[0], m[1], m[2], m[3], N, k_max);
        if (v == 0) return 0;
        out *= v;
    }
    return out;
}

Rational permutation_entry_expectation(const std::vector<PermConstraint>& constraints,
                                       const std::vector<int>& mult, long long N, bool centered) {
    const int J = static_cast<int>(constraints.size());
    if (!mult.empty() && static_cast<int>(mult.size()) != J)
        throw std::invalid_argument("permutation_entry_expectation: mult size mismatch");

    auto uncentered = [&](const std::vector<int>& subset) -> Rational {
        // per matrix: distinct pairs must form a partial injection
        std::map<int, std::map<int, int>> fwd, bwd;
        std::map<int, int> distinct;
        for (int j : subset) {
            const auto& c = constraints[j];
            auto [itf, newf] = fwd[c.matrix_id].try_emplace(c.x, c.y);
            if (!newf && itf->second != c.y) return 0;
            auto [itb, newb] = bwd[c.matrix_id].try_emplace(c.y, c.x);
            if (!newb && itb->second != c.x) return 0;
            if (newf) ++distinct[c.matrix_id];
        }
        Rational out = 1;
        for (auto& [id, r] : distinct) {
            if (r > N) return 0;
            for (int i = 0; i < r; ++i) out /= Rational(N - i);
        }
        return out;
    };

    if (!centered) {
        std::vector<int> all(J);
        std::iota(all.begin(), all.end(), 0);
        return uncentered(all);
    }

    // inclusion-exclusion over which constraints keep at least one indicator
    std::vector<Rational> w_in(J), w_out(J);
    const Rational minv = Rational(-1, N);
    for (int j = 0; j < J; ++j) {
        int m = mult.empty() ? 1 : mult[j];
        Rational one_minus = 1;
        Rational neg = 1;
        for (int t = 0; t < m; ++t) {
            one_minus *= Rational(N - 1, N);
            neg *= minv;
        }
        w_in[j] = one_minus - neg;  // (1-1/N)^m - (-1/N)^m
        w_out[j] = neg;
    }
    Rational out = 0;
    for (std::uint32_t mask = 0; mask < (1u << J); ++mask) {
        std::vector<int> subset;
        Rational coef = 1;
        for (int j = 0; j < J; ++j) {
            if (mask & (1u << j)) {
                subset.push_back(j);
                coef *= w_in[j];
            } else {
                coef *= w_out[j];
            }
        }
        if (coef == 0) continue;
        Rational u = uncentered(subset);
        if (u != 0) out += coef * u;
    }
    return out;
}

std::map<int, EntrySpec> path_entry_specs(const ColoredPath& gamma) {
    std::map<int, EntrySpec> specs;
    const int m = gamma.length();
    for (int t = 0; t < m; ++t) {
        int i = gamma.colors[t];
        int id = (i <= gamma.d) ? i : i - gamma.d;
        auto& s = specs[id];
        s.matrix_id.push_back(id);
        if (i <= gamma.d) {
            s.x.push_back(gamma.x[t]);
            s.y.push_back(gamma.x[t + 1]);
            s.conj.push_back(false);
        } else {  // (U_{i*})^*: conjugate entry at transposed position
            s.x.push_back(gamma.x[t + 1]);
            s.y.push_back(gamma.x[t]);
            s.conj.push_back(true);
        }
    }
    return specs;
}

double PathWeight::as_double() const {
    if (exact) return static_cast<double>(value);
    return mc_value;
}

PathWeight path_weight(const ColoredPath& gamma, long long N, ModelKind model,
                       int mc_samples, std::uint64_t seed) {
    PathWeight w;
    const int m = gamma.length();
    if (model == ModelKind::haar_unitary) {
        auto specs = path_entry_specs(gamma);
        w.value = 1;
        for (auto& [id, s] : specs) {
            Rational v = unitary_entry_expectation(s, N);
            if (v == 0) { w.value = 0; break; }
            w.value *= v;
        }
        return w;
    }
    if (model == ModelKind::uniform_permutation) {
        std::map<std::tuple<int, int, int>, int> cmap;
        for (int t = 0; t < m; ++t) {
            int i = gamma.colors[t];
            if (i <= gamma.d)
                ++cmap[{i, gamma.x[t], gamma.x[t + 1]}];
            else
                ++cmap[{i - gamma.d, gamma.x[t + 1], gamma.x[t]}];
        }
        std::vector<PermConstraint> cons;
        std::vector<int> mult;
        for (auto& [key, cnt] : cmap) {
            cons.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key)});
            mult.push_back(cnt);
        }
        w.value = permutation_entry_expectation(cons, mult, N, /*centered=*/false);
        return w;
    }
    // orthogonal: seeded Monte Carlo with standard error
    w.exact = false;
    Rng rng(seed);
    double sum = 0.0, sumsq = 0.0;
    std::vector<MatR> u(gamma.d);
    for (int s = 0; s < mc_samples; ++s) {
        Rng sub = rng.split(s);
        for (int i = 0; i < gamma.d; ++i) u[i] = haar::orthogonal(static_cast<int>(N), sub);
        double prod = 1.0;
        for (int t = 0; t < m; ++t) {
            int i = gamma.colors[t];
            double e = (i <= gamma.d) ? u[i - 1](gamma.x[t] - 1, gamma.x[t + 1] - 1)
                                      : u[i - gamma.d - 1](gamma.x[t + 1] - 1, gamma.x[t] - 1);
            prod *= e;
        }
        sum += prod;
        sumsq += prod * prod;
    }
    w.mc_value = sum / mc_samples;
    double var = std::max(0.0, sumsq / mc_samples - w.mc_value * w.mc_value);
    w.mc_stderr = std::sqrt(var / mc_samples);
    return w;
}

WeightBoundReport weight_bound_check(const ColoredPath& gamma, long long N, double c) {
    WeightBoundReport rep;
    PathStats st = path_stats(gamma);
    const int m = gamma.length();
    PathWeight w = path_weight(gamma, N, ModelKind::haar_unitary);
    double wv = std::abs(w.as_double());
    if (2 * st.v > m) {
        rep.forced_zero = true;
        rep.pass = (w.value == 0);
        rep.ratio = rep.pass ? 0.0 : 1e300;
        return rep;
    }
    double eta = m * std::pow(double(N), -0.25);
    double bound = c * std::exp(m * eta) * std::pow(double(N), -m / 2.0) *
                   std::pow(eta, st.e1) * std::pow(double(m), 2.0 * st.chi);
    rep.ratio = (bound > 0) ? wv / bound : (wv > 0 ? 1e300 : 0.0);
    rep.pass = (wv <= bound);
    return rep;
}

}  // namespace freelab::wg
