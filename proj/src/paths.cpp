#include "freelab/paths.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace freelab::paths {

namespace {

// disjoint-set over a small vertex set
struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(n) { for (int i = 0; i < n; ++i) p[i] = i; }
    int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

}  // namespace

std::vector<ColoredPath> enumerate_paths(int N, int d, int m, std::uint64_t budget) {
    if (m < 1) throw std::invalid_argument("enumerate_paths: m >= 1");
    std::uint64_t est = static_cast<std::uint64_t>(N);
    for (int t = 0; t < m; ++t) est *= 2 * d * N;
    if (est > budget * 4) throw std::runtime_error("enumerate_paths: budget exceeded");

    std::vector<ColoredPath> out;
    ColoredPath p;
    p.d = d;
    p.x.assign(m + 1, 0);
    p.colors.assign(m, 0);
    // DFS over colors and intermediate vertices
    auto rec = [&](auto&& self, int t) -> void {
        if (t == m) {
            if (p.x[m] == p.x[0]) out.push_back(p);
            return;
        }
        for (int i = 1; i <= 2 * d; ++i) {
            if (t > 0 && i == fg::star(p.colors[t - 1], d)) continue;
            p.colors[t] = i;
            if (t == m - 1) {
                p.x[m] = p.x[0];
                self(self, t + 1);
            } else {
                for (int v = 1; v <= N; ++v) {
                    p.x[t + 1] = v;
                    self(self, t + 1);
                }
            }
        }
    };
    for (int x0 = 1; x0 <= N; ++x0) {
        p.x[0] = x0;
        rec(rec, 0);
    }
    return out;
}

KernelGraph kernel_graph(const ColoredPath& gamma) {
    const int m = gamma.length();
    auto mult = edge_multiplicities(gamma);
    // degrees over edge classes (loops count twice)
    std::map<int, int> deg;
    for (auto& [key, cnt] : mult) {
        deg[std::get<0>(key)] += 1;
        deg[std::get<2>(key)] += 1;
    }
    std::set<int> kernel_vs;
    kernel_vs.insert(gamma.x[0]);
    for (auto& [v, dg] : deg)
        if (dg >= 3) kernel_vs.insert(v);

    // segment the path at kernel-vertex visits
    std::vector<int> times;
    for (int t = 0; t <= m; ++t)
        if (kernel_vs.count(gamma.x[t])) times.push_back(t);

    KernelGraph kg;
    std::map<int, int> vid;
    for (int v : kernel_vs) vid.emplace(v, static_cast<int>(vid.size()));
    kg.vhat = static_cast<int>(kernel_vs.size());

    std::map<std::vector<std::tuple<int, int, int>>, int> seen;  // underlying edge set -> index
    for (std::size_t s = 0; s + 1 < times.size(); ++s) {
        int ta = times[s], tb = times[s + 1];
        std::vector<std::tuple<int, int, int>> id_key;
        for (int t = ta; t < tb; ++t)
            id_key.push_back(edge_key(gamma.x[t], gamma.colors[t], gamma.x[t + 1], gamma.d));
        std::sort(id_key.begin(), id_key.end());
        if (seen.count(id_key)) continue;
        seen.emplace(id_key, static_cast<int>(kg.edges.size()));
        KernelEdge e;
        e.u = vid.at(gamma.x[ta]);
        e.v = vid.at(gamma.x[tb]);
        e.len = tb - ta;
        e.j_first = gamma.colors[ta];
        e.j_last = gamma.colors[tb - 1];
        e.color_counts.assign(2 * gamma.d + 1, 0);
        for (int t = ta; t < tb; ++t) ++e.color_counts[gamma.colors[t]];
        e.first_time = ta;
        kg.edges.push_back(std::move(e));
    }
    kg.ehat = static_cast<int>(kg.edges.size());
    return kg;
}

bool PathClass::operator<(const PathClass& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (canonical.x != o.canonical.x) return canonical.x < o.canonical.x;
    if (canonical.colors != o.canonical.colors) return canonical.colors < o.canonical.colors;
    return profile_key < o.profile_key;
}
bool PathClass::operator==(const PathClass& o) const {
    return kind == o.kind && canonical.x == o.canonical.x &&
           canonical.colors == o.canonical.colors && profile_key == o.profile_key;
}

namespace {

// lexicographic-minimal color relabeling by backtracking; assignments come in
// pairs beta_u(c) = c', beta_v(c^*) = c'^* per traversed edge (u,c,v)
struct ColorCanon {
    int d;
    const std::vector<int>& x;
    const std::vector<int>& colors;
    std::map<std::pair<int, int>, int> beta;  // (vertex, color) -> new color
    std::map<int, std::uint32_t> used;        // vertex -> bitmask of used new colors
    std::vector<int> seq;

    ColorCanon(int d_, const std::vector<int>& x_, const std::vector<int>& c_)
        : d(d_), x(x_), colors(c_), seq(c_.size(), 0) {}

    bool assign(int vert, int col, int val) {
        beta[{vert, col}] = val;
        used[vert] |= 1u << val;
        return true;
    }
    void unassign(int vert, int col, int val) {
        beta.erase({vert, col});
        used[vert] &= ~(1u << val);
    }

    // every traversed edge (u,c,v) imposes beta_v(c^*) = beta_u(c)^*; both
    // slots may or may not be pinned already by other edges
    bool solve(std::size_t t) {
        if (t == colors.size()) return true;
        int u = x[t], v = x[t + 1], c = colors[t];
        int cs = fg::star(c, d);
        auto ia = beta.find({u, c});
        auto ib = beta.find({v, cs});
        if (ia != beta.end() && ib != beta.end()) {
            if (ib->second != fg::star(ia->second, d)) return false;
            seq[t] = ia->second;
            return solve(t + 1);
        }
        if (ia != beta.end()) {
            int cn = ia->second, cns = fg::star(cn, d);
            if (used[v] & (1u << cns)) return false;
            assign(v, cs, cns);
            seq[t] = cn;
            if (solve(t + 1)) return true;
            unassign(v, cs, cns);
            return false;
        }
        if (ib != beta.end()) {
            int cn = fg::star(ib->second, d);
            if (used[u] & (1u << cn)) return false;
            assign(u, c, cn);
            seq[t] = cn;
            if (solve(t + 1)) return true;
            unassign(u, c, cn);
            return false;
        }
        for (int cn = 1; cn <= 2 * d; ++cn) {
            int cns = fg::star(cn, d);
            if (used[u] & (1u << cn)) continue;
            if (used[v] & (1u << cns)) continue;
            if (u == v && (used[u] & (1u << cns))) continue;
            assign(u, c, cn);
            assign(v, cs, cns);
            seq[t] = cn;
            if (solve(t + 1)) return true;
            unassign(v, cs, cns);
            unassign(u, c, cn);
        }
        return false;
    }
};

}  // namespace

PathClass canonicalize(const ColoredPath& gamma, ClassKind kind) {
    if (!gamma.closed() || !gamma.non_backtracking())
        throw std::invalid_argument("canonicalize: need a closed non-backtracking path");
    PathClass out;
    out.kind = kind;
    out.stats = path_stats(gamma);

    // vertices by first appearance
    std::map<int, int> relab;
    ColoredPath canon;
    canon.d = gamma.d;
    canon.x.reserve(gamma.x.size());
    for (int v : gamma.x) {
        auto [it, fresh] = relab.try_emplace(v, static_cast<int>(relab.size()) + 1);
        canon.x.push_back(it->second);
    }

    ColorCanon cc(gamma.d, gamma.x, gamma.colors);
    if (!cc.solve(0)) throw std::logic_error("canonicalize: no color relabeling found");
    canon.colors = cc.seq;
    out.canonical = std::move(canon);

    if (kind != ClassKind::coarse) {
        KernelGraph kg = kernel_graph(gamma);
        for (const auto& e : kg.edges) {
            if (kind == ClassKind::fine) {
                std::vector<int> prof;
                prof.push_back(e.j_first);
                prof.push_back(e.j_last);
                prof.insert(prof.end(), e.color_counts.begin() + 1, e.color_counts.end());
                out.profile_key.push_back(std::move(prof));
            } else {
                out.profile_key.push_back({e.j_last});
            }
        }
    }
    return out;
}

std::vector<CensusRow> class_census(int d, int m, std::uint64_t budget) {
    // enumerate with the vertex gauge fixed (x_0 = 1, first-appearance order);
    // every class has such a representative
    std::set<PathClass> coarse;
    std::set<PathClass> fine;

    ColoredPath p;
    p.d = d;
    p.x.assign(m + 1, 1);
    p.colors.assign(m, 0);
    std::uint64_t visited = 0;

    auto rec = [&](auto&& self, int t, int maxseen) -> void {
        if (t == m) {
            if (p.x[m] != 1) return;
            if (++visited > budget) throw std::runtime_error("class_census: budget exceeded");
            coarse.insert(canonicalize(p, ClassKind::coarse));
            fine.insert(canonicalize(p, ClassKind::fine));
            return;
        }
        for (int i = 1; i <= 2 * d; ++i) {
            if (t > 0 && i == fg::star(p.colors[t - 1], d)) continue;
            p.colors[t] = i;
            if (t == m - 1) {
                p.x[m] = 1;
                self(self, t + 1, maxseen);
            } else {
                for (int v = 1; v <= std::min(maxseen + 1, m); ++v) {
                    p.x[t + 1] = v;
                    self(self, t + 1, std::max(maxseen, v));
                }
            }
        }
    };
    rec(rec, 0, 1);

    // group by (v, e1)
    std::map<std::pair<int, int>, CensusRow> rows;
    for (const auto& cl : coarse) {
        auto& r = rows[{cl.stats.v, cl.stats.e1}];
        r.m = m;
        r.v = cl.stats.v;
        r.e1 = cl.stats.e1;
        r.chi = cl.stats.chi;
        ++r.coarse_count;
    }
    for (const auto& cl : fine) {
        auto& r = rows[{cl.stats.v, cl.stats.e1}];
        ++r.fine_count;
    }
    std::vector<CensusRow> out;
    for (auto& [key, r] : rows) {
        r.coarse_bound = std::pow(double(m), 6.0 * r.chi + 4.0);
        r.fine_bound = std::pow(2.0 * d * std::pow(double(m), d), 6.0 * r.chi + 4.0) *
                       static_cast<double>(r.coarse_count);
        r.pass = (static_cast<double>(r.coarse_count) <= r.coarse_bound) &&
                 (static_cast<double>(r.fine_count) <= r.fine_bound);
        out.push_back(r);
    }
    return out;
}

std::string census_csv(const std::vector<CensusRow>& rows) {
    std::string s = "m,v,e1,chi,coarse_count,fine_count,bound,pass\n";
    for (const auto& r : rows) {
        s += std::to_string(r.m) + "," + std::to_string(r.v) + "," + std::to_string(r.e1) + "," +
             std::to_string(r.chi) + "," + std::to_string(r.coarse_count) + "," +
             std::to_string(r.fine_count) + "," + std::to_string(r.coarse_bound) + "," +
             (r.pass ? "1" : "0") + "\n";
    }
    return s;
}

namespace {

// cache key for a path weight: per-matrix factor lists with rows and columns
// independently relabeled by first appearance (Haar invariance under U -> SUT)
std::string weight_cache_key(const std::map<int, wg::EntrySpec>& specs) {
    std::string key;
    for (const auto& [id, s] : specs) {
        key.push_back('#');
        std::map<int, int> rrel, crel;
        for (int t = 0; t < s.size(); ++t) {
            int r = rrel.try_emplace(s.x[t], static_cast<int>(rrel.size())).first->second;
            int c = crel.try_emplace(s.y[t], static_cast<int>(crel.size())).first->second;
            key.push_back(static_cast<char>('a' + r));
            key.push_back(static_cast<char>('a' + c));
            key.push_back(s.conj[t] ? '*' : '.');
        }
    }
    return key;
}

wg::Rational weight_of_specs(const std::map<int, wg::EntrySpec>& specs, int N,
                             wg::ModelKind model) {
    if (model == wg::ModelKind::haar_unitary) {
        wg::Rational w = 1;
        for (const auto& [id, s] : specs) {
            wg::Rational v = wg::unitary_entry_expectation(s, N);
            if (v == 0) return 0;
            w *= v;
        }
        return w;
    }
    if (model == wg::ModelKind::uniform_permutation) {
        std::map<std::tuple<int, int, int>, int> cmap;
        for (const auto& [id, s] : specs)
            for (int t = 0; t < s.size(); ++t) ++cmap[{id, s.x[t], s.y[t]}];
        std::vector<wg::PermConstraint> cons;
        std::vector<int> mult;
        for (auto& [key, cnt] : cmap) {
            cons.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key)});
            mult.push_back(cnt);
        }
        return wg::permutation_entry_expectation(cons, mult, N, false);
    }
    throw std::invalid_argument("expected_nb_trace: exact evaluation needs an exact model");
}

}  // namespace

cx expected_nb_trace(const CoefficientFamily& c, int ell, int m, int N,
                     wg::ModelKind model, bool class_grouped) {
    if (m < 1 || m > ell) throw std::invalid_argument("expected_nb_trace: 1 <= m <= ell");
    star::PowerTable table = star::power_entries(c, ell);
    const auto& B = *table.ball;

    std::unordered_map<std::string, wg::Rational> cache;
    auto weight = [&](const ColoredPath& gamma) -> const wg::Rational& {
        auto specs = wg::path_entry_specs(gamma);
        std::string key = weight_cache_key(specs);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, weight_of_specs(specs, N, model)).first;
        return it->second;
    };

    MatC total = MatC::Zero(c.n, c.n);
    if (!class_grouped) {
        // sum over color sequences, then over vertex sequences
        for (std::int64_t gi = B.sphere_offset(m); gi < B.sphere_offset(m + 1); ++gi) {
            const MatC& a = table.val[gi];
            if (a.isZero(0.0)) continue;
            fg::Word w = B.word(gi);
            ColoredPath p;
            p.d = c.d;
            p.colors.assign(w.letters.rbegin(), w.letters.rend());
            p.x.assign(m + 1, 1);
            wg::Rational inner = 0;
            auto rec = [&](auto&& self, int t) -> void {
                if (t == m) {
                    inner += weight(p);
                    return;
                }
                if (t == m - 1) {
                    p.x[m] = p.x[0];
                    self(self, t + 1);
                    return;
                }
                for (int v = 1; v <= N; ++v) {
                    p.x[t + 1] = v;
                    self(self, t + 1);
                }
            };
            for (int x0 = 1; x0 <= N; ++x0) {
                p.x[0] = x0;
                // weights are invariant under vertex relabeling; anchor x0 and
                // scale by N afterwards would be wrong for non-transitive sums,
                // so keep the full loop (budget is tiny at the supported scales)
                rec(rec, 0);
            }
            total += a * static_cast<double>(inner);
        }
    } else {
        // group paths by fine class; the weight is constant on each class
        auto all = enumerate_paths(N, c.d, m);
        std::map<PathClass, std::pair<MatC, const ColoredPath*>> groups;
        for (const auto& gamma : all) {
            PathClass cl = canonicalize(gamma, ClassKind::fine);
            auto [it, fresh] =
                groups.try_emplace(std::move(cl), std::make_pair(MatC::Zero(c.n, c.n), &gamma));
            std::int64_t gi = B.index(gamma.word());
            it->second.first += table.val[gi];
        }
        for (auto& [cl, pr] : groups) {
            const wg::Rational& w = weight(*pr.second);
            if (w != 0) total += pr.first * static_cast<double>(w);
        }
    }
    return total.trace() / double(c.n) / double(N);
}

int cycle_space_dim(const ColoredPath& gamma) {
    auto mult = edge_multiplicities(gamma);
    std::map<int, int> vid;
    for (int v : gamma.x) vid.try_emplace(v, static_cast<int>(vid.size()));
    UnionFind uf(static_cast<int>(vid.size()));
    int e = 0;
    for (auto& [key, cnt] : mult) {
        ++e;
        uf.unite(vid.at(std::get<0>(key)), vid.at(std::get<2>(key)));
    }
    std::set<int> comps;
    for (auto& [v, id] : vid) comps.insert(uf.find(id));
    return e - static_cast<int>(vid.size()) + static_cast<int>(comps.size());
}

bool path_tangle_free(const ColoredPath& gamma) { return cycle_space_dim(gamma) <= 1; }

}  // namespace freelab::paths
