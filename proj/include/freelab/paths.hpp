#pragma once
// Closed non-backtracking colored paths: exhaustive enumeration, canonical
// class representatives (coarse / fine / terminal-color equivalences), kernel
// graphs with per-edge profiles, class censuses with the combinatorial bounds,
// and the exact trace-method oracle for E tau(B^{(ell,m)}).
#include <cstdint>
#include <string>
#include <vector>

#include "freelab/colored_path.hpp"
#include "freelab/star_ops.hpp"
#include "freelab/weingarten.hpp"

namespace freelab::paths {

// all of P_m over vertex alphabet [N] (closed, non-backtracking)
std::vector<ColoredPath> enumerate_paths(int N, int d, int m,
                                         std::uint64_t budget = 20'000'000);

struct KernelEdge {
    int u, v;                     // compressed kernel-vertex ids, u = first-traversal tail
    int len = 0;                  // number of underlying colored edges
    int j_first = 0, j_last = 0;  // first/last color along the first traversal
    std::vector<int> color_counts;  // occurrences of each color in [2d]
    int first_time = 0;             // first traversal time (orders the edges)
};

struct KernelGraph {
    int vhat = 0;  // |V_{>=3} u {x_0}|
    int ehat = 0;
    std::vector<KernelEdge> edges;  // ordered by first traversal time
};

KernelGraph kernel_graph(const ColoredPath& gamma);

enum class ClassKind { coarse, fine, terminal_color };

struct PathClass {
    ColoredPath canonical;          // lexicographic-minimal relabeling
    ClassKind kind = ClassKind::coarse;
    // fine: per kernel edge (j_first, j_last, color counts); terminal: j_last only
    std::vector<std::vector<int>> profile_key;
    PathStats stats;

    // total order so classes can key maps
    bool operator<(const PathClass& o) const;
    bool operator==(const PathClass& o) const;
};

PathClass canonicalize(const ColoredPath& gamma, ClassKind kind = ClassKind::coarse);

struct CensusRow {
    int m = 0, v = 0, e1 = 0;
    double chi = 0;
    long long coarse_count = 0, fine_count = 0;
    double coarse_bound = 0, fine_bound = 0;
    bool pass = false;
};

// exhaustive census over all classes of P_m (any N >= m gives the same classes)
std::vector<CensusRow> class_census(int d, int m, std::uint64_t budget = 80'000'000);

std::string census_csv(const std::vector<CensusRow>& rows);

// exact E tau(B^{(ell,m)}) by path summation with Weingarten / permutation
// weights; class_grouped switches to fine-class-grouped accumulation (must
// not change the value).
cx expected_nb_trace(const CoefficientFamily& c, int ell, int m, int N,
                     wg::ModelKind model, bool class_grouped = false);

// cycle-space dimension of the colored graph of a path
int cycle_space_dim(const ColoredPath& gamma);

// path-level tangle check: G_gamma has at most one cycle
bool path_tangle_free(const ColoredPath& gamma);

}  // namespace freelab::paths
