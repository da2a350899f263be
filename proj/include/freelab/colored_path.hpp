#pragma once
// Closed non-backtracking colored paths and their colored-graph statistics,
// shared by the path-enumeration and Weingarten layers.
#include <map>
#include <tuple>
#include <vector>

#include "freelab/freegroup.hpp"

namespace freelab {

struct ColoredPath {
    int d = 1;
    std::vector<int> x;       // vertices x_0..x_m (closed paths: x_0 == x_m)
    std::vector<int> colors;  // i_1..i_m in [2d], non-backtracking

    int length() const { return static_cast<int>(colors.size()); }
    bool closed() const { return !x.empty() && x.front() == x.back(); }
    bool non_backtracking() const {
        for (std::size_t t = 0; t + 1 < colors.size(); ++t)
            if (colors[t + 1] == fg::star(colors[t], d)) return false;
        return true;
    }
    // g(path) = g_{i_m} ... g_{i_1}
    fg::Word word() const {
        std::vector<int> ls(colors.rbegin(), colors.rend());
        return fg::Word(d, ls);
    }
};

// colored edge [x,i,y] ~ [y,i*,x]: canonical key
inline std::tuple<int, int, int> edge_key(int x, int i, int y, int d) {
    int is = fg::star(i, d);
    if (std::tie(x, i) <= std::tie(y, is)) return {x, i, y};
    return {y, is, x};
}

struct PathStats {
    int v = 0;   // vertices
    int e = 0;   // colored edges
    int e1 = 0;  // multiplicity-one edges
    double chi = 0.0;  // m/2 + e1/2 - v
    int m_ge4 = 0;     // sum of multiplicities of edges with multiplicity >= 4
};

// multiplicity map of colored edges
std::map<std::tuple<int, int, int>, int> edge_multiplicities(const ColoredPath& p);

PathStats path_stats(const ColoredPath& p);

}  // namespace freelab
