#include "freelab/colored_path.hpp"

#include <set>

namespace freelab {

std::map<std::tuple<int, int, int>, int> edge_multiplicities(const ColoredPath& p) {
    std::map<std::tuple<int, int, int>, int> mult;
    for (int t = 0; t < p.length(); ++t)
        ++mult[edge_key(p.x[t], p.colors[t], p.x[t + 1], p.d)];
    return mult;
}

PathStats path_stats(const ColoredPath& p) {
    PathStats st;
    std::set<int> verts(p.x.begin(), p.x.end());
    st.v = static_cast<int>(verts.size());
    auto mult = edge_multiplicities(p);
    st.e = static_cast<int>(mult.size());
    for (auto& [key, m] : mult) {
        if (m == 1) ++st.e1;
        if (m >= 4) st.m_ge4 += m;
    }
    st.chi = p.length() / 2.0 + st.e1 / 2.0 - st.v;
    return st;
}

}  // namespace freelab
