#include "freelab/freegroup.hpp"

#include <stdexcept>

namespace freelab::fg {

bool is_reduced(const Word& w) {
    for (std::size_t t = 0; t + 1 < w.letters.size(); ++t)
        if (w.letters[t + 1] == star(w.letters[t], w.d)) return false;
    return true;
}

Word concat_reduce(const Word& w1, const Word& w2) {
    if (w1.d != w2.d) throw std::invalid_argument("concat_reduce: mismatched rank d");
    Word out(w1.d, w1.letters);
    // cancel at the seam, then append the rest of w2
    std::size_t j = 0;
    while (j < w2.letters.size() && !out.letters.empty() &&
           w2.letters[j] == star(out.letters.back(), w1.d)) {
        out.letters.pop_back();
        ++j;
    }
    out.letters.insert(out.letters.end(), w2.letters.begin() + j, w2.letters.end());
    return out;
}

Word inverse(const Word& w) {
    Word out(w.d, {});
    out.letters.reserve(w.letters.size());
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
        out.letters.push_back(star(*it, w.d));
    return out;
}

std::uint64_t sphere_size(int d, int m) {
    if (m == 0) return 1;
    std::uint64_t s = 2 * static_cast<std::uint64_t>(d);
    for (int t = 1; t < m; ++t) s *= 2 * d - 1;
    return s;
}

std::uint64_t ball_size(int d, int L) {
    std::uint64_t s = 1;
    for (int m = 1; m <= L; ++m) s += sphere_size(d, m);
    return s;
}

namespace {
void sphere_rec(int d, int m, Word& w, std::vector<Word>& out) {
    if (w.length() == m) {
        out.push_back(w);
        return;
    }
    int forbidden = w.letters.empty() ? 0 : star(w.letters.back(), d);
    for (int i = 1; i <= 2 * d; ++i) {
        if (i == forbidden) continue;
        w.letters.push_back(i);
        sphere_rec(d, m, w, out);
        w.letters.pop_back();
    }
}
}  // namespace

std::vector<Word> sphere(int d, int m, std::uint64_t cap) {
    if (d < 1 || m < 0) throw std::invalid_argument("sphere: need d >= 1, m >= 0");
    if (sphere_size(d, m) > cap) throw std::runtime_error("sphere: size exceeds cap");
    std::vector<Word> out;
    out.reserve(sphere_size(d, m));
    Word w(d, {});
    sphere_rec(d, m, w, out);
    return out;
}

Ball::Ball(int d, int L, std::uint64_t cap) : d_(d), L_(L) {
    if (d < 1 || L < 0) throw std::invalid_argument("Ball: need d >= 1, L >= 0");
    std::uint64_t n = ball_size(d, L);
    if (n > cap) throw std::runtime_error("Ball: capacity cap exceeded");
    const int q = 2 * d;
    parent_.reserve(n);
    front_.reserve(n);
    length_.reserve(n);
    step_.assign(n * q, -1);
    offsets_.assign(L + 2, 0);

    parent_.push_back(-1);
    front_.push_back(0);
    length_.push_back(0);
    offsets_[0] = 0;
    offsets_[1] = 1;

    // sphere m+1 from sphere m, front-letter-major: preserves the
    // length-then-lexicographic total order and prefix stability
    for (int m = 0; m < L; ++m) {
        for (int f = 1; f <= q; ++f) {
            for (std::int64_t idx = offsets_[m]; idx < offsets_[m + 1]; ++idx) {
                if (m > 0 && front_[idx] == star(f, d)) continue;
                std::int64_t nid = static_cast<std::int64_t>(parent_.size());
                parent_.push_back(idx);
                front_.push_back(f);
                length_.push_back(static_cast<std::uint8_t>(m + 1));
                step_[idx * q + (f - 1)] = nid;
            }
        }
        offsets_[m + 2] = static_cast<std::int64_t>(parent_.size());
    }
    // cancellation steps point at the parent
    for (std::int64_t idx = 1; idx < static_cast<std::int64_t>(parent_.size()); ++idx)
        step_[idx * q + (star(front_[idx], d) - 1)] = parent_[idx];
}

Word Ball::word(std::int64_t idx) const {
    Word w(d_, {});
    while (idx != 0) {
        w.letters.push_back(front_[idx]);
        idx = parent_[idx];
    }
    return w;
}

std::int64_t Ball::index(const Word& w) const {
    if (w.d != d_ || w.length() > L_) return -1;
    std::int64_t cur = 0;
    for (int t = w.length() - 1; t >= 0; --t) {
        int i = w.letters[t];
        if (i < 1 || i > 2 * d_) return -1;
        std::int64_t nxt = step_[cur * 2 * d_ + (i - 1)];
        if (nxt <= cur) return -1;  // cancellation or missing: not a reduced word here
        cur = nxt;
    }
    return cur;
}

}  // namespace freelab::fg
