#pragma once
// Reduced words in the free group F_d and ball/sphere enumeration.
//
// Generators are indexed 1..2d with the involution star(i) = i+d (i <= d),
// i-d (i > d). A word g = g_{i_m} ... g_{i_1} is stored leftmost-first:
// letters = {i_m, ..., i_1}. The empty word is the unit.
#include <cstdint>
#include <vector>

namespace freelab::fg {

inline int star(int i, int d) { return i <= d ? i + d : i - d; }

struct Word {
    int d = 1;
    std::vector<int> letters;  // leftmost = last applied generator

    Word() = default;
    Word(int d_, std::vector<int> ls) : d(d_), letters(std::move(ls)) {}
    int length() const { return static_cast<int>(letters.size()); }
    bool is_unit() const { return letters.empty(); }
    bool operator==(const Word& o) const { return d == o.d && letters == o.letters; }
    bool operator<(const Word& o) const {  // length-major, then lexicographic
        if (letters.size() != o.letters.size()) return letters.size() < o.letters.size();
        return letters < o.letters;
    }
};

bool is_reduced(const Word& w);

// Reduced form of w1 * w2 (w2 applied first). Throws on mismatched rank.
Word concat_reduce(const Word& w1, const Word& w2);

Word inverse(const Word& w);

// All reduced words of length exactly m, in lexicographic order.
// Throws if the sphere size exceeds cap.
std::vector<Word> sphere(int d, int m, std::uint64_t cap = 50'000'000);

std::uint64_t sphere_size(int d, int m);
std::uint64_t ball_size(int d, int L);

// Indexed ball B_L with a prefix-stable total order (length-major, then
// lexicographic) and O(|word|) word<->index maps. The step table gives left
// multiplication by a generator inside the ball.
class Ball {
public:
    Ball(int d, int L, std::uint64_t cap = 20'000'000);

    int d() const { return d_; }
    int radius() const { return L_; }
    std::int64_t size() const { return static_cast<std::int64_t>(front_.size()); }
    // first index of sphere m (== |B_{m-1}|); sphere_offset(L+1) == size()
    std::int64_t sphere_offset(int m) const { return offsets_[m]; }
    int word_length(std::int64_t idx) const { return length_[idx]; }

    // index of g_i * w_idx, or -1 if it leaves the ball
    std::int64_t step(std::int64_t idx, int i) const { return step_[idx * 2 * d_ + (i - 1)]; }

    Word word(std::int64_t idx) const;
    // -1 if the word is not in the ball
    std::int64_t index(const Word& w) const;

private:
    int d_, L_;
    std::vector<std::int64_t> offsets_;
    std::vector<std::int64_t> parent_;   // drop-front-letter
    std::vector<int> front_;             // leftmost letter (0 for the unit)
    std::vector<std::uint8_t> length_;
    std::vector<std::int64_t> step_;
};

}  // namespace freelab::fg
