#pragma once

// Free-group word algebra over the two-letter alphabet {a, b}.
//
// Letters are packed into one byte: bit 0 is the inverse flag, bit 1 the
// base, so a=0, a^-1=1, b=2, b^-1=3 and inversion is xor 1.  The text form
// uses 'a','A','b','B' with A = a^-1; the empty word prints as "".

#include <algorithm>
#include <array>
#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gembed/common.hpp"

namespace gembed {

using Letter = std::uint8_t;
inline constexpr Letter kLa = 0;   // a
inline constexpr Letter kLA = 1;   // a^-1
inline constexpr Letter kLb = 2;   // b
inline constexpr Letter kLB = 3;   // b^-1
inline constexpr int kAlphabet = 4;

constexpr Letter inverse(Letter x) { return x ^ 1; }
constexpr bool is_positive(Letter x) { return (x & 1) == 0; }

constexpr char letter_char(Letter x) {
  constexpr std::array<char, 4> c{'a', 'A', 'b', 'B'};
  return c[x];
}

constexpr Letter letter_from_char(char c) {
  switch (c) {
    case 'a': return kLa;
    case 'A': return kLA;
    case 'b': return kLb;
    case 'B': return kLB;
    default: throw std::invalid_argument(std::string("bad letter: ") + c);
  }
}

using RawWord = std::vector<Letter>;

// A freely reduced word.  The invariant (no adjacent x x^-1) is maintained
// by construction; every public constructor reduces.
class Word {
 public:
  Word() = default;

  static Word reduce(std::span<const Letter> raw) {
    Word w;
    w.ls_.reserve(raw.size());
    for (Letter x : raw) w.push_reduce(x);
    return w;
  }
  static Word reduce(const RawWord& raw) {
    return reduce(std::span<const Letter>(raw));
  }

  // Adopts a sequence the caller guarantees to be freely reduced.
  static Word from_reduced(RawWord ls) {
    Word w;
    w.ls_ = std::move(ls);
    return w;
  }

  static Word parse(std::string_view s) {
    RawWord raw;
    raw.reserve(s.size());
    for (char c : s) {
      if (c == ' ' || c == '\t') continue;
      raw.push_back(letter_from_char(c));
    }
    Word w = reduce(raw);
    if (w.ls_ != raw)
      throw std::invalid_argument("word not freely reduced: " + std::string(s));
    return w;
  }

  int size() const { return int(ls_.size()); }
  bool empty() const { return ls_.empty(); }
  Letter operator[](int i) const { return ls_[size_t(i)]; }
  std::span<const Letter> letters() const { return ls_; }
  const RawWord& raw() const { return ls_; }

  Word inverse() const {
    RawWord out(ls_.rbegin(), ls_.rend());
    for (Letter& x : out) x = gembed::inverse(x);
    return from_reduced(std::move(out));
  }

  friend Word operator*(const Word& u, const Word& v) {
    Word w = u;
    for (Letter x : v.ls_) w.push_reduce(x);
    return w;
  }

  Word pow(int n) const {
    Word base = n >= 0 ? *this : inverse();
    Word out;
    for (int i = 0; i < (n >= 0 ? n : -n); ++i) out = out * base;
    return out;
  }

  // Contiguous subword [begin, end); stays freely reduced.
  Word subword(int begin, int end) const {
    return from_reduced(RawWord(ls_.begin() + begin, ls_.begin() + end));
  }

  std::string str() const {
    std::string s;
    s.reserve(ls_.size());
    for (Letter x : ls_) s.push_back(letter_char(x));
    return s;
  }

  auto operator<=>(const Word&) const = default;

 private:
  void push_reduce(Letter x) {
    if (!ls_.empty() && ls_.back() == gembed::inverse(x))
      ls_.pop_back();
    else
      ls_.push_back(x);
  }

  RawWord ls_;
};

inline Word free_reduce(const RawWord& raw) { return Word::reduce(raw); }
inline Word free_reduce(std::span<const Letter> raw) { return Word::reduce(raw); }

// Index of the least rotation of s under lexicographic letter order (Booth).
inline int least_rotation_index(std::span<const Letter> s) {
  const int n = int(s.size());
  if (n <= 1) return 0;
  std::vector<int> f(size_t(2 * n), -1);
  int k = 0;
  for (int j = 1; j < 2 * n; ++j) {
    Letter sj = s[size_t(j % n)];
    int i = f[size_t(j - k - 1)];
    while (i != -1 && sj != s[size_t((k + i + 1) % n)]) {
      if (sj < s[size_t((k + i + 1) % n)]) k = j - i - 1;
      i = f[size_t(i)];
    }
    if (i == -1 && sj != s[size_t((k + i + 1) % n)]) {
      if (sj < s[size_t((k + i + 1) % n)]) k = j;
      f[size_t(j - k)] = -1;
    } else {
      f[size_t(j - k)] = i + 1;
    }
  }
  return k;
}

// A cyclically reduced word considered up to rotation, stored in the
// canonical rotation: least letter sequence under (a < a^-1 < b < b^-1).
class CyclicWord {
 public:
  CyclicWord() = default;

  // `rotation` must be cyclically reduced; any rotation is accepted.
  static CyclicWord from_cyclically_reduced(const Word& rotation) {
    if (!rotation.empty() &&
        rotation[0] == gembed::inverse(rotation[rotation.size() - 1]))
      throw std::invalid_argument("not cyclically reduced");
    CyclicWord c;
    auto ls = rotation.letters();
    int k = least_rotation_index(ls);
    c.ls_.reserve(ls.size());
    for (size_t i = 0; i < ls.size(); ++i)
      c.ls_.push_back(ls[(size_t(k) + i) % ls.size()]);
    return c;
  }

  int size() const { return int(ls_.size()); }
  bool empty() const { return ls_.empty(); }
  std::span<const Letter> letters() const { return ls_; }

  // The canonical rotation as a linear word.
  Word word() const { return Word::from_reduced(ls_); }

  Word rotation(int k) const {
    RawWord out;
    out.reserve(ls_.size());
    for (size_t i = 0; i < ls_.size(); ++i)
      out.push_back(ls_[(size_t(k) + i) % ls_.size()]);
    return Word::from_reduced(std::move(out));
  }

  CyclicWord inverse() const {
    return from_cyclically_reduced(word().inverse());
  }

  std::string str() const { return word().str(); }

  auto operator<=>(const CyclicWord&) const = default;

 private:
  RawWord ls_;
};

// w = conjugator * core * conjugator^-1 in the free group, with the core
// cyclically reduced and of minimal length.  The core is returned in its
// canonical rotation; the conjugator accounts for the rotation shift.
inline std::pair<CyclicWord, Word> cyclic_reduce(const Word& w) {
  int lo = 0, hi = w.size();
  while (hi - lo >= 2 && w[lo] == inverse(w[hi - 1])) { ++lo; --hi; }
  Word stripped = w.subword(lo, hi);
  auto ls = stripped.letters();
  int k = least_rotation_index(ls);
  CyclicWord core = CyclicWord::from_cyclically_reduced(stripped);
  // w = pre * stripped * pre^-1 and stripped = u * canonical * u^-1 with
  // u the length-k prefix of the stripped rotation.
  Word conj = w.subword(0, lo) * stripped.subword(0, k);
  return {core, conj};
}

// True iff no nonempty word Y has Y^s as a contiguous subword of w.
// For each candidate period p, a maximal run of w[i] == w[i+p] of length r
// yields a p-periodic subword of length r + p; an s-th power fits iff
// r >= (s-1) * p.
inline bool is_s_aperiodic(const Word& w, int s) {
  if (s <= 0) throw std::invalid_argument("is_s_aperiodic: s must be >= 1");
  const int n = w.size();
  for (int p = 1; s * p <= n; ++p) {
    int run = 0;
    for (int i = 0; i + p < n; ++i) {
      if (w[i] == w[i + p]) {
        if (++run >= (s - 1) * p) return false;
      } else {
        run = 0;
      }
    }
  }
  return true;
}

inline bool is_cube_free(const Word& w) { return is_s_aperiodic(w, 3); }

// All start positions (ascending, overlapping allowed) of `pattern` in
// `text`; pattern must be nonempty.
inline std::vector<int> occurrences(const Word& pattern, const Word& text) {
  if (pattern.empty()) throw std::invalid_argument("occurrences: empty pattern");
  std::vector<int> out;
  auto p = pattern.letters();
  auto t = text.letters();
  if (p.size() > t.size()) return out;
  for (int i = 0; i + pattern.size() <= text.size(); ++i) {
    if (std::equal(p.begin(), p.end(), t.begin() + i)) out.push_back(i);
  }
  return out;
}

// True iff w is a contiguous subword of A^t for some t > 0.
inline bool is_periodic_with(const Word& w, const Word& A) {
  if (A.empty()) throw std::invalid_argument("is_periodic_with: empty period");
  if (w.empty()) return true;
  int t = w.size() / A.size() + 2;
  Word power = A.pow(t);
  return !occurrences(w, power).empty();
}

// Length of the longest subword of w that is a subword of some positive
// power of A (0 if none).
inline int longest_periodic_subword(const Word& w, const Word& A) {
  if (A.empty()) throw std::invalid_argument("empty period");
  const int n = w.size(), m = A.size();
  int best = 0;
  for (int i = 0; i < n; ++i) {
    for (int phase = 0; phase < m; ++phase) {
      int j = 0;
      while (i + j < n && w[i + j] == A[(phase + j) % m]) ++j;
      if (j > best) best = j;
      if (best >= n - i) break;
    }
    if (best >= n - i) break;
  }
  return best;
}

}  // namespace gembed
