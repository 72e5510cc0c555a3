#pragma once

// Suffix automaton over the 4-letter group alphabet.  Used for repeated- and
// shared-subword queries (star property), overlap analysis between relators,
// and locating code blocks inside words during Dehn reduction.

#include <array>
#include <vector>

#include "gembed/word.hpp"

namespace gembed {

class SuffixAutomaton {
 public:
  struct State {
    int len = 0;
    int link = -1;
    int firstpos = -1;  // end position of the first occurrence
    bool clone = false;
    std::array<int, kAlphabet> next{-1, -1, -1, -1};
  };

  SuffixAutomaton() { st_.push_back(State{}); }

  explicit SuffixAutomaton(std::span<const Letter> s) : SuffixAutomaton() {
    st_.reserve(2 * s.size() + 4);
    for (Letter c : s) extend(c);
  }
  explicit SuffixAutomaton(const Word& w) : SuffixAutomaton(w.letters()) {}

  void extend(Letter c) {
    int cur = int(st_.size());
    st_.push_back(State{});
    st_[cur].len = st_[last_].len + 1;
    st_[cur].firstpos = st_[cur].len - 1;
    int p = last_;
    while (p != -1 && st_[p].next[c] == -1) {
      st_[p].next[c] = cur;
      p = st_[p].link;
    }
    if (p == -1) {
      st_[cur].link = 0;
    } else {
      int q = st_[p].next[c];
      if (st_[p].len + 1 == st_[q].len) {
        st_[cur].link = q;
      } else {
        int cl = int(st_.size());
        st_.push_back(st_[q]);
        st_[cl].len = st_[p].len + 1;
        st_[cl].clone = true;
        while (p != -1 && st_[p].next[c] == q) {
          st_[p].next[c] = cl;
          p = st_[p].link;
        }
        st_[q].link = cl;
        st_[cur].link = cl;
      }
    }
    last_ = cur;
  }

  const State& state(int i) const { return st_[size_t(i)]; }
  int size() const { return int(st_.size()); }

  // Streams `text` through the automaton; cb(j, len, state) receives, for
  // each end index j in text, the length of the longest substring of the
  // indexed word ending at j, and the automaton state reached.
  template <class F>
  void scan(std::span<const Letter> text, F&& cb) const {
    int v = 0, l = 0;
    for (size_t j = 0; j < text.size(); ++j) {
      Letter c = text[j];
      while (v != 0 && st_[v].next[c] == -1) {
        v = st_[v].link;
        l = st_[v].len;
      }
      if (st_[v].next[c] != -1) {
        v = st_[v].next[c];
        ++l;
      }
      cb(int(j), l, v);
    }
  }

  // Longest common substring length with `text`.
  int lcs(std::span<const Letter> text) const {
    int best = 0;
    scan(text, [&](int, int len, int) { best = std::max(best, len); });
    return best;
  }

  // Length of the longest substring occurring at least twice in the indexed
  // word.
  int longest_repeated() const {
    std::vector<long long> cnt(st_.size(), 0);
    for (size_t i = 1; i < st_.size(); ++i)
      if (!st_[i].clone) cnt[i] = 1;
    // propagate along suffix links in order of decreasing len
    std::vector<int> order(st_.size());
    for (size_t i = 0; i < st_.size(); ++i) order[i] = int(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return st_[a].len > st_[b].len; });
    int best = 0;
    for (int v : order) {
      if (v == 0) continue;
      if (cnt[v] >= 2) best = std::max(best, st_[v].len);
      cnt[size_t(st_[v].link)] += cnt[size_t(v)];
    }
    return best;
  }

 private:
  std::vector<State> st_;
  int last_ = 0;
};

}  // namespace gembed
