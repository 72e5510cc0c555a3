#pragma once

// Piece analysis over the symmetrized relator system: maximal common
// subwords between (rotations of) rendered relators and their inverses,
// classified as small pieces or as compatible configurations backed by a
// G-word witness.
//
// An entry compares oriented strings u = R_i^{ori_i} and v = R_j^{ori_j}
// sharing a common subword q.  The geometric reading glues the cell whose
// clockwise label is u to the cell whose clockwise label is v^-1 (the two
// sides of the shared arc are traversed oppositely).

#include <thread>

#include "gembed/small_cancellation.hpp"

namespace gembed {

struct OverlapEntry {
  int i = 0, j = 0;
  int ori_i = 1, ori_j = 1;
  int rot_i = 0, rot_j = 0;  // arc start in the oriented cyclic words
  int len = 0;
  Word overlap;              // stored for small overlaps and non-pieces
  enum class Class { SmallPiece, Compatible, Violation } cls = Class::SmallPiece;
  std::vector<Factor> witness;   // G-word witness for compatible entries
  Word connecting_label;
  int o1_syllable = -1, o2_syllable = -1;
};

struct OverlapReport {
  SCConstants constants;
  std::vector<OverlapEntry> entries;
  int compatible_count = 0;
  int violation_count = 0;

  bool has_violation() const { return violation_count > 0; }
};

namespace detail {

struct OrientedRelator {
  Word word;
  std::vector<int> entire;  // block starts, ascending
};

inline OrientedRelator orient_relator(const RWord& rw, int ori) {
  OrientedRelator o;
  o.word = rw.oriented_word(ori);
  o.entire = rw.oriented_entire(ori);
  return o;
}

// Largest entire position <= pos; wraps to the last one.  `entire` is
// ascending and nonempty.
inline std::pair<int, int> entire_at_or_before(const std::vector<int>& entire,
                                               int pos) {
  int idx = -1;
  for (size_t t = 0; t < entire.size(); ++t)
    if (entire[t] <= pos) idx = int(t);
  if (idx < 0) idx = int(entire.size()) - 1;
  return {entire[size_t(idx)], idx};
}

// Smallest entire position >= pos; wraps to the first one.
inline std::pair<int, int> entire_at_or_after(const std::vector<int>& entire,
                                              int pos) {
  for (size_t t = 0; t < entire.size(); ++t)
    if (entire[t] >= pos) return {entire[t], int(t)};
  return {entire[0], 0};
}

// Cyclic substrings of a cyclically reduced word are already reduced.
inline Word cyclic_substring(const Word& w, int from, int len) {
  RawWord out;
  const int n = w.size();
  out.reserve(size_t(len));
  for (int t = 0; t < len; ++t) out.push_back(w[(from + t) % n]);
  return Word::from_reduced(std::move(out));
}

// Fills classification and witness for an entry whose arc data is set.
inline void classify_overlap(OverlapEntry& e, const OrientedRelator& u,
                             const OrientedRelator& v, const Presentation& p) {
  const int n_u = u.word.size(), n_v = v.word.size();
  const Ratio piece = p.constants().piece_bound;
  long long mn = std::min(n_u, n_v);
  if (e.len * piece.den < piece.num * mn) {
    e.cls = OverlapEntry::Class::SmallPiece;
    return;
  }
  // connecting path: entire vertex of the u-cell, along u to the arc start,
  // then along the (v^-1)-cell to its next entire vertex
  auto [o1, s1] = entire_at_or_before(u.entire, e.rot_i);
  Word w1;
  {
    int len = ((e.rot_i - o1) % n_u + n_u) % n_u;
    w1 = cyclic_substring(u.word, o1, len);
  }
  Word v2 = v.word.inverse();
  std::vector<int> e2;
  for (int e_pos : v.entire) e2.push_back((n_v - e_pos) % n_v);
  std::sort(e2.begin(), e2.end());
  int pos2 = (n_v - e.rot_j) % n_v;  // arc start vertex seen from the v^-1 cell
  auto [o2, s2] = entire_at_or_after(e2, pos2);
  Word w2;
  {
    int len = ((o2 - pos2) % n_v + n_v) % n_v;
    w2 = cyclic_substring(v2, pos2, len);
  }
  e.connecting_label = w1 * w2;
  e.o1_syllable = s1;
  e.o2_syllable = s2;
  auto witness = parse_gword(e.connecting_label, p.embedding());
  if (witness) {
    e.cls = OverlapEntry::Class::Compatible;
    e.witness = *witness;
  } else {
    e.cls = OverlapEntry::Class::Violation;
  }
}

}  // namespace detail

// Maximal common subwords between all pairs of the symmetrized system.
// Overlaps shorter than both a small floor and the piece threshold are
// reported with their exact length for distinct relator pairs; for a relator
// against its own rotations the search is block-aligned, which is exact for
// any overlap long enough to contain block-sized repeated content.
inline OverlapReport analyze_overlaps(const Presentation& p,
                                      int num_threads = 2) {
  OverlapReport report;
  report.constants = p.constants();
  const RelatorSet& set = p.relators();
  if (set.size() == 0)
    throw std::invalid_argument("analyze_overlaps: empty relator set");

  struct Oriented {
    int idx;
    int ori;
    detail::OrientedRelator rel;
    RawWord doubled;
  };
  std::vector<Oriented> oriented;
  for (int i = 0; i < set.size(); ++i) {
    for (int ori : {1, -1}) {
      Oriented o;
      o.idx = i;
      o.ori = ori;
      o.rel = detail::orient_relator(set[i], ori);
      o.doubled = o.rel.word.raw();
      o.doubled.insert(o.doubled.end(), o.rel.word.raw().begin(),
                       o.rel.word.raw().end());
      oriented.push_back(std::move(o));
    }
  }
  auto find_oriented = [&](int idx, int ori) -> const Oriented& {
    return oriented[size_t(2 * idx + (ori > 0 ? 0 : 1))];
  };

  std::vector<std::vector<OverlapEntry>> buckets(size_t(std::max(1, num_threads)));

  auto work = [&](int tid, int nthreads) {
    for (int i = tid; i < set.size(); i += nthreads) {
      const Oriented& ui = find_oriented(i, 1);
      const int n_i = ui.rel.word.size();
      SuffixAutomaton sam{std::span<const Letter>(ui.doubled)};
      for (int j = i; j < set.size(); ++j) {
        for (int ori_j : {1, -1}) {
          if (j == i && ori_j == 1) continue;  // handled by rotation analysis
          const Oriented& vj = find_oriented(j, ori_j);
          const int n_j = vj.rel.word.size();
          const int cap = std::min(n_i, n_j);
          int best_len = 0, best_end = -1, best_state = -1;
          sam.scan(std::span<const Letter>(vj.doubled), [&](int pos, int len, int st) {
            int l = std::min(len, cap);
            if (l > best_len) {
              best_len = l;
              best_end = pos;
              best_state = st;
            }
          });
          if (best_len == 0) continue;
          // positions of the maximal common subword
          OverlapEntry e;
          e.i = i;
          e.j = j;
          e.ori_i = 1;
          e.ori_j = ori_j;
          e.len = best_len;
          {
            // matches of a state are suffixes sharing its first end position
            int end_u = sam.state(best_state).firstpos;
            e.rot_i = (((end_u + 1 - best_len) % n_i) + n_i) % n_i;
            e.rot_j = (((best_end + 1 - best_len) % n_j) + n_j) % n_j;
          }
          if (e.len <= 512 ||
              !(e.len * p.constants().piece_bound.den <
                p.constants().piece_bound.num * std::min(n_i, n_j)))
            e.overlap = detail::cyclic_substring(ui.rel.word, e.rot_i, e.len);
          detail::classify_overlap(e, ui.rel, vj.rel, p);
          buckets[size_t(tid)].push_back(std::move(e));
        }
      }
    }
  };

  int nthreads = std::max(1, num_threads);
  if (nthreads == 1 || set.size() < 4) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t, nthreads);
    for (auto& th : pool) th.join();
  }

  // a relator against its own rotations: block-aligned search
  for (int i = 0; i < set.size(); ++i) {
    const RWord& rw = set[i];
    const detail::OrientedRelator u = detail::orient_relator(rw, 1);
    const int n = u.word.size();
    const int k = int(u.entire.size());
    std::vector<std::tuple<int, int, int>> seen;  // (rot_i, rot_j, len)
    for (int r = 1; r < k; ++r) {
      for (int i0 = 0; i0 < k; ++i0) {
        const auto& syll = rw.abstract.syllables;
        if (syll[size_t(i0)] != syll[size_t((i0 + r) % k)]) continue;
        // refine around the aligned blocks
        int pos1 = u.entire[size_t(i0)];
        int pos2 = u.entire[size_t((i0 + r) % k)];
        int delta = ((pos2 - pos1) % n + n) % n;
        int cap = n - std::min(delta, n - delta);
        if (cap <= 0) continue;
        int f = 0;
        while (f < cap && u.word[(pos1 + f) % n] == u.word[(pos2 + f) % n]) ++f;
        int b = 0;
        while (b < cap - f &&
               u.word[((pos1 - 1 - b) % n + n) % n] ==
                   u.word[((pos2 - 1 - b) % n + n) % n])
          ++b;
        int len = std::min(b + f, cap);
        if (len <= 0) continue;
        OverlapEntry e;
        e.i = i;
        e.j = i;
        e.ori_i = 1;
        e.ori_j = 1;
        e.rot_i = ((pos1 - b) % n + n) % n;
        e.rot_j = ((pos2 - b) % n + n) % n;
        e.len = len;
        auto key = std::tuple<int, int, int>(std::min(e.rot_i, e.rot_j),
                                             std::max(e.rot_i, e.rot_j), len);
        bool dup = false;
        for (const auto& s : seen) dup = dup || s == key;
        if (dup) continue;
        seen.push_back(key);
        if (e.len <= 512 ||
            !(e.len * p.constants().piece_bound.den <
              p.constants().piece_bound.num * n))
          e.overlap = detail::cyclic_substring(u.word, e.rot_i, e.len);
        detail::classify_overlap(e, u, u, p);
        buckets[0].push_back(std::move(e));
      }
    }
  }

  for (auto& b : buckets)
    for (auto& e : b) report.entries.push_back(std::move(e));
  std::sort(report.entries.begin(), report.entries.end(),
            [](const OverlapEntry& a, const OverlapEntry& b) {
              return std::tuple(a.i, a.j, a.ori_i, a.ori_j, a.rot_i, a.rot_j,
                                a.len) <
                     std::tuple(b.i, b.j, b.ori_i, b.ori_j, b.rot_i, b.rot_j,
                                b.len);
            });
  for (const auto& e : report.entries) {
    if (e.cls == OverlapEntry::Class::Compatible) ++report.compatible_count;
    if (e.cls == OverlapEntry::Class::Violation) ++report.violation_count;
  }
  return report;
}

}  // namespace gembed
