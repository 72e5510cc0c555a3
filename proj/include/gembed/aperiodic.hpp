#pragma once

// The ordered family of positive cube-free words and the separator-assembled
// Y-words built from it, together with the uniqueness ("star") checks that
// every consumer of the Y-words relies on.

#include <cmath>
#include <optional>
#include <vector>

#include "gembed/suffix_automaton.hpp"
#include "gembed/word.hpp"

namespace gembed {

inline constexpr int kSeparatorRun = 6;   // a^6 between blocks
inline constexpr int kYAperiodicity = 7;  // Y-words carry no 7th powers
inline constexpr Ratio kLambdaDefault{1, 100};

// All positive cube-free words over {a,b} that start and end with b, of
// length <= max_len, strictly ordered by (length, lexicographic a < b).
struct AperiodicFamily {
  int max_len = 0;
  std::vector<Word> words;

  int size() const { return int(words.size()); }
  // 1-based access matching the X_1, X_2, ... numbering.
  const Word& block(int i) const {
    if (i < 1 || i > size())
      throw family_exhausted_error(
          "aperiodic family exhausted at index " + std::to_string(i) +
          " (have " + std::to_string(size()) + "); extend the family");
    return words[size_t(i - 1)];
  }
};

namespace detail {

// Appending-time cube check: does the last 3p block of s end in a cube?
inline bool suffix_has_cube(const RawWord& s) {
  int n = int(s.size());
  for (int p = 1; 3 * p <= n; ++p) {
    bool cube = true;
    for (int i = n - 2 * p; i < n && cube; ++i)
      cube = s[size_t(i - p)] == s[size_t(i)];
    if (cube) return true;
  }
  return false;
}

inline void enumerate_rec(RawWord& s, int target_len, std::vector<Word>& out) {
  if (suffix_has_cube(s)) return;
  if (int(s.size()) == target_len) {
    if (s.back() == kLb) out.push_back(Word::from_reduced(s));
    return;
  }
  s.push_back(kLa);
  enumerate_rec(s, target_len, out);
  s.back() = kLb;
  enumerate_rec(s, target_len, out);
  s.pop_back();
}

}  // namespace detail

inline AperiodicFamily enumerate_family(int max_len) {
  if (max_len < 1) throw std::invalid_argument("enumerate_family: max_len >= 1");
  AperiodicFamily fam;
  fam.max_len = max_len;
  for (int len = 1; len <= max_len; ++len) {
    RawWord s{kLb};
    detail::enumerate_rec(s, len, fam.words);
  }
  return fam;
}

inline bool check_double_star(const Word& w) {
  return is_s_aperiodic(w, kYAperiodicity);
}

// The lazily assembled set of Y-words: Y_j is a^6 X_(j-1)N0+1 ... a^6 X_jN0.
// Construction asserts 7-aperiodicity of every stored word; the star
// property is checked by consumers over the prefix they actually use.
class YSet {
 public:
  YSet(AperiodicFamily family, int n0, Ratio lambda = kLambdaDefault)
      : family_(std::move(family)), n0_(n0), lambda_(lambda) {
    if (n0 < 1) throw std::invalid_argument("YSet: N0 >= 1");
  }

  int n0() const { return n0_; }
  Ratio lambda() const { return lambda_; }
  const AperiodicFamily& family() const { return family_; }
  int materialized() const { return int(ys_.size()); }

  // 1-based; builds and caches up to j.
  const Word& y(int j) {
    if (j < 1) throw std::invalid_argument("YSet: j >= 1");
    while (int(ys_.size()) < j) {
      int next = int(ys_.size()) + 1;
      Word w = assemble(next);
      if (!check_double_star(w))
        throw data_integrity_error("Y_" + std::to_string(next) +
                                   " failed the 7-aperiodicity check");
      ys_.push_back(std::move(w));
    }
    return ys_[size_t(j - 1)];
  }

  std::vector<Word> prefix(int count) {
    std::vector<Word> out;
    out.reserve(size_t(count));
    for (int j = 1; j <= count; ++j) out.push_back(y(j));
    return out;
  }

 private:
  Word assemble(int j) const {
    RawWord raw;
    for (int t = 1; t <= n0_; ++t) {
      const Word& block = family_.block((j - 1) * n0_ + t);
      for (int i = 0; i < kSeparatorRun; ++i) raw.push_back(kLa);
      raw.insert(raw.end(), block.letters().begin(), block.letters().end());
    }
    return Word::from_reduced(std::move(raw));  // positive, already reduced
  }

  AperiodicFamily family_;
  int n0_;
  Ratio lambda_;
  std::vector<Word> ys_;
};

inline Word build_Y(int j, YSet& set) { return set.y(j); }

struct StarViolation {
  Word v;                  // the offending subword
  int host1 = 0;           // index into the checked list
  int host2 = -1;          // second host, or -1 when repeated inside host1
  std::vector<int> pos1;   // occurrences in host1
  std::vector<int> pos2;   // occurrences in host2 (empty for same-host)
};

struct StarReport {
  bool passed = true;
  std::vector<StarViolation> violations;
};

namespace detail {

// Longest substring of w occurring twice in w, with two positions.
inline std::optional<std::pair<Word, std::pair<int, int>>> repeated_substring(
    const Word& w, int min_len) {
  SuffixAutomaton sam(w);
  int len = sam.longest_repeated();
  if (len < min_len || len == 0) return std::nullopt;
  for (int i = 0; i + len <= w.size(); ++i) {
    Word v = w.subword(i, i + len);
    auto occ = occurrences(v, w);
    if (occ.size() >= 2) return {{v, {occ[0], occ[1]}}};
  }
  return std::nullopt;
}

}  // namespace detail

// Star property over a finite list: every subword V of W with
// |V| >= lambda |W| occurs exactly once in W and in no other list member.
inline StarReport check_star(std::span<const Word> words, Ratio lambda) {
  if (!(Ratio{0, 1} < lambda) || !(lambda < Ratio{1, 1}))
    throw std::invalid_argument("check_star: lambda must lie in (0,1)");
  for (size_t i = 0; i < words.size(); ++i)
    for (size_t j = i + 1; j < words.size(); ++j)
      if (words[i] == words[j])
        throw std::invalid_argument("check_star: words must be pairwise distinct");

  StarReport report;
  std::vector<SuffixAutomaton> sams;
  sams.reserve(words.size());
  for (const Word& w : words) sams.emplace_back(w);

  for (size_t i = 0; i < words.size(); ++i) {
    const Word& w = words[i];
    int threshold = std::max<long long>(1, ceil_scaled(lambda, w.size()));
    // repeats inside w itself
    if (auto rep = detail::repeated_substring(w, threshold)) {
      report.passed = false;
      StarViolation v;
      v.v = rep->first;
      v.host1 = int(i);
      v.pos1 = occurrences(rep->first, w);
      report.violations.push_back(std::move(v));
    }
    // shared content with other hosts; V is hosted by w, so the threshold
    // is w's
    for (size_t j = 0; j < words.size(); ++j) {
      if (j == i) continue;
      int common = sams[j].lcs(w.letters());
      if (common >= threshold && common > 0) {
        // recover one witness of maximal length
        for (int s = 0; s + common <= w.size(); ++s) {
          Word v = w.subword(s, s + common);
          auto occ2 = occurrences(v, words[j]);
          if (!occ2.empty()) {
            StarViolation sv;
            sv.v = v;
            sv.host1 = int(i);
            sv.host2 = int(j);
            sv.pos1 = occurrences(v, w);
            sv.pos2 = occ2;
            report.passed = false;
            report.violations.push_back(std::move(sv));
            break;
          }
        }
      }
    }
  }
  return report;
}

struct GrowthRow {
  int i = 0;
  long long cumulative = 0;
};

struct GrowthEstimate {
  std::vector<GrowthRow> rows;
  double c = 0.0;        // min over i >= c_from of cumulative(i)^(1/i)
  bool exponential = false;
};

// Cumulative counts of words of length <= i and the fitted growth base.
inline GrowthEstimate growth_estimate(std::span<const Word> words, int i_max,
                                      int c_from = 4) {
  if (words.empty()) throw std::invalid_argument("growth_estimate: empty family");
  if (i_max < 1) throw std::invalid_argument("growth_estimate: i_max >= 1");
  GrowthEstimate est;
  for (int i = 1; i <= i_max; ++i) {
    long long c = 0;
    for (const Word& w : words)
      if (w.size() <= i) ++c;
    est.rows.push_back({i, c});
  }
  double fit = 0.0;
  bool first = true;
  for (const auto& row : est.rows) {
    if (row.i < c_from || row.cumulative == 0) continue;
    double v = std::pow(double(row.cumulative), 1.0 / double(row.i));
    if (first || v < fit) { fit = v; first = false; }
  }
  est.c = first ? 1.0 : fit;
  est.exponential = est.c > 1.0 + 1e-9;
  return est;
}

}  // namespace gembed
