#pragma once

// Code assignment g -> X_g from the Y-set, G-words with their entire
// factorizations, and recognition of reduced G-word forms by block parsing.

#include <map>
#include <optional>
#include <vector>

#include "gembed/aperiodic.hpp"
#include "gembed/group.hpp"

namespace gembed {

struct Factor {
  int g = 0;      // element index, never the identity
  int sign = 1;   // +1 or -1

  friend auto operator<=>(const Factor&, const Factor&) = default;
};

class EmbeddingMap {
 public:
  EmbeddingMap() = default;
  EmbeddingMap(FiniteGroup group, LengthFunction ell, std::vector<Word> codes,
               std::vector<int> y_indices, Ratio d, int n0, Ratio lambda)
      : group_(std::move(group)),
        ell_(std::move(ell)),
        codes_(std::move(codes)),
        y_indices_(std::move(y_indices)),
        d_(d),
        n0_(n0),
        lambda_(lambda) {
    for (int g = 0; g < group_.order; ++g) {
      if (g == group_.identity) continue;
      const Word& x = codes_[size_t(g)];
      if (x.empty()) throw std::invalid_argument("missing code");
      min_code_ = min_code_ == 0 ? x.size() : std::min(min_code_, x.size());
      max_code_ = std::max(max_code_, x.size());
    }
  }

  const FiniteGroup& group() const { return group_; }
  const LengthFunction& ell() const { return ell_; }
  Ratio d() const { return d_; }
  int n0() const { return n0_; }
  Ratio lambda() const { return lambda_; }
  int min_code_len() const { return min_code_; }
  int max_code_len() const { return max_code_; }
  int y_index(int g) const { return y_indices_[size_t(g)]; }
  int max_y_index() const {
    int m = 0;
    for (int i : y_indices_) m = std::max(m, i);
    return m;
  }

  const Word& code(int g) const {
    if (g == group_.identity)
      throw std::invalid_argument("identity carries no code");
    return codes_[size_t(g)];
  }

  // X_g^sign as a word.
  Word block(const Factor& f) const {
    return f.sign > 0 ? code(f.g) : code(f.g).inverse();
  }

  std::vector<int> coded_elements() const {
    std::vector<int> out;
    for (int g = 0; g < group_.order; ++g)
      if (g != group_.identity) out.push_back(g);
    return out;
  }

 private:
  FiniteGroup group_;
  LengthFunction ell_;
  std::vector<Word> codes_;   // indexed by element; identity slot empty
  std::vector<int> y_indices_;
  Ratio d_{1, 1};
  int n0_ = 0;
  Ratio lambda_ = kLambdaDefault;
  int min_code_ = 0;
  int max_code_ = 0;
};

// Greedy code assignment: elements in increasing l(g) (ties by index), each
// taking the shortest unused Y-word of length >= l(g).  The star property is
// verified over the consumed Y-prefix and a failure aborts with guidance.
inline EmbeddingMap assign_codes(const FiniteGroup& G, const LengthFunction& ell,
                                 YSet& yset) {
  auto axioms = validate_length_function(G, ell);
  if (!axioms.passed)
    throw std::invalid_argument("length function violates its axioms");

  std::vector<int> order;
  for (int g = 0; g < G.order; ++g)
    if (g != G.identity) order.push_back(g);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return ell.at(a) < ell.at(b); });

  std::vector<Word> codes(size_t(G.order));
  std::vector<int> y_used(size_t(G.order), 0);
  int next_free = 1;
  long long d_num = 0, d_den = 1;  // max |X_g| / l(g)
  for (int g : order) {
    int j = next_free;
    while (yset.y(j).size() < ell.at(g)) ++j;
    if (j != next_free)
      throw std::logic_error("Y lengths are nondecreasing; scan cannot skip");
    codes[size_t(g)] = yset.y(j);
    y_used[size_t(g)] = j;
    next_free = j + 1;
    long long n = codes[size_t(g)].size(), d = ell.at(g);
    if (n * d_den > d_num * d) { d_num = n; d_den = d; }
  }

  int consumed = next_free - 1;
  if (consumed > 0) {
    auto prefix = yset.prefix(consumed);
    StarReport star = check_star(prefix, yset.lambda());
    if (!star.passed)
      throw data_integrity_error(
          "the generated Y-prefix (" + std::to_string(consumed) +
          " words) violates the uniqueness property at lambda = " +
          yset.lambda().str() + "; increase N0 (currently " +
          std::to_string(yset.n0()) + ")");
  }

  Ratio d = consumed == 0 ? Ratio{1, 1} : Ratio{d_num + d_den, d_den};
  return EmbeddingMap(G, ell, std::move(codes), std::move(y_used), d,
                      yset.n0(), yset.lambda());
}

// A formal product of code blocks, with the factor boundaries recorded.
struct GWord {
  std::vector<Factor> factors;
  RawWord rendered;                  // concatenation, no reduction
  std::vector<int> entire_positions; // cumulative block starts, size k+1
};

inline GWord gword(std::span<const Factor> factors, const EmbeddingMap& map) {
  GWord out;
  out.entire_positions.push_back(0);
  for (const Factor& f : factors) {
    if (f.g == map.group().identity)
      throw std::invalid_argument("gword: identity factor rejected");
    if (f.sign != 1 && f.sign != -1)
      throw std::invalid_argument("gword: sign must be +-1");
    Word b = map.block(f);
    out.factors.push_back(f);
    out.rendered.insert(out.rendered.end(), b.letters().begin(),
                        b.letters().end());
    out.entire_positions.push_back(int(out.rendered.size()));
  }
  return out;
}

inline int evaluate_in_G(std::span<const Factor> factors, const FiniteGroup& G) {
  int acc = G.identity;
  for (const Factor& f : factors)
    acc = G.op(acc, f.sign > 0 ? f.g : G.inverse(f.g));
  return acc;
}

// The reduced form B_1 ... B_k of a G-word, with per-junction cancellation
// bookkeeping.  Junction losses above lambda |A_i| are a star-property
// failure in the underlying codes and raise data_integrity_error.
struct ReducedGWord {
  std::vector<Factor> factors;       // after collapsing inverse pairs
  Word core;                          // linear reduced form, or the chosen
                                      // rotation of the cyclic form
  bool cyclic = false;
  std::vector<int> entire_positions;  // start of each B_i in core, size k
                                      // (+1 sentinel = |core| when linear)
  std::vector<int> junction_losses;   // letters cancelled per junction
                                      // (size k-1, or k when cyclic)
};

namespace detail {

inline void collapse_inverse_pairs(std::vector<Factor>& fs, bool cyclic) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i + 1 < fs.size(); ++i) {
      if (fs[i].g == fs[i + 1].g && fs[i].sign == -fs[i + 1].sign) {
        fs.erase(fs.begin() + long(i), fs.begin() + long(i) + 2);
        changed = true;
        break;
      }
    }
    if (!changed && cyclic && fs.size() >= 2) {
      size_t last = fs.size() - 1;
      if (fs[last].g == fs[0].g && fs[last].sign == -fs[0].sign) {
        fs.erase(fs.begin() + long(last));
        fs.erase(fs.begin());
        changed = true;
      }
    }
  }
}

inline int junction_cancellation(const Word& left, const Word& right) {
  int t = 0;
  int m = std::min(left.size(), right.size());
  while (t < m && left[left.size() - 1 - t] == inverse(right[t])) ++t;
  return t;
}

}  // namespace detail

inline ReducedGWord reduce_gword(const GWord& gw, const EmbeddingMap& map,
                                 bool cyclic = false) {
  ReducedGWord out;
  out.cyclic = cyclic;
  out.factors = gw.factors;
  detail::collapse_inverse_pairs(out.factors, cyclic);
  const int k = int(out.factors.size());
  if (k == 0) return out;

  std::vector<Word> blocks;
  blocks.reserve(size_t(k));
  for (const Factor& f : out.factors) blocks.push_back(map.block(f));

  const Ratio lambda = map.lambda();
  const int junctions = cyclic ? k : k - 1;
  std::vector<int> loss(size_t(junctions), 0);
  for (int j = 0; j < junctions; ++j) {
    const Word& l = blocks[size_t(j)];
    const Word& r = blocks[size_t((j + 1) % k)];
    int t = detail::junction_cancellation(l, r);
    if (!le_scaled(t, lambda, l.size()) || !le_scaled(t, lambda, r.size()))
      throw data_integrity_error(
          "junction cancellation of " + std::to_string(t) +
          " letters exceeds lambda of the adjacent blocks; the code set "
          "violates the uniqueness property");
    loss[size_t(j)] = t;
  }
  out.junction_losses = loss;

  RawWord core;
  for (int i = 0; i < k; ++i) {
    int left_trim = (cyclic || i > 0) ? loss[size_t((i + junctions - 1) % junctions)] : 0;
    int right_trim = (cyclic || i + 1 < k) ? loss[size_t(i % junctions)] : 0;
    const Word& b = blocks[size_t(i)];
    if (left_trim + right_trim >= b.size())
      throw data_integrity_error("block annihilated by junction trims");
    out.entire_positions.push_back(int(core.size()));
    core.insert(core.end(), b.letters().begin() + left_trim,
                b.letters().end() - right_trim);
  }
  if (!cyclic) out.entire_positions.push_back(int(core.size()));
  out.core = Word::from_reduced(std::move(core));
  // the trims above are exactly the free (cyclic) reduction; check
  if (!cyclic) {
    Word direct = free_reduce(gw.rendered);
    if (direct != out.core)
      throw data_integrity_error("cascading cancellation across a junction");
  } else if (!out.core.empty() &&
             out.core[0] == inverse(out.core[out.core.size() - 1])) {
    throw data_integrity_error("cyclic core not cyclically reduced");
  }
  return out;
}

// Decides whether u is freely equal to some G-word; returns witness factors.
// Parsing state: position in u plus the inverted trim that the next block
// must absorb at its left end.
inline std::optional<std::vector<Factor>> parse_gword(const Word& u,
                                                      const EmbeddingMap& map) {
  if (u.empty()) return std::vector<Factor>{};
  const Ratio lambda = map.lambda();
  auto elements = map.coded_elements();

  struct Key {
    int pos;
    RawWord pending;  // required prefix of the next block
    bool operator<(const Key& o) const {
      return pos != o.pos ? pos < o.pos : pending < o.pending;
    }
  };
  std::map<Key, bool> seen;
  std::vector<Factor> stack;
  std::optional<std::vector<Factor>> found;

  auto rec = [&](auto&& self, int pos, const RawWord& pending) -> bool {
    if (found) return true;
    if (pos == u.size() && pending.empty() && !stack.empty()) {
      found = stack;
      return true;
    }
    Key key{pos, pending};
    if (!seen.emplace(key, true).second) return false;

    for (int g : elements) {
      for (int sign : {1, -1}) {
        Word A = map.block(Factor{g, sign});
        if (!le_scaled(int(pending.size()), lambda, A.size())) continue;
        // block must start with the pending trim
        bool ok = true;
        for (size_t i = 0; i < pending.size() && ok; ++i)
          ok = A[int(i)] == pending[i];
        if (!ok) continue;
        // longest stretch of A beyond the trim matching u at pos
        int avail = A.size() - int(pending.size());
        int common = 0;
        while (common < avail && pos + common < u.size() &&
               u[pos + common] == A[int(pending.size()) + common])
          ++common;
        int max_right = int(floor_scaled(lambda, A.size()));
        // every right trim t leaves visible = avail - t <= common letters
        for (int t = std::max(0, avail - common); t <= max_right; ++t) {
          int visible = avail - t;
          if (visible <= 0) continue;
          if (pos + visible == u.size() && t > 0) continue;  // last block ends clean
          RawWord next_pending;
          for (int i = 0; i < t; ++i)
            next_pending.push_back(inverse(A[A.size() - 1 - i]));
          stack.push_back(Factor{g, sign});
          if (self(self, pos + visible, next_pending)) {
            stack.pop_back();
            return true;
          }
          stack.pop_back();
        }
      }
    }
    return false;
  };
  rec(rec, 0, {});
  return found;
}

// Renders a factor sequence and compares with u in the free group.
inline bool gword_witness_matches(const Word& u, std::span<const Factor> factors,
                                  const EmbeddingMap& map) {
  Word acc;
  for (const Factor& f : factors) acc = acc * map.block(f);
  return acc == u;
}

}  // namespace gembed
