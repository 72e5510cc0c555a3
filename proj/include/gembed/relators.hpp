#pragma once

// The truncated defining set: cyclically reduced syllable words over the
// free basis {x_g} vanishing in G, substituted with codes and cyclically
// reduced, deduplicated up to rotation and inversion.

#include <map>
#include <memory>
#include <vector>

#include "gembed/embedding.hpp"

namespace gembed {

// A cyclically reduced word in the free basis {x_g : g != 1} that evaluates
// to the identity.  Stored syllable-by-syllable; powers are not compressed.
struct AbstractRelator {
  std::vector<Factor> syllables;

  int size() const { return int(syllables.size()); }

  bool cyclically_reduced() const {
    const auto& s = syllables;
    if (s.empty()) return false;
    for (size_t i = 0; i < s.size(); ++i) {
      const Factor& x = s[i];
      const Factor& y = s[(i + 1) % s.size()];
      if (s.size() >= 2 && x.g == y.g && x.sign == -y.sign) return false;
    }
    return true;
  }

  AbstractRelator inverse() const {
    AbstractRelator r;
    for (auto it = syllables.rbegin(); it != syllables.rend(); ++it)
      r.syllables.push_back(Factor{it->g, -it->sign});
    return r;
  }

  AbstractRelator rotation(int k) const {
    AbstractRelator r;
    int n = size();
    for (int i = 0; i < n; ++i)
      r.syllables.push_back(syllables[size_t((k + i) % n)]);
    return r;
  }

  // Least word among all rotations of the relator and of its inverse;
  // identifies the rotation-and-inversion class.
  std::vector<Factor> canonical_class() const {
    std::vector<Factor> best;
    auto consider = [&](const AbstractRelator& r) {
      for (int k = 0; k < r.size(); ++k) {
        auto rot = r.rotation(k).syllables;
        if (best.empty() || rot < best) best = std::move(rot);
      }
    };
    consider(*this);
    consider(inverse());
    return best;
  }

  friend auto operator<=>(const AbstractRelator&, const AbstractRelator&) = default;
};

// Cyclically reduces a syllable word (removes adjacent and wraparound
// inverse pairs); may return an empty syllable list.
inline std::vector<Factor> cyclic_reduce_syllables(std::vector<Factor> s) {
  detail::collapse_inverse_pairs(s, /*cyclic=*/true);
  return s;
}

// Exactly the cyclically reduced words of syllable length <= k vanishing in
// G, one representative per rotation-and-inversion class, ordered by
// (length, syllables).
inline std::vector<AbstractRelator> enumerate_abstract_relators(
    const FiniteGroup& G, int k) {
  if (k < 1) throw std::invalid_argument("enumerate_abstract_relators: k >= 1");
  std::vector<AbstractRelator> out;
  std::vector<Factor> cur;

  auto rec = [&](auto&& self, int remaining, int acc) -> void {
    if (!cur.empty() && acc == G.identity) {
      AbstractRelator r{cur};
      if (r.cyclically_reduced() && r.canonical_class() == cur)
        out.push_back(r);
    }
    if (remaining == 0) return;
    for (int g = 0; g < G.order; ++g) {
      if (g == G.identity) continue;
      for (int sign : {1, -1}) {
        if (!cur.empty() && cur.back().g == g && cur.back().sign == -sign)
          continue;  // not reduced
        cur.push_back(Factor{g, sign});
        self(self, remaining - 1, G.op(acc, sign > 0 ? g : G.inverse(g)));
        cur.pop_back();
      }
    }
  };
  rec(rec, k, G.identity);
  std::sort(out.begin(), out.end(), [](const AbstractRelator& a,
                                       const AbstractRelator& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.syllables < b.syllables;
  });
  return out;
}

// A relator rendered over {a,b}: the cyclically reduced substitution with
// its entire-vertex bookkeeping.
struct RWord {
  AbstractRelator abstract;
  Word rendered;                      // natural rotation: starts at B_1
  std::vector<int> entire_positions;  // start of B_i in `rendered`
  std::vector<int> junction_losses;   // per junction, cyclic (size k)
  CyclicWord canonical;               // canonical rotation of rendered
  CyclicWord canonical_class;         // min(canonical, canonical of inverse)

  int size() const { return rendered.size(); }
  long long block_length_sum(const EmbeddingMap& map) const {
    long long s = 0;
    for (const Factor& f : abstract.syllables) s += map.code(f.g).size();
    return s;
  }

  Word oriented_word(int ori) const {
    return ori > 0 ? rendered : rendered.inverse();
  }

  // Abstract syllables of the oriented reading.
  AbstractRelator oriented_abstract(int ori) const {
    return ori > 0 ? abstract : abstract.inverse();
  }

  // Block-start positions of the oriented reading, indexed by the oriented
  // syllable; ascending, starting at 0.
  std::vector<int> oriented_entire(int ori) const {
    if (ori > 0) return entire_positions;
    const int n = rendered.size();
    const int k = int(entire_positions.size());
    std::vector<int> out(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j)
      out[size_t(j)] = (n - entire_positions[size_t((k - j) % k)]) % n;
    return out;
  }
};

inline RWord render_relator(const AbstractRelator& r, const EmbeddingMap& map) {
  if (!r.cyclically_reduced())
    throw std::invalid_argument("render_relator: not cyclically reduced");
  if (evaluate_in_G(r.syllables, map.group()) != map.group().identity)
    throw std::invalid_argument("render_relator: does not vanish in G");
  GWord gw = gword(r.syllables, map);
  ReducedGWord red = reduce_gword(gw, map, /*cyclic=*/true);
  if (red.factors != r.syllables)
    throw std::invalid_argument("render_relator: syllables collapsed");

  RWord out;
  out.abstract = r;
  out.rendered = red.core;
  out.entire_positions = red.entire_positions;
  out.junction_losses = red.junction_losses;
  long long total = 0;
  for (const Factor& f : r.syllables) total += map.code(f.g).size();
  // rendered >= 0.98 * sum of block lengths: each junction removes at most
  // lambda of each adjacent block
  if (out.rendered.size() * 100 < 98 * total)
    throw data_integrity_error("rendered relator shorter than 0.98 of blocks");
  out.canonical = CyclicWord::from_cyclically_reduced(out.rendered);
  CyclicWord inv = out.canonical.inverse();
  out.canonical_class = std::min(out.canonical, inv);
  return out;
}

// Deduplicated rendered relators with stable iteration order.
class RelatorSet {
 public:
  RelatorSet() = default;

  RelatorSet(std::vector<RWord> rwords, int syllable_bound)
      : rwords_(std::move(rwords)), bound_(syllable_bound) {
    std::sort(rwords_.begin(), rwords_.end(), [](const RWord& a, const RWord& b) {
      if (a.size() != b.size()) return a.size() < b.size();
      return a.canonical_class < b.canonical_class;
    });
    for (size_t i = 0; i < rwords_.size(); ++i)
      index_.emplace(rwords_[i].canonical_class, int(i));
  }

  int syllable_bound() const { return bound_; }
  int size() const { return int(rwords_.size()); }
  const RWord& operator[](int i) const { return rwords_[size_t(i)]; }
  std::span<const RWord> all() const { return rwords_; }

  // Looks up a cyclic word up to rotation and inversion.
  const RWord* find(const CyclicWord& cw) const {
    CyclicWord key = std::min(cw, cw.inverse());
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &rwords_[size_t(it->second)];
  }

  const RWord* find_abstract(const AbstractRelator& r) const {
    auto cls = r.canonical_class();
    for (const RWord& rw : rwords_)
      if (rw.abstract.canonical_class() == cls) return &rw;
    return nullptr;
  }

 private:
  std::vector<RWord> rwords_;
  int bound_ = 0;
  std::map<CyclicWord, int> index_;
};

inline RelatorSet build_relator_set(const FiniteGroup& G,
                                    const EmbeddingMap& map, int k) {
  auto abstracts = enumerate_abstract_relators(G, k);
  std::vector<RWord> rendered;
  rendered.reserve(abstracts.size());
  std::map<CyclicWord, bool> seen;
  for (const AbstractRelator& r : abstracts) {
    RWord rw = render_relator(r, map);
    if (seen.emplace(rw.canonical_class, true).second)
      rendered.push_back(std::move(rw));
  }
  return RelatorSet(std::move(rendered), k);
}

}  // namespace gembed
