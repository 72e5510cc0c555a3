#pragma once

// Overlap analysis over the symmetrized relator system and the Dehn-style
// word problem solver.
//
// Matching supports two routes.  The materialized route indexes the rendered
// relators of the generated set directly (doubling each string to expose
// cyclic arcs) and refuses words beyond the generated syllable horizon.  The
// virtual route works at the block level: occurrences of code blocks in the
// word are assembled into syllable chains, each chain is completed to the
// cheapest vanishing relator containing it, and the completion is rendered
// and verified letter-exactly.  Any arc covering more than the Greendlinger
// fraction of its cell is found this way without materializing the relator
// inventory, because a completion with a smaller rendering can only make the
// threshold easier than the relator the arc came from.

#include <memory>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

#include "gembed/relators.hpp"
#include "gembed/suffix_automaton.hpp"

namespace gembed {

struct SCConstants {
  Ratio lambda_star{1, 100};
  Ratio piece_bound{5, 100};
  Ratio greendlinger{85, 100};
  Ratio inner_fraction{15, 100};
  Ratio arc_bound{55, 100};
  Ratio quasi{25, 100};
};

// 1 - 3 * piece_bound == greendlinger
static_assert(100 - 3 * 5 == 85);

// One Dehn rewriting step: the subword [pos, pos+arc_len) of the current
// word matched a rotation of a relator (or of its inverse) covering more
// than the Greendlinger fraction of it, and was replaced by the inverse of
// the complementary arc.
struct DehnStep {
  int pos = 0;
  int arc_len = 0;
  std::shared_ptr<const RWord> relator;
  bool inverted = false;  // arc read against the inverse of the rendering
  int rot = 0;            // arc start within the oriented cyclic word
  Word replacement;       // inverse of the complement; strictly shorter

  Word oriented_word() const {
    return inverted ? relator->rendered.inverse() : relator->rendered;
  }

  // The relator rotation beginning with the arc: arc . complement.
  Word oriented_rotation() const {
    Word nat = oriented_word();
    const int n = nat.size();
    RawWord out;
    out.reserve(size_t(n));
    for (int i = 0; i < n; ++i) out.push_back(nat[(rot + i) % n]);
    return Word::from_reduced(std::move(out));
  }
};

// Conjugation bookkeeping used when the solver works on the cyclic word.
struct RotateEvent { int offset = 0; };
struct CyclicTrimEvent { Word conjugator; };

using TraceEvent = std::variant<DehnStep, RotateEvent, CyclicTrimEvent>;

struct DehnTrace {
  Word input;
  std::vector<TraceEvent> events;
  Word final_word;

  int step_count() const {
    int n = 0;
    for (const auto& e : events)
      if (std::holds_alternative<DehnStep>(e)) ++n;
    return n;
  }
};

// Replays a trace from `input`, checking every event, and returns the final
// word.  Throws data_integrity_error on any inconsistency.
inline Word replay_trace(const Word& input, const DehnTrace& trace) {
  Word cur = input;
  for (const auto& ev : trace.events) {
    if (const auto* rot = std::get_if<RotateEvent>(&ev)) {
      int r = rot->offset;
      if (r <= 0 || r >= cur.size())
        throw data_integrity_error("trace: bad rotation offset");
      if (cur[0] == inverse(cur[cur.size() - 1]))
        throw data_integrity_error("trace: rotating a non-cyclically-reduced word");
      cur = cur.subword(r, cur.size()) * cur.subword(0, r);
    } else if (const auto* trim = std::get_if<CyclicTrimEvent>(&ev)) {
      auto [core, conj] = cyclic_reduce(cur);
      if (trim->conjugator != conj)
        throw data_integrity_error("trace: conjugator mismatch in cyclic trim");
      cur = conj.inverse() * cur * conj;
      if (cur.size() != core.size())
        throw data_integrity_error("trace: cyclic trim did not reach the core");
    } else {
      const auto& st = std::get<DehnStep>(ev);
      Word rotw = st.oriented_rotation();
      if (st.arc_len <= 0 || st.arc_len > rotw.size() ||
          st.pos < 0 || st.pos + st.arc_len > cur.size())
        throw data_integrity_error("trace: arc out of range");
      if (cur.subword(st.pos, st.pos + st.arc_len) != rotw.subword(0, st.arc_len))
        throw data_integrity_error("trace: arc does not match relator rotation");
      if (st.replacement != rotw.subword(st.arc_len, rotw.size()).inverse())
        throw data_integrity_error("trace: replacement is not the complement");
      Word next = cur.subword(0, st.pos) * st.replacement *
                  cur.subword(st.pos + st.arc_len, cur.size());
      if (next.size() >= cur.size())
        throw data_integrity_error("trace: step does not shorten");
      cur = next;
    }
  }
  if (cur != trace.final_word)
    throw data_integrity_error("trace: final word mismatch");
  return cur;
}

// Smallest bound k such that any relator able to contribute a Greendlinger
// arc to a word of length <= word_len has at most k syllables.
inline int required_syllable_bound(long long word_len, const EmbeddingMap& map) {
  if (word_len < 1)
    throw std::invalid_argument("required_syllable_bound: word_len >= 1");
  long long min_block = map.min_code_len();
  if (min_block <= 0) return 1;
  // arc <= word_len, arc > 0.85 |R'|, |R'| >= 0.98 k min_block
  long long denom = 85LL * 98LL * min_block;  // both fractions scaled by 100
  long long k = (word_len * 10000 + denom - 1) / denom;
  return int(k) + 1;
}

class Presentation {
 public:
  Presentation(EmbeddingMap map, RelatorSet set, bool virtual_matching = true)
      : map_(std::move(map)), set_(std::move(set)), virtual_(virtual_matching) {
    for (int g : map_.coded_elements()) {
      for (int sign : {1, -1}) {
        CodeRef ref;
        ref.f = Factor{g, sign};
        ref.word = map_.block(ref.f);
        ref.sam = std::make_shared<SuffixAutomaton>(ref.word);
        codes_.push_back(std::move(ref));
      }
    }
  }

  const EmbeddingMap& embedding() const { return map_; }
  const RelatorSet& relators() const { return set_; }
  bool virtual_matching() const { return virtual_; }
  const SCConstants& constants() const { return constants_; }

  // Rendering cache keyed by the exact syllable sequence, so candidate
  // relators are rendered once per rotation across all solver calls.
  std::shared_ptr<const RWord> render_cached(const AbstractRelator& r) const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = render_cache_.find(r.syllables);
    if (it != render_cache_.end()) return it->second;
    auto rw = std::make_shared<RWord>(render_relator(r, map_));
    render_cache_.emplace(r.syllables, rw);
    return rw;
  }

  struct CodeRef {
    Factor f;
    Word word;
    std::shared_ptr<SuffixAutomaton> sam;
  };
  std::span<const CodeRef> codes() const { return codes_; }

 private:
  EmbeddingMap map_;
  RelatorSet set_;
  bool virtual_ = true;
  SCConstants constants_;
  std::vector<CodeRef> codes_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::vector<Factor>, std::shared_ptr<const RWord>>
      render_cache_;
};

namespace detail {

struct ArcCandidate {
  int start = 0;
  int len = 0;
  std::shared_ptr<const RWord> relator;
  bool inverted = false;
  int rot = 0;
  CyclicWord class_key;

  bool better_than(const ArcCandidate& o) const {
    if (start != o.start) return start < o.start;
    if (len != o.len) return len > o.len;
    if (class_key != o.class_key) return class_key < o.class_key;
    if (inverted != o.inverted) return !inverted;
    return rot < o.rot;
  }
};

inline int lce_forward(std::span<const Letter> w, int i,
                       std::span<const Letter> cyc, int j, int cap) {
  const int n = int(cyc.size());
  int t = 0;
  while (t < cap && i + t < int(w.size()) &&
         w[size_t(i + t)] == cyc[size_t((j + t) % n)])
    ++t;
  return t;
}

inline int lce_backward(std::span<const Letter> w, int i,
                        std::span<const Letter> cyc, int j, int cap) {
  const int n = int(cyc.size());
  int t = 0;
  while (t < cap && i - 1 - t >= 0 &&
         w[size_t(i - 1 - t)] == cyc[size_t(((j - 1 - t) % n + n) % n)])
    ++t;
  return t;
}

struct Anchor {
  int wstart = 0, wend = 0;        // matched interval in the scanned word
  int code_idx = -1;               // index into Presentation::codes()
  int code_start = 0, code_end = 0;
  bool near_full = false;
};

// Near-full and long-partial occurrences of oriented code blocks in `scan`.
inline std::vector<Anchor> find_anchors(const Presentation& p,
                                        std::span<const Letter> scan) {
  std::vector<Anchor> anchors;
  auto codes = p.codes();
  const Ratio lambda = p.embedding().lambda();
  for (size_t ci = 0; ci < codes.size(); ++ci) {
    const auto& cr = codes[ci];
    const int clen = cr.word.size();
    const int near_full = clen - 2 * int(floor_scaled(lambda, clen));
    const int partial = std::max(2, clen / 2);
    std::vector<std::pair<int, int>> maximal;  // (end index, len)
    int prev_len = 0;
    cr.sam->scan(scan, [&](int j, int len, int) {
      if (prev_len >= partial && len <= prev_len)
        maximal.emplace_back(j - 1, prev_len);
      prev_len = len;
    });
    if (prev_len >= partial)
      maximal.emplace_back(int(scan.size()) - 1, prev_len);
    for (auto [j, len] : maximal) {
      int v = 0;
      for (int t = j - len + 1; t <= j; ++t) {
        v = cr.sam->state(v).next[scan[size_t(t)]];
        if (v < 0) break;
      }
      if (v <= 0) continue;
      Anchor a;
      a.wstart = j - len + 1;
      a.wend = j + 1;
      a.code_idx = int(ci);
      a.code_end = cr.sam->state(v).firstpos + 1;
      a.code_start = a.code_end - len;
      a.near_full = len >= near_full;
      anchors.push_back(a);
    }
  }
  std::sort(anchors.begin(), anchors.end(), [](const Anchor& a, const Anchor& b) {
    if (a.wstart != b.wstart) return a.wstart < b.wstart;
    if (a.wend != b.wend) return a.wend > b.wend;
    return a.code_idx < b.code_idx;
  });
  return anchors;
}

inline bool factors_clash(const Factor& a, const Factor& b) {
  return a.g == b.g && a.sign == -b.sign;
}

// Completions of sigma to a cyclically reduced vanishing word using at most
// two extra syllables, cheapest block content first.  Only completions whose
// block sum is within the junction-trim wiggle of the cheapest are returned;
// anything costlier cannot win the threshold comparison.
inline std::vector<std::vector<Factor>> completions(const FiniteGroup& G,
                                                    const EmbeddingMap& map,
                                                    std::span<const Factor> sigma) {
  std::vector<std::vector<Factor>> out;
  if (sigma.empty()) return out;
  const int q = evaluate_in_G(sigma, G);
  const Factor first = sigma.front();
  const Factor last = sigma.back();
  if (q == G.identity && !factors_clash(last, first)) out.push_back({});
  auto try_tau = [&](std::vector<Factor> tau) {
    if (evaluate_in_G(tau, G) != G.inverse(q)) return;
    if (factors_clash(last, tau.front())) return;
    if (factors_clash(tau.back(), first)) return;
    for (size_t i = 0; i + 1 < tau.size(); ++i)
      if (factors_clash(tau[i], tau[i + 1])) return;
    out.push_back(std::move(tau));
  };
  for (int g = 0; g < G.order; ++g) {
    if (g == G.identity) continue;
    for (int s : {1, -1}) try_tau({Factor{g, s}});
  }
  for (int g = 0; g < G.order; ++g) {
    if (g == G.identity) continue;
    for (int sg : {1, -1})
      for (int h = 0; h < G.order; ++h) {
        if (h == G.identity) continue;
        for (int sh : {1, -1}) try_tau({Factor{g, sg}, Factor{h, sh}});
      }
  }
  auto blocksum = [&](const std::vector<Factor>& tau) {
    long long s = 0;
    for (const Factor& f : tau) s += map.code(f.g).size();
    return s;
  };
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    long long sa = blocksum(a), sb = blocksum(b);
    if (sa != sb) return sa < sb;
    return a < b;
  });
  if (!out.empty()) {
    long long wiggle = 8 * floor_scaled(map.lambda(), map.max_code_len()) + 8;
    long long cutoff = blocksum(out.front()) + wiggle;
    while (!out.empty() && blocksum(out.back()) > cutoff) out.pop_back();
  }
  return out;
}

// Block-level candidate search.  `scan` is the word, or the doubled word for
// cyclic matching; candidate arcs must start before `start_limit` and have
// length at most `max_arc`.
inline std::optional<ArcCandidate> best_virtual_match(const Presentation& p,
                                                      std::span<const Letter> scan,
                                                      int start_limit,
                                                      int max_arc) {
  const auto& G = p.embedding().group();
  const auto& map = p.embedding();
  const Ratio greendlinger = p.constants().greendlinger;
  auto anchors = find_anchors(p, scan);
  if (anchors.empty()) return std::nullopt;
  auto codes = p.codes();

  // chains of adjacent near-full anchors
  std::vector<std::vector<int>> chains;
  {
    std::vector<int> cur;
    for (size_t ai = 0; ai < anchors.size(); ++ai) {
      const Anchor& a = anchors[ai];
      if (!a.near_full) continue;
      if (!cur.empty()) {
        const Anchor& prev = anchors[size_t(cur.back())];
        long long slack =
            floor_scaled(map.lambda(), codes[size_t(prev.code_idx)].word.size()) +
            floor_scaled(map.lambda(), codes[size_t(a.code_idx)].word.size()) + 2;
        bool adjacent = a.wstart >= prev.wend - slack &&
                        a.wstart <= prev.wend + slack && a.wstart > prev.wstart;
        bool clash = factors_clash(codes[size_t(prev.code_idx)].f,
                                   codes[size_t(a.code_idx)].f);
        if (!adjacent || clash) {
          chains.push_back(cur);
          cur.clear();
        }
      }
      cur.push_back(int(ai));
    }
    if (!cur.empty()) chains.push_back(cur);
  }
  // lone partial anchors: arcs living inside a single block
  for (size_t ai = 0; ai < anchors.size(); ++ai)
    if (!anchors[ai].near_full) chains.push_back({int(ai)});

  const long long max_code = map.max_code_len();
  std::optional<ArcCandidate> best;

  auto consider = [&](std::span<const Factor> sigma, const Anchor& anchor0,
                      int anchor0_syllable) {
    for (const auto& tau : completions(G, map, sigma)) {
      std::vector<Factor> abs_syll(sigma.begin(), sigma.end());
      abs_syll.insert(abs_syll.end(), tau.begin(), tau.end());
      AbstractRelator abs{abs_syll};
      if (!abs.cyclically_reduced()) continue;
      std::shared_ptr<const RWord> rw;
      try {
        rw = p.render_cached(abs);
      } catch (const std::exception&) {
        continue;
      }
      const Word& rend = rw->rendered;
      const int n = rend.size();
      const int k = abs.size();
      // align anchor0's code positions with the rendering
      int left_trim = rw->junction_losses[size_t((anchor0_syllable + k - 1) % k)];
      int e0 = rw->entire_positions[size_t(anchor0_syllable)];
      int p_ref = std::max(anchor0.code_start, left_trim);
      if (p_ref >= anchor0.code_end) continue;
      int r_ref = e0 + (p_ref - left_trim);
      if (r_ref < 0 || r_ref >= n) continue;
      int wanchor = anchor0.wstart + (p_ref - anchor0.code_start);
      auto rend_span = rend.letters();
      if (wanchor >= int(scan.size())) continue;
      if (scan[size_t(wanchor)] != rend_span[size_t(r_ref)]) continue;
      int f = lce_forward(scan, wanchor, rend_span, r_ref, n + 1);
      int b = lce_backward(scan, wanchor, rend_span, r_ref, n + 1);
      int arc_len = std::min({b + f, n, max_arc});
      int arc_start = wanchor - b;
      if (arc_start >= start_limit) continue;
      if (!gt_scaled(arc_len, greendlinger, n)) continue;
      ArcCandidate cand;
      cand.start = arc_start;
      cand.len = arc_len;
      cand.relator = rw;
      cand.inverted = false;
      cand.rot = ((r_ref - b) % n + n) % n;
      cand.class_key = rw->canonical_class;
      if (!best || cand.better_than(*best)) best = cand;
    }
  };

  for (const auto& chain : chains) {
    const int m = int(chain.size());
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        std::vector<Factor> sigma;
        long long blocksum = 0;
        for (int t = i; t <= j; ++t) {
          const Anchor& a = anchors[size_t(chain[size_t(t)])];
          sigma.push_back(codes[size_t(a.code_idx)].f);
          blocksum += codes[size_t(a.code_idx)].word.size();
        }
        const Anchor& a_first = anchors[size_t(chain[size_t(i)])];
        const Anchor& a_last = anchors[size_t(chain[size_t(j)])];
        long long span = a_last.wend - a_first.wstart;
        long long opt = span + 2 * max_code + 8;
        if (10000 * opt <= 8330 * blocksum) continue;
        consider(sigma, a_first, 0);
        // the arc may cover slivers of neighbouring relator blocks that are
        // too short to anchor; guess those end blocks explicitly
        for (size_t ce = 0; ce <= codes.size(); ++ce) {
          bool has_left = ce < codes.size();
          if (has_left && factors_clash(codes[ce].f, sigma.front())) continue;
          for (size_t cf = 0; cf <= codes.size(); ++cf) {
            bool has_right = cf < codes.size();
            if (!has_left && !has_right) continue;
            if (has_right && factors_clash(sigma.back(), codes[cf].f)) continue;
            std::vector<Factor> ext;
            long long bs = blocksum;
            if (has_left) {
              ext.push_back(codes[ce].f);
              bs += codes[ce].word.size();
            }
            ext.insert(ext.end(), sigma.begin(), sigma.end());
            if (has_right) {
              ext.push_back(codes[cf].f);
              bs += codes[cf].word.size();
            }
            if (10000 * opt <= 8330 * bs) continue;
            consider(ext, a_first, has_left ? 1 : 0);
          }
        }
      }
    }
  }
  return best;
}

// Direct search over the generated relator set, doubling each rendering.
inline std::optional<ArcCandidate> best_materialized_match(
    const Presentation& p, std::span<const Letter> scan, int start_limit,
    int max_arc) {
  const Ratio greendlinger = p.constants().greendlinger;
  std::optional<ArcCandidate> best;
  for (int idx = 0; idx < p.relators().size(); ++idx) {
    const RWord& rw = p.relators()[idx];
    auto rw_ptr = p.render_cached(rw.abstract);
    const int n = rw.rendered.size();
    for (int orient = 0; orient < 2; ++orient) {
      Word nat = orient ? rw.rendered.inverse() : rw.rendered;
      RawWord doubled = nat.raw();
      doubled.insert(doubled.end(), nat.raw().begin(), nat.raw().end());
      SuffixAutomaton sam{std::span<const Letter>(doubled)};
      auto nat_span = nat.letters();
      sam.scan(scan, [&](int j, int len, int state) {
        int l = std::min({len, n, max_arc});
        if (!gt_scaled(l, greendlinger, n)) return;
        int start = j - l + 1;
        if (start >= start_limit) return;
        int end_in_d = sam.state(state).firstpos;
        int start_in_d = end_in_d - len + 1;
        int rot = (((start_in_d + (len - l)) % n) + n) % n;
        if (lce_forward(scan, start, nat_span, rot, l) != l) return;
        ArcCandidate cand;
        cand.start = start;
        cand.len = l;
        cand.relator = rw_ptr;
        cand.inverted = orient == 1;
        cand.rot = rot;
        cand.class_key = rw.canonical_class;
        if (!best || cand.better_than(*best)) best = cand;
      });
    }
  }
  return best;
}

inline std::optional<ArcCandidate> best_match(const Presentation& p,
                                              const Word& w, bool cyclic) {
  if (w.empty()) return std::nullopt;
  RawWord scan = w.raw();
  if (cyclic) scan.insert(scan.end(), w.raw().begin(), w.raw().end());
  std::span<const Letter> span(scan);
  return p.virtual_matching()
             ? best_virtual_match(p, span, w.size(), w.size())
             : best_materialized_match(p, span, w.size(), w.size());
}

inline Word apply_step(const Word& w, const DehnStep& st) {
  return w.subword(0, st.pos) * st.replacement *
         w.subword(st.pos + st.arc_len, w.size());
}

inline DehnStep make_step(const ArcCandidate& c) {
  DehnStep st;
  st.pos = c.start;
  st.arc_len = c.len;
  st.relator = c.relator;
  st.inverted = c.inverted;
  st.rot = c.rot;
  Word rotw = st.oriented_rotation();
  st.replacement = rotw.subword(st.arc_len, rotw.size()).inverse();
  return st;
}

inline void check_generation(const Presentation& p, const Word& w) {
  if (p.virtual_matching() || w.empty()) return;
  int need = required_syllable_bound(w.size(), p.embedding());
  if (p.relators().syllable_bound() < need)
    throw under_generated_error(
        "presentation generated to syllable bound " +
        std::to_string(p.relators().syllable_bound()) +
        " but a word of length " + std::to_string(w.size()) +
        " requires bound " + std::to_string(need));
}

}  // namespace detail

// Deterministic leftmost-longest Dehn reduction on the linear word.
inline std::pair<Word, DehnTrace> dehn_reduce(const Word& w,
                                              const Presentation& p) {
  detail::check_generation(p, w);
  DehnTrace trace;
  trace.input = w;
  Word cur = w;
  while (true) {
    auto cand = detail::best_match(p, cur, /*cyclic=*/false);
    if (!cand) break;
    DehnStep st = detail::make_step(*cand);
    Word next = detail::apply_step(cur, st);
    if (next.size() >= cur.size())
      throw data_integrity_error("dehn step failed to shorten");
    trace.events.emplace_back(std::move(st));
    cur = next;
  }
  trace.final_word = cur;
  return {cur, trace};
}

struct SolveResult {
  bool trivial = false;
  DehnTrace trace;
};

// Full decision procedure: linear Dehn passes interleaved with cyclic
// reduction and base-point rotation, so arcs wrapping the base point are
// found too.  Rotations and trims are recorded as conjugation events.
inline SolveResult solve_word(const Word& w, const Presentation& p) {
  detail::check_generation(p, w);
  SolveResult res;
  res.trace.input = w;
  Word cur = w;
  while (true) {
    while (true) {
      auto cand = detail::best_match(p, cur, /*cyclic=*/false);
      if (!cand) break;
      DehnStep st = detail::make_step(*cand);
      Word next = detail::apply_step(cur, st);
      if (next.size() >= cur.size())
        throw data_integrity_error("dehn step failed to shorten");
      res.trace.events.emplace_back(std::move(st));
      cur = next;
    }
    auto [core, conj] = cyclic_reduce(cur);
    if (!conj.empty()) {
      res.trace.events.emplace_back(CyclicTrimEvent{conj});
      cur = conj.inverse() * cur * conj;
    }
    if (cur.empty()) break;
    auto cand = detail::best_match(p, cur, /*cyclic=*/true);
    if (!cand) break;
    if (cand->start > 0) {
      res.trace.events.emplace_back(RotateEvent{cand->start});
      cur = cur.subword(cand->start, cur.size()) * cur.subword(0, cand->start);
      cand->start = 0;
    }
    DehnStep st = detail::make_step(*cand);
    Word next = detail::apply_step(cur, st);
    if (next.size() >= cur.size())
      throw data_integrity_error("dehn step failed to shorten");
    res.trace.events.emplace_back(std::move(st));
    cur = next;
  }
  res.trace.final_word = cur;
  res.trivial = cur.empty();
  return res;
}

inline bool is_trivial(const Word& w, const Presentation& p) {
  return solve_word(w, p).trivial;
}

struct GeodesicBounds {
  int lower = 0;       // geodesic length >= lower
  int upper = 0;       // witnessed by an equal word of this length
  bool truncated = false;
};

struct SearchBudget {
  int max_len = 4;
  long long max_candidates = 100000;
};

// Exhaustive lower bound plus rewrite upper bound for the geodesic length of
// the element represented by w.
inline GeodesicBounds geodesic_bounds(const Word& w, const Presentation& p,
                                      SearchBudget budget = {}) {
  GeodesicBounds gb;
  gb.upper = std::min(w.size(), dehn_reduce(w, p).first.size());
  if (w.empty()) return gb;
  long long tried = 0;
  bool out_of_budget = false;
  RawWord cand;
  auto search = [&](auto&& self, int target) -> std::optional<Word> {
    if (int(cand.size()) == target) {
      if (++tried > budget.max_candidates) {
        out_of_budget = true;
        return std::nullopt;
      }
      Word c = Word::from_reduced(cand);
      if (is_trivial(w * c.inverse(), p)) return c;
      return std::nullopt;
    }
    for (Letter x = 0; x < kAlphabet; ++x) {
      if (!cand.empty() && cand.back() == inverse(x)) continue;
      if (out_of_budget) return std::nullopt;
      cand.push_back(x);
      auto r = self(self, target);
      cand.pop_back();
      if (r) return r;
    }
    return std::nullopt;
  };
  for (int len = 0; len <= std::min(budget.max_len, gb.upper); ++len) {
    cand.clear();
    auto hit = search(search, len);
    if (hit) {
      gb.lower = len;
      gb.upper = len;
      return gb;
    }
    if (out_of_budget) {
      gb.truncated = true;
      return gb;
    }
    gb.lower = len + 1;
  }
  if (gb.lower > gb.upper) gb.lower = gb.upper;
  if (gb.lower < gb.upper) gb.truncated = true;  // horizon ended early
  return gb;
}

}  // namespace gembed
