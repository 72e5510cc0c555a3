#pragma once

// Compatibility detection, amalgamation surgery and the Greendlinger audit
// on disc diagrams.
//
// Connecting-path search: shared entire vertices and shared boundary arcs
// are checked directly; beyond that, one shortest path per cell pair is
// label-tested, and small diagrams get an exhaustive simple-path sweep.
// The searched path space is finite; a compatible pair whose only witness
// is a long interior path in a large diagram would be missed here, but the
// pipelines that produce our diagrams connect cells either along arcs or
// through short bridges, and the Greendlinger audit names any diagram whose
// reduction stopped early.

#include <deque>

#include "gembed/diagram.hpp"

namespace gembed {

struct CompatiblePair {
  int cell1 = -1, cell2 = -1;
  int o1_syllable = 0, o2_syllable = 0;
  int o1_vertex = -1, o2_vertex = -1;
  Word label;                   // connecting path label, freely reduced
  std::vector<Factor> witness;  // G-word witness for the label
  std::vector<int> path_darts;  // realizing path (may be empty)
};

struct PairSearchOptions {
  int exhaustive_edge_limit = 60;       // full simple-path sweep below this
  long long exhaustive_path_limit = 200000;
};

namespace detail {

inline std::vector<int> cell_real_darts(const Diagram& dia, int f) {
  std::vector<int> real;
  for (int d : dia.face_cycle(f))
    if (dia.darts[size_t(d)].label != Diagram::kNoLabel) real.push_back(d);
  return real;
}

// face position (real-letter index) of each real dart
inline int position_of(const std::vector<int>& real, int dart) {
  for (size_t i = 0; i < real.size(); ++i)
    if (real[i] == dart) return int(i);
  return -1;
}

inline Word walk_label(const Diagram& dia, std::span<const int> path) {
  RawWord raw;
  for (int d : path)
    if (dia.darts[size_t(d)].label != Diagram::kNoLabel)
      raw.push_back(Letter(dia.darts[size_t(d)].label));
  return free_reduce(raw);
}

inline bool path_simple(const Diagram& dia, std::span<const int> path) {
  if (path.empty()) return true;
  std::set<int> seen;
  seen.insert(dia.find_vertex(dia.darts[size_t(path.front())].tail));
  for (int d : path) {
    int h = dia.find_vertex(dia.darts[size_t(d)].head);
    if (!seen.insert(h).second) return false;
  }
  return true;
}

// cyclic face-walk darts from position `from` (inclusive) to `to`
// (exclusive) over the real darts of the cell
inline std::vector<int> boundary_segment(const std::vector<int>& real, int from,
                                         int to) {
  std::vector<int> out;
  const int n = int(real.size());
  int q = ((from % n) + n) % n;
  const int stop = ((to % n) + n) % n;
  while (q != stop && int(out.size()) <= n) {
    out.push_back(real[size_t(q)]);
    q = (q + 1) % n;
  }
  return out;
}

}  // namespace detail

inline std::vector<CompatiblePair> find_compatible_pairs(
    const Diagram& dia, const Presentation& p, PairSearchOptions opts = {}) {
  std::vector<CompatiblePair> out;
  auto cs = dia.cells();
  if (cs.size() < 2) return out;

  std::vector<CellView> views;
  views.reserve(cs.size());
  for (int c : cs) views.push_back(cell_view(dia, c));

  long long alive_edges = 0;
  std::map<int, std::vector<int>> adjacency;  // vertex root -> outgoing darts
  for (size_t di = 0; di < dia.darts.size(); ++di) {
    if (!dia.darts[di].alive) continue;
    ++alive_edges;
    adjacency[dia.find_vertex(dia.darts[di].tail)].push_back(int(di));
  }
  alive_edges /= 2;

  auto try_pair = [&](size_t a, size_t b, CompatiblePair& pair) -> bool {
    const CellView& cv1 = views[a];
    const CellView& cv2 = views[b];
    pair.cell1 = cs[a];
    pair.cell2 = cs[b];
    // shared entire vertices: empty connecting path
    for (const EntireVertex& e1 : cv1.entire) {
      for (const EntireVertex& e2 : cv2.entire) {
        if (e1.vertex == e2.vertex) {
          pair.o1_syllable = e1.syllable;
          pair.o2_syllable = e2.syllable;
          pair.o1_vertex = e1.vertex;
          pair.o2_vertex = e2.vertex;
          pair.label = Word{};
          pair.witness.clear();
          pair.path_darts.clear();
          return true;
        }
      }
    }
    // shared boundary arcs
    auto real1 = detail::cell_real_darts(dia, cs[a]);
    auto real2 = detail::cell_real_darts(dia, cs[b]);
    Word f1 = dia.face_word(cs[a]);
    Word f2 = dia.face_word(cs[b]);
    for (size_t q = 0; q < real1.size(); ++q) {
      int r = dia.resolve_across(real1[q]);
      if (dia.darts[size_t(r)].face != cs[b]) continue;
      int pos1 = int(q);
      int pos_r = detail::position_of(real2, r);
      if (pos_r < 0) continue;
      int pos2 = (pos_r + 1) % std::max(1, int(real2.size()));
      // nearest entire vertex at or before pos1 on cell1
      const EntireVertex* e1 = nullptr;
      for (const auto& ev : cv1.entire)
        if (ev.face_pos <= pos1 && (!e1 || ev.face_pos > e1->face_pos)) e1 = &ev;
      if (!e1) e1 = &cv1.entire.back();
      // nearest entire vertex at or after pos2 on cell2
      const EntireVertex* e2 = nullptr;
      for (const auto& ev : cv2.entire)
        if (ev.face_pos >= pos2 && (!e2 || ev.face_pos < e2->face_pos)) e2 = &ev;
      if (!e2) e2 = &cv2.entire.front();
      auto seg1 = detail::boundary_segment(real1, e1->face_pos, pos1);
      auto seg2 = detail::boundary_segment(real2, pos2, e2->face_pos);
      std::vector<int> path = seg1;
      path.insert(path.end(), seg2.begin(), seg2.end());
      if (!detail::path_simple(dia, path)) continue;
      Word label = detail::walk_label(dia, path);
      auto witness = parse_gword(label, p.embedding());
      if (!witness) continue;
      pair.o1_syllable = e1->syllable;
      pair.o2_syllable = e2->syllable;
      pair.o1_vertex = e1->vertex;
      pair.o2_vertex = e2->vertex;
      pair.label = label;
      pair.witness = *witness;
      pair.path_darts = path;
      return true;
    }
    // one shortest path between the first entire vertices
    {
      int src = cv1.entire.front().vertex;
      int dst = cv2.entire.front().vertex;
      std::map<int, int> parent_dart;  // vertex -> incoming dart
      std::deque<int> queue{src};
      parent_dart[src] = -1;
      while (!queue.empty() && !parent_dart.count(dst)) {
        int v = queue.front();
        queue.pop_front();
        auto it = adjacency.find(v);
        if (it == adjacency.end()) continue;
        for (int di : it->second) {
          int h = dia.find_vertex(dia.darts[size_t(di)].head);
          if (parent_dart.count(h)) continue;
          parent_dart[h] = di;
          queue.push_back(h);
        }
      }
      if (parent_dart.count(dst)) {
        std::vector<int> path;
        int v = dst;
        while (v != src) {
          int d = parent_dart[v];
          path.push_back(d);
          v = dia.find_vertex(dia.darts[size_t(d)].tail);
        }
        std::reverse(path.begin(), path.end());
        Word label = detail::walk_label(dia, path);
        auto witness = parse_gword(label, p.embedding());
        if (witness && detail::path_simple(dia, path)) {
          pair.o1_syllable = cv1.entire.front().syllable;
          pair.o2_syllable = cv2.entire.front().syllable;
          pair.o1_vertex = src;
          pair.o2_vertex = dst;
          pair.label = label;
          pair.witness = *witness;
          pair.path_darts = path;
          return true;
        }
      }
    }
    // exhaustive sweep on small diagrams
    if (alive_edges <= opts.exhaustive_edge_limit) {
      int src = cv1.entire.front().vertex;
      int dst = cv2.entire.front().vertex;
      long long budget = opts.exhaustive_path_limit;
      std::vector<int> path;
      std::set<int> visited{src};
      std::function<bool(int)> dfs = [&](int v) -> bool {
        if (budget-- <= 0) return false;
        if (v == dst && !path.empty()) {
          Word label = detail::walk_label(dia, path);
          if (auto witness = parse_gword(label, p.embedding())) {
            pair.o1_syllable = cv1.entire.front().syllable;
            pair.o2_syllable = cv2.entire.front().syllable;
            pair.o1_vertex = src;
            pair.o2_vertex = dst;
            pair.label = label;
            pair.witness = *witness;
            pair.path_darts = path;
            return true;
          }
          return false;
        }
        auto it = adjacency.find(v);
        if (it == adjacency.end()) return false;
        for (int di : it->second) {
          int h = dia.find_vertex(dia.darts[size_t(di)].head);
          if (visited.count(h)) continue;
          visited.insert(h);
          path.push_back(di);
          if (dfs(h)) return true;
          path.pop_back();
          visited.erase(h);
        }
        return false;
      };
      if (src == dst) {
        // already covered by the shared-vertex case
      } else if (dfs(src)) {
        return true;
      }
    }
    return false;
  };

  for (size_t a = 0; a < cs.size(); ++a) {
    for (size_t b = a + 1; b < cs.size(); ++b) {
      CompatiblePair pair;
      if (try_pair(a, b, pair)) out.push_back(std::move(pair));
    }
  }
  return out;
}

namespace detail {

inline std::vector<Factor> invert_factors(std::span<const Factor> fs) {
  std::vector<Factor> out;
  for (auto it = fs.rbegin(); it != fs.rend(); ++it)
    out.push_back(Factor{it->g, -it->sign});
  return out;
}

// Splits the shared vertex of two cell corners and merges their face cycles
// into the face of c1 (which the caller re-kinds).  The corner of a cell at
// an entire vertex is the dart pair (prev(dout), dout) where dout is the
// dart leaving the vertex along the cell.
inline void splice_at_vertex(Diagram& dia, int c1, int dout1, int c2,
                             int dout2) {
  int din1 = dia.darts[size_t(dout1)].prev;
  int din2 = dia.darts[size_t(dout2)].prev;
  int o = dia.find_vertex(dia.darts[size_t(dout1)].tail);

  // rotation order of incoming darts around o
  std::vector<int> incoming;
  {
    int d = din1;
    do {
      incoming.push_back(d);
      d = dia.darts[size_t(dia.darts[size_t(d)].next)].twin;
    } while (d != din1 && int(incoming.size()) <= int(dia.darts.size()));
  }
  int s = -1;
  for (size_t i = 0; i < incoming.size(); ++i)
    if (incoming[i] == din2) s = int(i);
  if (s < 0)
    throw unsupported_surgery_error(
        "amalgamate: shared vertex corners not in one rotation orbit");

  // After the merge the rotation successor of din1 is twin(dout2), which in
  // the old rotation sits right after din2; so din1 keeps the sector beyond
  // din2 and din2 keeps the sector beyond din1.
  {
    int vA = dia.new_vertex();
    int vB = dia.new_vertex();
    for (size_t i = 0; i < incoming.size(); ++i) {
      int v = (int(i) == 0 || int(i) > s) ? vA : vB;
      int d = incoming[i];
      dia.darts[size_t(d)].head = v;
      dia.darts[size_t(dia.darts[size_t(d)].twin)].tail = v;
    }
  }
  (void)o;

  // merged cycle: c1 from dout1 around to din1, then c2 from dout2 to din2
  dia.darts[size_t(din1)].next = dout2;
  dia.darts[size_t(dout2)].prev = din1;
  dia.darts[size_t(din2)].next = dout1;
  dia.darts[size_t(dout1)].prev = din2;
  dia.faces[size_t(c1)].any_dart = dout1;
  for (int d : dia.face_cycle(c1)) dia.darts[size_t(d)].face = c1;
  dia.faces[size_t(c2)].alive = false;
  dia.faces[size_t(c2)].any_dart = -1;
}

}  // namespace detail

// Replaces the subdiagram spanned by a compatible pair with the single
// amalgamated cell, or removes both cells when the amalgamation is trivial.
// Refuses (under_generated_error) when the amalgamated relator lies outside
// the generated set.
inline void amalgamate(Diagram& dia, const CompatiblePair& pair,
                       const Presentation& p) {
  const int c1 = pair.cell1, c2 = pair.cell2;
  if (c1 == c2 || !dia.faces[size_t(c1)].alive || !dia.faces[size_t(c2)].alive ||
      dia.faces[size_t(c1)].kind != Diagram::FaceKind::RCell ||
      dia.faces[size_t(c2)].kind != Diagram::FaceKind::RCell)
    throw std::invalid_argument("amalgamate: pair does not name two live cells");

  // verify the witness before surgery
  if (!gword_witness_matches(pair.label, pair.witness, p.embedding()))
    throw std::invalid_argument("amalgamate: witness does not match the label");

  // amalgamated abstract relator: q1 . x . q2 . x^-1 at the syllable level
  const auto& face1 = dia.faces[size_t(c1)];
  const auto& face2 = dia.faces[size_t(c2)];
  AbstractRelator a1 = face1.relator->oriented_abstract(face1.inverted ? -1 : 1)
                           .rotation(pair.o1_syllable);
  AbstractRelator a2 = face2.relator->oriented_abstract(face2.inverted ? -1 : 1)
                           .rotation(pair.o2_syllable);
  std::vector<Factor> amalgam = a1.syllables;
  amalgam.insert(amalgam.end(), pair.witness.begin(), pair.witness.end());
  amalgam.insert(amalgam.end(), a2.syllables.begin(), a2.syllables.end());
  auto winv = detail::invert_factors(pair.witness);
  amalgam.insert(amalgam.end(), winv.begin(), winv.end());
  amalgam = cyclic_reduce_syllables(std::move(amalgam));

  std::shared_ptr<const RWord> target;
  if (!amalgam.empty()) {
    if (evaluate_in_G(amalgam, p.embedding().group()) !=
        p.embedding().group().identity)
      throw data_integrity_error("amalgamate: amalgam does not vanish in G");
    const RWord* in_set = p.relators().find_abstract(AbstractRelator{amalgam});
    if (!in_set)
      throw under_generated_error(
          "amalgamate: amalgamated relator (" + std::to_string(amalgam.size()) +
          " syllables) is outside the generated set; regenerate with a larger "
          "syllable bound");
    target = p.render_cached(in_set->abstract);
  }

  // ---- surgery ----
  auto real1 = detail::cell_real_darts(dia, c1);
  std::vector<int> shared;
  for (int d : real1) {
    int t = dia.darts[size_t(d)].twin;
    if (dia.darts[size_t(t)].face == c2) shared.push_back(d);
  }

  if (!shared.empty()) {
    // require one contiguous arc along c1
    auto cyc1 = dia.face_cycle(c1);
    std::set<int> shared_set(shared.begin(), shared.end());
    // rotate cyc1 so it starts outside the arc
    int start = -1;
    for (size_t i = 0; i < cyc1.size(); ++i) {
      bool in_prev = shared_set.count(cyc1[(i + cyc1.size() - 1) % cyc1.size()]);
      bool in_cur = shared_set.count(cyc1[i]);
      if (in_cur && !in_prev) {
        if (start >= 0)
          throw unsupported_surgery_error(
              "amalgamate: cells share more than one arc");
        start = int(i);
      }
    }
    if (start < 0)
      throw unsupported_surgery_error("amalgamate: shared arc is the whole cell");
    // arc darts in order
    std::vector<int> arc;
    for (size_t i = 0; i < cyc1.size(); ++i) {
      int d = cyc1[(size_t(start) + i) % cyc1.size()];
      if (shared_set.count(d))
        arc.push_back(d);
      else
        break;
    }
    if (int(arc.size()) != int(shared.size()))
      throw unsupported_surgery_error("amalgamate: cells share more than one arc");
    // remaining paths
    std::vector<int> rest1;
    for (size_t i = arc.size(); i < cyc1.size(); ++i)
      rest1.push_back(cyc1[(size_t(start) + i) % cyc1.size()]);
    auto cyc2 = dia.face_cycle(c2);
    std::set<int> twin_set;
    for (int d : arc) twin_set.insert(dia.darts[size_t(d)].twin);
    int t_first = dia.darts[size_t(arc.back())].twin;
    int start2 = -1;
    for (size_t i = 0; i < cyc2.size(); ++i)
      if (cyc2[i] == t_first) start2 = int(i);
    if (start2 < 0)
      throw unsupported_surgery_error("amalgamate: inconsistent twin arc");
    std::vector<int> rest2;
    for (size_t i = 0; i < cyc2.size(); ++i) {
      int d = cyc2[(size_t(start2) + i) % cyc2.size()];
      if (twin_set.count(d)) {
        if (i >= arc.size())
          throw unsupported_surgery_error(
              "amalgamate: twin arc not contiguous on the second cell");
        continue;
      }
      rest2.push_back(d);
    }
    for (int d : arc) {
      dia.darts[size_t(d)].alive = false;
      dia.darts[size_t(dia.darts[size_t(d)].twin)].alive = false;
    }
    std::vector<int> hole = rest1;
    hole.insert(hole.end(), rest2.begin(), rest2.end());
    dia.faces[size_t(c2)].alive = false;
    dia.faces[size_t(c2)].any_dart = -1;
    dia.faces[size_t(c1)].kind = Diagram::FaceKind::Hole;
    dia.faces[size_t(c1)].relator = nullptr;
    if (hole.empty()) {
      dia.faces[size_t(c1)].alive = false;
      dia.faces[size_t(c1)].any_dart = -1;
    } else {
      dia.relink_face(c1, hole);
    }
  } else if (pair.path_darts.empty()) {
    // shared entire vertex: splice the two corners
    int dout1 = -1, dout2 = -1;
    for (const EntireVertex& ev : cell_view(dia, c1).entire)
      if (ev.vertex == pair.o1_vertex) dout1 = ev.dart;
    for (const EntireVertex& ev : cell_view(dia, c2).entire)
      if (ev.vertex == pair.o2_vertex) dout2 = ev.dart;
    if (dout1 < 0 || dout2 < 0)
      throw std::invalid_argument("amalgamate: stale pair");
    dia.faces[size_t(c1)].kind = Diagram::FaceKind::Hole;
    dia.faces[size_t(c1)].relator = nullptr;
    detail::splice_at_vertex(dia, c1, dout1, c2, dout2);
  } else {
    throw unsupported_surgery_error(
        "amalgamate: connecting paths through the diagram interior are not "
        "supported (cells neither share an arc nor an entire vertex)");
  }

  // ---- fold the hole shut or into the amalgamated cell ----
  if (dia.faces[size_t(c1)].alive) {
    bool alive = dia.fold_face(c1);
    if (alive) {
      if (!target)
        throw data_integrity_error(
            "amalgamate: trivial amalgam left a nonempty hole");
      dia.set_cell_provenance(c1, target);
    } else if (target) {
      throw data_integrity_error(
          "amalgamate: amalgam expected but the hole closed");
    }
  } else if (target) {
    throw data_integrity_error("amalgamate: amalgam expected but no hole left");
  }
  dia.validate();
}

// Repeated amalgamation until no compatible pair remains.
inline Diagram reduce_diagram(Diagram dia, const Presentation& p,
                              PairSearchOptions opts = {}) {
  while (true) {
    auto pairs = find_compatible_pairs(dia, p, opts);
    if (pairs.empty()) break;
    int before = dia.cell_count();
    amalgamate(dia, pairs.front(), p);
    if (dia.cell_count() >= before)
      throw data_integrity_error("reduce_diagram: cell count did not decrease");
  }
  return dia;
}

// ---------------------------------------------------------------------------

struct GreendlingerAudit {
  int chosen_cell = -1;
  int max_outer_arc = 0;
  int chosen_perimeter = 0;
  long long inner_edges = 0;   // I
  long long sigma = 0;         // sum of reduced perimeters
  bool greendlinger_ok = true; // some cell has an outer arc > 0.85 |contour|
  bool inner_ok = true;        // I < 0.15 sigma
  bool passed() const { return greendlinger_ok && inner_ok; }
};

inline GreendlingerAudit greendlinger_audit(const Diagram& dia) {
  GreendlingerAudit audit;
  auto cs = dia.cells();
  if (cs.empty()) return audit;
  const Ratio greendlinger{85, 100};
  const Ratio inner_frac{15, 100};
  long long inner_darts = 0;
  bool any_cell_ok = false;
  int best_cell = -1, best_arc = 0, best_perim = 1;
  for (int c : cs) {
    auto real = detail::cell_real_darts(dia, c);
    const int n = int(real.size());
    audit.sigma += n;
    std::vector<bool> outer(size_t(n), false);
    for (int q = 0; q < n; ++q) {
      int r = dia.resolve_across(real[size_t(q)]);
      auto kind = dia.faces[size_t(dia.darts[size_t(r)].face)].kind;
      if (kind == Diagram::FaceKind::Outer) outer[size_t(q)] = true;
      if (kind == Diagram::FaceKind::RCell) ++inner_darts;
    }
    int max_run = 0;
    bool all_outer = true;
    for (bool b : outer) all_outer = all_outer && b;
    if (all_outer) {
      max_run = n;
    } else {
      for (int q0 = 0; q0 < n; ++q0) {
        if (outer[size_t(q0)] && !outer[size_t((q0 + n - 1) % n)]) {
          int run = 0;
          while (run < n && outer[size_t((q0 + run) % n)]) ++run;
          max_run = std::max(max_run, run);
        }
      }
    }
    bool cell_ok = gt_scaled(max_run, greendlinger, n);
    any_cell_ok = any_cell_ok || cell_ok;
    if (best_cell < 0 ||
        (long long)(max_run)*best_perim > (long long)(best_arc)*n) {
      best_cell = c;
      best_arc = max_run;
      best_perim = n;
    }
  }
  audit.inner_edges = inner_darts / 2;
  audit.chosen_cell = best_cell;
  audit.max_outer_arc = best_arc;
  audit.chosen_perimeter = best_perim;
  audit.greendlinger_ok = any_cell_ok;
  audit.inner_ok = lt_scaled(audit.inner_edges, inner_frac, audit.sigma);
  return audit;
}

}  // namespace gembed
