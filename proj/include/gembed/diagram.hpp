#pragma once

// Van Kampen disc diagrams as oriented combinatorial maps: darts carry face
// membership and in-face linkage, faces are R-cells, 0-cells or the outer
// face, vertices live in a union-find.  Planarity is enforced by the Euler
// count V - E + F = 2 over the validated map.
//
// Diagrams are built from Dehn traces by laying out one lollipop per step
// around a base vertex (the word equals the product of conjugated relator
// rotations that the trace certifies) and folding adjacent inverse boundary
// letters until the contour reads the input word.  A fold that would glue a
// cell to itself inserts a two-sided 0-cell instead, keeping every cell an
// embedded disc.

#include <functional>
#include <set>

#include "gembed/small_cancellation.hpp"

namespace gembed {

class Diagram {
 public:
  enum class FaceKind { Outer, RCell, ZeroCell, Hole };
  static constexpr int kNoLabel = -1;

  struct Dart {
    int twin = -1;
    int face = -1;
    int next = -1, prev = -1;
    int tail = -1, head = -1;  // union-find vertex ids
    int label = kNoLabel;      // 0..3, or kNoLabel for a 0-edge
    bool alive = false;
  };

  struct Face {
    FaceKind kind = FaceKind::Outer;
    int any_dart = -1;  // -1 only for the dartless outer face
    bool alive = false;
    std::shared_ptr<const RWord> relator;  // RCell provenance
    int rot = 0;                           // face word = rotation of the
    bool inverted = false;                 // (possibly inverted) rendering
  };

  std::vector<Dart> darts;
  std::vector<Face> faces;
  int outer_face = -1;
  int base_dart = -1;  // start of the boundary word; -1 when boundary empty

  // -- vertices ---------------------------------------------------------

  int new_vertex() {
    vparent_.push_back(int(vparent_.size()));
    return int(vparent_.size()) - 1;
  }

  int find_vertex(int v) const {
    while (vparent_[size_t(v)] != v) v = vparent_[size_t(v)];
    return v;
  }

  void union_vertices(int a, int b) {
    a = find_vertex(a);
    b = find_vertex(b);
    if (a != b) vparent_[size_t(std::max(a, b))] = std::min(a, b);
  }

  // -- construction primitives -------------------------------------------

  int alloc_dart() {
    darts.push_back(Dart{});
    darts.back().alive = true;
    return int(darts.size()) - 1;
  }

  // New edge u -> v; returns the dart u -> v, its twin is v -> u.
  int add_edge(int u, int v, int label) {
    int d = alloc_dart();
    int t = alloc_dart();
    darts[size_t(d)].twin = t;
    darts[size_t(d)].tail = u;
    darts[size_t(d)].head = v;
    darts[size_t(d)].label = label;
    darts[size_t(t)].twin = d;
    darts[size_t(t)].tail = v;
    darts[size_t(t)].head = u;
    darts[size_t(t)].label =
        label == kNoLabel ? kNoLabel : int(inverse(Letter(label)));
    return d;
  }

  int make_face(FaceKind kind, const std::vector<int>& cycle,
                std::shared_ptr<const RWord> relator = nullptr) {
    int f = int(faces.size());
    faces.push_back(Face{kind, cycle.empty() ? -1 : cycle.front(), true,
                         std::move(relator), 0, false});
    for (size_t i = 0; i < cycle.size(); ++i) {
      int d = cycle[i];
      int nx = cycle[(i + 1) % cycle.size()];
      darts[size_t(d)].face = f;
      darts[size_t(d)].next = nx;
      darts[size_t(nx)].prev = d;
    }
    return f;
  }

  // Relinks an existing face to a new dart cycle.
  void relink_face(int f, const std::vector<int>& cycle) {
    faces[size_t(f)].any_dart = cycle.empty() ? -1 : cycle.front();
    for (size_t i = 0; i < cycle.size(); ++i) {
      int d = cycle[i];
      int nx = cycle[(i + 1) % cycle.size()];
      darts[size_t(d)].face = f;
      darts[size_t(d)].next = nx;
      darts[size_t(nx)].prev = d;
    }
  }

  // -- traversal ----------------------------------------------------------

  std::vector<int> face_cycle(int f) const {
    std::vector<int> out;
    int start = faces[size_t(f)].any_dart;
    if (start < 0) return out;
    int d = start;
    do {
      out.push_back(d);
      d = darts[size_t(d)].next;
    } while (d != start);
    return out;
  }

  Word face_word(int f) const {
    RawWord raw;
    for (int d : face_cycle(f))
      if (darts[size_t(d)].label != kNoLabel)
        raw.push_back(Letter(darts[size_t(d)].label));
    return Word::from_reduced(std::move(raw));
  }

  Word boundary_word() const {
    RawWord raw;
    if (base_dart < 0) return Word{};
    int d = base_dart;
    do {
      if (darts[size_t(d)].label != kNoLabel)
        raw.push_back(Letter(darts[size_t(d)].label));
      d = darts[size_t(d)].next;
    } while (d != base_dart);
    return free_reduce(raw);
  }

  int cell_count() const {
    int n = 0;
    for (const Face& f : faces)
      if (f.alive && f.kind == FaceKind::RCell) ++n;
    return n;
  }

  std::vector<int> cells() const {
    std::vector<int> out;
    for (size_t i = 0; i < faces.size(); ++i)
      if (faces[i].alive && faces[i].kind == FaceKind::RCell)
        out.push_back(int(i));
    return out;
  }

  // Crosses the edge at d, passing through two-sided 0-cells; returns the
  // dart whose face is the true far side.
  int resolve_across(int d) const {
    int t = darts[size_t(d)].twin;
    while (true) {
      const Face& f = faces[size_t(darts[size_t(t)].face)];
      if (f.kind != FaceKind::ZeroCell) return t;
      int other = -1;
      for (int z : face_cycle(darts[size_t(t)].face)) {
        if (z != t && darts[size_t(z)].label != kNoLabel) {
          other = z;
          break;
        }
      }
      if (other < 0) return t;
      t = darts[size_t(other)].twin;
    }
  }

  // -- folding -------------------------------------------------------------

  // Folds face f at adjacent darts d1, d2 = next(d1) with inverse labels.
  // Returns the dart before d1 (for resuming a scan), the dart after d2 via
  // `after_out`, or -1/-1 when the face lost all darts (the face is then
  // deleted).
  int fold_pair(int d1, int* after_out = nullptr) {
    int d2 = darts[size_t(d1)].next;
    int f = darts[size_t(d1)].face;
    int before = darts[size_t(d1)].prev;
    int after = darts[size_t(d2)].next;
    bool face_gone = after == d1;

    auto unlink = [&]() {
      if (face_gone) {
        faces[size_t(f)].alive = false;
        faces[size_t(f)].any_dart = -1;
      } else {
        darts[size_t(before)].next = after;
        darts[size_t(after)].prev = before;
        faces[size_t(f)].any_dart = before;
      }
    };

    if (darts[size_t(d1)].twin == d2) {
      // spike: both sides of the edge lie on this face
      unlink();
      darts[size_t(d1)].alive = false;
      darts[size_t(d2)].alive = false;
      if (after_out) *after_out = face_gone ? -1 : after;
      return face_gone ? -1 : before;
    }

    int t1 = darts[size_t(d1)].twin;
    int t2 = darts[size_t(d2)].twin;
    bool collar = darts[size_t(t1)].face == darts[size_t(t2)].face &&
                  faces[size_t(darts[size_t(t1)].face)].kind == FaceKind::RCell;
    unlink();
    union_vertices(darts[size_t(d1)].tail, darts[size_t(d2)].head);
    darts[size_t(d1)].alive = false;
    darts[size_t(d2)].alive = false;
    if (collar) {
      // keep the cell an embedded disc: a two-sided 0-cell between the sides
      int a = find_vertex(darts[size_t(d1)].tail);
      int b = find_vertex(darts[size_t(d1)].head);
      int z1 = alloc_dart();
      int z2 = alloc_dart();
      darts[size_t(z1)].twin = t1;
      darts[size_t(t1)].twin = z1;
      darts[size_t(z1)].tail = a;
      darts[size_t(z1)].head = b;
      darts[size_t(z1)].label = darts[size_t(d1)].label;
      darts[size_t(z2)].twin = t2;
      darts[size_t(t2)].twin = z2;
      darts[size_t(z2)].tail = b;
      darts[size_t(z2)].head = a;
      darts[size_t(z2)].label = darts[size_t(d2)].label;
      make_face(FaceKind::ZeroCell, {z1, z2});
    } else {
      darts[size_t(t1)].twin = t2;
      darts[size_t(t2)].twin = t1;
    }
    if (after_out) *after_out = face_gone ? -1 : after;
    return face_gone ? -1 : before;
  }

  // Folds a face until no adjacent inverse labels remain.  When anchor_io is
  // given, folding is linear: the pair wrapping around *anchor_io is left
  // alone, and the anchor is tracked as folds consume it.  Returns whether
  // the face is still alive.
  bool fold_face(int f, int* anchor_io = nullptr) {
    long long quiet = 0;
    const long long quiet_bound = 2 * (long long)(darts.size()) + 8;
    int anchor = anchor_io ? *anchor_io : -1;
    int d = anchor >= 0 ? anchor : faces[size_t(f)].any_dart;
    if (d < 0) return faces[size_t(f)].alive;
    while (true) {
      if (!faces[size_t(f)].alive) break;
      int nx = darts[size_t(d)].next;
      bool wraps = anchor >= 0 && nx == anchor;
      bool foldable = !wraps && nx != d &&
                      darts[size_t(d)].label != kNoLabel &&
                      darts[size_t(nx)].label != kNoLabel &&
                      Letter(darts[size_t(nx)].label) ==
                          inverse(Letter(darts[size_t(d)].label));
      if (foldable) {
        bool d_was_anchor = d == anchor;
        int after = -1;
        int cont = fold_pair(d, &after);
        quiet = 0;
        if (cont < 0) {
          if (anchor_io) *anchor_io = -1;
          return false;
        }
        if (anchor >= 0 && d_was_anchor) anchor = after;
        d = anchor >= 0 && d_was_anchor ? anchor : cont;
        continue;
      }
      d = nx;
      if (++quiet > quiet_bound) break;
      if (anchor >= 0 && d == anchor) break;  // completed a linear pass
    }
    if (anchor_io) *anchor_io = anchor;
    return faces[size_t(f)].alive;
  }

  // -- validation ------------------------------------------------------------

  void validate() const {
    if (outer_face < 0 || !faces[size_t(outer_face)].alive ||
        faces[size_t(outer_face)].kind != FaceKind::Outer)
      throw data_integrity_error("diagram: missing outer face");
    int outer_count = 0;
    for (const Face& f : faces)
      if (f.alive && f.kind == FaceKind::Outer) ++outer_count;
    if (outer_count != 1)
      throw data_integrity_error("diagram: expected exactly one outer face");

    std::set<int> seen;
    std::set<int> verts;
    int live_faces = 0;
    for (size_t fi = 0; fi < faces.size(); ++fi) {
      const Face& f = faces[fi];
      if (!f.alive) continue;
      ++live_faces;
      for (int d : face_cycle(int(fi))) {
        const Dart& dd = darts[size_t(d)];
        if (!dd.alive) throw data_integrity_error("diagram: dead dart in face");
        if (dd.face != int(fi))
          throw data_integrity_error("diagram: dart face mismatch");
        if (!seen.insert(d).second)
          throw data_integrity_error("diagram: dart in two faces");
        const Dart& tw = darts[size_t(dd.twin)];
        if (!tw.alive || tw.twin != d)
          throw data_integrity_error("diagram: twin inconsistency");
        bool both_zero = dd.label == kNoLabel && tw.label == kNoLabel;
        bool inverse_ok = dd.label != kNoLabel && tw.label != kNoLabel &&
                          Letter(tw.label) == inverse(Letter(dd.label));
        if (!both_zero && !inverse_ok)
          throw data_integrity_error("diagram: twin labels not inverse");
        if (find_vertex(dd.head) != find_vertex(darts[size_t(dd.next)].tail))
          throw data_integrity_error("diagram: face cycle not vertex-consistent");
        if (find_vertex(tw.tail) != find_vertex(dd.head) ||
            find_vertex(tw.head) != find_vertex(dd.tail))
          throw data_integrity_error("diagram: twin endpoints mismatch");
        verts.insert(find_vertex(dd.tail));
        verts.insert(find_vertex(dd.head));
      }
    }
    for (size_t di = 0; di < darts.size(); ++di)
      if (darts[di].alive && !seen.count(int(di)))
        throw data_integrity_error("diagram: alive dart outside all faces");
    long long E = static_cast<long long>(seen.size()) / 2;
    long long V = verts.empty() ? 1 : static_cast<long long>(verts.size());
    long long F = live_faces;
    if (V - E + F != 2)
      throw data_integrity_error("diagram: Euler count V-E+F = " +
                                 std::to_string(V - E + F) + " (V=" +
                                 std::to_string(V) + " E=" + std::to_string(E) +
                                 " F=" + std::to_string(F) + ")");

    for (size_t fi = 0; fi < faces.size(); ++fi) {
      const Face& f = faces[fi];
      if (!f.alive) continue;
      if (f.kind == FaceKind::RCell) {
        if (!f.relator)
          throw data_integrity_error("diagram: cell without relator");
        Word w = face_word(int(fi));
        Word expect = rotation_of(f.relator->oriented_word(f.inverted ? -1 : 1),
                                  f.rot);
        if (w != expect)
          throw data_integrity_error(
              "diagram: cell label does not match its relator rotation");
      } else if (f.kind == FaceKind::ZeroCell) {
        int real = 0;
        Letter la = 0, lb = 0;
        for (int d : face_cycle(int(fi))) {
          if (darts[size_t(d)].label != kNoLabel) {
            (real == 0 ? la : lb) = Letter(darts[size_t(d)].label);
            ++real;
          }
        }
        if (real != 0 && !(real == 2 && lb == inverse(la)))
          throw data_integrity_error("diagram: malformed 0-cell");
      } else if (f.kind == FaceKind::Hole) {
        throw data_integrity_error("diagram: unfinished surgery (hole face)");
      }
    }
    if (live_faces > 1) {
      std::set<int> comp{outer_face};
      std::vector<int> stack{outer_face};
      while (!stack.empty()) {
        int f = stack.back();
        stack.pop_back();
        for (int d : face_cycle(f)) {
          int g = darts[size_t(darts[size_t(d)].twin)].face;
          if (comp.insert(g).second) stack.push_back(g);
        }
      }
      if (int(comp.size()) != live_faces)
        throw data_integrity_error("diagram: not connected");
    }
  }

  static Word rotation_of(const Word& w, int rot) {
    const int n = w.size();
    RawWord out;
    out.reserve(size_t(n));
    for (int i = 0; i < n; ++i) out.push_back(w[(rot + i) % n]);
    return Word::from_reduced(std::move(out));
  }

  // Locates `w` among the rotations of the relator rendering or its inverse
  // and stores the result on the face; throws when it is not a rotation.
  void set_cell_provenance(int f, std::shared_ptr<const RWord> rw) {
    Word w = face_word(f);
    for (int ori : {1, -1}) {
      Word nat = rw->oriented_word(ori);
      if (nat.size() != w.size()) break;
      for (int r = 0; r < std::max(1, nat.size()); ++r) {
        if (rotation_of(nat, r) == w) {
          faces[size_t(f)].kind = FaceKind::RCell;
          faces[size_t(f)].relator = rw;
          faces[size_t(f)].rot = r;
          faces[size_t(f)].inverted = ori < 0;
          return;
        }
      }
    }
    throw data_integrity_error(
        "diagram: face label is not a rotation of the relator");
  }

 private:
  std::vector<int> vparent_;
};

// ---------------------------------------------------------------------------
// Cell views: reduced contours, entire vertices, junction metadata.

struct EntireVertex {
  int face_pos = 0;   // position in the cell's real-letter reading
  int syllable = 0;   // oriented syllable index
  int dart = -1;      // the dart leaving the entire vertex
  int vertex = -1;    // diagram vertex (union-find root)
};

struct CellView {
  int face = -1;
  Word reduced_contour;               // the cell's own boundary word
  long long full_contour_blocks = 0;  // sum of untrimmed block lengths
  std::vector<EntireVertex> entire;
  std::vector<int> junction_losses;
};

inline CellView cell_view(const Diagram& dia, int f) {
  const auto& face = dia.faces[size_t(f)];
  if (face.kind != Diagram::FaceKind::RCell || !face.relator)
    throw std::invalid_argument("cell_view: not an R-cell");
  CellView cv;
  cv.face = f;
  cv.reduced_contour = dia.face_word(f);
  cv.junction_losses = face.relator->junction_losses;
  const RWord& rw = *face.relator;
  const int n = rw.rendered.size();
  int ori = face.inverted ? -1 : 1;
  auto entire = rw.oriented_entire(ori);
  // face position q reads oriented position (rot + q) mod n
  std::vector<int> cycle = dia.face_cycle(f);
  // positions of real darts
  std::vector<int> real;
  for (int d : cycle)
    if (dia.darts[size_t(d)].label != Diagram::kNoLabel) real.push_back(d);
  if (int(real.size()) != n)
    throw data_integrity_error("cell_view: contour length mismatch");
  for (int s = 0; s < int(entire.size()); ++s) {
    int q = ((entire[size_t(s)] - face.rot) % n + n) % n;
    EntireVertex ev;
    ev.face_pos = q;
    ev.syllable = s;
    ev.dart = real[size_t(q)];
    ev.vertex = dia.find_vertex(dia.darts[size_t(ev.dart)].tail);
    cv.entire.push_back(ev);
  }
  std::sort(cv.entire.begin(), cv.entire.end(),
            [](const EntireVertex& a, const EntireVertex& b) {
              return a.face_pos < b.face_pos;
            });
  return cv;
}

// Variant that also fills the untrimmed block-length sum of the full
// contour, which needs the code lengths.
inline CellView cell_view(const Diagram& dia, int f, const EmbeddingMap& map) {
  CellView cv = cell_view(dia, f);
  cv.full_contour_blocks =
      dia.faces[size_t(f)].relator->block_length_sum(map);
  return cv;
}

// ---------------------------------------------------------------------------
// Construction from a Dehn trace.

namespace detail {

struct ExprItem;
using Expr = std::vector<ExprItem>;

struct ExprItem {
  Word label;       // bridge label (may be empty)
  Expr inner;       // wrapped content
  std::shared_ptr<const RWord> relator;  // set for a cell loop
  Word cell_word;   // contour reading of the loop
  bool cell_inverted = false;
  int cell_rot = 0;  // cell face word = rotation of oriented rendering
};

inline void build_expr_into(Diagram& dia, const Expr& items, int at_vertex,
                            std::vector<int>& contour) {
  for (const ExprItem& item : items) {
    if (item.relator) {
      const Word& rho = item.cell_word;
      const int q = rho.size();
      std::vector<int> ring(static_cast<size_t>(q));
      int prev_v = at_vertex;
      for (int i = 0; i < q; ++i) {
        int next_v = i + 1 == q ? at_vertex : dia.new_vertex();
        ring[size_t(i)] = dia.add_edge(prev_v, next_v, rho[i]);
        prev_v = next_v;
      }
      for (int i = 0; i < q; ++i) contour.push_back(ring[size_t(i)]);
      std::vector<int> cellcycle;
      for (int i = q - 1; i >= 0; --i)
        cellcycle.push_back(dia.darts[size_t(ring[size_t(i)])].twin);
      int cf = dia.make_face(Diagram::FaceKind::RCell, cellcycle, item.relator);
      dia.faces[size_t(cf)].inverted = item.cell_inverted;
      dia.faces[size_t(cf)].rot = item.cell_rot;
    } else if (item.label.empty()) {
      build_expr_into(dia, item.inner, at_vertex, contour);
    } else {
      const Word& u = item.label;
      std::vector<int> out;
      int v = at_vertex;
      for (int i = 0; i < u.size(); ++i) {
        int nv = dia.new_vertex();
        out.push_back(dia.add_edge(v, nv, u[i]));
        v = nv;
      }
      for (int d : out) contour.push_back(d);
      build_expr_into(dia, item.inner, v, contour);
      for (auto it = out.rbegin(); it != out.rend(); ++it)
        contour.push_back(dia.darts[size_t(*it)].twin);
    }
  }
}

}  // namespace detail

// Builds a disc diagram with boundary label w from a trivializing trace:
// one R-cell per Dehn step plus bridges for the conjugation bookkeeping,
// folded until the contour reads exactly w.
inline Diagram diagram_from_trace(const Word& w, const DehnTrace& trace) {
  if (trace.input != w)
    throw std::invalid_argument("diagram_from_trace: trace is for another word");
  if (!trace.final_word.empty())
    throw std::invalid_argument("diagram_from_trace: trace does not reach 1");
  replay_trace(w, trace);

  std::vector<Word> before;
  {
    Word cur = w;
    for (const auto& ev : trace.events) {
      before.push_back(cur);
      if (const auto* rot = std::get_if<RotateEvent>(&ev)) {
        cur = cur.subword(rot->offset, cur.size()) * cur.subword(0, rot->offset);
      } else if (const auto* trim = std::get_if<CyclicTrimEvent>(&ev)) {
        cur = trim->conjugator.inverse() * cur * trim->conjugator;
      } else {
        cur = detail::apply_step(cur, std::get<DehnStep>(ev));
      }
    }
  }

  detail::Expr expr;
  for (int t = int(trace.events.size()) - 1; t >= 0; --t) {
    const auto& ev = trace.events[size_t(t)];
    const Word& wb = before[size_t(t)];
    if (const auto* rot = std::get_if<RotateEvent>(&ev)) {
      detail::ExprItem wrap;
      wrap.label = wb.subword(0, rot->offset);
      wrap.inner = std::move(expr);
      expr.clear();
      expr.push_back(std::move(wrap));
    } else if (const auto* trim = std::get_if<CyclicTrimEvent>(&ev)) {
      detail::ExprItem wrap;
      wrap.label = trim->conjugator;
      wrap.inner = std::move(expr);
      expr.clear();
      expr.push_back(std::move(wrap));
    } else {
      const auto& st = std::get<DehnStep>(ev);
      Word s = wb.subword(st.pos + st.arc_len, wb.size());
      detail::ExprItem item;
      item.label = s.inverse();
      detail::ExprItem cell;
      cell.relator = st.relator;
      const int n = st.relator->rendered.size();
      // contour reads c . m; the cell face reads its inverse
      int rot_cm = (st.rot + st.arc_len) % n;
      cell.cell_word = Diagram::rotation_of(st.oriented_word(), rot_cm);
      if (cell.cell_word.size() != n)
        throw data_integrity_error("diagram: degenerate cell rotation");
      cell.cell_inverted = !st.inverted;
      cell.cell_rot = (n - rot_cm) % n;
      item.inner.push_back(std::move(cell));
      expr.push_back(std::move(item));
    }
  }

  Diagram dia;
  int base = dia.new_vertex();
  std::vector<int> contour;
  detail::build_expr_into(dia, expr, base, contour);
  int outer = dia.make_face(Diagram::FaceKind::Outer, contour);
  dia.outer_face = outer;
  dia.base_dart = contour.empty() ? -1 : contour.front();

  if (!contour.empty()) {
    int anchor = dia.base_dart;
    bool alive = dia.fold_face(outer, &anchor);
    if (!alive) {
      dia.faces[size_t(outer)].alive = true;
      dia.faces[size_t(outer)].any_dart = -1;
      dia.base_dart = -1;
      if (!w.empty())
        throw data_integrity_error("diagram: boundary vanished for nonempty word");
    } else {
      dia.base_dart = anchor;
      if (dia.boundary_word() != w)
        throw data_integrity_error(
            "diagram: folded boundary does not read the input word");
    }
  } else if (!w.empty()) {
    throw data_integrity_error("diagram: empty contour for nonempty word");
  }
  dia.validate();
  return dia;
}

}  // namespace gembed
