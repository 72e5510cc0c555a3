#pragma once

// Finite groups as multiplication tables, plus length functions and their
// axiom checks.

#include <algorithm>
#include <array>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "gembed/common.hpp"

namespace gembed {

struct FiniteGroup {
  int order = 0;
  std::vector<std::string> names;
  std::vector<std::vector<int>> mul;
  std::vector<int> inv;
  int identity = 0;

  int op(int g, int h) const { return mul[size_t(g)][size_t(h)]; }
  int inverse(int g) const { return inv[size_t(g)]; }

  // Table sanity: identity/inverse laws always, associativity exhaustively
  // for orders up to assoc_bound.
  void validate(int assoc_bound = 512) const {
    if (order < 1 || int(mul.size()) != order)
      throw std::invalid_argument("group: bad table size");
    for (int g = 0; g < order; ++g) {
      if (int(mul[size_t(g)].size()) != order)
        throw std::invalid_argument("group: ragged table");
      if (op(identity, g) != g || op(g, identity) != g)
        throw std::invalid_argument("group: identity law fails");
      if (op(g, inv[size_t(g)]) != identity || op(inv[size_t(g)], g) != identity)
        throw std::invalid_argument("group: inverse law fails");
    }
    if (order <= assoc_bound) {
      for (int g = 0; g < order; ++g)
        for (int h = 0; h < order; ++h)
          for (int k = 0; k < order; ++k)
            if (op(op(g, h), k) != op(g, op(h, k)))
              throw std::invalid_argument("group: associativity fails at (" +
                                          std::to_string(g) + "," +
                                          std::to_string(h) + "," +
                                          std::to_string(k) + ")");
    }
  }

  static FiniteGroup cyclic(int n) {
    FiniteGroup G;
    G.order = n;
    G.identity = 0;
    G.mul.assign(size_t(n), std::vector<int>(size_t(n)));
    G.inv.resize(size_t(n));
    for (int i = 0; i < n; ++i) {
      G.names.push_back(i == 0 ? "1" : "g" + std::to_string(i));
      G.inv[size_t(i)] = (n - i) % n;
      for (int j = 0; j < n; ++j) G.mul[size_t(i)][size_t(j)] = (i + j) % n;
    }
    return G;
  }

  static FiniteGroup direct_product(const FiniteGroup& A, const FiniteGroup& B) {
    FiniteGroup G;
    G.order = A.order * B.order;
    auto idx = [&](int a, int b) { return a * B.order + b; };
    G.identity = idx(A.identity, B.identity);
    G.mul.assign(size_t(G.order), std::vector<int>(size_t(G.order)));
    G.inv.resize(size_t(G.order));
    for (int a = 0; a < A.order; ++a)
      for (int b = 0; b < B.order; ++b) {
        G.names.push_back("(" + A.names[size_t(a)] + "," + B.names[size_t(b)] + ")");
        G.inv[size_t(idx(a, b))] = idx(A.inv[size_t(a)], B.inv[size_t(b)]);
        for (int c = 0; c < A.order; ++c)
          for (int d = 0; d < B.order; ++d)
            G.mul[size_t(idx(a, b))][size_t(idx(c, d))] =
                idx(A.op(a, c), B.op(b, d));
      }
    return G;
  }

  // Symmetric group on 3 points, elements as permutations in one-line
  // notation, composed left-to-right with the convention (fg)(x) = g(f(x)).
  static FiniteGroup symmetric3() {
    const std::vector<std::array<int, 3>> perms = {
        {0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}, {1, 2, 0}, {2, 0, 1}};
    const std::vector<std::string> names = {"e",     "(12)",  "(23)",
                                            "(13)",  "(123)", "(132)"};
    auto compose = [&](int f, int g) {
      std::array<int, 3> h{};
      for (int x = 0; x < 3; ++x) h[size_t(x)] = perms[size_t(g)][size_t(perms[size_t(f)][size_t(x)])];
      for (size_t i = 0; i < perms.size(); ++i)
        if (perms[i] == h) return int(i);
      throw std::logic_error("s3 compose");
    };
    FiniteGroup G;
    G.order = 6;
    G.identity = 0;
    G.names = names;
    G.mul.assign(6, std::vector<int>(6));
    G.inv.assign(6, 0);
    for (int f = 0; f < 6; ++f) {
      for (int g = 0; g < 6; ++g) {
        G.mul[size_t(f)][size_t(g)] = compose(f, g);
        if (G.mul[size_t(f)][size_t(g)] == 0) G.inv[size_t(f)] = g;
      }
    }
    return G;
  }
};

struct LengthFunction {
  std::vector<int> values;
  Ratio c{2, 1};

  int at(int g) const { return values[size_t(g)]; }
};

// Word length with respect to a generating set (BFS over the Cayley graph),
// with the smallest integer growth base c that satisfies the ball bound.
inline LengthFunction word_length_function(const FiniteGroup& G,
                                           std::span<const int> gens) {
  LengthFunction ell;
  ell.values.assign(size_t(G.order), -1);
  std::deque<int> queue{G.identity};
  ell.values[size_t(G.identity)] = 0;
  while (!queue.empty()) {
    int g = queue.front();
    queue.pop_front();
    for (int s : gens) {
      for (int t : {s, G.inverse(s)}) {
        int h = G.op(g, t);
        if (ell.values[size_t(h)] < 0) {
          ell.values[size_t(h)] = ell.values[size_t(g)] + 1;
          queue.push_back(h);
        }
      }
    }
  }
  int max_l = 0;
  for (int v : ell.values) {
    if (v < 0)
      throw std::invalid_argument("word_length_function: set does not generate");
    max_l = std::max(max_l, v);
  }
  // smallest integer base c with card{l(g) <= r} <= c^r for all r >= 1
  long long c = 1;
  for (int r = 1; r <= max_l; ++r) {
    long long count = 0;
    for (int v : ell.values)
      if (v <= r) ++count;
    while (true) {
      long long p = 1;
      bool ok = true;
      for (int t = 0; t < r; ++t) {
        p *= c;
        if (p >= count) break;
      }
      ok = p >= count;
      if (ok) break;
      ++c;
    }
  }
  ell.c = Ratio{std::max(c, 1LL), 1};
  return ell;
}

struct LengthAxiomReport {
  bool passed = true;
  std::vector<int> zero_axiom;                    // g with l(g)=0 xor g=1 wrong
  std::vector<int> symmetry;                      // g with l(g) != l(g^-1)
  std::vector<std::pair<int, int>> subadditivity;  // (g,h) with l(gh) > l(g)+l(h)
  std::vector<int> growth;                        // radii r violating card <= c^r
};

inline LengthAxiomReport validate_length_function(const FiniteGroup& G,
                                                  const LengthFunction& ell) {
  LengthAxiomReport rep;
  if (int(ell.values.size()) != G.order)
    throw std::invalid_argument("length function size mismatch");
  for (int g = 0; g < G.order; ++g) {
    bool zero = ell.at(g) == 0;
    if (zero != (g == G.identity)) rep.zero_axiom.push_back(g);
    if (ell.at(g) != ell.at(G.inverse(g))) rep.symmetry.push_back(g);
    if (ell.at(g) < 0) rep.zero_axiom.push_back(g);
  }
  for (int g = 0; g < G.order; ++g)
    for (int h = 0; h < G.order; ++h)
      if (ell.at(G.op(g, h)) > ell.at(g) + ell.at(h))
        rep.subadditivity.emplace_back(g, h);
  int max_l = 0;
  for (int v : ell.values) max_l = std::max(max_l, v);
  for (int r = 0; r <= max_l; ++r) {
    long long count = 0;
    for (int v : ell.values)
      if (v <= r) ++count;
    // count <= c^r, exact rational power comparison
    long long num_pow = 1, den_pow = 1;
    bool overflow = false;
    for (int t = 0; t < r; ++t) {
      num_pow *= ell.c.num;
      den_pow *= ell.c.den;
      if (num_pow > (1LL << 56)) { overflow = true; break; }
    }
    if (!overflow && count * den_pow > num_pow) rep.growth.push_back(r);
  }
  rep.passed = rep.zero_axiom.empty() && rep.symmetry.empty() &&
               rep.subadditivity.empty() && rep.growth.empty();
  return rep;
}

}  // namespace gembed
