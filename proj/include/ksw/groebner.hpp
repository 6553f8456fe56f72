#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ksw/order.hpp"
#include "ksw/polynomial.hpp"
#include "ksw/rational_function.hpp"

namespace ksw {

struct GBStats {
  std::uint64_t pairs_processed = 0;
  std::size_t basis_size = 0;
  int max_degree = -1;
};

// Work limits for Buchberger's algorithm and normal forms. The defaults are
// deliberate: runs exceeding them abort with BudgetError instead of silently
// grinding on.
struct GBBudget {
  std::uint64_t max_pairs = 1'000'000;
  std::size_t max_terms = 100'000;
};

class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, GBStats at)
      : std::runtime_error(what), stats(at) {}
  GBStats stats;
};

// A generating set of an ideal under a fixed monomial order. `reduced` marks
// a reduced Groebner basis: every element monic, no term of any element
// divisible by the leading monomial of another.
template <class C>
struct IdealBasisT {
  std::vector<PolynomialT<C>> polys;
  MonomialOrder order;
  bool reduced = false;
  GBStats stats;
};

using IdealBasis = IdealBasisT<Rational>;

namespace gb_detail {

template <class C>
using OrdPoly = std::vector<std::pair<Monomial, C>>;  // descending in order

template <class C>
OrdPoly<C> to_ordered(const PolynomialT<C>& p, const MonomialOrder& ord) {
  OrdPoly<C> v(p.terms().begin(), p.terms().end());
  std::sort(v.begin(), v.end(), [&](const auto& a, const auto& b) {
    return ord.greater(a.first, b.first);
  });
  return v;
}

template <class C>
PolynomialT<C> from_ordered(const OrdPoly<C>& v, const RingPtr& ring) {
  return PolynomialT<C>::from_terms(ring, {v.begin(), v.end()});
}

// f - coef * x^shift * g, all descending; the caller guarantees the leading
// term of f cancels.
template <class C>
OrdPoly<C> sub_scaled(const OrdPoly<C>& f, const C& coef,
                      const Monomial& shift, const OrdPoly<C>& g,
                      const MonomialOrder& ord) {
  OrdPoly<C> out;
  out.reserve(f.size() + g.size());
  std::size_t i = 0, j = 0;
  while (i < f.size() && j < g.size()) {
    Monomial mg = g[j].first.times(shift);
    int c = ord.compare(f[i].first, mg);
    if (c > 0) {
      out.push_back(f[i++]);
    } else if (c < 0) {
      C nc = C(0) - coef * g[j].second;
      if (!CoeffTraits<C>::is_zero(nc)) out.emplace_back(mg, std::move(nc));
      ++j;
    } else {
      C nc = f[i].second - coef * g[j].second;
      if (!CoeffTraits<C>::is_zero(nc))
        out.emplace_back(f[i].first, std::move(nc));
      ++i, ++j;
    }
  }
  for (; i < f.size(); ++i) out.push_back(f[i]);
  for (; j < g.size(); ++j) {
    C nc = C(0) - coef * g[j].second;
    if (!CoeffTraits<C>::is_zero(nc))
      out.emplace_back(g[j].first.times(shift), std::move(nc));
  }
  return out;
}

// Scale so the representative is canonical-friendly: primitive with positive
// leading coefficient over the rationals, monic over a coefficient field
// without integer structure.
template <class C>
void normalize_generator(OrdPoly<C>& f) {
  if (f.empty()) return;
  if constexpr (std::same_as<C, Rational>) {
    mpz_class num_gcd = 0, den_lcm = 1;
    for (const auto& t : f) {
      mpz_class n = t.second.get_num(), d = t.second.get_den();
      mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), n.get_mpz_t());
      mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
    }
    Rational content(num_gcd, den_lcm);
    content.canonicalize();
    if (sgn(f.front().second) < 0) content = -content;
    Rational inv = 1 / content;
    for (auto& t : f) t.second *= inv;
  } else {
    C inv = CoeffTraits<C>::one() / f.front().second;
    for (auto& t : f) t.second = t.second * inv;
  }
}

template <class C>
void make_monic(OrdPoly<C>& f) {
  if (f.empty()) return;
  C inv = CoeffTraits<C>::one() / f.front().second;
  for (auto& t : f) t.second = t.second * inv;
}

// Full normal form: every term of the result is irreducible modulo the
// leading terms of `basis`. Exact field arithmetic, no rescaling.
template <class C>
OrdPoly<C> normal_form_ordered(OrdPoly<C> f,
                               const std::vector<OrdPoly<C>>& basis,
                               const MonomialOrder& ord,
                               const GBBudget& budget, GBStats& stats) {
  OrdPoly<C> out;
  while (!f.empty()) {
    if (f.size() > budget.max_terms)
      throw BudgetError("normal form exceeded the term budget (" +
                            std::to_string(budget.max_terms) + " terms)",
                        stats);
    bool reduced_step = false;
    for (const auto& g : basis) {
      if (g.empty()) continue;
      if (g.front().first.divides(f.front().first)) {
        C coef = f.front().second / g.front().second;
        Monomial shift = f.front().first.divided_by(g.front().first);
        f = sub_scaled(f, coef, shift, g, ord);
        reduced_step = true;
        break;
      }
    }
    if (!reduced_step) {
      out.push_back(f.front());
      f.erase(f.begin());
    }
  }
  return out;
}

// Divide an integer-coefficient polynomial by the gcd of its coefficients
// (positive; the sign of the polynomial is preserved).
inline void strip_integer_content(OrdPoly<Rational>& f) {
  if (f.empty()) return;
  mpz_class g = 0;
  for (const auto& t : f) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.second.get_num().get_mpz_t());
    if (g == 1) return;
  }
  for (auto& t : f) t.second /= Rational(g);
}

// f <- af*f - c*x^shift*g, where only terms at positions >= pos of f can be
// affected by the merge (the caller guarantees g's shifted leading monomial
// equals f[pos] and the heads cancel). Positions before pos are scaled only.
inline OrdPoly<Rational> combine_suffix(const OrdPoly<Rational>& f,
                                        std::size_t pos, const Rational& af,
                                        const Rational& c,
                                        const Monomial& shift,
                                        const OrdPoly<Rational>& g,
                                        const MonomialOrder& ord) {
  OrdPoly<Rational> out;
  out.reserve(f.size() + g.size());
  bool scale = !(af == 1);
  for (std::size_t i = 0; i < pos; ++i)
    out.emplace_back(f[i].first, scale ? f[i].second * af : f[i].second);
  std::size_t i = pos, j = 0;
  while (i < f.size() && j < g.size()) {
    Monomial mg = g[j].first.times(shift);
    int cmp = ord.compare(f[i].first, mg);
    if (cmp > 0) {
      out.emplace_back(f[i].first, scale ? f[i].second * af : f[i].second);
      ++i;
    } else if (cmp < 0) {
      Rational nc = -(c * g[j].second);
      if (nc != 0) out.emplace_back(mg, std::move(nc));
      ++j;
    } else {
      Rational nc = (scale ? f[i].second * af : f[i].second) - c * g[j].second;
      if (nc != 0) out.emplace_back(f[i].first, std::move(nc));
      ++i, ++j;
    }
  }
  for (; i < f.size(); ++i)
    out.emplace_back(f[i].first, scale ? f[i].second * af : f[i].second);
  for (; j < g.size(); ++j) {
    Rational nc = -(c * g[j].second);
    if (nc != 0) out.emplace_back(g[j].first.times(shift), std::move(nc));
  }
  return out;
}

// Full reduction over the integers: the result is the canonical normal form
// scaled by some positive integer. Inputs must have integer coefficients and
// the reducers primitive, positive leading coefficients.  Keeping everything
// fraction-free with the content stripped after each step avoids the
// coefficient swell of exact field division.  When `sugars`/`sugar` are
// given, the reducend's sugar degree is propagated through each step.
inline OrdPoly<Rational> reduce_fraction_free(
    OrdPoly<Rational> f, const std::vector<OrdPoly<Rational>>& basis,
    const MonomialOrder& ord, const GBBudget& budget, GBStats& stats,
    const std::vector<unsigned>* sugars = nullptr,
    unsigned* sugar = nullptr) {
  std::size_t pos = 0;
  while (pos < f.size()) {
    if (f.size() > budget.max_terms)
      throw BudgetError("normal form exceeded the term budget (" +
                            std::to_string(budget.max_terms) + " terms)",
                        stats);
    // fewest-terms reducer whose leading monomial divides f[pos]
    const OrdPoly<Rational>* best = nullptr;
    std::size_t best_idx = 0;
    for (std::size_t bi = 0; bi < basis.size(); ++bi) {
      const auto& g = basis[bi];
      if (g.empty() || !g.front().first.divides(f[pos].first)) continue;
      if (!best || g.size() < best->size()) {
        best = &g;
        best_idx = bi;
      }
    }
    if (!best) {
      ++pos;
      continue;
    }
    mpz_class lf = f[pos].second.get_num();
    mpz_class lg = best->front().second.get_num();
    mpz_class d;
    mpz_gcd(d.get_mpz_t(), lf.get_mpz_t(), lg.get_mpz_t());
    Rational af(lg / d), c(lf / d);
    Monomial shift = f[pos].first.divided_by(best->front().first);
    if (sugars && sugar)
      *sugar = std::max(*sugar, (*sugars)[best_idx] + shift.deg);
    f = combine_suffix(f, pos, af, c, shift, *best, ord);
    strip_integer_content(f);
  }
  return f;
}

}  // namespace gb_detail

// Normal form of `p` modulo `basis` under `order`.
template <class C>
PolynomialT<C> normal_form(const PolynomialT<C>& p,
                           const std::vector<PolynomialT<C>>& basis,
                           const MonomialOrder& order,
                           const GBBudget& budget = {}) {
  using namespace gb_detail;
  std::vector<OrdPoly<C>> B;
  for (const auto& g : basis)
    if (!g.is_zero()) B.push_back(to_ordered(g, order));
  GBStats stats;
  OrdPoly<C> r =
      normal_form_ordered(to_ordered(p, order), B, order, budget, stats);
  return from_ordered(r, p.ring());
}

template <class C>
PolynomialT<C> normal_form(const PolynomialT<C>& p,
                           const IdealBasisT<C>& basis,
                           const GBBudget& budget = {}) {
  return normal_form(p, basis.polys, basis.order, budget);
}

// Buchberger's algorithm with the normal selection strategy and
// Gebauer-Moeller pair pruning; fully deterministic for a fixed input.
// Rational-coefficient runs reduce fraction-free (content-stripped integer
// arithmetic) to avoid coefficient swell; the basis that comes out is the
// same reduced Groebner basis either way, elements sorted by ascending
// leading monomial.
template <class C>
IdealBasisT<C> buchberger(const std::vector<PolynomialT<C>>& gens,
                          const MonomialOrder& order,
                          const GBBudget& budget = {}) {
  using namespace gb_detail;
  if (gens.empty())
    throw std::invalid_argument("empty generating set");
  const RingPtr& ring = gens.front().ring();
  GBStats stats;

  std::vector<OrdPoly<C>> G;
  for (const auto& g : gens) {
    if (!same_ring(g.ring(), ring))
      throw std::invalid_argument("generators live over different rings");
    if (g.is_zero()) continue;
    OrdPoly<C> og = to_ordered(g, order);
    normalize_generator(og);
    G.push_back(std::move(og));
  }
  if (G.empty())
    throw std::invalid_argument("all generators are zero");

  // Sugar of each basis element: total degree of its homogenisation,
  // propagated through reductions.  Selecting pairs by lowest sugar keeps
  // lexicographic runs from drifting into high-degree S-polynomials early.
  std::vector<unsigned> SG;
  SG.reserve(G.size());
  for (const auto& g : G) {
    unsigned d = 0;
    for (const auto& t : g) d = std::max(d, t.first.deg);
    SG.push_back(d);
  }

  struct PairKey {
    unsigned sug;
    Monomial lcm;
    std::size_t i, j;
  };
  auto pair_less = [&order](const PairKey& a, const PairKey& b) {
    if (a.sug != b.sug) return a.sug < b.sug;
    if (a.lcm.deg != b.lcm.deg) return a.lcm.deg < b.lcm.deg;
    if (int c = order.compare(a.lcm, b.lcm)) return c < 0;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  };
  std::set<PairKey, decltype(pair_less)> queue(pair_less);

  // Gebauer-Moeller update: add element t, prune useless pairs.
  auto add_pairs = [&](std::size_t t) {
    const Monomial& lmt = G[t].front().first;
    std::vector<PairKey> cand;
    cand.reserve(t);
    for (std::size_t i = 0; i < t; ++i) {
      Monomial l = Monomial::lcm(G[i].front().first, lmt);
      unsigned sug = std::max(SG[i] + l.deg - G[i].front().first.deg,
                              SG[t] + l.deg - lmt.deg);
      cand.push_back(PairKey{sug, l, i, t});
    }
    // M: drop (i,t) when some lcm(j,t) properly divides lcm(i,t)
    std::vector<bool> keep(cand.size(), true);
    for (std::size_t a = 0; a < cand.size(); ++a)
      for (std::size_t b = 0; b < cand.size() && keep[a]; ++b) {
        if (a == b || !keep[b]) continue;
        if (cand[b].lcm.divides(cand[a].lcm) && !(cand[b].lcm == cand[a].lcm))
          keep[a] = false;
      }
    // F: among pairs with equal lcm keep the one with the smallest i
    for (std::size_t a = 0; a < cand.size(); ++a)
      for (std::size_t b = 0; b < a && keep[a]; ++b)
        if (keep[b] && cand[a].lcm == cand[b].lcm) keep[a] = false;
    // B: product criterion
    for (std::size_t a = 0; a < cand.size(); ++a)
      if (keep[a] &&
          cand[a].lcm == G[cand[a].i].front().first.times(lmt))
        keep[a] = false;
    // prune old pairs made redundant by the new leading monomial
    std::vector<PairKey> stale;
    for (const PairKey& p : queue) {
      if (!lmt.divides(p.lcm)) continue;
      Monomial li = Monomial::lcm(G[p.i].front().first, lmt);
      Monomial lj = Monomial::lcm(G[p.j].front().first, lmt);
      if (!(li == p.lcm) && !(lj == p.lcm)) stale.push_back(p);
    }
    for (const PairKey& p : stale) queue.erase(p);
    for (std::size_t a = 0; a < cand.size(); ++a)
      if (keep[a]) queue.insert(cand[a]);
  };
  for (std::size_t t = 1; t < G.size(); ++t) add_pairs(t);

  while (!queue.empty()) {
    PairKey top = *queue.begin();
    queue.erase(queue.begin());
    ++stats.pairs_processed;
    if (stats.pairs_processed > budget.max_pairs) {
      stats.basis_size = G.size();
      throw BudgetError("S-pair budget exceeded (" +
                            std::to_string(budget.max_pairs) + " pairs)",
                        stats);
    }

    const Monomial& lmi = G[top.i].front().first;
    const Monomial& lmj = G[top.j].front().first;
    Monomial shi = top.lcm.divided_by(lmi);
    Monomial shj = top.lcm.divided_by(lmj);

    unsigned new_sugar = top.sug;
    OrdPoly<C> r;
    if constexpr (std::same_as<C, Rational>) {
      // fraction-free S-polynomial: (lcj/d)*x^shi*gi - (lci/d)*x^shj*gj
      mpz_class li = G[top.i].front().second.get_num();
      mpz_class lj = G[top.j].front().second.get_num();
      mpz_class d;
      mpz_gcd(d.get_mpz_t(), li.get_mpz_t(), lj.get_mpz_t());
      Rational ca(lj / d), cb(li / d);
      OrdPoly<C> a;
      a.reserve(G[top.i].size());
      for (const auto& t : G[top.i])
        a.emplace_back(t.first.times(shi), t.second * ca);
      r = reduce_fraction_free(sub_scaled(a, cb, shj, G[top.j], order), G,
                               order, budget, stats, &SG, &new_sugar);
    } else {
      C ci = CoeffTraits<C>::one() / G[top.i].front().second;
      C cj = CoeffTraits<C>::one() / G[top.j].front().second;
      OrdPoly<C> a, b;
      a.reserve(G[top.i].size());
      for (const auto& t : G[top.i])
        a.emplace_back(t.first.times(shi), t.second * ci);
      b.reserve(G[top.j].size());
      for (const auto& t : G[top.j])
        b.emplace_back(t.first.times(shj), t.second * cj);
      OrdPoly<C> s = sub_scaled(a, CoeffTraits<C>::one(),
                                Monomial::one(ring->size()), b, order);
      r = normal_form_ordered(std::move(s), G, order, budget, stats);
    }
    if (r.empty()) continue;
    normalize_generator(r);
    G.push_back(std::move(r));
    SG.push_back(new_sugar);
    add_pairs(G.size() - 1);
  }

  // minimalise: drop elements whose leading monomial is divisible by another
  std::vector<std::size_t> idx(G.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return order.less(G[a].front().first, G[b].front().first);
  });
  std::vector<OrdPoly<C>> minimal;
  for (std::size_t id : idx) {
    bool covered = false;
    for (const auto& kept : minimal)
      if (kept.front().first.divides(G[id].front().first)) {
        covered = true;
        break;
      }
    if (!covered) minimal.push_back(G[id]);
  }

  // tail-reduce each element against the others and make monic
  std::vector<PolynomialT<C>> basis;
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    std::vector<OrdPoly<C>> others;
    others.reserve(minimal.size() - 1);
    for (std::size_t j = 0; j < minimal.size(); ++j)
      if (j != i) others.push_back(minimal[j]);
    OrdPoly<C> r;
    if constexpr (std::same_as<C, Rational>)
      r = reduce_fraction_free(minimal[i], others, order, budget, stats);
    else
      r = normal_form_ordered(minimal[i], others, order, budget, stats);
    make_monic(r);
    basis.push_back(from_ordered(r, ring));
  }

  stats.basis_size = basis.size();
  for (const auto& p : basis)
    stats.max_degree = std::max(stats.max_degree, p.degree());
  return IdealBasisT<C>{std::move(basis), order, true, stats};
}

template <class C>
bool ideal_member(const PolynomialT<C>& p, const IdealBasisT<C>& basis,
                  const GBBudget& budget = {}) {
  return normal_form(p, basis, budget).is_zero();
}

// Verifies the reduced-basis invariants: monic elements, and no term of any
// element divisible by the leading monomial of another.
template <class C>
bool is_reduced_basis(const IdealBasisT<C>& basis) {
  using namespace gb_detail;
  std::vector<OrdPoly<C>> B;
  for (const auto& p : basis.polys) {
    if (p.is_zero()) return false;
    B.push_back(to_ordered(p, basis.order));
  }
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (!(B[i].front().second == CoeffTraits<C>::one())) return false;
    for (std::size_t j = 0; j < B.size(); ++j) {
      if (i == j) continue;
      for (const auto& t : B[i])
        if (B[j].front().first.divides(t.first)) return false;
    }
  }
  return true;
}

// Generators of the ideal's intersection with the subring of kept variables:
// Groebner basis under a block elimination order, filtered to polynomials
// free of the dropped variables.
template <class C>
IdealBasisT<C> eliminate(const std::vector<PolynomialT<C>>& gens,
                         const std::vector<std::string>& drop,
                         const GBBudget& budget = {}) {
  if (gens.empty()) throw std::invalid_argument("empty generating set");
  const RingPtr& ring = gens.front().ring();
  MonomialOrder ord = MonomialOrder::elimination(ring, drop);
  IdealBasisT<C> gb = buchberger(gens, ord, budget);
  std::vector<std::size_t> dropped;
  for (const auto& v : drop) dropped.push_back(ring->require(v));
  std::vector<PolynomialT<C>> kept;
  for (const auto& p : gb.polys) {
    bool clean = true;
    for (std::size_t i : dropped)
      if (p.degree_in(i) > 0) {
        clean = false;
        break;
      }
    if (clean) kept.push_back(p);
  }
  // Under a block order, a monomial free of dropped variables is smaller
  // than any monomial containing one, so the kept subset is itself a reduced
  // Groebner basis of the elimination ideal.
  IdealBasisT<C> out{std::move(kept), ord, true, gb.stats};
  return out;
}

// Two generating sets span the same ideal iff each generator of one reduces
// to zero modulo a Groebner basis of the other.
template <class C>
bool same_ideal(const std::vector<PolynomialT<C>>& A,
                const std::vector<PolynomialT<C>>& B,
                const MonomialOrder& order, const GBBudget& budget = {}) {
  IdealBasisT<C> gbA = buchberger(A, order, budget);
  for (const auto& b : B)
    if (!ideal_member(b, gbA, budget)) return false;
  IdealBasisT<C> gbB = buchberger(B, order, budget);
  for (const auto& a : A)
    if (!ideal_member(a, gbB, budget)) return false;
  return true;
}

}  // namespace ksw
