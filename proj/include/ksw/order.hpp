#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksw/monomial.hpp"
#include "ksw/ring.hpp"

namespace ksw {

enum class OrderKind { Lex, GrevLex, Elimination };

// A total order on the monomials of a ring. The significance ranking is a
// permutation of all ring variables: callers name the leading variables and
// the remaining ones follow in declared ring order. Elimination orders are
// block orders (graded reverse lexicographic within each block) with the
// eliminated block infinitely heavier than the kept block.
class MonomialOrder {
 public:
  static MonomialOrder lex(RingPtr ring,
                           const std::vector<std::string>& vars = {}) {
    return MonomialOrder(OrderKind::Lex, std::move(ring), vars, {});
  }

  static MonomialOrder grevlex(RingPtr ring,
                               const std::vector<std::string>& vars = {}) {
    return MonomialOrder(OrderKind::GrevLex, std::move(ring), vars, {});
  }

  static MonomialOrder elimination(RingPtr ring,
                                   const std::vector<std::string>& drop) {
    if (drop.empty())
      throw std::invalid_argument("elimination order needs variables to drop");
    return MonomialOrder(OrderKind::Elimination, std::move(ring), drop, drop);
  }

  const RingPtr& ring() const { return ring_; }
  OrderKind kind() const { return kind_; }
  std::size_t block_size() const { return block_; }

  // +1 if a > b, 0 if equal, -1 if a < b.
  int compare(const Monomial& a, const Monomial& b) const {
    switch (kind_) {
      case OrderKind::Lex: {
        for (std::uint16_t idx : rank_) {
          if (a.e[idx] != b.e[idx]) return a.e[idx] > b.e[idx] ? 1 : -1;
        }
        return 0;
      }
      case OrderKind::GrevLex:
        return grevlex_block(a, b, 0, rank_.size());
      case OrderKind::Elimination: {
        if (int c = grevlex_block(a, b, 0, block_)) return c;
        return grevlex_block(a, b, block_, rank_.size());
      }
    }
    return 0;
  }

  bool less(const Monomial& a, const Monomial& b) const {
    return compare(a, b) < 0;
  }
  bool greater(const Monomial& a, const Monomial& b) const {
    return compare(a, b) > 0;
  }

  // Variables of the eliminated block (empty unless an elimination order).
  std::vector<std::string> eliminated() const {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < block_; ++k)
      out.push_back(ring_->name(rank_[k]));
    return out;
  }

  std::string describe() const {
    std::string name;
    switch (kind_) {
      case OrderKind::Lex:
        name = "lex";
        break;
      case OrderKind::GrevLex:
        name = "grevlex";
        break;
      case OrderKind::Elimination:
        name = "elimination";
        break;
    }
    name += "(";
    for (std::size_t k = 0; k < rank_.size(); ++k) {
      if (k) name += kind_ == OrderKind::Elimination && k == block_ ? " >> "
                                                                    : " > ";
      name += ring_->name(rank_[k]);
    }
    name += ")";
    return name;
  }

 private:
  MonomialOrder(OrderKind kind, RingPtr ring,
                const std::vector<std::string>& vars,
                const std::vector<std::string>& block)
      : kind_(kind), ring_(std::move(ring)), block_(block.size()) {
    std::vector<bool> used(ring_->size(), false);
    for (const auto& v : vars) {
      std::size_t i = ring_->require(v);
      if (used[i])
        throw std::invalid_argument("variable '" + v +
                                    "' repeated in order specification");
      used[i] = true;
      rank_.push_back(static_cast<std::uint16_t>(i));
    }
    for (std::size_t i = 0; i < ring_->size(); ++i)
      if (!used[i]) rank_.push_back(static_cast<std::uint16_t>(i));
  }

  // Graded reverse lexicographic comparison restricted to ranking positions
  // [from, to).
  int grevlex_block(const Monomial& a, const Monomial& b, std::size_t from,
                    std::size_t to) const {
    long da = 0, db = 0;
    for (std::size_t k = from; k < to; ++k) {
      da += a.e[rank_[k]];
      db += b.e[rank_[k]];
    }
    if (da != db) return da > db ? 1 : -1;
    for (std::size_t k = to; k-- > from;) {
      int d = int(a.e[rank_[k]]) - int(b.e[rank_[k]]);
      if (d != 0) return d < 0 ? 1 : -1;
    }
    return 0;
  }

  OrderKind kind_;
  RingPtr ring_;
  std::vector<std::uint16_t> rank_;
  std::size_t block_;
};

}  // namespace ksw
