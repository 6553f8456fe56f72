#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ksw/monomial.hpp"

namespace ksw {

class Ring;
using RingPtr = std::shared_ptr<const Ring>;

// An ordered list of variable names. The declared order fixes the storage
// order of polynomial terms and the default significance order of monomial
// orders built on the ring.
class Ring {
 public:
  static RingPtr make(std::vector<std::string> names) {
    return RingPtr(new Ring(std::move(names)));
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }

  // Index of a variable, or -1 if the ring does not contain it.
  int index_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : static_cast<int>(it->second);
  }

  std::size_t require(const std::string& name) const {
    int i = index_of(name);
    if (i < 0)
      throw std::invalid_argument("variable '" + name +
                                  "' is not in the ring");
    return static_cast<std::size_t>(i);
  }

  bool contains(const std::string& name) const { return index_of(name) >= 0; }

  // New ring with extra variables appended after the existing ones.
  RingPtr extended(const std::vector<std::string>& extra) const {
    std::vector<std::string> all = names_;
    all.insert(all.end(), extra.begin(), extra.end());
    return make(std::move(all));
  }

  friend bool same_ring(const Ring& a, const Ring& b) {
    return &a == &b || a.names_ == b.names_;
  }

 private:
  explicit Ring(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() > kMaxVars)
      throw std::invalid_argument("ring exceeds the supported " +
                                  std::to_string(kMaxVars) + " variables");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!index_.emplace(names_[i], i).second)
        throw std::invalid_argument("duplicate ring variable '" + names_[i] +
                                    "'");
    }
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline bool same_ring(const RingPtr& a, const RingPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return same_ring(*a, *b);
}

}  // namespace ksw
