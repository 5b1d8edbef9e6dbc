#pragma once

// Polycyclic-style model of a finite metabelian p-group G with elementary
// quotient G/A of type (p,p): every element has the normal form x^a y^b w
// with 0 <= a,b < p and w in the abelian normal subgroup A = [G,G].
//
// A is described by a presentation on named generators; x and y act on A by
// commuting automorphisms of order dividing p, [y,x] is a designated element
// of A, and x^p, y^p are designated elements of A (the "tails"). build()
// validates the complete set of consistency conditions before returning a
// usable group; multiplication is exact collection against the normal form.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppg/abelian.hpp"

namespace ppg {

// Raised when the supplied structure constants do not define a group
// (failed action, power, or associativity condition). The message carries a
// concrete witness of the failed condition.
struct InconsistentPresentation : std::runtime_error {
  explicit InconsistentPresentation(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an enumeration would exceed its element budget.
struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Structure constants consumed by PcGroup::build().
// All element data is given in the named generator coordinates of `derived`.
struct PcGroupData {
  int prime = 0;
  std::vector<std::string> generator_labels;     // names of the generators of A
  AbelianPresentation derived;                   // presentation of A
  IntMatrix action_x;                            // column j = image of generator j under conjugation by x
  IntMatrix action_y;                            // column j = image under conjugation by y
  std::vector<i64> comm_yx;                      // [y,x]
  std::vector<i64> tail_xp;                      // x^p
  std::vector<i64> tail_yp;                      // y^p
};

// Default ceiling for explicit element enumerations.
inline constexpr i64 kDefaultEnumerationBudget = 200000;

class PcGroup {
 public:
  // Element in normal form x^a y^b w; w holds canonical coordinates of A.
  struct Element {
    int a = 0;
    int b = 0;
    std::vector<i64> w;
    bool operator==(const Element& rhs) const { return a == rhs.a && b == rhs.b && w == rhs.w; }
    bool operator!=(const Element& rhs) const { return !(*this == rhs); }
  };

  // Validates all consistency conditions; throws InconsistentPresentation
  // (or InfiniteQuotient when A itself is not finite).
  static PcGroup build(const PcGroupData& data);

  int prime() const { return p_; }
  i64 order() const { return order_; }
  int log_order() const { return log_order_; }          // n with |G| = p^n
  const AbelianGroup& derived_group() const { return basis_.group(); }
  const QuotientBasis& derived_basis() const { return basis_; }

  Element identity() const { return Element{0, 0, zero_}; }
  Element gen_x() const { return Element{1, 0, zero_}; }
  Element gen_y() const { return Element{0, 1, zero_}; }
  // Element of A with the given canonical coordinates.
  Element from_derived(const std::vector<i64>& canonical) const;
  Element make(int a, int b, const std::vector<i64>& canonical) const;

  Element mul(const Element& g, const Element& h) const;
  Element inv(const Element& g) const;
  Element pow(const Element& g, i64 e) const;
  Element comm(const Element& g, const Element& h) const;  // g^-1 h^-1 g h
  i64 element_order(const Element& g) const;

  // Dense encoding compatible with lexicographic order on (a, b, w).
  i64 encode(const Element& g) const;
  Element decode(i64 code) const;

  // Conjugation action on A in canonical coordinates.
  const IntMatrix& action_x() const { return mx_[1]; }
  const IntMatrix& action_y() const { return my_[1]; }
  const IntMatrix& action_x_pow(int i) const { return mx_[i]; }
  const IntMatrix& action_y_pow(int i) const { return my_[i]; }
  std::vector<i64> comm_yx() const { return s2_; }      // [y,x] in canonical coordinates
  std::vector<i64> tail_xp() const { return tx_; }      // x^p
  std::vector<i64> tail_yp() const { return ty_; }      // y^p

  std::vector<i64> reduce(std::vector<i64> canonical) const;
  // (M - 1) v for the action matrix of x^a y^b, reduced.
  std::vector<i64> twisted_difference(int a, int b, const std::vector<i64>& canonical) const;

 private:
  PcGroup() = default;

  int p_ = 0;
  i64 order_ = 0;
  int log_order_ = 0;
  QuotientBasis basis_{AbelianPresentation{}};
  std::vector<i64> zero_;
  std::vector<i64> s2_, tx_, ty_;
  std::vector<IntMatrix> mx_, my_;               // powers 0..p-1 of the two actions
  std::vector<std::vector<i64>> cross_;          // cross_[b*p+c] = C(b,c), see mul()
  std::vector<i64> strides_;                     // mixed-radix strides for encode()
};

// Subgroup given by its full, sorted element list (encoded form).
class Subgroup {
 public:
  Subgroup() = default;
  Subgroup(const PcGroup& G, std::vector<i64> sorted_codes, std::vector<PcGroup::Element> generators);

  i64 order() const { return static_cast<i64>(codes_.size()); }
  const std::vector<i64>& codes() const { return codes_; }
  const std::vector<PcGroup::Element>& generators() const { return gens_; }
  bool contains_code(i64 code) const;
  bool operator==(const Subgroup& rhs) const { return codes_ == rhs.codes_; }

 private:
  std::vector<i64> codes_;
  std::vector<PcGroup::Element> gens_;
};

// Closure of the generated subgroup by breadth-first right multiplication.
Subgroup subgroup_closure(const PcGroup& G, const std::vector<PcGroup::Element>& generators,
                          i64 budget = kDefaultEnumerationBudget);

// Lower central series G = gamma_1 > gamma_2 > ... > 1 by explicit element
// enumeration: gamma_{j+1} is generated by the commutators [h, u] with h
// running over all elements of gamma_j and u over {x, y}. The returned list
// ends with the trivial subgroup.
std::vector<Subgroup> lower_central_series(const PcGroup& G, i64 budget = kDefaultEnumerationBudget);

// Derived subgroup of H: normal closure in H of the pairwise commutators of
// the generators of H (all pairs of elements when H carries no generators).
Subgroup derived_subgroup(const PcGroup& G, const Subgroup& H, i64 budget = kDefaultEnumerationBudget);

// Centre of G.
Subgroup center(const PcGroup& G, i64 budget = kDefaultEnumerationBudget);

}  // namespace ppg
