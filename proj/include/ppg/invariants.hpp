#pragma once

// Structural invariants of a built group G with G/[G,G] of type (p,p):
// the lower central chain inside A = [G,G], the two-step centralizer chain
// chi_j, the derived positions s, e and the defect k, the p+1 maximal
// subgroups with their derived subgroups and abelianizations, and the
// aggregate report combining them with the transfer-kernel data.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppg/abelian.hpp"
#include "ppg/pcgroup.hpp"
#include "ppg/presentations.hpp"

namespace ppg {

// Raised when an invariant is requested outside its domain (e.g. s, e, k of
// an abelian group, where the chain is too short to define them).
struct InvariantUndefined : std::runtime_error {
  explicit InvariantUndefined(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a computed commutator subgroup matches no term of the lower
// central chain, so no defect can be read off.
struct NoMatch : std::runtime_error {
  explicit NoMatch(const std::string& what) : std::runtime_error(what) {}
};

// A subgroup of the derived group A, stored as the full sorted list of its
// element codes (mixed-radix encoding of canonical coordinates).
class DerivedSpan {
 public:
  DerivedSpan() = default;
  static DerivedSpan span(const PcGroup& G, const std::vector<std::vector<i64>>& generators,
                          i64 budget = kDefaultEnumerationBudget);
  static DerivedSpan whole(const PcGroup& G, i64 budget = kDefaultEnumerationBudget);

  i64 order() const { return static_cast<i64>(codes_.size()); }
  bool is_trivial() const { return codes_.size() == 1; }
  const std::vector<i64>& codes() const { return codes_; }
  const std::vector<std::vector<i64>>& generators() const { return gens_; }
  bool contains(const PcGroup& G, const std::vector<i64>& canonical) const;
  bool operator==(const DerivedSpan& rhs) const { return codes_ == rhs.codes_; }
  bool operator!=(const DerivedSpan& rhs) const { return !(*this == rhs); }

 private:
  std::vector<i64> codes_;
  std::vector<std::vector<i64>> gens_;
};

// Lower central chain gamma_2 >= gamma_3 >= ... >= gamma_m = 1, computed
// additively inside A (gamma_{j+1} is spanned by the images of the
// generators of gamma_j under Mx - 1 and My - 1).
struct GammaChain {
  std::vector<DerivedSpan> terms;  // terms[0] = gamma_2, last = trivial
  int m = 0;                       // gamma_m = 1 is the first trivial term

  const DerivedSpan& gamma(int j) const;  // j >= 2; clamps to trivial beyond m
  std::vector<i64> orders(const PcGroup& G) const;  // |gamma_1| .. |gamma_m|
};

GammaChain gamma_series_additive(const PcGroup& G, i64 budget = kDefaultEnumerationBudget);

// chi_j for 2 <= j <= m-1: all g with [g, u] in gamma_{j+2} for every u in
// gamma_j. Each chi_j is a union of cosets of A, recorded by the subgroup of
// the (a, b) plane it projects onto.
struct CentralizerChain {
  std::vector<std::vector<std::pair<int, int>>> plane;  // index j-2
  std::vector<i64> orders;                              // |chi_j|
};

CentralizerChain two_step_centralizer_chain(const PcGroup& G, const GammaChain& chain);

// Position of the first proper jump of the centralizer chain.
int invariant_s(const PcGroup& G, const GammaChain& chain);
// Position e with gamma_{e+1} the first chain term of index <= p.
int invariant_e(const PcGroup& G, const GammaChain& chain);
// Defect k with [chi_s, gamma_e] = gamma_{m-k}.
int invariant_k(const PcGroup& G, const GammaChain& chain);

struct MaximalSubgroup {
  int index = 0;        // 1-based position
  int plane_a = 0;      // generator g = x^{plane_a} y^{plane_b}
  int plane_b = 0;
  PcGroup::Element gen;
  DerivedSpan derived;  // [M, M] = (M_g - 1) A
};

// The p+1 maximal subgroups in the fixed order M_1 = <y, A>,
// M_i = <x y^{i-2}, A> for 2 <= i <= p+1.
std::vector<MaximalSubgroup> maximal_subgroups(const PcGroup& G);

// Invariant factors of M_i / [M_i, M_i] from an explicit presentation.
AbelianGroup abelianization_of_maximal(const PcGroup& G, const MaximalSubgroup& M);

struct InvariantReport {
  int p = 0;
  int n = 0;   // |G| = p^n
  int m = 0;   // chain length: gamma_m = 1
  int cl = 0;  // nilpotency class m - 1
  int cc = 0;  // coclass n - cl
  std::optional<int> s, e, k;             // absent when m = 2
  std::vector<i64> gamma_orders;          // gamma_1 .. gamma_m
  std::vector<i64> chi_orders;            // chi_2 .. chi_{m-1}
  std::vector<AbelianGroup> ab;           // M_1/M_1' .. M_{p+1}/M_{p+1}'
  std::vector<int> kappa_digits;          // transfer-kernel positions
  std::string kappa;                      // e.g. "(2241)"
  std::vector<int> kappa_orbit;           // lexicographic orbit minimum
  int nu = 0;                             // number of total kernels
};

InvariantReport report(const PcGroup& G);

// Family-specific structural verification: abelianization shapes, the
// derived subgroups of the maximal subgroups, chain orders, and the (s,e,k)
// positions, checked against the closed-form expectations of the family.
struct VerificationOutcome {
  bool passed = true;
  std::vector<std::string> notes;     // informational observations
  std::vector<std::string> failures;  // each entry is one failed expectation
};

VerificationOutcome verify_structure(const PcGroup& G, const FamilyDescriptor& descriptor);

}  // namespace ppg
