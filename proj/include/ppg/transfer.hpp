#pragma once

// Transfer homomorphisms V : G/[G,G] -> M/[M,M] for the maximal subgroups M
// of a built group, their kernels, and the induced position string kappa
// together with the count nu of total kernels.
//
// On a coset g[G,G] the transfer evaluates to g^p [M,M] when g lies
// outside M, and to the product of the p conjugates t^{-i} g t^i modulo
// [M,M] when g lies in M (t a fixed representative outside M). Both the
// independence from the coset representative and the independence from t
// are asserted during computation.

#include <string>
#include <utility>
#include <vector>

#include "ppg/invariants.hpp"
#include "ppg/pcgroup.hpp"

namespace ppg {

struct TransferMap {
  int subgroup_index = 0;
  // values[a * p + b] = transfer of the coset x^a y^b [G,G], as canonical
  // coordinates of an element of A (taken modulo [M,M] when compared).
  std::vector<std::vector<i64>> values;
  // Kernel as a subgroup of the (a, b) plane.
  std::vector<std::pair<int, int>> kernel_plane;
};

TransferMap transfer_map(const PcGroup& G, const MaximalSubgroup& M);

struct KappaType {
  std::vector<int> digits;  // digit i-1 describes the kernel of V_{M_i}
  std::vector<int> orbit;   // lexicographic minimum under relabelling
  std::string str;          // compact form, e.g. "(2241)"

  bool operator==(const KappaType& rhs) const { return digits == rhs.digits; }
};

// Digit convention: 0 when the kernel is the whole plane ("total"), and j
// when the kernel is the line belonging to M_j. A trivial kernel cannot be
// encoded and raises std::logic_error.
KappaType kappa(const PcGroup& G, const std::vector<MaximalSubgroup>& subgroups);
KappaType kappa(const PcGroup& G);

// Number of total kernels (zero digits).
int nu(const KappaType& type);
int nu(const PcGroup& G);

std::string kappa_to_string(const std::vector<int>& digits);

}  // namespace ppg
