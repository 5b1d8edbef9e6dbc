#pragma once

// The number-theory layer. Forward predictors map the structural invariants
// (p, m, n, e, k) of the Galois group of the second Hilbert p-class field of
// a base field K with p-class group of type (p,p) to the p-class numbers of
// the p+1 unramified degree-p extensions N_i and of their degree-p
// subfields L_i (quadratic K), together with the unit-cohomology type alpha
// or delta of each L_i. Inverse classifiers recover (m, n, e, k) from
// measured class-number exponents (u, v, w) and types.
//
// Notation, fixed throughout:
//   h_p(L_1) = p^u, h_p(L_2) = p^v (coclass >= 2 only),
//   h_p(F) = p^w for the first Hilbert p-class field F of K,
//   except for p = 2, where u is the common exponent of the two small
//   h_2(N_i) and w the exponent of the distinguished h_2(N_1).

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppg/abelian.hpp"

namespace ppg {

enum class Kind { Complex, Real, Generic };
enum class UnitType { Alpha, Delta, Unknown };

std::string kind_name(Kind kind);
Kind kind_from_name(const std::string& name);
std::string unit_type_name(UnitType type);
// Accepts "alpha"/"delta"/"unknown" and the table abbreviations "a"/"d"/"-".
UnitType unit_type_from_name(const std::string& name);

enum class ClassifyCode {
  Inconsistent,
  MissingW,
  HypothesisRequired,
  KindMismatch,
  AbelianImpossible,
  ParityViolation,
  InvalidCombination,
};

std::string classify_code_name(ClassifyCode code);

struct ClassifyError : std::runtime_error {
  ClassifyCode code;
  ClassifyError(ClassifyCode c, const std::string& what)
      : std::runtime_error(classify_code_name(c) + ": " + what), code(c) {}
};

// Shape of the principalisation kernel Ker(Cl_p(K) -> Cl_p(N)).
enum class KernelShape { CyclicP, BicyclicPP };

// Complex base fields force type alpha yet a cyclic kernel; for real base
// fields the kernel is bicyclic (total principalisation) exactly for type
// alpha. The combination complex + delta cannot occur.
KernelShape cohomology_kernel_rule(Kind kind, UnitType type);

// h_p(N) from h_p(L): p * hL^2 for complex K or real K with N of type
// delta; hL^2 for real K with N of type alpha.
i64 relate_class_numbers(Kind kind, UnitType type, int p, i64 hL);

// p-class numbers of N_1..N_{p+1} for an arbitrary base field. Coclass 1
// (n = m): all p when m = 2, else (p^{m-k-1}, p^2, ..., p^2). Coclass >= 2
// requires p = 3 and yields (3^{m-k-1}, 3^e, 27, 27).
std::vector<i64> predict_direct(int p, int m, int n, int k);

struct FieldPrediction {
  int h_exponent = 0;  // h_p(L_i) = p^{h_exponent}
  UnitType type = UnitType::Unknown;
};

// Per-field class numbers and types of L_1..L_{p+1} for a quadratic base
// field with the given group invariants. Throws AbelianImpossible for
// m = 2, ParityViolation when the parities exclude the combination (e.g.
// any complex coclass-1 group), Inconsistent for mixed real types with
// k = 1, HypothesisRequired for coclass >= 2 with p != 3.
std::vector<FieldPrediction> predict_quadratic(int p, Kind kind, int m, int n, int k);

struct FieldRecord {
  int p = 0;
  Kind kind = Kind::Generic;
  std::optional<i64> discriminant;
  std::optional<int> u, v, w;
  UnitType t1 = UnitType::Unknown;
  UnitType t2 = UnitType::Unknown;
  std::optional<std::string> clF1;   // observed shape, e.g. "27-9-3"
  std::optional<std::string> kappa;  // observed kernel positions, e.g. "(2241)"
  std::optional<std::string> name;   // observed type label

  bool operator==(const FieldRecord&) const = default;
};

enum class Branch { Abelian, CoclassOne, CoclassAtLeastTwo };
std::string branch_name(Branch branch);

struct CandidateTuple {
  int m = 0;
  int n = 0;
  std::optional<int> e, k;       // absent for the abelian branch
  i64 predicted_clF1_order = 0;  // p^{n-2}
  // For p = 2 the group family is determined only up to the dihedral /
  // semidihedral / quaternion alternatives of the same order.
  std::vector<std::string> family_candidates;
};

struct ClassifierResult {
  Branch branch = Branch::Abelian;
  bool ambiguous = false;
  std::vector<CandidateTuple> candidates;  // two entries when ambiguous
  std::vector<int> nu_admissible;          // admissible total-kernel counts
  std::vector<std::string> flags;

  CandidateTuple unique() const;  // throws std::logic_error if ambiguous
};

struct ClassifyOptions {
  bool strict = false;          // raise MissingW instead of returning both candidates
  bool assume_coclass1 = false; // required for p >= 5 (no nu criterion exists there)
};

ClassifierResult classify(const FieldRecord& record, const ClassifyOptions& options = {});

// Non-raising cross checks of a classification against the observed columns
// of the record: clF1 order vs p^{n-2}, the kernel-position string vs the
// admissible nu and the real-field digit rule, and the exclusion of the
// exponent-p^2 extra-special group. Returns human-readable flags.
std::vector<std::string> consistency_check(const FieldRecord& record,
                                           const ClassifierResult& result);

}  // namespace ppg
