#pragma once

// Constructors for the group families handled by this library, described by
// structure constants on the derived subgroup:
//
//  * elementary_abelian : the abelian group of type (p, p);
//  * coclass1           : metabelian p-groups of maximal class |G| = p^m with
//                         a cyclic-chain derived subgroup, parametrised by
//                         the defect k and the exponents of the deepest
//                         commutator relation;
//  * nebelung           : metabelian 3-groups G of coclass >= 2 with
//                         G/[G,G] of type (3,3), parametrised by (m, n, k)
//                         and the sign rho of the closing relation;
//  * dihedral / semidihedral / quaternion : the classical 2-groups of
//                         maximal class, realised in the same model.
//
// Each family has canonical tails (values of x^p and y^p); callers may
// override them, e.g. to walk through the socle variants of a family.

#include <optional>
#include <string>
#include <vector>

#include "ppg/pcgroup.hpp"

namespace ppg {

enum class Family {
  ElementaryAbelian,
  Coclass1,
  Nebelung,
  Dihedral,
  Semidihedral,
  Quaternion,
};

std::string family_name(Family f);
Family family_from_name(const std::string& name);

struct FamilyDescriptor {
  Family family = Family::ElementaryAbelian;
  int p = 0;
  int m = 0;
  int n = 0;                 // Nebelung only; other families have n = m (or 2)
  int k = 0;
  std::vector<int> miech;    // coclass1, size k: exponents a(m-k), ..., a(m-1)
  int rho = 0;               // Nebelung closing-relation sign, -1 / 0 / +1
  std::optional<std::vector<i64>> tail_x_override;  // named coordinates
  std::optional<std::vector<i64>> tail_y_override;  // named coordinates

  // Flat key=value form, e.g. "preset=nebelung p=3 m=4 n=5 k=0 rho=0".
  std::string to_string() const;
  static FamilyDescriptor parse(const std::string& text);
};

FamilyDescriptor elementary_abelian(int p);
FamilyDescriptor coclass1(int p, int m, int k, std::vector<int> miech = {});
FamilyDescriptor nebelung(int m, int n, int k, int rho);
FamilyDescriptor dihedral(int m);
FamilyDescriptor semidihedral(int m);
FamilyDescriptor quaternion(int m);

// Structure constants for a descriptor, with the family's canonical tails
// filled in (or the descriptor's overrides). Throws std::invalid_argument on
// parameters outside the family's admissible range.
PcGroupData family_data(const FamilyDescriptor& descriptor);

// family_data + PcGroup::build + family-specific sanity validation (for the
// classical 2-groups: the involution census separating the three kinds).
PcGroup build_family(const FamilyDescriptor& descriptor);

// Copy of `descriptor` whose tails are the canonical ones shifted by
// shift_x and shift_y times the deepest generator s_{m-1} of the chain.
FamilyDescriptor socle_shifted(const FamilyDescriptor& descriptor, int shift_x, int shift_y);

}  // namespace ppg
