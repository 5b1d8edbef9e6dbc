#pragma once

// Exact integer linear algebra for finitely generated abelian groups:
// Smith normal form with unimodular transforms, invariant factors of a
// presentation, and reduction of element coordinates to canonical form.
//
// All arithmetic is checked 64-bit: any intermediate that would leave the
// int64 range raises OverflowError instead of wrapping.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppg {

using i64 = std::int64_t;

// Raised when a checked integer operation would overflow 64 bits.
struct OverflowError : std::runtime_error {
  explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a presentation defines an infinite quotient (a zero invariant
// factor survives for one of the generators).
struct InfiniteQuotient : std::runtime_error {
  explicit InfiniteQuotient(const std::string& what) : std::runtime_error(what) {}
};

// a + b, a - b, a * b with overflow detection.
i64 checked_add(i64 a, i64 b);
i64 checked_sub(i64 a, i64 b);
i64 checked_mul(i64 a, i64 b);

// Euclidean remainder in [0, m) for m > 0.
i64 mod_floor(i64 a, i64 m);

// Dense row-major integer matrix.
class IntMatrix {
 public:
  IntMatrix() : rows_(0), cols_(0) {}
  IntMatrix(int rows, int cols);
  static IntMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  i64& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  i64 at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  IntMatrix multiplied_by(const IntMatrix& rhs) const;  // checked product
  IntMatrix transposed() const;
  bool operator==(const IntMatrix& rhs) const;
  bool operator!=(const IntMatrix& rhs) const { return !(*this == rhs); }

  // Checked matrix * column-vector product.
  std::vector<i64> apply(const std::vector<i64>& v) const;

 private:
  int rows_, cols_;
  std::vector<i64> data_;
};

// Smith normal form of M: D = U * M * V with U, V unimodular, D diagonal,
// d_1 | d_2 | ... and every diagonal entry non-negative. Uinv is the inverse
// of U (tracked during elimination, so Uinv * U = I exactly).
struct SmithDecomposition {
  IntMatrix D;
  IntMatrix U;
  IntMatrix V;
  IntMatrix Uinv;
};

// Exact: all intermediate arithmetic is 128-bit. The accumulated transforms
// can outgrow the 64-bit result type on large dense inputs (growth is
// (n*amplitude)^O(n) without LLL reduction); in that case the function
// throws std::overflow_error rather than returning anything truncated.
SmithDecomposition smith_normal_form(const IntMatrix& M);

// A finite abelian group in invariant-factor form d_1 | d_2 | ... | d_r with
// every d_i >= 2. The trivial group has no factors.
class AbelianGroup {
 public:
  AbelianGroup() = default;
  // Factors must be in ascending divisibility order, each >= 2.
  explicit AbelianGroup(std::vector<i64> ascending_factors);
  static AbelianGroup trivial() { return AbelianGroup(); }

  const std::vector<i64>& invariant_factors() const { return factors_; }
  int rank() const { return static_cast<int>(factors_.size()); }
  i64 order() const;
  bool is_trivial() const { return factors_.empty(); }

  // Display form lists factors largest-first, joined by '-': "27-9-3".
  // The trivial group prints as "1".
  std::string to_string() const;
  static AbelianGroup parse(const std::string& text);

  bool operator==(const AbelianGroup& rhs) const { return factors_ == rhs.factors_; }
  bool operator!=(const AbelianGroup& rhs) const { return !(*this == rhs); }

 private:
  std::vector<i64> factors_;  // ascending divisibility
};

// A presentation of an abelian group: `generator_count` generators and a list
// of relation rows, each row giving the coefficients of one relation.
struct AbelianPresentation {
  int generator_count = 0;
  std::vector<std::vector<i64>> relations;
};

// Invariant factors of the quotient Z^g / <relations>. Throws
// InfiniteQuotient when the quotient has a free part.
AbelianGroup abelian_invariants(const AbelianPresentation& presentation);

// Reduce coordinates against the invariant factors of G: component i is
// mapped into [0, d_i). The input length must equal G.rank().
std::vector<i64> group_element_reduce(std::vector<i64> coords, const AbelianGroup& group);

// Coordinate bridge between the named generators of a presentation and the
// canonical (invariant-factor) coordinates of its quotient group.
class QuotientBasis {
 public:
  explicit QuotientBasis(const AbelianPresentation& presentation);

  const AbelianGroup& group() const { return group_; }
  int named_count() const { return named_count_; }

  // Named-generator coordinates -> reduced canonical coordinates.
  std::vector<i64> to_canonical(const std::vector<i64>& named) const;

  // A named-coordinate representative of the i-th canonical basis vector.
  std::vector<i64> canonical_basis_in_named(int i) const;

  // Convert a linear map given on named generators (columns = images of the
  // named generators, in named coordinates) to canonical coordinates.
  IntMatrix action_to_canonical(const IntMatrix& named_action) const;

 private:
  int named_count_;
  AbelianGroup group_;
  std::vector<int> kept_;   // indices of non-unit invariant factors
  IntMatrix U_;             // named -> pre-reduction coordinates
  IntMatrix Uinv_;          // pre-reduction -> named
};

}  // namespace ppg
