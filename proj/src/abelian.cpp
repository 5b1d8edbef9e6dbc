#include "ppg/abelian.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace ppg {

i64 checked_add(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer addition overflow");
  return r;
}

i64 checked_sub(i64 a, i64 b) {
  i64 r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("integer subtraction overflow");
  return r;
}

i64 checked_mul(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer multiplication overflow");
  return r;
}

i64 mod_floor(i64 a, i64 m) {
  i64 r = a % m;
  if (r < 0) r += m;
  return r;
}

IntMatrix::IntMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0) {}

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::multiplied_by(const IntMatrix& rhs) const {
  IntMatrix out(rows_, rhs.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = 0; k < cols_; ++k) {
      const i64 a = at(i, k);
      if (a == 0) continue;
      for (int j = 0; j < rhs.cols_; ++j) {
        out.at(i, j) = checked_add(out.at(i, j), checked_mul(a, rhs.at(k, j)));
      }
    }
  }
  return out;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix out(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out.at(j, i) = at(i, j);
  return out;
}

bool IntMatrix::operator==(const IntMatrix& rhs) const {
  return rows_ == rhs.rows_ && cols_ == rhs.cols_ && data_ == rhs.data_;
}

std::vector<i64> IntMatrix::apply(const std::vector<i64>& v) const {
  std::vector<i64> out(static_cast<std::size_t>(rows_), 0);
  for (int i = 0; i < rows_; ++i) {
    i64 acc = 0;
    for (int j = 0; j < cols_; ++j) acc = checked_add(acc, checked_mul(at(i, j), v[j]));
    out[i] = acc;
  }
  return out;
}

namespace {

// Working matrix over __int128: intermediate transform entries routinely
// outgrow 64 bits on large random inputs even when every final entry fits.
struct WideMat {
  int rows = 0, cols = 0;
  std::vector<__int128> a;

  WideMat() = default;
  WideMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0) {}
  explicit WideMat(const IntMatrix& M) : WideMat(M.rows(), M.cols()) {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) at(i, j) = M.at(i, j);
  }
  static WideMat identity(int n) {
    WideMat I(n, n);
    for (int i = 0; i < n; ++i) I.at(i, i) = 1;
    return I;
  }
  __int128& at(int i, int j) { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)]; }
  const __int128& at(int i, int j) const { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)]; }

  IntMatrix narrowed() const {
    IntMatrix out(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        const __int128 v = at(i, j);
        if (v > INT64_MAX || v < INT64_MIN)
          throw std::overflow_error("Smith normal form transform entry exceeds 64 bits");
        out.at(i, j) = static_cast<i64>(v);
      }
    return out;
  }
};

// Elementary operations on the working matrix, mirrored into the transforms.
struct SmithWorkspace {
  WideMat D, U, V, Uinv;

  void swap_rows(int a, int b) {
    if (a == b) return;
    for (int j = 0; j < D.cols; ++j) std::swap(D.at(a, j), D.at(b, j));
    for (int j = 0; j < U.cols; ++j) std::swap(U.at(a, j), U.at(b, j));
    for (int i = 0; i < Uinv.rows; ++i) std::swap(Uinv.at(i, a), Uinv.at(i, b));
  }

  void swap_cols(int a, int b) {
    if (a == b) return;
    for (int i = 0; i < D.rows; ++i) std::swap(D.at(i, a), D.at(i, b));
    for (int i = 0; i < V.rows; ++i) std::swap(V.at(i, a), V.at(i, b));
  }

  // row[a] += q * row[b]
  void add_row(int a, int b, __int128 q) {
    if (q == 0) return;
    for (int j = 0; j < D.cols; ++j) D.at(a, j) += q * D.at(b, j);
    for (int j = 0; j < U.cols; ++j) U.at(a, j) += q * U.at(b, j);
    for (int i = 0; i < Uinv.rows; ++i) Uinv.at(i, b) -= q * Uinv.at(i, a);
  }

  // col[a] += q * col[b]
  void add_col(int a, int b, __int128 q) {
    if (q == 0) return;
    for (int i = 0; i < D.rows; ++i) D.at(i, a) += q * D.at(i, b);
    for (int i = 0; i < V.rows; ++i) V.at(i, a) += q * V.at(i, b);
  }

  void negate_row(int a) {
    for (int j = 0; j < D.cols; ++j) D.at(a, j) = -D.at(a, j);
    for (int j = 0; j < U.cols; ++j) U.at(a, j) = -U.at(a, j);
    for (int i = 0; i < Uinv.rows; ++i) Uinv.at(i, a) = -Uinv.at(i, a);
  }

  // Left-multiply rows (i, j) by [[p, q], [r, s]] with determinant 1,
  // mirrored into U and (inversely) into the columns of Uinv.
  void combine_rows(int i, int j, __int128 p, __int128 q, __int128 r, __int128 s) {
    for (int col = 0; col < D.cols; ++col) {
      const __int128 a = D.at(i, col), b = D.at(j, col);
      D.at(i, col) = p * a + q * b;
      D.at(j, col) = r * a + s * b;
    }
    for (int col = 0; col < U.cols; ++col) {
      const __int128 a = U.at(i, col), b = U.at(j, col);
      U.at(i, col) = p * a + q * b;
      U.at(j, col) = r * a + s * b;
    }
    for (int row = 0; row < Uinv.rows; ++row) {
      const __int128 a = Uinv.at(row, i), b = Uinv.at(row, j);
      Uinv.at(row, i) = s * a - r * b;
      Uinv.at(row, j) = -q * a + p * b;
    }
  }

  // Right-multiply columns (i, j) by [[p, q], [r, s]], mirrored into V.
  void combine_cols(int i, int j, __int128 p, __int128 q, __int128 r, __int128 s) {
    for (int row = 0; row < D.rows; ++row) {
      const __int128 a = D.at(row, i), b = D.at(row, j);
      D.at(row, i) = p * a + r * b;
      D.at(row, j) = q * a + s * b;
    }
    for (int row = 0; row < V.rows; ++row) {
      const __int128 a = V.at(row, i), b = V.at(row, j);
      V.at(row, i) = p * a + r * b;
      V.at(row, j) = q * a + s * b;
    }
  }
};

// g = gcd(a, b) > 0 together with s*a + t*b = g for a, b >= 0, not both zero.
struct ExtendedGcd {
  __int128 g, s, t;
};

ExtendedGcd extended_gcd(__int128 a, __int128 b) {
  __int128 old_r = a, r = b;
  __int128 old_s = 1, s = 0;
  __int128 old_t = 0, t = 1;
  while (r != 0) {
    const __int128 q = old_r / r;
    __int128 next = old_r - q * r;
    old_r = r;
    r = next;
    next = old_s - q * s;
    old_s = s;
    s = next;
    next = old_t - q * t;
    old_t = t;
    t = next;
  }
  return ExtendedGcd{old_r, old_s, old_t};
}

}  // namespace

SmithDecomposition smith_normal_form(const IntMatrix& M) {
  SmithWorkspace w;
  w.D = WideMat(M);
  w.U = WideMat::identity(M.rows());
  w.Uinv = WideMat::identity(M.rows());
  w.V = WideMat::identity(M.cols());

  // Balanced quotient: remainder lands in [-|b|/2, |b|/2], which keeps the
  // working entries (and hence the transform entries) far smaller than
  // truncated division would.
  const auto balanced_quotient = [](__int128 a, __int128 b) {
    __int128 q = a / b;
    const __int128 r = a - q * b;
    const __int128 half = (b < 0 ? -b : b);
    if (2 * r > half) q += b > 0 ? 1 : -1;
    if (2 * r < -half) q += b > 0 ? -1 : 1;
    return q;
  };

  const int steps = std::min(M.rows(), M.cols());
  for (int t = 0; t < steps; ++t) {
    for (;;) {
      // Pivot: smallest non-zero magnitude in the trailing submatrix,
      // ties broken by lowest row index, then lowest column index.
      int pr = -1, pc = -1;
      __int128 best = 0;
      for (int i = t; i < w.D.rows; ++i) {
        for (int j = t; j < w.D.cols; ++j) {
          const __int128 v = w.D.at(i, j);
          if (v == 0) continue;
          const __int128 mag = v < 0 ? -v : v;
          if (pr < 0 || mag < best) {
            pr = i;
            pc = j;
            best = mag;
          }
        }
      }
      if (pr < 0) break;  // trailing submatrix is zero
      w.swap_rows(t, pr);
      w.swap_cols(t, pc);

      bool clean = true;
      for (int i = t + 1; i < w.D.rows; ++i) {
        const __int128 v = w.D.at(i, t);
        if (v == 0) continue;
        w.add_row(i, t, -balanced_quotient(v, w.D.at(t, t)));
        if (w.D.at(i, t) != 0) clean = false;
      }
      for (int j = t + 1; j < w.D.cols; ++j) {
        const __int128 v = w.D.at(t, j);
        if (v == 0) continue;
        w.add_col(j, t, -balanced_quotient(v, w.D.at(t, t)));
        if (w.D.at(t, j) != 0) clean = false;
      }
      if (clean) break;
    }
    if (w.D.at(t, t) < 0) w.negate_row(t);
  }

  // Divisibility pass on the now-diagonal matrix: whenever d_i does not
  // divide d_j, replace the pair by (gcd, lcm) with one determinant-one
  // block transform on each side. This touches no other diagonal entries
  // and keeps the transforms small, unlike restarting the elimination.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < steps; ++i) {
      for (int j = i + 1; j < steps; ++j) {
        const __int128 a = w.D.at(i, i), b = w.D.at(j, j);
        if (a == 0 && b == 0) continue;
        if (a == 0) {  // zero entries belong at the end of the chain
          w.swap_rows(i, j);
          w.swap_cols(i, j);
          changed = true;
          continue;
        }
        if (b % a == 0) continue;
        const ExtendedGcd e = extended_gcd(a, b);
        // [[s, t], [-b/g, a/g]] * diag(a, b) * [[1, -t*b/g], [1, s*a/g]]
        // equals diag(g, a*b/g); both factors have determinant one.
        w.combine_rows(i, j, e.s, e.t, -(b / e.g), a / e.g);
        w.combine_cols(i, j, 1, -(e.t * (b / e.g)), 1, e.s * (a / e.g));
        changed = true;
      }
    }
  }

  return SmithDecomposition{w.D.narrowed(), w.U.narrowed(), w.V.narrowed(), w.Uinv.narrowed()};
}

AbelianGroup::AbelianGroup(std::vector<i64> ascending_factors) : factors_(std::move(ascending_factors)) {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i] < 2) throw std::invalid_argument("invariant factors must be >= 2");
    if (i > 0 && factors_[i] % factors_[i - 1] != 0)
      throw std::invalid_argument("invariant factors must form a divisibility chain");
  }
}

i64 AbelianGroup::order() const {
  i64 n = 1;
  for (i64 d : factors_) n = checked_mul(n, d);
  return n;
}

std::string AbelianGroup::to_string() const {
  if (factors_.empty()) return "1";
  std::ostringstream out;
  for (std::size_t i = factors_.size(); i-- > 0;) {
    out << factors_[i];
    if (i != 0) out << '-';
  }
  return out.str();
}

AbelianGroup AbelianGroup::parse(const std::string& text) {
  if (text == "1") return AbelianGroup::trivial();
  std::vector<i64> descending;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t dash = text.find('-', pos);
    const std::string part = text.substr(pos, dash == std::string::npos ? std::string::npos : dash - pos);
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("malformed abelian group literal: '" + text + "'");
    descending.push_back(std::stoll(part));
    if (dash == std::string::npos) break;
    pos = dash + 1;
  }
  std::reverse(descending.begin(), descending.end());
  return AbelianGroup(std::move(descending));
}

AbelianGroup abelian_invariants(const AbelianPresentation& presentation) {
  QuotientBasis basis(presentation);
  return basis.group();
}

std::vector<i64> group_element_reduce(std::vector<i64> coords, const AbelianGroup& group) {
  if (static_cast<int>(coords.size()) != group.rank())
    throw std::invalid_argument("coordinate length does not match group rank");
  for (int i = 0; i < group.rank(); ++i) coords[i] = mod_floor(coords[i], group.invariant_factors()[i]);
  return coords;
}

QuotientBasis::QuotientBasis(const AbelianPresentation& presentation)
    : named_count_(presentation.generator_count) {
  const int g = presentation.generator_count;
  const int r = static_cast<int>(presentation.relations.size());
  IntMatrix B(g, r);  // columns span the relation lattice
  for (int j = 0; j < r; ++j) {
    if (static_cast<int>(presentation.relations[j].size()) != g)
      throw std::invalid_argument("relation row has wrong length");
    for (int i = 0; i < g; ++i) B.at(i, j) = presentation.relations[j][i];
  }
  SmithDecomposition snf = smith_normal_form(B);
  U_ = snf.U;
  Uinv_ = snf.Uinv;

  std::vector<i64> factors;
  for (int i = 0; i < g; ++i) {
    const i64 d = i < r ? snf.D.at(i, i) : 0;
    if (d == 0) throw InfiniteQuotient("presentation quotient has a free part");
    if (d > 1) {
      kept_.push_back(i);
      factors.push_back(d);
    }
  }
  group_ = AbelianGroup(std::move(factors));
}

std::vector<i64> QuotientBasis::to_canonical(const std::vector<i64>& named) const {
  if (static_cast<int>(named.size()) != named_count_)
    throw std::invalid_argument("named coordinate length mismatch");
  const std::vector<i64> full = U_.apply(named);
  std::vector<i64> out(kept_.size());
  for (std::size_t i = 0; i < kept_.size(); ++i)
    out[i] = mod_floor(full[kept_[i]], group_.invariant_factors()[i]);
  return out;
}

std::vector<i64> QuotientBasis::canonical_basis_in_named(int i) const {
  std::vector<i64> out(named_count_);
  for (int r = 0; r < named_count_; ++r) out[r] = Uinv_.at(r, kept_[i]);
  return out;
}

IntMatrix QuotientBasis::action_to_canonical(const IntMatrix& named_action) const {
  const int rank = group_.rank();
  IntMatrix out(rank, rank);
  for (int j = 0; j < rank; ++j) {
    const std::vector<i64> image = to_canonical(named_action.apply(canonical_basis_in_named(j)));
    for (int i = 0; i < rank; ++i) out.at(i, j) = image[i];
  }
  return out;
}

}  // namespace ppg
