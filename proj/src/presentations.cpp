#include "ppg/presentations.hpp"

#include <algorithm>
#include <sstream>

namespace ppg {

namespace {

i64 binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  i64 acc = 1;
  for (int i = 1; i <= r; ++i) acc = checked_mul(acc, n - r + i) / i;
  return acc;
}

// Coefficient vectors indexed by X-degree, truncated above `maxdeg`.
std::vector<i64> poly_mul_trunc(const std::vector<i64>& a, const std::vector<i64>& b, int maxdeg) {
  std::vector<i64> out(static_cast<std::size_t>(maxdeg) + 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j <= static_cast<std::size_t>(maxdeg); ++j)
      out[i + j] = checked_add(out[i + j], checked_mul(a[i], b[j]));
  }
  return out;
}

std::string join_ints(const std::vector<i64>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    out << v[i];
  }
  return out.str();
}

std::vector<i64> split_ints(const std::string& text) {
  std::vector<i64> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    out.push_back(std::stoll(text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

void validate_coclass1(int p, int m, int k, const std::vector<int>& miech) {
  if (!is_prime(p)) throw std::invalid_argument("coclass-1 family needs a prime p >= 2");
  if (m < 3) throw std::invalid_argument("coclass-1 family needs m >= 3");
  if (k < 0) throw std::invalid_argument("defect k must be non-negative");
  if (m == 3 && k != 0) throw std::invalid_argument("defect k must vanish for m = 3");
  if (m >= 4 && k > m - 4) throw std::invalid_argument("defect k must satisfy k <= m - 4");
  if (m >= p + 1 && k > p - 2) throw std::invalid_argument("defect k must satisfy k <= p - 2 when m >= p + 1");
  if (static_cast<int>(miech.size()) != k)
    throw std::invalid_argument("exponent list must have exactly k entries");
  for (int a : miech)
    if (a < 0 || a >= p) throw std::invalid_argument("relation exponents must lie in [0, p)");
  if (k >= 1 && miech.front() == 0)
    throw std::invalid_argument("the leading relation exponent a(m-k) must be non-zero");
}

void validate_nebelung(int m, int n, int k, int rho) {
  if (m < 4) throw std::invalid_argument("family needs m >= 4");
  if (n <= m) throw std::invalid_argument("family needs n > m");
  if (n > 2 * m - 3) throw std::invalid_argument("family needs n <= 2m - 3");
  if (k != 0 && k != 1) throw std::invalid_argument("defect k must be 0 or 1");
  if (k == 0 && rho != 0) throw std::invalid_argument("rho must be 0 when k = 0");
  if (k == 1 && rho != 1 && rho != -1) throw std::invalid_argument("rho must be +1 or -1 when k = 1");
  if (k == 1 && n > 2 * m - 4)
    throw std::invalid_argument("defect k = 1 needs e <= m - 2, i.e. n <= 2m - 4");
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::ElementaryAbelian: return "elementary_abelian";
    case Family::Coclass1: return "coclass1";
    case Family::Nebelung: return "nebelung";
    case Family::Dihedral: return "dihedral";
    case Family::Semidihedral: return "semidihedral";
    case Family::Quaternion: return "quaternion";
  }
  throw std::logic_error("unreachable family");
}

Family family_from_name(const std::string& name) {
  if (name == "elementary_abelian") return Family::ElementaryAbelian;
  if (name == "coclass1") return Family::Coclass1;
  if (name == "nebelung") return Family::Nebelung;
  if (name == "dihedral") return Family::Dihedral;
  if (name == "semidihedral") return Family::Semidihedral;
  if (name == "quaternion") return Family::Quaternion;
  throw std::invalid_argument("unknown family name: '" + name + "'");
}

std::string FamilyDescriptor::to_string() const {
  std::ostringstream out;
  out << "preset=" << family_name(family) << " p=" << p << " m=" << m;
  if (family == Family::Nebelung) out << " n=" << n;
  out << " k=" << k;
  if (!miech.empty()) {
    out << " a=";
    for (std::size_t i = 0; i < miech.size(); ++i) {
      if (i) out << ',';
      out << miech[i];
    }
  }
  if (family == Family::Nebelung) out << " rho=" << rho;
  if (tail_x_override) out << " tail_x=" << join_ints(*tail_x_override);
  if (tail_y_override) out << " tail_y=" << join_ints(*tail_y_override);
  return out.str();
}

FamilyDescriptor FamilyDescriptor::parse(const std::string& text) {
  FamilyDescriptor d;
  std::istringstream in(text);
  std::string token;
  bool saw_preset = false;
  while (in >> token) {
    const std::size_t eq = token.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "preset") {
      d.family = family_from_name(value);
      saw_preset = true;
    } else if (key == "p") {
      d.p = std::stoi(value);
    } else if (key == "m") {
      d.m = std::stoi(value);
    } else if (key == "n") {
      d.n = std::stoi(value);
    } else if (key == "k") {
      d.k = std::stoi(value);
    } else if (key == "a") {
      d.miech.clear();
      for (i64 v : split_ints(value)) d.miech.push_back(static_cast<int>(v));
    } else if (key == "rho") {
      d.rho = std::stoi(value);
    } else if (key == "tail_x") {
      d.tail_x_override = split_ints(value);
    } else if (key == "tail_y") {
      d.tail_y_override = split_ints(value);
    } else {
      throw std::invalid_argument("unknown descriptor key: '" + key + "'");
    }
  }
  if (!saw_preset) throw std::invalid_argument("descriptor is missing the preset key");
  return d;
}

FamilyDescriptor elementary_abelian(int p) {
  if (!is_prime(p)) throw std::invalid_argument("elementary abelian family needs a prime p");
  FamilyDescriptor d;
  d.family = Family::ElementaryAbelian;
  d.p = p;
  d.m = 2;
  d.n = 2;
  return d;
}

FamilyDescriptor coclass1(int p, int m, int k, std::vector<int> miech) {
  if (k >= 1 && miech.empty()) {
    miech.assign(static_cast<std::size_t>(k), 0);
    miech.front() = 1;
  }
  validate_coclass1(p, m, k, miech);
  FamilyDescriptor d;
  d.family = Family::Coclass1;
  d.p = p;
  d.m = m;
  d.n = m;
  d.k = k;
  d.miech = std::move(miech);
  return d;
}

FamilyDescriptor nebelung(int m, int n, int k, int rho) {
  validate_nebelung(m, n, k, rho);
  FamilyDescriptor d;
  d.family = Family::Nebelung;
  d.p = 3;
  d.m = m;
  d.n = n;
  d.k = k;
  d.rho = rho;
  return d;
}

namespace {

FamilyDescriptor classic2(Family kind, int m) {
  if (m < 3) throw std::invalid_argument("classical 2-group families need m >= 3");
  if (kind == Family::Semidihedral && m < 4)
    throw std::invalid_argument("the semidihedral family needs m >= 4");
  FamilyDescriptor d;
  d.family = kind;
  d.p = 2;
  d.m = m;
  d.n = m;
  d.k = 0;
  return d;
}

}  // namespace

FamilyDescriptor dihedral(int m) { return classic2(Family::Dihedral, m); }
FamilyDescriptor semidihedral(int m) { return classic2(Family::Semidihedral, m); }
FamilyDescriptor quaternion(int m) { return classic2(Family::Quaternion, m); }

namespace {

// Shared chain skeleton s_2, ..., s_{m-1} with relations
// sum_i binom(p, i) s_{j+i-1} = 0 and x acting as s_j -> s_j + s_{j+1}.
struct ChainSkeleton {
  int p, m, g;

  ChainSkeleton(int prime, int length) : p(prime), m(length), g(length - 2) {}

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (int j = 2; j <= m - 1; ++j) out.push_back("s" + std::to_string(j));
    return out;
  }

  AbelianPresentation presentation() const {
    AbelianPresentation pres;
    pres.generator_count = g;
    for (int j = 2; j <= m - 1; ++j) {
      std::vector<i64> row(static_cast<std::size_t>(g), 0);
      for (int i = 1; i <= p; ++i) {
        const int idx = j + i - 1;
        if (idx <= m - 1) row[idx - 2] = checked_add(row[idx - 2], binomial(p, i));
      }
      pres.relations.push_back(std::move(row));
    }
    return pres;
  }

  IntMatrix shift_action() const {
    IntMatrix M(g, g);
    for (int j = 2; j <= m - 1; ++j) {
      M.at(j - 2, j - 2) = 1;
      if (j + 1 <= m - 1) M.at(j - 1, j - 2) = 1;
    }
    return M;
  }
};

PcGroupData coclass1_data(const FamilyDescriptor& d) {
  validate_coclass1(d.p, d.m, d.k, d.miech);
  const int p = d.p, m = d.m, k = d.k;
  const ChainSkeleton chain(p, m);
  const int g = chain.g;

  PcGroupData data;
  data.prime = p;
  data.generator_labels = chain.labels();
  data.derived = chain.presentation();
  data.action_x = chain.shift_action();

  // y acts through the deepest-chain relation: [s_j, y] = sum_l a(m-l) s_{m+j-l-2}.
  data.action_y = IntMatrix(g, g);
  for (int j = 2; j <= m - 1; ++j) {
    data.action_y.at(j - 2, j - 2) = 1;
    for (int l = 1; l <= k; ++l) {
      const int t = m + j - l - 2;
      if (t <= m - 1)
        data.action_y.at(t - 2, j - 2) = checked_add(data.action_y.at(t - 2, j - 2), d.miech[k - l]);
    }
  }

  data.comm_yx.assign(static_cast<std::size_t>(g), 0);
  data.comm_yx[0] = 1;

  data.tail_xp.assign(static_cast<std::size_t>(g), 0);

  // Canonical y^p: the unique-up-to-socle solution of the power relation
  //   (Mx - 1) y^p = (1 + My + ... + My^{p-1}) [y,x].
  std::vector<i64> ty(static_cast<std::size_t>(g), 0);
  for (int i = 2; i <= std::min(p, m - 1); ++i) ty[i - 2] = checked_sub(ty[i - 2], binomial(p, i));
  const int maxdeg = m - 2;
  std::vector<i64> P(static_cast<std::size_t>(maxdeg) + 1, 0);
  for (int l = 1; l <= k; ++l) {
    const int deg = m - l - 2;
    if (deg <= maxdeg) P[deg] = d.miech[k - l];
  }
  std::vector<i64> Pj = P;
  for (int j = 1; j <= p - 1; ++j) {
    const i64 c = binomial(p, j + 1);
    for (int deg = 1; deg <= maxdeg; ++deg) {
      const int target = deg + 1;  // X^{deg-1} applied to s_2
      if (Pj[deg] != 0 && target <= m - 1)
        ty[target - 2] = checked_add(ty[target - 2], checked_mul(c, Pj[deg]));
    }
    Pj = poly_mul_trunc(Pj, P, maxdeg);
  }
  data.tail_yp = std::move(ty);

  if (d.tail_x_override) data.tail_xp = *d.tail_x_override;
  if (d.tail_y_override) data.tail_yp = *d.tail_y_override;
  return data;
}

PcGroupData nebelung_data(const FamilyDescriptor& d) {
  validate_nebelung(d.m, d.n, d.k, d.rho);
  const int m = d.m, n = d.n, e = n - m + 2;
  const int g = m + e - 3;  // s_2, s_3..s_{m-1}, t_3..t_{e+1}
  const auto sidx = [m](int j) { return j - 2; };           // 2 <= j <= m-1
  const auto tidx = [m](int j) { return m - 5 + j; };       // 3 <= j <= e+1
  const auto add_s = [&](std::vector<i64>& row, int j, i64 c) {
    if (j >= 2 && j <= m - 1) row[sidx(j)] = checked_add(row[sidx(j)], c);
  };
  const auto add_t = [&](std::vector<i64>& row, int j, i64 c) {
    if (j >= 3 && j <= e + 1) row[tidx(j)] = checked_add(row[tidx(j)], c);
  };

  PcGroupData data;
  data.prime = 3;
  for (int j = 2; j <= m - 1; ++j) data.generator_labels.push_back("s" + std::to_string(j));
  for (int j = 3; j <= e + 1; ++j) data.generator_labels.push_back("t" + std::to_string(j));

  data.derived.generator_count = g;
  {
    std::vector<i64> row(static_cast<std::size_t>(g), 0);
    add_s(row, 2, 3);
    add_s(row, 3, 3);
    add_t(row, 3, 3);
    add_s(row, 4, 1);
    add_t(row, 4, 1);
    data.derived.relations.push_back(row);
  }
  for (int j = 3; j <= m - 1; ++j) {
    std::vector<i64> row(static_cast<std::size_t>(g), 0);
    add_s(row, j, 3);
    add_s(row, j + 1, 3);
    add_s(row, j + 2, 1);
    data.derived.relations.push_back(row);
  }
  for (int j = 3; j <= e + 1; ++j) {
    std::vector<i64> row(static_cast<std::size_t>(g), 0);
    add_t(row, j, 3);
    add_t(row, j + 1, 3);
    add_t(row, j + 2, 1);
    data.derived.relations.push_back(row);
  }
  {
    // Closing relation tau_{e+1} + rho * sigma_{m-1} = 0 written on the
    // chain generators.
    std::vector<i64> row(static_cast<std::size_t>(g), 0);
    if (e == 3) {
      add_t(row, 3, 3);
      add_t(row, 4, 1);
    } else {
      add_t(row, e - 1, -3);
    }
    if (d.rho != 0) {
      if (m == 5) {
        add_s(row, 3, -3 * d.rho);
        add_s(row, 4, -d.rho);
      } else {
        add_s(row, m - 3, 3 * d.rho);
      }
    }
    data.derived.relations.push_back(row);
  }

  data.action_x = IntMatrix(g, g);
  data.action_y = IntMatrix(g, g);
  for (int i = 0; i < g; ++i) {
    data.action_x.at(i, i) = 1;
    data.action_y.at(i, i) = 1;
  }
  for (int j = 2; j <= m - 1; ++j)
    if (j + 1 <= m - 1) data.action_x.at(sidx(j + 1), sidx(j)) = 1;
  data.action_y.at(tidx(3), sidx(2)) = 1;
  for (int j = 3; j <= e + 1; ++j)
    if (j + 1 <= e + 1) data.action_y.at(tidx(j + 1), tidx(j)) = 1;

  data.comm_yx.assign(static_cast<std::size_t>(g), 0);
  data.comm_yx[sidx(2)] = 1;

  data.tail_yp.assign(static_cast<std::size_t>(g), 0);
  add_s(data.tail_yp, 3, 2);
  add_s(data.tail_yp, 4, 1);
  data.tail_xp.assign(static_cast<std::size_t>(g), 0);
  add_t(data.tail_xp, 3, -2);
  add_t(data.tail_xp, 4, -1);

  if (d.tail_x_override) data.tail_xp = *d.tail_x_override;
  if (d.tail_y_override) data.tail_yp = *d.tail_y_override;
  return data;
}

PcGroupData classic2_data(const FamilyDescriptor& d) {
  const int m = d.m;
  const ChainSkeleton chain(2, m);
  const int g = chain.g;

  PcGroupData data;
  data.prime = 2;
  data.generator_labels = chain.labels();
  data.derived = chain.presentation();
  data.action_x = chain.shift_action();
  data.action_y = IntMatrix::identity(g);
  data.comm_yx.assign(static_cast<std::size_t>(g), 0);
  data.comm_yx[0] = 1;

  data.tail_xp.assign(static_cast<std::size_t>(g), 0);
  data.tail_yp.assign(static_cast<std::size_t>(g), 0);
  data.tail_yp[0] = -1;  // y^2 = s_2^{-1}: y generates the cyclic chain
  if (d.family == Family::Quaternion) data.tail_xp[g - 1] = 1;
  if (d.family == Family::Semidihedral) data.tail_yp[g - 1] = checked_add(data.tail_yp[g - 1], 1);

  if (d.tail_x_override) data.tail_xp = *d.tail_x_override;
  if (d.tail_y_override) data.tail_yp = *d.tail_y_override;
  return data;
}

// Exact integer solve M u = rhs via the Smith decomposition; returns the
// empty optional when no integral solution exists.
std::optional<std::vector<i64>> solve_linear(const IntMatrix& M, const std::vector<i64>& rhs) {
  const SmithDecomposition snf = smith_normal_form(M);
  const std::vector<i64> w = snf.U.apply(rhs);
  std::vector<i64> y(static_cast<std::size_t>(M.cols()), 0);
  for (int i = 0; i < M.rows(); ++i) {
    const i64 d = (i < M.cols()) ? snf.D.at(i, i) : 0;
    if (d != 0) {
      if (w[i] % d != 0) return std::nullopt;
      y[i] = w[i] / d;
    } else if (w[i] != 0) {
      return std::nullopt;
    }
  }
  return snf.V.apply(y);
}

// Fallback for tail construction: solve the two power-relation conditions
// for y^p directly over the integers, modulo the relation lattice.
std::optional<std::vector<i64>> solve_tail_y(const PcGroupData& data) {
  const int g = data.derived.generator_count;
  const int r = static_cast<int>(data.derived.relations.size());
  const int p = data.prime;

  std::vector<i64> nu_y(static_cast<std::size_t>(g), 0);
  std::vector<i64> power(static_cast<std::size_t>(g), 0);
  power[0] = 1;  // [y,x] = s_2
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < g; ++j) nu_y[j] = checked_add(nu_y[j], power[j]);
    power = data.action_y.apply(power);
  }

  IntMatrix M(2 * g, g + 2 * r);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      M.at(i, j) = data.action_x.at(i, j) - (i == j ? 1 : 0);
      M.at(g + i, j) = data.action_y.at(i, j) - (i == j ? 1 : 0);
    }
    for (int q = 0; q < r; ++q) {
      M.at(i, g + q) = data.derived.relations[q][i];
      M.at(g + i, g + r + q) = data.derived.relations[q][i];
    }
  }
  std::vector<i64> rhs(static_cast<std::size_t>(2 * g), 0);
  for (int i = 0; i < g; ++i) rhs[i] = nu_y[i];

  const auto solution = solve_linear(M, rhs);
  if (!solution) return std::nullopt;
  return std::vector<i64>(solution->begin(), solution->begin() + g);
}

void validate_classic2(const FamilyDescriptor& d, const PcGroup& G) {
  if (G.order() > kDefaultEnumerationBudget) return;
  i64 involutions = 0;
  const PcGroup::Element e = G.identity();
  for (i64 code = 0; code < G.order(); ++code) {
    const PcGroup::Element g = G.decode(code);
    if (g != e && G.mul(g, g) == e) ++involutions;
  }
  i64 expected = 0;
  switch (d.family) {
    case Family::Dihedral: expected = (i64{1} << (d.m - 1)) + 1; break;
    case Family::Semidihedral: expected = (i64{1} << (d.m - 2)) + 1; break;
    case Family::Quaternion: expected = 1; break;
    default: return;
  }
  if (involutions != expected) {
    throw InconsistentPresentation("involution census does not match the requested 2-group kind: got " +
                                   std::to_string(involutions) + ", expected " + std::to_string(expected));
  }
}

}  // namespace

PcGroupData family_data(const FamilyDescriptor& descriptor) {
  switch (descriptor.family) {
    case Family::ElementaryAbelian: {
      if (!is_prime(descriptor.p))
        throw std::invalid_argument("elementary abelian family needs a prime p");
      PcGroupData data;
      data.prime = descriptor.p;
      data.derived.generator_count = 0;
      data.action_x = IntMatrix(0, 0);
      data.action_y = IntMatrix(0, 0);
      return data;
    }
    case Family::Coclass1: return coclass1_data(descriptor);
    case Family::Nebelung: return nebelung_data(descriptor);
    case Family::Dihedral:
    case Family::Semidihedral:
    case Family::Quaternion: return classic2_data(descriptor);
  }
  throw std::logic_error("unreachable family");
}

PcGroup build_family(const FamilyDescriptor& descriptor) {
  PcGroupData data = family_data(descriptor);
  PcGroup G = [&]() {
    try {
      return PcGroup::build(data);
    } catch (const InconsistentPresentation&) {
      // The closed-form tail can miss deep relation corrections for large
      // defects; fall back to solving the power relations exactly.
      if (descriptor.family != Family::Coclass1 || descriptor.tail_y_override) throw;
      const auto solved = solve_tail_y(data);
      if (!solved) throw;
      data.tail_yp = *solved;
      return PcGroup::build(data);
    }
  }();
  validate_classic2(descriptor, G);
  return G;
}

FamilyDescriptor socle_shifted(const FamilyDescriptor& descriptor, int shift_x, int shift_y) {
  if (descriptor.family == Family::ElementaryAbelian)
    throw std::invalid_argument("the elementary abelian family has no chain to shift along");
  FamilyDescriptor base = descriptor;
  base.tail_x_override.reset();
  base.tail_y_override.reset();
  const PcGroupData data = family_data(base);
  const int socle = descriptor.m - 3;  // named index of s_{m-1}
  FamilyDescriptor out = descriptor;
  std::vector<i64> tx = data.tail_xp, ty = data.tail_yp;
  tx[socle] = checked_add(tx[socle], shift_x);
  ty[socle] = checked_add(ty[socle], shift_y);
  out.tail_x_override = std::move(tx);
  out.tail_y_override = std::move(ty);
  return out;
}

}  // namespace ppg
