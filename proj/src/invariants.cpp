#include "ppg/invariants.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "ppg/transfer.hpp"

namespace ppg {

namespace {

i64 int_pow(i64 base, int exp) {
  i64 out = 1;
  for (int i = 0; i < exp; ++i) out = checked_mul(out, base);
  return out;
}

std::string format_vec(const std::vector<i64>& v) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    out << v[i];
  }
  out << ']';
  return out.str();
}

}  // namespace

DerivedSpan DerivedSpan::span(const PcGroup& G, const std::vector<std::vector<i64>>& generators,
                              i64 budget) {
  DerivedSpan out;
  std::vector<std::vector<i64>> gens;
  for (const auto& g : generators) {
    std::vector<i64> r = G.reduce(g);
    if (std::any_of(r.begin(), r.end(), [](i64 c) { return c != 0; })) gens.push_back(std::move(r));
  }
  out.gens_ = gens;

  std::unordered_set<i64> seen;
  std::vector<std::vector<i64>> queue;
  const std::vector<i64> zero(static_cast<std::size_t>(G.derived_group().rank()), 0);
  seen.insert(G.encode(G.from_derived(zero)));
  queue.push_back(zero);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::vector<i64> cur = queue[head];
    for (const auto& g : gens) {
      std::vector<i64> next(cur.size());
      for (std::size_t i = 0; i < cur.size(); ++i) next[i] = checked_add(cur[i], g[i]);
      next = G.reduce(next);
      if (seen.insert(G.encode(G.from_derived(next))).second) {
        if (static_cast<i64>(seen.size()) > budget)
          throw BudgetExceeded("additive closure exceeded the enumeration budget");
        queue.push_back(std::move(next));
      }
    }
  }
  out.codes_.assign(seen.begin(), seen.end());
  std::sort(out.codes_.begin(), out.codes_.end());
  return out;
}

DerivedSpan DerivedSpan::whole(const PcGroup& G, i64 budget) {
  const i64 order = G.derived_group().order();
  if (order > budget) throw BudgetExceeded("derived group larger than the enumeration budget");
  DerivedSpan out;
  out.codes_.resize(static_cast<std::size_t>(order));
  for (i64 i = 0; i < order; ++i) out.codes_[static_cast<std::size_t>(i)] = i;
  const int rank = G.derived_group().rank();
  for (int i = 0; i < rank; ++i) {
    std::vector<i64> e(static_cast<std::size_t>(rank), 0);
    e[i] = 1;
    out.gens_.push_back(std::move(e));
  }
  return out;
}

bool DerivedSpan::contains(const PcGroup& G, const std::vector<i64>& canonical) const {
  const i64 code = G.encode(G.from_derived(G.reduce(canonical)));
  return std::binary_search(codes_.begin(), codes_.end(), code);
}

const DerivedSpan& GammaChain::gamma(int j) const {
  if (j < 2) throw std::invalid_argument("the additive chain starts at gamma_2");
  const std::size_t idx = static_cast<std::size_t>(j - 2);
  return idx < terms.size() ? terms[idx] : terms.back();
}

std::vector<i64> GammaChain::orders(const PcGroup& G) const {
  std::vector<i64> out;
  out.push_back(G.order());
  for (const auto& t : terms) out.push_back(t.order());
  return out;
}

GammaChain gamma_series_additive(const PcGroup& G, i64 budget) {
  GammaChain chain;
  chain.terms.push_back(DerivedSpan::whole(G, budget));
  while (!chain.terms.back().is_trivial()) {
    std::vector<std::vector<i64>> images;
    for (const auto& g : chain.terms.back().generators()) {
      images.push_back(G.twisted_difference(1, 0, g));
      images.push_back(G.twisted_difference(0, 1, g));
    }
    DerivedSpan next = DerivedSpan::span(G, images, budget);
    if (next.order() >= chain.terms.back().order())
      throw std::logic_error("lower central chain failed to shrink");
    chain.terms.push_back(std::move(next));
  }
  chain.m = 1 + static_cast<int>(chain.terms.size());
  return chain;
}

CentralizerChain two_step_centralizer_chain(const PcGroup& G, const GammaChain& chain) {
  CentralizerChain out;
  const int p = G.prime();
  for (int j = 2; j <= chain.m - 1; ++j) {
    const DerivedSpan& lower = chain.gamma(j);
    const DerivedSpan& upper = chain.gamma(j + 2);
    std::vector<std::pair<int, int>> plane;
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b) {
        bool ok = true;
        for (const auto& g : lower.generators()) {
          if (!upper.contains(G, G.twisted_difference(a, b, g))) {
            ok = false;
            break;
          }
        }
        if (ok) plane.emplace_back(a, b);
      }
    }
    out.orders.push_back(checked_mul(static_cast<i64>(plane.size()), G.derived_group().order()));
    out.plane.push_back(std::move(plane));
  }
  return out;
}

int invariant_s(const PcGroup& G, const GammaChain& chain) {
  if (chain.m < 3) throw InvariantUndefined("s is undefined for chains of length two");
  const CentralizerChain chi = two_step_centralizer_chain(G, chain);
  for (int j = 2; j <= chain.m - 1; ++j) {
    if (chi.plane[static_cast<std::size_t>(j - 2)].size() > 1) return j;
  }
  throw std::logic_error("centralizer chain never exceeds the derived group");
}

int invariant_e(const PcGroup& G, const GammaChain& chain) {
  if (chain.m < 3) throw InvariantUndefined("e is undefined for chains of length two");
  for (int j = 3; j <= chain.m; ++j) {
    const i64 index = chain.gamma(j).order() / chain.gamma(j + 1).order();
    if (index <= G.prime()) return j - 1;
  }
  throw std::logic_error("chain indices never drop to p");
}

int invariant_k(const PcGroup& G, const GammaChain& chain) {
  if (chain.m < 3) throw InvariantUndefined("k is undefined for chains of length two");
  const int s = invariant_s(G, chain);
  const int e = invariant_e(G, chain);
  const CentralizerChain chi = two_step_centralizer_chain(G, chain);
  const auto& plane = chi.plane[static_cast<std::size_t>(s - 2)];

  std::vector<std::vector<i64>> commutators;
  for (const auto& [a, b] : plane)
    for (const auto& g : chain.gamma(e).generators()) commutators.push_back(G.twisted_difference(a, b, g));
  const DerivedSpan target = DerivedSpan::span(G, commutators);

  for (int j = chain.m; j >= 2; --j) {
    if (target == chain.gamma(j)) return chain.m - j;
  }
  throw NoMatch("[chi_s, gamma_e] matches no term of the lower central chain");
}

std::vector<MaximalSubgroup> maximal_subgroups(const PcGroup& G) {
  const int p = G.prime();
  const int rank = G.derived_group().rank();
  std::vector<MaximalSubgroup> out;
  for (int i = 1; i <= p + 1; ++i) {
    MaximalSubgroup M;
    M.index = i;
    M.plane_a = i == 1 ? 0 : 1;
    M.plane_b = i == 1 ? 1 : i - 2;
    M.gen = G.make(M.plane_a, M.plane_b, std::vector<i64>(static_cast<std::size_t>(rank), 0));
    std::vector<std::vector<i64>> images;
    for (int j = 0; j < rank; ++j) {
      std::vector<i64> e(static_cast<std::size_t>(rank), 0);
      e[j] = 1;
      images.push_back(G.twisted_difference(M.plane_a, M.plane_b, e));
    }
    M.derived = DerivedSpan::span(G, images);
    out.push_back(std::move(M));
  }
  return out;
}

AbelianGroup abelianization_of_maximal(const PcGroup& G, const MaximalSubgroup& M) {
  const int rank = G.derived_group().rank();
  const PcGroup::Element power = G.pow(M.gen, G.prime());
  if (power.a != 0 || power.b != 0)
    throw std::logic_error("p-th power of a maximal-subgroup generator must lie in the derived group");

  AbelianPresentation pres;
  pres.generator_count = rank + 1;
  {
    std::vector<i64> row(static_cast<std::size_t>(rank + 1), 0);
    row[0] = G.prime();
    for (int i = 0; i < rank; ++i) row[i + 1] = checked_sub(0, power.w[i]);
    pres.relations.push_back(std::move(row));
  }
  for (int i = 0; i < rank; ++i) {
    std::vector<i64> row(static_cast<std::size_t>(rank + 1), 0);
    row[i + 1] = G.derived_group().invariant_factors()[i];
    pres.relations.push_back(std::move(row));
  }
  for (int j = 0; j < rank; ++j) {
    std::vector<i64> e(static_cast<std::size_t>(rank), 0);
    e[j] = 1;
    const std::vector<i64> image = G.twisted_difference(M.plane_a, M.plane_b, e);
    std::vector<i64> row(static_cast<std::size_t>(rank + 1), 0);
    for (int i = 0; i < rank; ++i) row[i + 1] = image[i];
    pres.relations.push_back(std::move(row));
  }
  return abelian_invariants(pres);
}

InvariantReport report(const PcGroup& G) {
  InvariantReport rep;
  rep.p = G.prime();
  rep.n = G.log_order();

  const GammaChain chain = gamma_series_additive(G);
  rep.m = chain.m;
  rep.cl = chain.m - 1;
  rep.cc = rep.n - rep.cl;
  rep.gamma_orders = chain.orders(G);

  if (chain.m >= 3) {
    const CentralizerChain chi = two_step_centralizer_chain(G, chain);
    rep.chi_orders = chi.orders;
    rep.s = invariant_s(G, chain);
    rep.e = invariant_e(G, chain);
    rep.k = invariant_k(G, chain);
  }

  const std::vector<MaximalSubgroup> subs = maximal_subgroups(G);
  for (const auto& M : subs) rep.ab.push_back(abelianization_of_maximal(G, M));

  const KappaType type = kappa(G, subs);
  rep.kappa_digits = type.digits;
  rep.kappa = type.str;
  rep.kappa_orbit = type.orbit;
  rep.nu = nu(type);
  return rep;
}

namespace {

struct Checker {
  VerificationOutcome out;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      out.passed = false;
      out.failures.push_back(what);
    }
  }

  void note(const std::string& text) { out.notes.push_back(text); }
};

void check_gamma_orders(Checker& c, const PcGroup& G, const GammaChain& chain,
                        const std::vector<i64>& expected) {
  const std::vector<i64> got = chain.orders(G);
  if (got != expected) {
    std::ostringstream msg;
    msg << "lower central chain orders " << format_vec(got) << " differ from expected "
        << format_vec(expected);
    c.expect(false, msg.str());
  }
}

void check_ab_orders(Checker& c, const std::vector<AbelianGroup>& ab, const std::vector<i64>& expected) {
  for (std::size_t i = 0; i < ab.size(); ++i) {
    if (ab[i].order() != expected[i]) {
      std::ostringstream msg;
      msg << "abelianization of M_" << (i + 1) << " has order " << ab[i].order() << ", expected "
          << expected[i];
      c.expect(false, msg.str());
    }
  }
}

// sigma_3 = y^p, tau_3 = x^p, then sigma_{j+1} = [sigma_j, x] and
// tau_{j+1} = [tau_j, y].
std::vector<std::vector<i64>> power_commutator_chain(const PcGroup& G, std::vector<i64> start,
                                                     bool along_x, int count) {
  std::vector<std::vector<i64>> out;
  std::vector<i64> cur = G.reduce(std::move(start));
  for (int i = 0; i < count; ++i) {
    cur = along_x ? G.twisted_difference(1, 0, cur) : G.twisted_difference(0, 1, cur);
    out.push_back(cur);
  }
  return out;
}

}  // namespace

VerificationOutcome verify_structure(const PcGroup& G, const FamilyDescriptor& descriptor) {
  Checker c;
  const int p = G.prime();
  const GammaChain chain = gamma_series_additive(G);
  const std::vector<MaximalSubgroup> subs = maximal_subgroups(G);
  std::vector<AbelianGroup> ab;
  for (const auto& M : subs) ab.push_back(abelianization_of_maximal(G, M));

  switch (descriptor.family) {
    case Family::ElementaryAbelian: {
      c.expect(chain.m == 2, "abelian group must have a chain of length two");
      c.expect(G.log_order() == 2, "elementary abelian group must have order p^2");
      for (std::size_t i = 0; i < ab.size(); ++i)
        c.expect(ab[i] == AbelianGroup({p}), "maximal subgroups of the (p,p) group are cyclic of order p");
      break;
    }

    case Family::Coclass1:
    case Family::Dihedral:
    case Family::Semidihedral:
    case Family::Quaternion: {
      const int m = descriptor.m, k = descriptor.k;
      c.expect(G.log_order() == m, "group order must be p^m");
      std::vector<i64> expected_gamma{int_pow(p, m)};
      for (int j = 2; j <= m; ++j) expected_gamma.push_back(int_pow(p, m - j));
      check_gamma_orders(c, G, chain, expected_gamma);

      std::vector<i64> expected_ab{int_pow(p, m - k - 1)};
      for (int i = 2; i <= p + 1; ++i) expected_ab.push_back(int_pow(p, 2));
      check_ab_orders(c, ab, expected_ab);

      c.expect(subs[0].derived == chain.gamma(m - k),
               "[M_1, M_1] must equal the chain term gamma_{m-k}");
      for (int i = 1; i <= p; ++i)
        c.expect(subs[static_cast<std::size_t>(i)].derived == chain.gamma(3),
                 "[M_i, M_i] must equal gamma_3 for i >= 2");
      c.expect(subs[0].derived.is_trivial() == (k == 0), "M_1 is abelian exactly when k = 0");
      for (int i = 1; i <= p; ++i)
        c.expect(subs[static_cast<std::size_t>(i)].derived.is_trivial() == (m == 3),
                 "M_i (i >= 2) is abelian exactly when m = 3");

      c.expect(invariant_s(G, chain) == 2, "maximal-class groups have s = 2");
      c.expect(invariant_e(G, chain) == 2, "maximal-class groups have e = 2");
      c.expect(invariant_k(G, chain) == k, "measured defect k must match the descriptor");

      if (descriptor.family != Family::Coclass1) {
        const AbelianGroup cyclic({int_pow(2, m - 1)});
        c.expect(ab[0] == cyclic, "M_1 must be the cyclic maximal subgroup");
        const AbelianGroup klein({2, 2});
        const bool q8 = descriptor.family == Family::Quaternion && m == 3;
        for (int i = 1; i <= 2; ++i)
          c.expect(ab[static_cast<std::size_t>(i)] == (q8 ? AbelianGroup({4}) : klein),
                   "non-cyclic maximal subgroups have type (2,2) beyond order 8");
      }
      break;
    }

    case Family::Nebelung: {
      const int m = descriptor.m, n = descriptor.n, k = descriptor.k;
      const int e = n - m + 2;
      c.expect(G.log_order() == n, "group order must be 3^n");

      std::vector<i64> expected_gamma{int_pow(3, n), int_pow(3, n - 2)};
      for (int j = 3; j <= e; ++j) expected_gamma.push_back(int_pow(3, m + e - 2 * j + 1));
      for (int j = e + 1; j <= m; ++j) expected_gamma.push_back(int_pow(3, m - j));
      check_gamma_orders(c, G, chain, expected_gamma);

      check_ab_orders(c, ab, {int_pow(3, m - k - 1), int_pow(3, e), 27, 27});

      // Expected derived subgroups of the four maximal subgroups, built from
      // the power-commutator elements sigma_j, tau_j.
      const auto named_unit = [&](int idx) {
        std::vector<i64> v(static_cast<std::size_t>(G.derived_basis().named_count()), 0);
        v[static_cast<std::size_t>(idx)] = 1;
        return G.derived_basis().to_canonical(v);
      };
      const std::vector<i64> s3 = named_unit(1);          // s_3 has named index 1
      const std::vector<i64> t3 = named_unit(m - 2);      // t_3 follows s_2..s_{m-1}

      std::vector<std::vector<i64>> m1_gens{t3};
      for (auto& tau : power_commutator_chain(G, G.tail_xp(), false, e - 2)) m1_gens.push_back(tau);
      c.expect(subs[0].derived == DerivedSpan::span(G, m1_gens),
               "[M_1, M_1] must be generated by t_3 and tau_4..tau_{e+1}");
      c.expect(subs[0].derived.order() == int_pow(3, e + k - 2),
               "[M_1, M_1] must have order 3^{e+k-2}");

      std::vector<std::vector<i64>> m2_gens{s3};
      for (auto& sig : power_commutator_chain(G, G.tail_yp(), true, m - 4)) m2_gens.push_back(sig);
      c.expect(subs[1].derived == DerivedSpan::span(G, m2_gens),
               "[M_2, M_2] must be generated by s_3 and sigma_4..sigma_{m-1}");
      c.expect(subs[1].derived.order() == int_pow(3, m - 3), "[M_2, M_2] must have order 3^{m-3}");

      for (int i = 3; i <= 4; ++i) {
        std::vector<std::vector<i64>> gens = chain.gamma(4).generators();
        std::vector<i64> mixed(s3.size());
        for (std::size_t j = 0; j < s3.size(); ++j)
          mixed[j] = i == 3 ? checked_add(s3[j], t3[j]) : checked_sub(s3[j], t3[j]);
        gens.push_back(std::move(mixed));
        c.expect(subs[static_cast<std::size_t>(i - 1)].derived == DerivedSpan::span(G, gens),
                 "[M_i, M_i] must be generated by s_3 t_3^{+-1} and gamma_4");
        c.expect(subs[static_cast<std::size_t>(i - 1)].derived.order() == int_pow(3, n - 4),
                 "[M_i, M_i] must have order 3^{n-4} for i in {3,4}");
      }
      for (int i = 0; i < 4; ++i)
        c.expect(!subs[static_cast<std::size_t>(i)].derived.is_trivial(),
                 "no maximal subgroup of this family is abelian");

      c.expect(invariant_e(G, chain) == e, "measured e must equal n - m + 2");
      c.expect(invariant_k(G, chain) == k, "measured defect k must match the descriptor");
      const int s = invariant_s(G, chain);
      if (s != e) {
        c.note("observed s = " + std::to_string(s) + " differs from e = " + std::to_string(e));
      }
      break;
    }
  }
  return c.out;
}

}  // namespace ppg
