#include "ppg/pcgroup.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <unordered_set>

namespace ppg {

namespace {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; static_cast<long long>(d) * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

std::string format_element(const PcGroup::Element& g) {
  std::ostringstream out;
  out << "(" << g.a << "," << g.b << ",[";
  for (std::size_t i = 0; i < g.w.size(); ++i) {
    if (i) out << ",";
    out << g.w[i];
  }
  out << "])";
  return out.str();
}

// Entry-wise reduction of an endomorphism matrix: row i acts modulo d_i.
IntMatrix reduce_matrix(const IntMatrix& M, const AbelianGroup& A) {
  IntMatrix out(M.rows(), M.cols());
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) out.at(i, j) = mod_floor(M.at(i, j), A.invariant_factors()[i]);
  return out;
}

bool same_endomorphism(const IntMatrix& A, const IntMatrix& B, const AbelianGroup& G) {
  return reduce_matrix(A, G) == reduce_matrix(B, G);
}

std::vector<i64> add_vec(const std::vector<i64>& a, const std::vector<i64>& b) {
  std::vector<i64> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = checked_add(a[i], b[i]);
  return out;
}

std::vector<i64> sub_vec(const std::vector<i64>& a, const std::vector<i64>& b) {
  std::vector<i64> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = checked_sub(a[i], b[i]);
  return out;
}

}  // namespace

PcGroup PcGroup::build(const PcGroupData& data) {
  if (!is_prime(data.prime)) throw std::invalid_argument("group prime must be a prime number");
  const int g = data.derived.generator_count;
  if (static_cast<int>(data.generator_labels.size()) != g)
    throw std::invalid_argument("generator label count does not match the presentation");
  if (data.action_x.rows() != g || data.action_x.cols() != g || data.action_y.rows() != g ||
      data.action_y.cols() != g)
    throw std::invalid_argument("action matrices must be square over the named generators");
  if (static_cast<int>(data.comm_yx.size()) != g || static_cast<int>(data.tail_xp.size()) != g ||
      static_cast<int>(data.tail_yp.size()) != g)
    throw std::invalid_argument("element vectors must be given in named coordinates");

  PcGroup G;
  G.p_ = data.prime;
  G.basis_ = QuotientBasis(data.derived);
  const AbelianGroup& A = G.basis_.group();
  const int rank = A.rank();
  G.zero_.assign(rank, 0);

  // The named actions must preserve the relation lattice, otherwise they do
  // not induce endomorphisms of A at all.
  for (const auto& rel : data.derived.relations) {
    for (const IntMatrix* act : {&data.action_x, &data.action_y}) {
      std::vector<i64> image = G.basis_.to_canonical(act->apply(rel));
      if (image != G.zero_) {
        throw InconsistentPresentation(
            "action does not preserve the relation lattice of the derived subgroup");
      }
    }
  }

  const IntMatrix mx = G.basis_.action_to_canonical(data.action_x);
  const IntMatrix my = G.basis_.action_to_canonical(data.action_y);
  G.s2_ = G.basis_.to_canonical(data.comm_yx);
  G.tx_ = G.basis_.to_canonical(data.tail_xp);
  G.ty_ = G.basis_.to_canonical(data.tail_yp);

  const int p = G.p_;
  G.mx_.resize(p);
  G.my_.resize(p);
  G.mx_[0] = IntMatrix::identity(rank);
  G.my_[0] = IntMatrix::identity(rank);
  for (int i = 1; i < p; ++i) {
    G.mx_[i] = reduce_matrix(G.mx_[i - 1].multiplied_by(mx), A);
    G.my_[i] = reduce_matrix(G.my_[i - 1].multiplied_by(my), A);
  }
  const IntMatrix mx_p = reduce_matrix(G.mx_[p - 1].multiplied_by(mx), A);
  const IntMatrix my_p = reduce_matrix(G.my_[p - 1].multiplied_by(my), A);
  const IntMatrix id = IntMatrix::identity(rank);
  if (!same_endomorphism(mx_p, id, A))
    throw InconsistentPresentation("conjugation by x does not have order dividing p on the derived subgroup");
  if (!same_endomorphism(my_p, id, A))
    throw InconsistentPresentation("conjugation by y does not have order dividing p on the derived subgroup");
  if (!same_endomorphism(mx.multiplied_by(my), my.multiplied_by(mx), A))
    throw InconsistentPresentation("the two conjugation actions do not commute on the derived subgroup");

  // A plays the role of the derived subgroup of a group generated by x and y
  // alone, so [y,x] together with all of its conjugates must generate A.
  {
    AbelianPresentation closure;
    closure.generator_count = rank;
    for (int i = 0; i < rank; ++i) {
      std::vector<i64> row(static_cast<std::size_t>(rank), 0);
      row[static_cast<std::size_t>(i)] = A.invariant_factors()[static_cast<std::size_t>(i)];
      closure.relations.push_back(row);
    }
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        closure.relations.push_back(G.mx_[i].multiplied_by(G.my_[j]).apply(G.s2_));
    if (!abelian_invariants(closure).is_trivial())
      throw InconsistentPresentation(
          "the commutator [y,x] and its conjugates do not generate the derived subgroup");
  }

  if (G.reduce(mx.apply(G.tx_)) != G.reduce(G.tx_))
    throw InconsistentPresentation("x does not centralise x^p");
  if (G.reduce(my.apply(G.ty_)) != G.reduce(G.ty_))
    throw InconsistentPresentation("y does not centralise y^p");

  // Power-relation conditions linking the tails to [y,x]:
  //   (Mx - 1) y^p = (1 + My + ... + My^{p-1}) [y,x]
  //   (My - 1) x^p = -(1 + Mx + ... + Mx^{p-1}) [y,x]
  std::vector<i64> norm_y(rank, 0), norm_x(rank, 0);
  for (int i = 0; i < p; ++i) {
    norm_y = add_vec(norm_y, G.my_[i].apply(G.s2_));
    norm_x = add_vec(norm_x, G.mx_[i].apply(G.s2_));
  }
  if (G.reduce(sub_vec(mx.apply(G.ty_), G.ty_)) != G.reduce(norm_y))
    throw InconsistentPresentation("power relation for y^p is inconsistent with [y,x]");
  if (G.reduce(sub_vec(my.apply(G.tx_), G.tx_)) != G.reduce(sub_vec(std::vector<i64>(rank, 0), norm_x)))
    throw InconsistentPresentation("power relation for x^p is inconsistent with [y,x]");

  G.s2_ = G.reduce(G.s2_);
  G.tx_ = G.reduce(G.tx_);
  G.ty_ = G.reduce(G.ty_);

  G.order_ = checked_mul(checked_mul(p, p), A.order());
  i64 q = G.order_;
  G.log_order_ = 0;
  while (q > 1) {
    if (q % p != 0) throw InconsistentPresentation("group order is not a power of the prime");
    q /= p;
    ++G.log_order_;
  }

  G.strides_.assign(rank, 1);
  for (int i = rank - 2; i >= 0; --i)
    G.strides_[i] = checked_mul(G.strides_[i + 1], A.invariant_factors()[i + 1]);

  // Collection cross terms C(b,c) with y^b x^c = x^c y^b C(b,c).
  G.cross_.assign(static_cast<std::size_t>(p) * p, std::vector<i64>(rank, 0));
  for (int b = 0; b < p; ++b) {
    std::vector<i64> inner(rank, 0);  // sum_{i<b} My^i [y,x]
    for (int i = 0; i < b; ++i) inner = add_vec(inner, G.my_[i].apply(G.s2_));
    std::vector<i64> acc(rank, 0);
    for (int c = 0; c < p; ++c) {
      G.cross_[static_cast<std::size_t>(b) * p + c] = G.reduce(acc);
      acc = add_vec(acc, G.mx_[c].apply(inner));
    }
  }

  // Associativity: exhaustively for small groups, on a fixed pseudo-random
  // sample of triples otherwise.
  const i64 full_limit = 271;  // largest order whose triple count stays within 2e7
  auto check_triple = [&G](const Element& u, const Element& v, const Element& w) {
    if (G.mul(G.mul(u, v), w) != G.mul(u, G.mul(v, w))) {
      throw InconsistentPresentation("associativity fails at " + format_element(u) + " * " +
                                     format_element(v) + " * " + format_element(w));
    }
  };
  if (G.order_ <= full_limit) {
    const int n = static_cast<int>(G.order_);
    std::vector<int> table(static_cast<std::size_t>(n) * n);
    std::vector<Element> elems(n);
    for (int i = 0; i < n; ++i) elems[i] = G.decode(i);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        table[static_cast<std::size_t>(i) * n + j] = static_cast<int>(G.encode(G.mul(elems[i], elems[j])));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int ij = table[static_cast<std::size_t>(i) * n + j];
        for (int k = 0; k < n; ++k) {
          if (table[static_cast<std::size_t>(ij) * n + k] !=
              table[static_cast<std::size_t>(i) * n + table[static_cast<std::size_t>(j) * n + k]]) {
            throw InconsistentPresentation("associativity fails at " + format_element(elems[i]) + " * " +
                                           format_element(elems[j]) + " * " + format_element(elems[k]));
          }
        }
      }
    }
  } else {
    std::mt19937_64 rng(0xC0C1A55ULL);
    for (int t = 0; t < 100000; ++t) {
      const Element u = G.decode(static_cast<i64>(rng() % static_cast<unsigned long long>(G.order_)));
      const Element v = G.decode(static_cast<i64>(rng() % static_cast<unsigned long long>(G.order_)));
      const Element w = G.decode(static_cast<i64>(rng() % static_cast<unsigned long long>(G.order_)));
      check_triple(u, v, w);
    }
  }

  return G;
}

PcGroup::Element PcGroup::from_derived(const std::vector<i64>& canonical) const {
  return Element{0, 0, reduce(canonical)};
}

PcGroup::Element PcGroup::make(int a, int b, const std::vector<i64>& canonical) const {
  return Element{static_cast<int>(mod_floor(a, p_)), static_cast<int>(mod_floor(b, p_)), reduce(canonical)};
}

std::vector<i64> PcGroup::reduce(std::vector<i64> canonical) const {
  return group_element_reduce(std::move(canonical), basis_.group());
}

std::vector<i64> PcGroup::twisted_difference(int a, int b, const std::vector<i64>& canonical) const {
  const std::vector<i64> image = mx_[a].apply(my_[b].apply(canonical));
  return reduce(sub_vec(image, canonical));
}

PcGroup::Element PcGroup::mul(const Element& g, const Element& h) const {
  // x^a y^b w * x^c y^d w' = x^{a+c} y^{b+d} (My^d(C(b,c) + Mx^c(w)) + w')
  std::vector<i64> t = add_vec(cross_[static_cast<std::size_t>(g.b) * p_ + h.a], mx_[h.a].apply(g.w));
  std::vector<i64> w = add_vec(my_[h.b].apply(t), h.w);
  int a = g.a + h.a;
  int b = g.b + h.b;
  if (b >= p_) {
    b -= p_;
    w = add_vec(w, ty_);
  }
  if (a >= p_) {
    a -= p_;
    w = add_vec(w, my_[b].apply(tx_));
  }
  return Element{a, b, reduce(w)};
}

PcGroup::Element PcGroup::inv(const Element& g) const {
  const Element h{(p_ - g.a) % p_, (p_ - g.b) % p_, zero_};
  const Element gh = mul(g, h);  // lies in A
  return Element{h.a, h.b, reduce(sub_vec(zero_, gh.w))};
}

PcGroup::Element PcGroup::pow(const Element& g, i64 e) const {
  if (e < 0) return pow(inv(g), -e);
  Element acc = identity();
  Element base = g;
  while (e > 0) {
    if (e & 1) acc = mul(acc, base);
    base = mul(base, base);
    e >>= 1;
  }
  return acc;
}

PcGroup::Element PcGroup::comm(const Element& g, const Element& h) const {
  return mul(mul(inv(g), inv(h)), mul(g, h));
}

i64 PcGroup::element_order(const Element& g) const {
  i64 ord = 1;
  Element h = g;
  const Element e = identity();
  while (h != e) {
    h = pow(h, p_);
    ord = checked_mul(ord, p_);
  }
  return ord;
}

i64 PcGroup::encode(const Element& g) const {
  i64 wcode = 0;
  for (std::size_t i = 0; i < g.w.size(); ++i) wcode = checked_add(wcode, checked_mul(g.w[i], strides_[i]));
  return checked_add(checked_mul(static_cast<i64>(g.a) * p_ + g.b, basis_.group().order()), wcode);
}

PcGroup::Element PcGroup::decode(i64 code) const {
  const i64 awidth = basis_.group().order();
  i64 wcode = code % awidth;
  i64 ab = code / awidth;
  Element g;
  g.a = static_cast<int>(ab / p_);
  g.b = static_cast<int>(ab % p_);
  g.w.resize(strides_.size());
  for (std::size_t i = 0; i < strides_.size(); ++i) {
    g.w[i] = wcode / strides_[i];
    wcode %= strides_[i];
  }
  return g;
}

Subgroup::Subgroup(const PcGroup&, std::vector<i64> sorted_codes, std::vector<PcGroup::Element> generators)
    : codes_(std::move(sorted_codes)), gens_(std::move(generators)) {}

bool Subgroup::contains_code(i64 code) const {
  return std::binary_search(codes_.begin(), codes_.end(), code);
}

Subgroup subgroup_closure(const PcGroup& G, const std::vector<PcGroup::Element>& generators, i64 budget) {
  std::unordered_set<i64> seen;
  std::vector<i64> queue;
  seen.insert(G.encode(G.identity()));
  queue.push_back(G.encode(G.identity()));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const PcGroup::Element cur = G.decode(queue[head]);
    for (const auto& gen : generators) {
      const i64 next = G.encode(G.mul(cur, gen));
      if (seen.insert(next).second) {
        if (static_cast<i64>(seen.size()) > budget)
          throw BudgetExceeded("subgroup closure exceeded the enumeration budget");
        queue.push_back(next);
      }
    }
  }
  std::vector<i64> codes(seen.begin(), seen.end());
  std::sort(codes.begin(), codes.end());
  return Subgroup(G, std::move(codes), generators);
}

std::vector<Subgroup> lower_central_series(const PcGroup& G, i64 budget) {
  if (G.order() > budget) throw BudgetExceeded("group too large to enumerate for the central series");
  std::vector<i64> all(static_cast<std::size_t>(G.order()));
  for (i64 i = 0; i < G.order(); ++i) all[static_cast<std::size_t>(i)] = i;
  std::vector<Subgroup> series;
  series.emplace_back(G, std::move(all), std::vector<PcGroup::Element>{G.gen_x(), G.gen_y()});

  const PcGroup::Element x = G.gen_x(), y = G.gen_y();
  while (series.back().order() > 1) {
    std::vector<PcGroup::Element> comms;
    for (i64 code : series.back().codes()) {
      const PcGroup::Element h = G.decode(code);
      comms.push_back(G.comm(h, x));
      comms.push_back(G.comm(h, y));
    }
    Subgroup next = subgroup_closure(G, comms, budget);
    if (next.order() >= series.back().order())
      throw std::logic_error("lower central series failed to shrink");
    series.push_back(std::move(next));
  }
  return series;
}

Subgroup derived_subgroup(const PcGroup& G, const Subgroup& H, i64 budget) {
  std::vector<PcGroup::Element> gens = H.generators();
  if (gens.empty()) {
    if (H.order() > 1024)
      throw BudgetExceeded("derived subgroup of a raw element set needs an explicit generator list");
    for (i64 code : H.codes()) gens.push_back(G.decode(code));
  }
  std::vector<PcGroup::Element> closure_gens;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = 0; j < gens.size(); ++j)
      if (i != j) closure_gens.push_back(G.comm(gens[i], gens[j]));

  // Normal closure inside H: conjugate by the generators of H until stable.
  for (;;) {
    Subgroup S = subgroup_closure(G, closure_gens, budget);
    bool grew = false;
    for (i64 code : S.codes()) {
      const PcGroup::Element s = G.decode(code);
      for (const auto& g : gens) {
        const PcGroup::Element conj = G.mul(G.mul(G.inv(g), s), g);
        if (!S.contains_code(G.encode(conj))) {
          closure_gens.push_back(conj);
          grew = true;
          break;
        }
      }
      if (grew) break;
    }
    if (!grew) return S;
  }
}

Subgroup center(const PcGroup& G, i64 budget) {
  if (G.order() > budget) throw BudgetExceeded("group too large to enumerate for the centre");
  const PcGroup::Element x = G.gen_x(), y = G.gen_y();
  const PcGroup::Element e = G.identity();
  std::vector<i64> codes;
  for (i64 code = 0; code < G.order(); ++code) {
    const PcGroup::Element g = G.decode(code);
    if (G.comm(g, x) == e && G.comm(g, y) == e) codes.push_back(code);
  }
  return Subgroup(G, std::move(codes), {});
}

}  // namespace ppg
