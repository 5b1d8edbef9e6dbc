#include "ppg/transfer.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ppg {

namespace {

// The line of the (a, b) plane belonging to a maximal subgroup: all scalar
// multiples of its plane point.
std::vector<std::pair<int, int>> plane_line(int p, int a, int b) {
  std::vector<std::pair<int, int>> out;
  for (int j = 0; j < p; ++j) out.emplace_back(j * a % p, j * b % p);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool on_line(const std::vector<std::pair<int, int>>& line, int a, int b) {
  return std::binary_search(line.begin(), line.end(), std::make_pair(a, b));
}

// Transfer of g relative to the right transversal T of M in G: write
// T[i] g = m_i T[rho(i)] with m_i in M and multiply the m_i together. The
// result always lies in A; it is returned in canonical coordinates.
std::vector<i64> transfer_with_transversal(const PcGroup& G,
                                           const std::vector<std::pair<int, int>>& line,
                                           const std::vector<PcGroup::Element>& T,
                                           const PcGroup::Element& g) {
  PcGroup::Element acc = G.identity();
  std::vector<bool> used(T.size(), false);
  for (const auto& t : T) {
    const PcGroup::Element tg = G.mul(t, g);
    bool found = false;
    for (std::size_t j = 0; j < T.size(); ++j) {
      const PcGroup::Element cand = G.mul(tg, G.inv(T[j]));
      if (on_line(line, cand.a, cand.b)) {
        if (used[j] || found) throw std::logic_error("transversal cosets are not disjoint");
        used[j] = true;
        found = true;
        acc = G.mul(acc, cand);
      }
    }
    if (!found) throw std::logic_error("coset representative not found in transversal");
  }
  if (acc.a != 0 || acc.b != 0)
    throw std::logic_error("transfer value escaped the derived group");
  return acc.w;
}

}  // namespace

TransferMap transfer_map(const PcGroup& G, const MaximalSubgroup& M) {
  const int p = G.prime();
  const int rank = G.derived_group().rank();
  const std::vector<std::pair<int, int>> line = plane_line(p, M.plane_a, M.plane_b);

  // Representative outside M generating the p cosets.
  const PcGroup::Element t = on_line(line, 1, 0) ? G.gen_y() : G.gen_x();
  std::vector<PcGroup::Element> T{G.identity()};
  for (int i = 1; i < p; ++i) T.push_back(G.mul(T.back(), t));

  // A second, independently chosen transversal: shift every representative
  // by a subgroup element and reverse the enumeration order.
  std::vector<PcGroup::Element> T2;
  for (std::size_t i = 0; i < T.size(); ++i) {
    std::vector<i64> shift(static_cast<std::size_t>(rank), 0);
    if (rank > 0) shift[i % static_cast<std::size_t>(rank)] = static_cast<i64>(i);
    T2.push_back(G.mul(G.from_derived(G.reduce(shift)), T[i]));
  }
  std::reverse(T2.begin(), T2.end());

  TransferMap out;
  out.subgroup_index = M.index;
  out.values.resize(static_cast<std::size_t>(p) * static_cast<std::size_t>(p));

  for (int a = 0; a < p; ++a) {
    for (int b = 0; b < p; ++b) {
      const PcGroup::Element g = G.make(a, b, std::vector<i64>(static_cast<std::size_t>(rank), 0));
      const std::vector<i64> v1 = transfer_with_transversal(G, line, T, g);
      const std::vector<i64> v2 = transfer_with_transversal(G, line, T2, g);
      {
        // Transversal independence modulo [M, M].
        std::vector<i64> diff(v1.size());
        for (std::size_t i = 0; i < v1.size(); ++i) diff[i] = checked_sub(v1[i], v2[i]);
        if (!M.derived.contains(G, diff))
          throw std::logic_error("transfer value depends on the transversal");
      }
      if (rank > 0) {
        // Coset-representative independence: shifting g by a derived-group
        // element must not move the value modulo [M, M].
        std::vector<i64> shift(static_cast<std::size_t>(rank), 0);
        shift[0] = 1;
        const PcGroup::Element g2 = G.mul(g, G.from_derived(G.reduce(shift)));
        const std::vector<i64> v3 = transfer_with_transversal(G, line, T, g2);
        std::vector<i64> diff(v1.size());
        for (std::size_t i = 0; i < v1.size(); ++i) diff[i] = checked_sub(v1[i], v3[i]);
        if (!M.derived.contains(G, diff))
          throw std::logic_error("transfer value depends on the coset representative");
      }
      out.values[static_cast<std::size_t>(a) * static_cast<std::size_t>(p) +
                 static_cast<std::size_t>(b)] = v1;
      if (M.derived.contains(G, v1)) out.kernel_plane.emplace_back(a, b);
    }
  }
  return out;
}

std::string kappa_to_string(const std::vector<int>& digits) {
  std::ostringstream out;
  out << '(';
  for (int d : digits) out << d;
  out << ')';
  return out.str();
}

namespace {

// Lexicographic minimum of the digit string under simultaneous relabelling
// of the p+1 subgroup positions: new digit i is the relabelled old digit at
// the position mapped to i.
std::vector<int> orbit_minimum(const std::vector<int>& digits) {
  const std::size_t q = digits.size();
  std::vector<int> perm(q);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best;
  std::vector<int> inverse(q);
  do {
    for (std::size_t i = 0; i < q; ++i) inverse[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
    std::vector<int> candidate(q);
    for (std::size_t i = 0; i < q; ++i) {
      const int d = digits[static_cast<std::size_t>(perm[i])];
      candidate[i] = d == 0 ? 0 : inverse[static_cast<std::size_t>(d - 1)] + 1;
    }
    if (best.empty() || candidate < best) best = std::move(candidate);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

KappaType kappa(const PcGroup& G, const std::vector<MaximalSubgroup>& subgroups) {
  const int p = G.prime();
  std::vector<std::vector<std::pair<int, int>>> lines;
  for (const auto& M : subgroups) lines.push_back(plane_line(p, M.plane_a, M.plane_b));

  KappaType type;
  for (const auto& M : subgroups) {
    const TransferMap tm = transfer_map(G, M);
    const std::size_t size = tm.kernel_plane.size();
    if (size == static_cast<std::size_t>(p) * static_cast<std::size_t>(p)) {
      type.digits.push_back(0);
    } else if (size == static_cast<std::size_t>(p)) {
      std::vector<std::pair<int, int>> sorted = tm.kernel_plane;
      std::sort(sorted.begin(), sorted.end());
      int digit = -1;
      for (std::size_t j = 0; j < lines.size(); ++j) {
        if (sorted == lines[j]) {
          digit = static_cast<int>(j) + 1;
          break;
        }
      }
      if (digit < 0) throw std::logic_error("transfer kernel line is not a subgroup line");
      type.digits.push_back(digit);
    } else if (size == 1) {
      throw std::logic_error("trivial transfer kernel cannot be encoded as a position digit");
    } else {
      throw std::logic_error("transfer kernel is not a subgroup of the plane");
    }
  }
  type.orbit = orbit_minimum(type.digits);
  type.str = kappa_to_string(type.digits);
  return type;
}

KappaType kappa(const PcGroup& G) { return kappa(G, maximal_subgroups(G)); }

int nu(const KappaType& type) {
  return static_cast<int>(std::count(type.digits.begin(), type.digits.end(), 0));
}

int nu(const PcGroup& G) { return nu(kappa(G)); }

}  // namespace ppg
