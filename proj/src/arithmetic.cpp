#include "ppg/arithmetic.hpp"

#include <algorithm>
#include <sstream>

namespace ppg {

namespace {

i64 int_pow(i64 base, int exp) {
  i64 out = 1;
  for (int i = 0; i < exp; ++i) out = checked_mul(out, base);
  return out;
}

bool small_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// Admissibility of the defect k for a maximal-class group of order p^m.
void require_coclass1_defect(int p, int m, int k) {
  if (m < 3) throw ClassifyError(ClassifyCode::Inconsistent, "coclass 1 requires m >= 3");
  if (k < 0) throw ClassifyError(ClassifyCode::Inconsistent, "negative defect");
  if (m == 3 && k != 0)
    throw ClassifyError(ClassifyCode::Inconsistent, "groups of order p^3 have defect 0");
  if (m >= 4 && k > m - 4)
    throw ClassifyError(ClassifyCode::Inconsistent, "defect exceeds m - 4");
  if (m >= p + 1 && k > p - 2)
    throw ClassifyError(ClassifyCode::Inconsistent, "defect exceeds p - 2");
}

void require_coclass2_tuple(int m, int n, int k) {
  const int e = n - m + 2;
  if (!(4 <= m && m < n && n <= 2 * m - 3))
    throw ClassifyError(ClassifyCode::Inconsistent, "need 4 <= m < n <= 2m-3");
  if (e < 3 || e > m - 1)
    throw ClassifyError(ClassifyCode::Inconsistent, "need 3 <= e <= m-1");
  if (k != 0 && k != 1)
    throw ClassifyError(ClassifyCode::Inconsistent, "defect must be 0 or 1 for coclass >= 2");
  if (k == 1 && n > 2 * m - 4)
    throw ClassifyError(ClassifyCode::Inconsistent, "defect 1 requires n <= 2m-4");
}

}  // namespace

std::string kind_name(Kind kind) {
  switch (kind) {
    case Kind::Complex: return "complex";
    case Kind::Real: return "real";
    case Kind::Generic: return "generic";
  }
  throw std::logic_error("unreachable");
}

Kind kind_from_name(const std::string& name) {
  if (name == "complex") return Kind::Complex;
  if (name == "real") return Kind::Real;
  if (name == "generic") return Kind::Generic;
  throw std::invalid_argument("unknown base-field kind: " + name);
}

std::string unit_type_name(UnitType type) {
  switch (type) {
    case UnitType::Alpha: return "alpha";
    case UnitType::Delta: return "delta";
    case UnitType::Unknown: return "unknown";
  }
  throw std::logic_error("unreachable");
}

UnitType unit_type_from_name(const std::string& name) {
  if (name == "alpha" || name == "a") return UnitType::Alpha;
  if (name == "delta" || name == "d") return UnitType::Delta;
  if (name == "unknown" || name == "-" || name.empty()) return UnitType::Unknown;
  throw std::invalid_argument("unknown unit type: " + name);
}

std::string classify_code_name(ClassifyCode code) {
  switch (code) {
    case ClassifyCode::Inconsistent: return "Inconsistent";
    case ClassifyCode::MissingW: return "MissingW";
    case ClassifyCode::HypothesisRequired: return "HypothesisRequired";
    case ClassifyCode::KindMismatch: return "KindMismatch";
    case ClassifyCode::AbelianImpossible: return "AbelianImpossible";
    case ClassifyCode::ParityViolation: return "ParityViolation";
    case ClassifyCode::InvalidCombination: return "InvalidCombination";
  }
  throw std::logic_error("unreachable");
}

std::string branch_name(Branch branch) {
  switch (branch) {
    case Branch::Abelian: return "abelian";
    case Branch::CoclassOne: return "coclass-1";
    case Branch::CoclassAtLeastTwo: return "coclass-ge-2";
  }
  throw std::logic_error("unreachable");
}

KernelShape cohomology_kernel_rule(Kind kind, UnitType type) {
  if (kind == Kind::Complex) {
    if (type == UnitType::Delta)
      throw ClassifyError(ClassifyCode::InvalidCombination,
                          "complex base fields force unit type alpha");
    return KernelShape::CyclicP;
  }
  if (kind == Kind::Real) {
    if (type == UnitType::Alpha) return KernelShape::BicyclicPP;
    if (type == UnitType::Delta) return KernelShape::CyclicP;
    throw ClassifyError(ClassifyCode::InvalidCombination,
                        "the kernel shape of a real base field depends on the unit type");
  }
  throw ClassifyError(ClassifyCode::KindMismatch,
                      "kernel shapes are defined for quadratic base fields only");
}

i64 relate_class_numbers(Kind kind, UnitType type, int p, i64 hL) {
  if (kind == Kind::Complex && type == UnitType::Delta)
    throw ClassifyError(ClassifyCode::InvalidCombination,
                        "complex base fields force unit type alpha");
  const i64 square = checked_mul(hL, hL);
  if (kind == Kind::Real && type == UnitType::Alpha) return square;
  return checked_mul(static_cast<i64>(p), square);
}

std::vector<i64> predict_direct(int p, int m, int n, int k) {
  if (!small_prime(p)) throw ClassifyError(ClassifyCode::Inconsistent, "p must be prime");
  if (n < m) throw ClassifyError(ClassifyCode::Inconsistent, "n < m is impossible");
  if (n == m) {
    if (m == 2) {
      if (k != 0) throw ClassifyError(ClassifyCode::Inconsistent, "abelian groups have defect 0");
      return std::vector<i64>(static_cast<std::size_t>(p) + 1, p);
    }
    require_coclass1_defect(p, m, k);
    std::vector<i64> out{int_pow(p, m - k - 1)};
    for (int i = 2; i <= p + 1; ++i) out.push_back(int_pow(p, 2));
    return out;
  }
  if (p != 3)
    throw ClassifyError(ClassifyCode::HypothesisRequired,
                        "class numbers for coclass >= 2 are established for p = 3 only");
  require_coclass2_tuple(m, n, k);
  const int e = n - m + 2;
  return {int_pow(3, m - k - 1), int_pow(3, e), 27, 27};
}

std::vector<FieldPrediction> predict_quadratic(int p, Kind kind, int m, int n, int k) {
  if (kind == Kind::Generic)
    throw ClassifyError(ClassifyCode::KindMismatch,
                        "per-field predictions hold for quadratic base fields only");
  if (!small_prime(p) || p < 3)
    throw ClassifyError(ClassifyCode::Inconsistent,
                        "per-field predictions need an odd prime p");
  if (n < m) throw ClassifyError(ClassifyCode::Inconsistent, "n < m is impossible");
  if (m == 2)
    throw ClassifyError(ClassifyCode::AbelianImpossible,
                        "an abelian group cannot occur over a quadratic base field");

  std::vector<FieldPrediction> out;
  if (n == m) {
    // Maximal class: only real base fields can occur.
    if (kind == Kind::Complex)
      throw ClassifyError(ClassifyCode::ParityViolation,
                          "a complex base field excludes coclass 1 (even exponents appear)");
    require_coclass1_defect(p, m, k);
    FieldPrediction first;
    if ((m - k) % 2 == 1) {
      first.type = UnitType::Alpha;
      first.h_exponent = (m - k - 1) / 2;
    } else if (k == 0) {
      first.type = UnitType::Delta;
      first.h_exponent = (m - 2) / 2;
    } else {
      throw ClassifyError(ClassifyCode::ParityViolation,
                          "type delta with positive defect is impossible");
    }
    out.push_back(first);
    for (int i = 2; i <= p + 1; ++i) out.push_back({1, UnitType::Alpha});
    return out;
  }

  if (p != 3)
    throw ClassifyError(ClassifyCode::HypothesisRequired,
                        "per-field predictions for coclass >= 2 are established for p = 3 only");
  require_coclass2_tuple(m, n, k);
  const int e = n - m + 2;

  if (kind == Kind::Complex) {
    if (e % 2 == 0)
      throw ClassifyError(ClassifyCode::ParityViolation,
                          "complex base fields require odd e");
    if ((m - k) % 2 != 0)
      throw ClassifyError(ClassifyCode::ParityViolation,
                          "complex base fields require m = k (mod 2)");
    out.push_back({(m - 2 - k) / 2, UnitType::Alpha});
    out.push_back({(e - 1) / 2, UnitType::Alpha});
    out.push_back({1, UnitType::Alpha});
    out.push_back({1, UnitType::Alpha});
    return out;
  }

  const UnitType t1 = (m - k) % 2 == 1 ? UnitType::Alpha : UnitType::Delta;
  const UnitType t2 = e % 2 == 0 ? UnitType::Alpha : UnitType::Delta;
  if (k == 1 && t1 != t2)
    throw ClassifyError(ClassifyCode::Inconsistent,
                        "mixed type pairs occur with defect 0 only");
  const int u = t1 == UnitType::Alpha ? (m - 1 - k) / 2 : (m - 2 - k) / 2;
  const int v = t2 == UnitType::Alpha ? e / 2 : (e - 1) / 2;
  if (u < v || v < 1)
    throw ClassifyError(ClassifyCode::Inconsistent, "derived exponents violate u >= v >= 1");
  out.push_back({u, t1});
  out.push_back({v, t2});
  out.push_back({1, UnitType::Delta});
  out.push_back({1, UnitType::Delta});
  return out;
}

CandidateTuple ClassifierResult::unique() const {
  if (candidates.size() != 1)
    throw std::logic_error("classification is ambiguous; inspect candidates instead");
  return candidates.front();
}

namespace {

CandidateTuple make_candidate(int p, int m, int n, std::optional<int> e, std::optional<int> k) {
  CandidateTuple t;
  t.m = m;
  t.n = n;
  t.e = e;
  t.k = k;
  t.predicted_clF1_order = int_pow(p, n - 2);
  return t;
}

ClassifierResult classify_p2(const FieldRecord& r) {
  if (r.v.has_value())
    throw ClassifyError(ClassifyCode::Inconsistent, "p = 2 records carry no second exponent v");
  if (r.t1 != UnitType::Unknown || r.t2 != UnitType::Unknown)
    throw ClassifyError(ClassifyCode::Inconsistent,
                        "unit types are defined for odd primes only");
  if (!r.u.has_value() || !r.w.has_value())
    throw ClassifyError(ClassifyCode::HypothesisRequired,
                        "p = 2 classification needs the exponents of all three h_2(N_i)");
  const int u = *r.u, w = *r.w;
  ClassifierResult result;
  if (u == 1 && w == 1) {
    result.branch = Branch::Abelian;
    result.candidates.push_back(make_candidate(2, 2, 2, std::nullopt, std::nullopt));
    result.nu_admissible = {3};
    return result;
  }
  if (u != 2)
    throw ClassifyError(ClassifyCode::Inconsistent,
                        "the two small exponents must both be 1 (abelian) or both 2");
  if (w < 2)
    throw ClassifyError(ClassifyCode::Inconsistent,
                        "the distinguished exponent must be >= 2 when the small ones are 2");
  result.branch = Branch::CoclassOne;
  const int m = w + 1;
  CandidateTuple t = make_candidate(2, m, m, 2, 0);
  t.family_candidates = {"dihedral", "quaternion"};
  if (m >= 4) t.family_candidates.push_back("semidihedral");
  result.candidates.push_back(std::move(t));
  return result;
}

ClassifierResult classify_coclass1_odd(const FieldRecord& r, const ClassifyOptions& opt) {
  const int p = r.p;
  if (r.kind != Kind::Real)
    throw ClassifyError(ClassifyCode::ParityViolation,
                        "a complex base field excludes coclass 1");
  if (p >= 5 && !opt.assume_coclass1)
    throw ClassifyError(ClassifyCode::HypothesisRequired,
                        "for p >= 5 the coclass-1 hypothesis must be asserted explicitly");
  if (r.t2 == UnitType::Delta)
    throw ClassifyError(ClassifyCode::Inconsistent,
                        "a record without v asserts type alpha for the small fields");
  const int u = *r.u;

  ClassifierResult result;
  result.branch = Branch::CoclassOne;
  if (r.t1 == UnitType::Unknown)
    throw ClassifyError(ClassifyCode::HypothesisRequired,
                        "the type of the distinguished field is needed to branch");

  if (r.t1 == UnitType::Delta) {
    const int m = 2 * u + 2;
    require_coclass1_defect(p, m, 0);
    if (r.w.has_value() && *r.w != m - 2)
      throw ClassifyError(ClassifyCode::Inconsistent,
                          "w must equal m - 2 = 2u for type delta");
    result.candidates.push_back(make_candidate(p, m, m, 2, 0));
    result.nu_admissible = {p};
    return result;
  }

  // Type alpha: m = 2u + k + 1 with k = w - 2u + 1.
  result.nu_admissible = {p + 1};
  const auto alpha_candidate = [&](int k) {
    const int m = 2 * u + k + 1;
    require_coclass1_defect(p, m, k);
    if (k >= 1 && u < 2)
      throw ClassifyError(ClassifyCode::Inconsistent, "a positive defect enforces u >= 2");
    return make_candidate(p, m, m, 2, k);
  };
  if (r.w.has_value()) {
    const int k = *r.w - 2 * u + 1;
    if (k < 0)
      throw ClassifyError(ClassifyCode::Inconsistent, "w < 2u - 1 contradicts type alpha");
    if (p == 3 && k > 1)
      throw ClassifyError(ClassifyCode::Inconsistent, "the defect is bounded by 1 for p = 3");
    result.candidates.push_back(alpha_candidate(k));
    if (k == 0)
      result.flags.push_back(
          "UnobservedCase: odd m with defect 0 has never been observed for this branch");
    return result;
  }
  if (u == 1) {
    result.candidates.push_back(alpha_candidate(0));
    result.flags.push_back(
        "UnobservedCase: odd m with defect 0 has never been observed for this branch");
    return result;
  }
  if (opt.strict || p >= 5)
    throw ClassifyError(ClassifyCode::MissingW,
                        "the defect is undetermined without the exponent w");
  result.ambiguous = true;
  result.candidates.push_back(alpha_candidate(0));
  result.candidates.push_back(alpha_candidate(1));
  result.flags.push_back("AmbiguousResult: w is needed to decide between defect 0 and 1");
  result.flags.push_back(
      "UnobservedCase: odd m with defect 0 has never been observed for this branch");
  return result;
}

ClassifierResult classify_coclass2(const FieldRecord& r, const ClassifyOptions& opt) {
  if (r.p != 3)
    throw ClassifyError(ClassifyCode::HypothesisRequired,
                        "coclass >= 2 classification is established for p = 3 only");
  const int u = *r.u, v = *r.v;
  if (u < v || v < 1)
    throw ClassifyError(ClassifyCode::Inconsistent, "the exponents must satisfy u >= v >= 1");

  UnitType t1 = r.t1, t2 = r.t2;
  if (r.kind == Kind::Complex) {
    if (t1 == UnitType::Delta || t2 == UnitType::Delta)
      throw ClassifyError(ClassifyCode::Inconsistent,
                          "complex base fields force unit type alpha");
    // Complex fields behave like the all-delta real case arithmetically.
    t1 = t2 = UnitType::Delta;
  } else {
    if (t1 == UnitType::Unknown || t2 == UnitType::Unknown)
      throw ClassifyError(ClassifyCode::HypothesisRequired,
                          "real coclass >= 2 classification needs both unit types");
  }

  ClassifierResult result;
  result.branch = Branch::CoclassAtLeastTwo;
  if (r.kind == Kind::Complex) {
    result.nu_admissible = {0};
  } else {
    const int alphas = (r.t1 == UnitType::Alpha ? 1 : 0) + (r.t2 == UnitType::Alpha ? 1 : 0);
    result.nu_admissible = {alphas};
  }

  const auto checked = [&](int m, int n, int e, int k) {
    require_coclass2_tuple(m, n, k);
    if (e != n - m + 2) throw std::logic_error("internal: e mismatch");
    return make_candidate(3, m, n, e, k);
  };

  if (t1 == UnitType::Delta && t2 == UnitType::Delta) {
    const int e = 2 * v + 1;
    const auto candidate = [&](int k) { return checked(2 * u + 2 + k, 2 * u + 2 * v + 1 + k, e, k); };
    if (r.w.has_value()) {
      const int k = *r.w - 2 * u - 2 * v + 1;
      if (k != 0 && k != 1)
        throw ClassifyError(ClassifyCode::Inconsistent,
                            "w - 2u - 2v + 1 must give a defect of 0 or 1");
      result.candidates.push_back(candidate(k));
      return result;
    }
    if (opt.strict)
      throw ClassifyError(ClassifyCode::MissingW,
                          "the defect is undetermined without the exponent w");
    result.ambiguous = true;
    result.candidates.push_back(candidate(0));
    result.candidates.push_back(candidate(1));
    result.flags.push_back("AmbiguousResult: w is needed to decide between defect 0 and 1");
    return result;
  }

  if (t1 == UnitType::Alpha && t2 == UnitType::Alpha) {
    if (v < 2)
      throw ClassifyError(ClassifyCode::Inconsistent,
                          "type alpha for the second field forces even e = 2v >= 4");
    const int e = 2 * v;
    const auto candidate = [&](int k) {
      return checked(2 * u + 1 + k, 2 * u + 2 * v - 1 + k, e, k);
    };
    if (r.w.has_value()) {
      const int k = *r.w - 2 * u - 2 * v + 3;
      if (k != 0 && k != 1)
        throw ClassifyError(ClassifyCode::Inconsistent,
                            "w - 2u - 2v + 3 must give a defect of 0 or 1");
      result.candidates.push_back(candidate(k));
      return result;
    }
    if (opt.strict)
      throw ClassifyError(ClassifyCode::MissingW,
                          "the defect is undetermined without the exponent w");
    result.ambiguous = true;
    result.candidates.push_back(candidate(0));
    result.candidates.push_back(candidate(1));
    result.flags.push_back("AmbiguousResult: w is needed to decide between defect 0 and 1");
    return result;
  }

  // Mixed pairs classify without w and force defect 0.
  if (t1 == UnitType::Alpha) {  // (alpha, delta)
    const int e = 2 * v + 1;
    result.candidates.push_back(checked(2 * u + 1, 2 * u + 2 * v, e, 0));
  } else {  // (delta, alpha)
    if (v < 2)
      throw ClassifyError(ClassifyCode::Inconsistent,
                          "type alpha for the second field forces even e = 2v >= 4");
    const int e = 2 * v;
    result.candidates.push_back(checked(2 * u + 2, 2 * u + 2 * v, e, 0));
  }
  if (r.w.has_value() && *r.w != result.candidates.front().n - 2)
    throw ClassifyError(ClassifyCode::Inconsistent,
                        "w must equal n - 2 for a mixed type pair");
  return result;
}

}  // namespace

ClassifierResult classify(const FieldRecord& record, const ClassifyOptions& options) {
  if (!small_prime(record.p))
    throw ClassifyError(ClassifyCode::Inconsistent, "p must be prime");
  if (record.kind == Kind::Generic)
    throw ClassifyError(ClassifyCode::KindMismatch,
                        "classification needs a quadratic base field");
  if (record.p == 2) return classify_p2(record);

  if (!record.u.has_value())
    throw ClassifyError(ClassifyCode::HypothesisRequired,
                        "the exponent u of the distinguished field is required");
  if (*record.u == 0)
    throw ClassifyError(ClassifyCode::AbelianImpossible,
                        "trivial h_p(L_1) signals an abelian group, impossible over a quadratic "
                        "base field");
  if (record.kind == Kind::Complex && (record.t1 == UnitType::Delta || record.t2 == UnitType::Delta))
    throw ClassifyError(ClassifyCode::Inconsistent,
                        "complex base fields force unit type alpha");

  if (record.v.has_value()) return classify_coclass2(record, options);
  if (record.kind == Kind::Complex)
    throw ClassifyError(ClassifyCode::HypothesisRequired,
                        "a complex base field has coclass >= 2; the exponent v is required");
  return classify_coclass1_odd(record, options);
}

std::vector<std::string> consistency_check(const FieldRecord& record,
                                           const ClassifierResult& result) {
  std::vector<std::string> flags;

  if (record.clF1.has_value()) {
    const AbelianGroup observed = AbelianGroup::parse(*record.clF1);
    std::vector<int> matching;
    for (std::size_t i = 0; i < result.candidates.size(); ++i)
      if (result.candidates[i].predicted_clF1_order == observed.order())
        matching.push_back(static_cast<int>(i));
    if (matching.empty()) {
      std::ostringstream msg;
      msg << "observed clF1 order " << observed.order()
          << " matches no candidate's predicted p^(n-2)";
      flags.push_back(msg.str());
    } else if (result.ambiguous && matching.size() == 1) {
      std::ostringstream msg;
      msg << "observed clF1 order selects the candidate with k="
          << result.candidates[static_cast<std::size_t>(matching.front())].k.value_or(0);
      flags.push_back(msg.str());
    }
  }

  if (record.kappa.has_value()) {
    std::vector<int> digits;
    for (char c : *record.kappa)
      if (c >= '0' && c <= '9') digits.push_back(c - '0');
    if (digits.size() == static_cast<std::size_t>(record.p) + 1) {
      const int observed_nu =
          static_cast<int>(std::count(digits.begin(), digits.end(), 0));
      if (!result.nu_admissible.empty() &&
          std::find(result.nu_admissible.begin(), result.nu_admissible.end(), observed_nu) ==
              result.nu_admissible.end()) {
        std::ostringstream msg;
        msg << "observed nu = " << observed_nu << " is outside the admissible set";
        flags.push_back(msg.str());
      }
      if (result.branch == Branch::CoclassOne && record.p >= 3 &&
          std::all_of(digits.begin(), digits.end(),
                      [&](int d) { return d == digits.front() && d != 0; })) {
        flags.push_back(
            "four equal cyclic kernels signal the exponent-p^2 extra-special group, which "
            "cannot occur over a quadratic base field");
      }
      if (record.kind == Kind::Real && record.p >= 3) {
        const auto digit_rule = [&](int index, UnitType type) {
          if (type == UnitType::Unknown) return;
          const bool total = digits[static_cast<std::size_t>(index)] == 0;
          const bool alpha = type == UnitType::Alpha;
          if (total != alpha) {
            std::ostringstream msg;
            msg << "kernel digit " << (index + 1) << " contradicts unit type "
                << unit_type_name(type);
            flags.push_back(msg.str());
          }
        };
        digit_rule(0, record.t1);
        digit_rule(1, record.t2);
      }
    } else {
      flags.push_back("kernel-position string has the wrong number of digits");
    }
  }

  return flags;
}

}  // namespace ppg
