#include "ppg/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppg/arithmetic.hpp"
#include "ppg/dataset.hpp"
#include "ppg/invariants.hpp"
#include "ppg/pcgroup.hpp"
#include "ppg/presentations.hpp"

namespace ppg {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

i64 power_of(int p, int exp) {
  i64 out = 1;
  for (int i = 0; i < exp; ++i) out = checked_mul(out, p);
  return out;
}

// Picks --output when given, the provided stream otherwise.
std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty()) return fallback;
  file.open(path, std::ios::binary);
  if (!file) throw CLI::ValidationError("--output", "cannot open '" + path + "' for writing");
  return file;
}

template <typename T>
ordered_json opt_json(const std::optional<T>& v) {
  if (v.has_value()) return ordered_json(*v);
  return ordered_json(nullptr);
}

template <typename T>
std::string join(const std::vector<T>& values, const char* sep = " ") {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << sep;
    out << values[i];
  }
  return out.str();
}

// ---------------------------------------------------------------- group ---

struct PresetFlags {
  std::string preset;
  int p = 0;
  int m = 0;
  int n = 0;
  int k = 0;
  int rho = 0;
  bool has_p = false, has_m = false, has_n = false, has_k = false, has_rho = false;
};

FamilyDescriptor descriptor_from_flags(const PresetFlags& f) {
  const Family family = family_from_name(f.preset);
  const bool fixed2 = family == Family::Dihedral || family == Family::Semidihedral ||
                      family == Family::Quaternion;
  int p = f.has_p ? f.p : (fixed2 ? 2 : 3);
  if (fixed2 && p != 2)
    throw std::invalid_argument("the classical maximal-class families require p = 2");
  if (family == Family::Nebelung && p != 3)
    throw std::invalid_argument("this coclass >= 2 family is defined for p = 3 only");
  switch (family) {
    case Family::ElementaryAbelian:
      return elementary_abelian(p);
    case Family::Coclass1:
      if (!f.has_m) throw std::invalid_argument("--m is required for preset coclass1");
      if (f.m == 2) return elementary_abelian(p);  // chain of length 2: the abelian case
      return coclass1(p, f.m, f.has_k ? f.k : 0);
    case Family::Nebelung:
      if (!f.has_m || !f.has_n)
        throw std::invalid_argument("--m and --n are required for preset nebelung");
      return nebelung(f.m, f.n, f.has_k ? f.k : 0, f.has_rho ? f.rho : 0);
    case Family::Dihedral:
      if (!f.has_m) throw std::invalid_argument("--m is required for preset dihedral");
      return dihedral(f.m);
    case Family::Semidihedral:
      if (!f.has_m) throw std::invalid_argument("--m is required for preset semidihedral");
      return semidihedral(f.m);
    case Family::Quaternion:
      if (!f.has_m) throw std::invalid_argument("--m is required for preset quaternion");
      return quaternion(f.m);
  }
  throw std::logic_error("unreachable family");
}

ordered_json report_json(const InvariantReport& r) {
  ordered_json j;
  j["p"] = r.p;
  j["n"] = r.n;
  j["m"] = r.m;
  j["cl"] = r.cl;
  j["cc"] = r.cc;
  j["s"] = opt_json(r.s);
  j["e"] = opt_json(r.e);
  j["k"] = opt_json(r.k);
  j["gamma"] = r.gamma_orders;
  j["chi"] = r.chi_orders;
  for (std::size_t i = 0; i < r.ab.size(); ++i)
    j["ab" + std::to_string(i + 1)] = r.ab[i].to_string();
  j["kappa"] = r.kappa;
  j["nu"] = r.nu;
  return j;
}

void report_text(std::ostream& os, const InvariantReport& r) {
  const auto opt_line = [&](const char* key, const std::optional<int>& v) {
    os << key << ": ";
    if (v.has_value()) os << *v;
    else os << "-";
    os << '\n';
  };
  os << "p: " << r.p << '\n';
  os << "n: " << r.n << '\n';
  os << "m: " << r.m << '\n';
  os << "cl: " << r.cl << '\n';
  os << "cc: " << r.cc << '\n';
  opt_line("s", r.s);
  opt_line("e", r.e);
  opt_line("k", r.k);
  os << "gamma: " << join(r.gamma_orders) << '\n';
  os << "chi: " << join(r.chi_orders) << '\n';
  for (std::size_t i = 0; i < r.ab.size(); ++i)
    os << "ab" << (i + 1) << ": " << r.ab[i].to_string() << '\n';
  os << "kappa: " << r.kappa << '\n';
  os << "nu: " << r.nu << '\n';
  if (r.m == 2) os << "note: abelian group; s, e and k are undefined\n";
}

int cmd_group(const PresetFlags& flags, const std::string& format, const std::string& output,
              std::ostream& out, std::ostream& err) {
  FamilyDescriptor descriptor;
  try {
    descriptor = descriptor_from_flags(flags);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    const PcGroup G = build_family(descriptor);
    const InvariantReport r = report(G);
    std::ofstream file;
    std::ostream& os = open_output(output, file, out);
    if (format == "json")
      os << report_json(r).dump() << '\n';
    else
      report_text(os, r);
    return kExitOk;
  } catch (const InconsistentPresentation& e) {
    err << "error: inconsistent presentation: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

// ------------------------------------------------------------- classify ---

struct RecordInput {
  std::string name;
  FieldRecord record;
};

FieldRecord record_from_pairs(const std::vector<std::string>& pairs, int default_p) {
  FieldRecord rec;
  rec.p = default_p;
  bool has_kind = false;
  for (const std::string& token : pairs) {
    const std::size_t eq = token.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "p") rec.p = std::stoi(value);
    else if (key == "kind") { rec.kind = kind_from_name(value); has_kind = true; }
    else if (key == "u") rec.u = std::stoi(value);
    else if (key == "v") rec.v = std::stoi(value);
    else if (key == "w") rec.w = std::stoi(value);
    else if (key == "t1") rec.t1 = unit_type_from_name(value);
    else if (key == "t2") rec.t2 = unit_type_from_name(value);
    else if (key == "clF1") rec.clF1 = value;
    else if (key == "kappa") rec.kappa = value;
    else if (key == "disc") rec.discriminant = std::stoll(value);
    else if (key == "name") rec.name = value;
    else throw std::invalid_argument("unknown record field '" + key + "'");
  }
  if (!has_kind) throw std::invalid_argument("a record needs kind=complex or kind=real");
  return rec;
}

ordered_json candidate_json(const CandidateTuple& t) {
  ordered_json j;
  j["m"] = t.m;
  j["n"] = t.n;
  j["e"] = opt_json(t.e);
  j["k"] = opt_json(t.k);
  j["clF1_order"] = t.predicted_clF1_order;
  j["families"] = t.family_candidates;
  return j;
}

std::string candidate_text(const CandidateTuple& t) {
  std::ostringstream os;
  os << "m=" << t.m << " n=" << t.n;
  os << " e=";
  if (t.e.has_value()) os << *t.e;
  else os << "-";
  os << " k=";
  if (t.k.has_value()) os << *t.k;
  else os << "-";
  os << " clF1_order=" << t.predicted_clF1_order;
  if (!t.family_candidates.empty()) os << " families=" << join(t.family_candidates, ",");
  return os.str();
}

int cmd_classify(const std::vector<std::string>& pairs, const std::string& input, int p_flag,
                 bool strict, const std::string& format, const std::string& output,
                 std::ostream& out, std::ostream& err) {
  std::vector<RecordInput> inputs;
  try {
    if (!input.empty()) {
      std::vector<TableRow> rows;
      if (input == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        rows = rows_from_csv(buffer.str());
      } else {
        rows = load_csv(input);
      }
      for (std::size_t i = 0; i < rows.size(); ++i)
        inputs.push_back({rows[i].record.name.value_or("row" + std::to_string(i + 1)),
                          rows[i].record});
    } else if (!pairs.empty()) {
      FieldRecord rec = record_from_pairs(pairs, p_flag);
      inputs.push_back({rec.name.value_or("record"), rec});
    } else {
      err << "error: classify needs --input or key=value record fields\n";
      return kExitUsage;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::ofstream file;
  std::ostream* os = nullptr;
  try {
    os = &open_output(output, file, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  ClassifyOptions options;
  options.strict = strict;
  bool any_error = false;
  for (const RecordInput& in : inputs) {
    try {
      const ClassifierResult result = classify(in.record, options);
      const std::vector<std::string> consistency = consistency_check(in.record, result);
      if (format == "json") {
        ordered_json j;
        j["name"] = in.name;
        j["branch"] = branch_name(result.branch);
        j["ambiguous"] = result.ambiguous;
        ordered_json cands = ordered_json::array();
        for (const CandidateTuple& t : result.candidates) cands.push_back(candidate_json(t));
        j["candidates"] = cands;
        j["nu_admissible"] = result.nu_admissible;
        j["flags"] = result.flags;
        j["consistency"] = consistency;
        *os << j.dump() << '\n';
      } else {
        *os << in.name << ": " << branch_name(result.branch);
        for (std::size_t i = 0; i < result.candidates.size(); ++i)
          *os << (i ? " | " : " ") << candidate_text(result.candidates[i]);
        if (!result.nu_admissible.empty())
          *os << " nu_admissible=" << join(result.nu_admissible, ",");
        for (const std::string& flag : result.flags) *os << " ! " << flag;
        for (const std::string& flag : consistency) *os << " ! " << flag;
        *os << '\n';
      }
    } catch (const ClassifyError& e) {
      any_error = true;
      if (format == "json") {
        ordered_json j;
        j["name"] = in.name;
        j["error"] = e.what();
        j["code"] = classify_code_name(e.code);
        *os << j.dump() << '\n';
      } else {
        *os << in.name << ": error [" << classify_code_name(e.code) << "] " << e.what() << '\n';
      }
    }
  }
  return any_error ? kExitFailure : kExitOk;
}

// ---------------------------------------------------------------- verify ---

struct VerifyFailure {
  std::string descriptor;
  std::string message;
};

void verify_one(const FamilyDescriptor& d, i64 budget, int& checked, int& skipped,
                std::vector<VerifyFailure>& failures) {
  const int order_exponent = d.family == Family::Nebelung ? d.n : d.m;
  if (power_of(d.p, order_exponent) > budget) {
    ++skipped;
    return;
  }
  try {
    const PcGroup G = build_family(d);
    ++checked;
    const VerificationOutcome outcome = verify_structure(G, d);
    for (const std::string& f : outcome.failures) failures.push_back({d.to_string(), f});

    const InvariantReport r = report(G);
    if (r.m != d.m)
      failures.push_back({d.to_string(), "chain length m=" + std::to_string(r.m) +
                                             " does not match the preset"});
    if (r.n != order_exponent)
      failures.push_back({d.to_string(), "order exponent n=" + std::to_string(r.n) +
                                             " does not match the preset"});
    if (d.m >= 3) {
      if (!r.k.has_value() || *r.k != d.k)
        failures.push_back({d.to_string(), "defect does not match the preset"});
      const int expected_e = d.family == Family::Nebelung ? d.n - d.m + 2 : 2;
      if (!r.e.has_value() || *r.e != expected_e)
        failures.push_back({d.to_string(), "invariant e does not match the family formula"});
    }
    if (d.family == Family::Coclass1 && d.p % 2 == 1 && d.m >= 4) {
      if (r.nu < d.p || r.nu > d.p + 1)
        failures.push_back({d.to_string(),
                            "nu=" + std::to_string(r.nu) + " outside [p, p+1]"});
    }
    if (d.family == Family::Nebelung && r.nu > 2)
      failures.push_back({d.to_string(), "nu=" + std::to_string(r.nu) + " exceeds 2"});
  } catch (const std::exception& e) {
    failures.push_back({d.to_string(), e.what()});
  }
}

int coclass1_defect_cap(int p, int m) {
  if (m == 3) return 0;
  int cap = m - 4;
  if (m >= p + 1) cap = std::min(cap, p - 2);
  return std::max(cap, 0);
}

int cmd_verify(const std::string& preset, int p, int max_m, int max_n, i64 budget,
               const std::string& format, const std::string& output, std::ostream& out,
               std::ostream& err) {
  std::vector<FamilyDescriptor> grid;
  try {
    if (preset == "coclass1") {
      for (int m = 3; m <= max_m; ++m)
        for (int k = 0; k <= coclass1_defect_cap(p, m); ++k) {
          // The leading relation exponent must be non-zero, so enumerate two
          // admissible choices when the defect is positive.
          std::vector<std::vector<int>> miech_choices;
          if (k == 0) {
            miech_choices.push_back({});
          } else {
            for (int lead = 1; lead <= std::min(2, p - 1); ++lead) {
              std::vector<int> choice(static_cast<std::size_t>(k), 0);
              choice.front() = lead;
              miech_choices.push_back(choice);
            }
          }
          for (const auto& miech : miech_choices)
            for (int shift = 0; shift < std::min(3, p); ++shift)
              grid.push_back(socle_shifted(coclass1(p, m, k, miech), 0, shift));
        }
    } else if (preset == "nebelung") {
      for (int m = 4; m <= std::min(max_m, max_n - 1); ++m)
        for (int n = m + 1; n <= std::min(max_n, 2 * m - 3); ++n) {
          grid.push_back(nebelung(m, n, 0, 0));
          if (n <= 2 * m - 4) {
            grid.push_back(nebelung(m, n, 1, 1));
            grid.push_back(nebelung(m, n, 1, -1));
          }
        }
    } else if (preset == "classic2" || preset == "dihedral" || preset == "semidihedral" ||
               preset == "quaternion") {
      const bool all = preset == "classic2";
      for (int m = 3; m <= max_m; ++m) {
        if (all || preset == "dihedral") grid.push_back(dihedral(m));
        if ((all || preset == "semidihedral") && m >= 4) grid.push_back(semidihedral(m));
        if (all || preset == "quaternion") grid.push_back(quaternion(m));
      }
    } else if (preset == "elementary_abelian") {
      grid.push_back(elementary_abelian(p));
    } else {
      err << "error: unknown verify preset '" << preset << "'\n";
      return kExitUsage;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  int checked = 0, skipped = 0;
  std::vector<VerifyFailure> failures;
  for (const FamilyDescriptor& d : grid) verify_one(d, budget, checked, skipped, failures);

  std::ofstream file;
  std::ostream* os = nullptr;
  try {
    os = &open_output(output, file, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (format == "json") {
    ordered_json j;
    j["preset"] = preset;
    j["checked"] = checked;
    j["skipped"] = skipped;
    ordered_json fails = ordered_json::array();
    for (const VerifyFailure& f : failures) {
      ordered_json one;
      one["descriptor"] = f.descriptor;
      one["message"] = f.message;
      fails.push_back(one);
    }
    j["failures"] = fails;
    *os << j.dump() << '\n';
  } else {
    *os << "preset: " << preset << '\n';
    *os << "checked: " << checked << '\n';
    *os << "skipped: " << skipped << '\n';
    for (const VerifyFailure& f : failures)
      *os << "fail: " << f.descriptor << " : " << f.message << '\n';
    *os << (failures.empty() ? "result: pass" : "result: fail") << '\n';
  }
  return failures.empty() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------- tables ---

std::vector<std::string> table_ids_from_which(const std::string& which) {
  std::vector<std::string> ids;
  const auto add = [&](const std::string& id) {
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  };
  std::stringstream in(which);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    if (token == "2" || token == "3" || token == "4" || token == "5") {
      add("table" + token);
    } else if (token == "p2") {
      add("p2abelian");
      add("p2dihedral");
      add("p2semidihedral");
      add("p2quaternion");
    } else {
      add(token);  // a literal table id such as "table2" or "p2dihedral"
    }
  }
  if (ids.empty()) throw std::invalid_argument("--which selects no tables");
  return ids;
}

int cmd_tables(const std::string& which, const std::string& format, const std::string& output,
               std::ostream& out, std::ostream& err) {
  std::vector<std::string> ids;
  DiffReport reportData;
  try {
    ids = table_ids_from_which(which);
    reportData = reproduce_tables(ids);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::ofstream file;
  std::ostream* os = nullptr;
  try {
    os = &open_output(output, file, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (format == "json") {
    ordered_json j;
    j["tables"] = ids;
    j["rows_checked"] = reportData.rows_checked;
    ordered_json totals = ordered_json::array();
    for (const auto& [id, total] : reportData.frequency_totals) {
      ordered_json one;
      one["table"] = id;
      one["total"] = total;
      totals.push_back(one);
    }
    j["frequency_totals"] = totals;
    ordered_json diffs = ordered_json::array();
    for (const RowDiff& d : reportData.diffs) {
      ordered_json one;
      one["table"] = d.table_id;
      one["name"] = d.name;
      one["differences"] = d.differences;
      diffs.push_back(one);
    }
    j["diffs"] = diffs;
    *os << j.dump() << '\n';
  } else {
    *os << "tables: " << join(ids, ",") << '\n';
    *os << "rows checked: " << reportData.rows_checked << '\n';
    for (const auto& [id, total] : reportData.frequency_totals)
      *os << "frequency total " << id << ": " << total << '\n';
    for (const RowDiff& d : reportData.diffs)
      for (const std::string& line : d.differences)
        *os << "diff: " << d.table_id << " " << d.name << ": " << line << '\n';
    *os << "diffs: " << reportData.diffs.size() << '\n';
  }
  return reportData.empty() ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structural invariants of two-generated metabelian p-groups and the "
               "class-field classifier built on them"};
  app.require_subcommand(1);

  // group
  auto* group = app.add_subcommand("group", "Build a preset and print its invariant report");
  PresetFlags gf;
  std::string g_format = "text", g_output;
  auto* g_preset = group->add_option("--preset", gf.preset,
                                     "Family preset: elementary_abelian, coclass1, nebelung, "
                                     "dihedral, semidihedral, quaternion");
  g_preset->required();
  auto* g_p = group->add_option("--p", gf.p, "Prime p");
  auto* g_m = group->add_option("--m", gf.m, "Chain length m (|G| = p^m for coclass 1)");
  auto* g_n = group->add_option("--n", gf.n, "Order exponent n (coclass >= 2 presets)");
  auto* g_k = group->add_option("--k", gf.k, "Defect k");
  auto* g_rho = group->add_option("--rho", gf.rho, "Closing-relation sign (k = 1 presets)");
  group->add_option("--format", g_format, "Output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  group->add_option("--output", g_output, "Write the report to this file instead of stdout");

  // classify
  auto* classify_cmd =
      app.add_subcommand("classify", "Derive group invariants from measured field data");
  std::vector<std::string> c_pairs;
  std::string c_input, c_format = "text", c_output;
  int c_p = 3;
  bool c_strict = false;
  classify_cmd->add_option("record", c_pairs,
                           "Single record as key=value fields (kind, u, v, w, t1, t2, clF1, "
                           "kappa, disc, name, p)");
  classify_cmd->add_option("--input", c_input, "CSV file of records ('-' for stdin)");
  classify_cmd->add_option("--p", c_p, "Prime p for key=value records (default 3)");
  classify_cmd->add_flag("--strict", c_strict,
                         "Refuse ambiguous records instead of listing both candidates");
  classify_cmd->add_option("--format", c_format, "Output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  classify_cmd->add_option("--output", c_output, "Write results to this file instead of stdout");

  // verify
  auto* verify_cmd =
      app.add_subcommand("verify", "Run closed-form structural checks over a parameter grid");
  std::string v_preset, v_format = "text", v_output;
  int v_p = 3, v_max_m = 7, v_max_n = 9;
  i64 v_budget = kDefaultEnumerationBudget;
  verify_cmd
      ->add_option("--preset", v_preset,
                   "Grid preset: coclass1, nebelung, classic2, dihedral, semidihedral, "
                   "quaternion, elementary_abelian")
      ->required();
  verify_cmd->add_option("--p", v_p, "Prime p for the coclass1 grid (default 3)");
  verify_cmd->add_option("--max-m", v_max_m, "Largest chain length m (default 7)");
  verify_cmd->add_option("--max-n", v_max_n, "Largest order exponent n (default 9)");
  verify_cmd->add_option("--budget", v_budget, "Skip groups of order above this bound");
  verify_cmd->add_option("--format", v_format, "Output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  verify_cmd->add_option("--output", v_output, "Write the report to this file instead of stdout");

  // tables
  auto* tables_cmd =
      app.add_subcommand("tables", "Recompute the bundled measurement tables and diff them");
  std::string t_which = "2,3,4,5,p2", t_format = "text", t_output;
  tables_cmd->add_option("--which", t_which,
                         "Comma-separated table selectors: 2, 3, 4, 5, p2 (default all)");
  tables_cmd->add_option("--format", t_format, "Output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  tables_cmd->add_option("--output", t_output, "Write the report to this file instead of stdout");

  std::vector<const char*> argv;
  argv.push_back("ppg");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (group->parsed()) {
    gf.has_p = g_p->count() > 0;
    gf.has_m = g_m->count() > 0;
    gf.has_n = g_n->count() > 0;
    gf.has_k = g_k->count() > 0;
    gf.has_rho = g_rho->count() > 0;
    return cmd_group(gf, g_format, g_output, out, err);
  }
  if (classify_cmd->parsed())
    return cmd_classify(c_pairs, c_input, c_p, c_strict, c_format, c_output, out, err);
  if (verify_cmd->parsed())
    return cmd_verify(v_preset, v_p, v_max_m, v_max_n, v_budget, v_format, v_output, out, err);
  if (tables_cmd->parsed()) return cmd_tables(t_which, t_format, t_output, out, err);

  err << "error: no subcommand selected\n";
  return kExitUsage;
}

}  // namespace ppg
