// Tests for the command-line surface. Most exercise the in-process entry
// point; two smoke tests run the installed binary end-to-end through a
// shell to cover stdin plumbing and process exit codes.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#ifdef PPG_CLI_PATH
#include <sys/wait.h>
#endif

#include "doctest.h"
#include "json.hpp"
#include "ppg/abelian.hpp"
#include "ppg/cli.hpp"

using json = nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult result;
  result.code = ppg::run_cli(args, out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

// Splits "key: value" lines of a text report into a map.
std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t colon = line.find(": ");
    if (colon == std::string::npos) continue;
    kv[line.substr(0, colon)] = line.substr(colon + 2);
  }
  return kv;
}

}  // namespace

TEST_CASE("group reports a classical maximal-class 2-group") {
  const CliResult r = run({"group", "--preset", "dihedral", "--m", "4"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.err.empty());
  const auto kv = key_values(r.out);
  CHECK(kv.at("p") == "2");
  CHECK(kv.at("m") == "4");
  CHECK(kv.at("n") == "4");
  CHECK(kv.at("cl") == "3");
  CHECK(kv.at("cc") == "1");
  CHECK(kv.at("s") == "2");
  CHECK(kv.at("e") == "2");
  CHECK(kv.at("k") == "0");
  CHECK(kv.at("ab1") == "8");
  CHECK(kv.at("ab2") == "2-2");
  CHECK(kv.at("ab3") == "2-2");
  CHECK(kv.count("kappa") == 1);
  CHECK(kv.count("nu") == 1);
  CHECK(r.out.find("note:") == std::string::npos);
}

TEST_CASE("group reports the smallest coclass-2 frame") {
  const CliResult r = run({"group", "--preset", "nebelung", "--m", "4", "--n", "5"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto kv = key_values(r.out);
  CHECK(kv.at("p") == "3");
  CHECK(kv.at("m") == "4");
  CHECK(kv.at("n") == "5");
  CHECK(kv.at("cc") == "2");
  CHECK(kv.at("e") == "3");
  CHECK(kv.at("k") == "0");
  for (const char* key : {"ab1", "ab2", "ab3", "ab4"})
    CHECK(ppg::AbelianGroup::parse(kv.at(key)).order() == 27);
}

TEST_CASE("group treats chain length 2 as the abelian case") {
  const CliResult r = run({"group", "--preset", "coclass1", "--m", "2"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto kv = key_values(r.out);
  CHECK(kv.at("p") == "3");
  CHECK(kv.at("m") == "2");
  CHECK(kv.at("s") == "-");
  CHECK(kv.at("e") == "-");
  CHECK(kv.at("k") == "-");
  CHECK(kv.at("kappa") == "(0000)");
  CHECK(kv.at("nu") == "4");
  CHECK(r.out.find("note: abelian group; s, e and k are undefined") != std::string::npos);
}

TEST_CASE("group emits the same report as json") {
  const CliResult text = run({"group", "--preset", "coclass1", "--p", "3", "--m", "5", "--k", "1"});
  const CliResult as_json =
      run({"group", "--preset", "coclass1", "--p", "3", "--m", "5", "--k", "1", "--format",
           "json"});
  REQUIRE(text.code == 0);
  REQUIRE(as_json.code == 0);
  const json j = json::parse(as_json.out);
  const auto kv = key_values(text.out);
  CHECK(j["p"].get<int>() == 3);
  CHECK(j["m"].get<int>() == 5);
  CHECK(j["n"].get<int>() == 5);
  CHECK(j["cl"].get<int>() == 4);
  CHECK(j["cc"].get<int>() == 1);
  CHECK(j["k"].get<int>() == 1);
  CHECK(std::to_string(j["s"].get<int>()) == kv.at("s"));
  CHECK(j["ab1"].get<std::string>() == kv.at("ab1"));
  CHECK(j["kappa"].get<std::string>() == kv.at("kappa"));
  CHECK(j["nu"].get<int>() == std::stoi(kv.at("nu")));
  REQUIRE(j["gamma"].is_array());
  CHECK(j["gamma"][0].get<long long>() == 243);
}

TEST_CASE("group usage failures exit with code 2") {
  CHECK(run({"group"}).code == 2);                                       // missing --preset
  CHECK(run({"group", "--preset", "coclass1"}).code == 2);               // missing --m
  CHECK(run({"group", "--preset", "dihedral", "--m", "4", "--p", "3"}).code == 2);
  CHECK(run({"group", "--preset", "unknown_family", "--m", "4"}).code == 2);
  CHECK(run({"group", "--preset", "coclass1", "--m", "4", "--format", "yaml"}).code == 2);
  // Semantically impossible parameters are semantic failures, not usage.
  const CliResult bad = run({"group", "--preset", "coclass1", "--m", "4", "--k", "1"});
  CHECK(bad.code == 2);  // rejected by the family validator at descriptor build time
}

TEST_CASE("classify resolves the worked complex example") {
  const CliResult r =
      run({"classify", "kind=complex", "u=2", "v=1", "w=6", "name=G.16-like"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("G.16-like: coclass-ge-2") == 0);
  CHECK(r.out.find("m=7 n=8 e=3 k=1 clF1_order=729") != std::string::npos);
  CHECK(r.out.find("nu_admissible=0") != std::string::npos);

  const CliResult j = run({"classify", "kind=complex", "u=2", "v=1", "w=6", "--format", "json"});
  REQUIRE(j.code == 0);
  const json parsed = json::parse(j.out);
  CHECK(parsed["branch"].get<std::string>() == "coclass-ge-2");
  CHECK_FALSE(parsed["ambiguous"].get<bool>());
  REQUIRE(parsed["candidates"].size() == 1);
  CHECK(parsed["candidates"][0]["m"].get<int>() == 7);
  CHECK(parsed["candidates"][0]["n"].get<int>() == 8);
  CHECK(parsed["candidates"][0]["e"].get<int>() == 3);
  CHECK(parsed["candidates"][0]["k"].get<int>() == 1);
  CHECK(parsed["candidates"][0]["clF1_order"].get<long long>() == 729);
  CHECK(parsed["nu_admissible"] == json::array({0}));
}

TEST_CASE("classify reports ambiguity and strictness") {
  const CliResult open = run({"classify", "kind=real", "u=2", "t1=a"});
  REQUIRE(open.code == 0);
  CHECK(open.out.find("m=5 n=5 e=2 k=0") != std::string::npos);
  CHECK(open.out.find(" | ") != std::string::npos);
  CHECK(open.out.find("m=6 n=6 e=2 k=1") != std::string::npos);
  CHECK(open.out.find("AmbiguousResult") != std::string::npos);

  // Strict mode turns the ambiguity into a classification error, exit 1.
  const CliResult strict = run({"classify", "kind=real", "u=2", "t1=a", "--strict"});
  CHECK(strict.code == 1);
  CHECK(strict.out.find("error [MissingW]") != std::string::npos);

  // An unresolvable record is a classification error too.
  const CliResult bad = run({"classify", "kind=complex", "u=2", "v=1", "w=9"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("error [Inconsistent]") != std::string::npos);
}

TEST_CASE("classify validates its record syntax") {
  CHECK(run({"classify"}).code == 2);                       // no record at all
  CHECK(run({"classify", "u=2"}).code == 2);                // kind is mandatory
  CHECK(run({"classify", "kind=real", "u"}).code == 2);     // not key=value
  CHECK(run({"classify", "kind=real", "q=1"}).code == 2);   // unknown key
  CHECK(run({"classify", "kind=maybe", "u=2"}).code == 2);  // bad kind
}

TEST_CASE("classify consumes CSV record files") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "ppg_cli_records.csv";
  {
    std::ofstream file(path);
    file << "table,p,kind,disc,name,kappa,u,v,w,t1,t2,clF1,exp_e,exp_m,exp_n,exp_k,freq,label\n";
    file << "t,3,complex,-12131,D.5-like,,1,1,3,-,-,,,,,,,\n";
    file << "t,3,real,62501,a.1-like,,2,,4,a,,,,,,,,\n";
  }
  const CliResult r = run({"classify", "--input", path.string()});
  fs::remove(path);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("D.5-like: coclass-ge-2 m=4 n=5 e=3 k=0") != std::string::npos);
  CHECK(r.out.find("a.1-like: coclass-1 m=6 n=6 e=2 k=1") != std::string::npos);

  const CliResult missing = run({"classify", "--input", "/nonexistent/records.csv"});
  CHECK(missing.code == 2);
  CHECK_FALSE(missing.err.empty());
}

TEST_CASE("verify runs the closed-form grid checks") {
  const CliResult cc1 = run({"verify", "--preset", "coclass1", "--max-m", "5"});
  REQUIRE_MESSAGE(cc1.code == 0, (cc1.out + cc1.err));
  CHECK(cc1.out.find("result: pass") != std::string::npos);
  CHECK(cc1.out.find("fail:") == std::string::npos);

  const CliResult neb = run({"verify", "--preset", "nebelung", "--max-m", "5", "--max-n", "7"});
  REQUIRE_MESSAGE(neb.code == 0, (neb.out + neb.err));
  CHECK(neb.out.find("result: pass") != std::string::npos);

  const CliResult classic = run({"verify", "--preset", "classic2", "--max-m", "6"});
  REQUIRE_MESSAGE(classic.code == 0, (classic.out + classic.err));

  // The budget skips large members instead of failing.
  const CliResult skip =
      run({"verify", "--preset", "coclass1", "--max-m", "7", "--budget", "729"});
  REQUIRE(skip.code == 0);
  const auto kv = key_values(skip.out);
  CHECK(std::stoi(kv.at("skipped")) > 0);
  CHECK(std::stoi(kv.at("checked")) > 0);

  CHECK(run({"verify", "--preset", "unknown"}).code == 2);
  CHECK(run({"verify"}).code == 2);

  const CliResult as_json =
      run({"verify", "--preset", "elementary_abelian", "--format", "json"});
  REQUIRE(as_json.code == 0);
  const json j = json::parse(as_json.out);
  CHECK(j["checked"].get<int>() == 1);
  CHECK(j["failures"].empty());
}

TEST_CASE("tables reproduces the bundled corpus") {
  const CliResult all = run({"tables"});
  REQUIRE_MESSAGE(all.code == 0, (all.out + all.err));
  CHECK(all.out.find("rows checked: 78") != std::string::npos);
  CHECK(all.out.find("frequency total table2: 2303") != std::string::npos);
  CHECK(all.out.find("frequency total table3: 2020") != std::string::npos);
  CHECK(all.out.find("frequency total table4: 206") != std::string::npos);
  CHECK(all.out.find("frequency total table5: 67") != std::string::npos);
  CHECK(all.out.find("diffs: 0") != std::string::npos);

  const CliResult partial = run({"tables", "--which", "3"});
  REQUIRE(partial.code == 0);
  CHECK(partial.out.find("rows checked: 33") != std::string::npos);
  CHECK(partial.out.find("diffs: 0") != std::string::npos);

  const CliResult p2 = run({"tables", "--which", "p2", "--format", "json"});
  REQUIRE(p2.code == 0);
  const json j = json::parse(p2.out);
  CHECK(j["rows_checked"].get<int>() == 19);
  CHECK(j["diffs"].empty());

  CHECK(run({"tables", "--which", "table9"}).code == 2);
  CHECK(run({"tables", "--which", ","}).code == 2);
}

TEST_CASE("output lands in a file when requested") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "ppg_cli_report.txt";
  const CliResult r =
      run({"group", "--preset", "quaternion", "--m", "3", "--output", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream file(path);
  std::stringstream content;
  content << file.rdbuf();
  fs::remove(path);
  CHECK(content.str().find("ab1: 4") != std::string::npos);
}

TEST_CASE("cli output is deterministic") {
  const std::vector<std::string> args{"group", "--preset", "nebelung", "--m", "5",
                                      "--n",   "6",        "--k",      "1", "--rho", "-1"};
  const CliResult first = run(args);
  const CliResult second = run(args);
  REQUIRE(first.code == 0);
  CHECK(first.out == second.out);

  const CliResult tables_first = run({"tables", "--which", "2"});
  const CliResult tables_second = run({"tables", "--which", "2"});
  CHECK(tables_first.out == tables_second.out);
}

TEST_CASE("top-level usage") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"group", "--bogus-flag"}).code == 2);
  const CliResult help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("group") != std::string::npos);
  CHECK(help.out.find("classify") != std::string::npos);
  CHECK(help.out.find("verify") != std::string::npos);
  CHECK(help.out.find("tables") != std::string::npos);
}

#ifdef PPG_CLI_PATH
TEST_CASE("the installed binary works end to end") {
  namespace fs = std::filesystem;
  const std::string binary = PPG_CLI_PATH;
  REQUIRE(fs::exists(binary));
  const fs::path dir = fs::temp_directory_path();
  const fs::path out_path = dir / "ppg_binary_out.txt";

  // Exit code and report content of a plain invocation.
  {
    const std::string cmd =
        "\"" + binary + "\" group --preset dihedral --m 5 > \"" + out_path.string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    CHECK(WEXITSTATUS(rc) == 0);
    std::ifstream file(out_path);
    std::stringstream content;
    content << file.rdbuf();
    CHECK(content.str().find("ab1: 16") != std::string::npos);
  }

  // Records delivered on stdin via --input -.
  {
    const fs::path csv_path = dir / "ppg_binary_records.csv";
    std::ofstream csv(csv_path);
    csv << "table,p,kind,disc,name,kappa,u,v,w,t1,t2,clF1,exp_e,exp_m,exp_n,exp_k,freq,label\n";
    csv << "t,3,complex,,stdin-row,,2,1,6,-,-,,,,,,,\n";
    csv.close();
    const std::string cmd = "\"" + binary + "\" classify --input - < \"" + csv_path.string() +
                            "\" > \"" + out_path.string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    CHECK(WEXITSTATUS(rc) == 0);
    std::ifstream file(out_path);
    std::stringstream content;
    content << file.rdbuf();
    CHECK(content.str().find("stdin-row: coclass-ge-2 m=7 n=8 e=3 k=1") != std::string::npos);
    fs::remove(csv_path);
  }

  // A nonzero semantic exit code crosses the process boundary.
  {
    const std::string cmd = "\"" + binary +
                            "\" classify kind=complex u=1 v=2 w=3 > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    CHECK(WEXITSTATUS(rc) == 1);
  }
  fs::remove(out_path);
}
#endif
