#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "helpers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;

  json parsed() const {
    INFO("stdout:\n" << out);
    REQUIRE_FALSE(out.empty());
    return json::parse(out);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "cfuse-cli-tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  fs::path outfile = scratch_dir() / ("out" + std::to_string(counter++) + ".json");
  std::string cmd = env_prefix + (env_prefix.empty() ? "" : " ") + CFUSE_CLI_PATH + " " + args +
                    " > " + outfile.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(outfile);
  return r;
}

std::string fx(const std::string& name) { return fixture_path(name); }

}  // namespace

TEST_CASE("validate maps verdicts to exit codes", "[cli]") {
  SECTION("a clean model exits zero") {
    RunResult r = run("validate " + fx("ex1_m1.cmf"));
    REQUIRE(r.code == 0);
    json j = r.parsed();
    REQUIRE(j["verdict"] == "valid");
    REQUIRE(j["id"] == "M1");
    REQUIRE(j["diagnostics"].empty());
  }

  SECTION("a rule violation exits one and lists diagnostics") {
    fs::path bad = scratch_dir() / "closure.cmf";
    std::ofstream(bad) << "model BAD {\n"
                          "  exogenous A : {0, 1};\n"
                          "  endogenous B : {0, 1} = A + A;\n"
                          "}\n";
    RunResult r = run("validate " + bad.string());
    REQUIRE(r.code == 1);
    json j = r.parsed();
    REQUIRE(j["verdict"] == "invalid");
    REQUIRE_FALSE(j["diagnostics"].empty());
    REQUIRE(j["diagnostics"][0]["rule"] == "closure-failure");
  }

  SECTION("unparsable text exits two") {
    fs::path bad = scratch_dir() / "syntax.cmf";
    std::ofstream(bad) << "model { nope";
    RunResult r = run("validate " + bad.string());
    REQUIRE(r.code == 2);
    REQUIRE(r.parsed()["verdict"] == "unparsed");
  }

  SECTION("a missing file exits two") {
    REQUIRE(run("validate /nonexistent.cmf").code == 2);
  }
}

TEST_CASE("solve prints the full assignment", "[cli]") {
  RunResult r = run("solve " + fx("ex1_m1.cmf") + " --context \"A'=2,B'=3,T=Freezing\"");
  REQUIRE(r.code == 0);
  json j = r.parsed();
  REQUIRE(j["assignments"]["A"] == 2);
  REQUIRE(j["assignments"]["B"] == 3);
  REQUIRE(j["assignments"]["C"] == false);
  REQUIRE(j["assignments"]["T"] == "Freezing");

  SECTION("bad context values exit two") {
    REQUIRE(run("solve " + fx("ex1_m1.cmf") + " --context \"A'=9,B'=3,T=Freezing\"").code == 2);
  }
}

TEST_CASE("query evaluates interventional formulas", "[cli]") {
  std::string base = "query " + fx("ex1_m1.cmf") + " --context \"A'=1,B'=1,T=Hot\"";
  SECTION("literal formula text, true verdict") {
    RunResult r = run(base + " --formula '[A <- 2, B <- 3] C = true'");
    REQUIRE(r.code == 0);
    REQUIRE(r.parsed()["verdict"] == true);
  }
  SECTION("false verdicts exit one") {
    RunResult r = run(base + " --formula '[] C = true'");
    REQUIRE(r.code == 1);
    REQUIRE(r.parsed()["verdict"] == false);
  }
  SECTION("formula from a file") {
    RunResult r = run(base + " --formula " + fx("sample.cff"));
    REQUIRE(r.code == 0);
  }
  SECTION("unknown names exit two") {
    REQUIRE(run(base + " --formula '[] Z = 1'").code == 2);
  }
}

TEST_CASE("explain reports the direction and optional witness", "[cli]") {
  SECTION("positive direction with witness") {
    RunResult r =
        run("explain " + fx("ex1_m1.cmf") + " " + fx("ex1_m2.cmf") + " --var C --witness");
    REQUIRE(r.code == 0);
    json j = r.parsed();
    REQUIRE(j["verdict"] == true);
    REQUIRE(j["witness"]["target"] == "C");
    REQUIRE(j["witness"]["entries"].size() == 25);
  }
  SECTION("negative direction exits one") {
    RunResult r = run("explain " + fx("ex1_m2.cmf") + " " + fx("ex1_m1.cmf") + " --var C");
    REQUIRE(r.code == 1);
    REQUIRE(r.parsed()["verdict"] == false);
  }
  SECTION("unknown variable exits two") {
    REQUIRE(run("explain " + fx("ex1_m1.cmf") + " " + fx("ex1_m2.cmf") + " --var nope").code ==
            2);
  }
}

TEST_CASE("compatible lists the per-variable directions", "[cli]") {
  RunResult r = run("compatible " + fx("ex1_m1.cmf") + " " + fx("ex1_m2.cmf"));
  REQUIRE(r.code == 0);
  json j = r.parsed();
  REQUIRE(j["verdict"] == true);
  bool saw_c = false;
  for (const auto& row : j["shared"]) {
    if (row["variable"] == "C") {
      saw_c = true;
      REQUIRE(row["first_explains_second"] == true);
      REQUIRE(row["second_explains_first"] == false);
    }
  }
  REQUIRE(saw_c);
}

TEST_CASE("combine writes models and reports failures", "[cli]") {
  SECTION("success with an output file that validates") {
    fs::path out = scratch_dir() / "combined.cmf";
    RunResult r = run("combine " + fx("ex1_m1.cmf") + " " + fx("ex1_m2.cmf") + " -o " +
                      out.string());
    REQUIRE(r.code == 0);
    json j = r.parsed();
    REQUIRE(j["verdict"] == "defined");
    REQUIRE(j["id"] == "M1_oplus_M2");
    REQUIRE(j["provenance"]["C"] == "M1");
    REQUIRE(j["provenance"]["B"] == "M2");
    REQUIRE(run("validate " + out.string()).code == 0);
  }

  SECTION("cyclic collision exits one with the error kind") {
    RunResult r = run("combine " + fx("cyclic_m1.cmf") + " " + fx("cyclic_m2.cmf"));
    REQUIRE(r.code == 1);
    json j = r.parsed();
    REQUIRE(j["verdict"] == "undefined");
    REQUIRE(j["error"]["kind"] == "cyclic-combination");
  }

  SECTION("prime skips the bound check that plain combine enforces") {
    REQUIRE(run("combine --prime " + fx("ex3_m1.cmf") + " " + fx("ex3_m2.cmf")).code == 0);
    RunResult r = run("combine " + fx("ex3_m1.cmf") + " " + fx("ex3_m2.cmf"));
    REQUIRE(r.code == 1);
    json j = r.parsed();
    REQUIRE(j["error"]["kind"] == "not-least-upper-bound");
    REQUIRE(j["error"]["model"] == "M2");
    REQUIRE(j["error"]["variable"] == "C");
  }
}

TEST_CASE("complexity covers both flavors", "[cli]") {
  SECTION("explanation complexity at a variable") {
    RunResult r = run("complexity " + fx("cx_m1.cmf") + " " + fx("cx_m2.cmf") + " --var C");
    REQUIRE(r.code == 0);
    json j = r.parsed();
    REQUIRE(j["verdict"] == "defined");
    REQUIRE(j["complexity"]["cardinality"] == 1);
  }

  SECTION("combination complexity without --var") {
    RunResult r = run("complexity " + fx("w4_m1.cmf") + " " + fx("w4_m2.cmf"));
    REQUIRE(r.code == 0);
    json j = r.parsed();
    REQUIRE(j["complexity"]["cardinality"] == 5);
    REQUIRE(j["complexity"]["direction"]["B"] == "M2");
  }

  SECTION("undefined combinations exit one") {
    RunResult r = run("complexity " + fx("w4_m1.cmf") + " " + fx("w4_m3.cmf"));
    REQUIRE(r.code == 1);
    REQUIRE(r.parsed()["verdict"] == "undefined");
  }
}

TEST_CASE("weigh scores a panel manifest", "[cli]") {
  RunResult r = run("weigh " + fx("w4.panel"));
  REQUIRE(r.code == 0);
  json j = r.parsed();
  REQUIRE(j["verdict"] == "scored");
  REQUIRE(j["rule"] == "inverse");
  REQUIRE(j["panel"].size() == 3);
  REQUIRE(j["sets"].size() == 5);
  double sum = 0.0;
  for (const auto& s : j["sets"]) sum += s["score"].get<double>();
  REQUIRE(sum == Catch::Approx(1.0).epsilon(1e-9));
  // the pair {2,3} carries the largest mass under the inverse rule
  bool found = false;
  for (const auto& s : j["sets"]) {
    if (s["members"] == json::array({2, 3})) {
      found = true;
      REQUIRE(s["score"].get<double>() == Catch::Approx(0.280).margin(1e-3));
      REQUIRE(s["complexity"] == 4);
    }
  }
  REQUIRE(found);
}

TEST_CASE("qbf evaluates and reduces", "[cli]") {
  SECTION("a true formula exits zero and the reduction agrees") {
    RunResult r = run("qbf " + fx("sample.qbf"));
    REQUIRE(r.code == 0);
    json j = r.parsed();
    REQUIRE(j["verdict"] == true);
    REQUIRE(j["reduction"]["agrees"] == true);
  }

  SECTION("a false formula exits one") {
    fs::path f = scratch_dir() / "false.qbf";
    std::ofstream(f) << "forall x. exists y. x & y\n";
    RunResult r = run("qbf " + f.string());
    REQUIRE(r.code == 1);
    REQUIRE(r.parsed()["verdict"] == false);
  }

  SECTION("--reduce writes a loadable model pair") {
    fs::path dir = scratch_dir() / "reduction";
    RunResult r = run("qbf " + fx("sample.qbf") + " --reduce " + dir.string());
    REQUIRE(r.code == 0);
    REQUIRE(run("validate " + (dir / "m1.cmf").string()).code == 0);
    REQUIRE(run("validate " + (dir / "m2.cmf").string()).code == 0);
    RunResult x = run("explain " + (dir / "m1.cmf").string() + " " +
                      (dir / "m2.cmf").string() + " --var C");
    REQUIRE(x.code == 0);
  }
}

TEST_CASE("budget exhaustion exits three", "[cli]") {
  SECTION("via the flag") {
    RunResult r = run("--max-enum 10 explain " + fx("ex1_m1.cmf") + " " + fx("ex1_m2.cmf") +
                      " --var C");
    REQUIRE(r.code == 3);
    REQUIRE(r.parsed()["verdict"] == "budget-exceeded");
  }

  SECTION("via the environment") {
    RunResult r = run("explain " + fx("ex1_m1.cmf") + " " + fx("ex1_m2.cmf") + " --var C",
                      "CAUSAL_FUSE_MAX_ENUM=10");
    REQUIRE(r.code == 3);
  }

  SECTION("the flag outranks the environment") {
    RunResult r = run("--max-enum 1000000 explain " + fx("ex1_m1.cmf") + " " +
                          fx("ex1_m2.cmf") + " --var C",
                      "CAUSAL_FUSE_MAX_ENUM=10");
    REQUIRE(r.code == 0);
  }
}

TEST_CASE("usage errors exit two", "[cli]") {
  REQUIRE(run("").code == 2);
  REQUIRE(run("frobnicate").code == 2);
  REQUIRE(run("explain " + fx("ex1_m1.cmf")).code == 2);
  REQUIRE(run("--help").code == 0);
}
