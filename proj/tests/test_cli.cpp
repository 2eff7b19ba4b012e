#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

// End-to-end tests drive the installed binary through a shell, so they cover
// argument parsing, exit codes, stdout/stderr routing, and file round-trips.

namespace {

using json = nlohmann::json;

std::string temp_path(const std::string& name) {
  return ::testing::TempDir() + "tenrank_cli_" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::string& args, const std::string& tag) {
  std::string out_path = temp_path(tag + ".stdout");
  std::string err_path = temp_path(tag + ".stderr");
  std::string cmd =
      std::string(TENRANK_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
  int status = std::system(cmd.c_str());
  CliRun r;
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

// Most generator invocations are shared between tests; produce the file once
// per path and reuse it.
std::string make_canonical_file(const std::string& cls, const std::string& tag) {
  std::string path = temp_path(tag + ".json");
  CliRun r = run_cli("generate canonical:" + cls + " --out " + path, "gen_" + tag);
  EXPECT_EQ(r.code, 0) << r.err;
  return path;
}

}  // namespace

TEST(CliParsing, HelpAndErrorExitCodes) {
  EXPECT_EQ(run_cli("--help", "help").code, 0);
  EXPECT_EQ(run_cli("classify --help", "help_classify").code, 0);
  EXPECT_EQ(run_cli("", "noargs").code, 1);
  EXPECT_EQ(run_cli("frobnicate", "badsub").code, 1);
  EXPECT_EQ(run_cli("classify", "nopath").code, 1);
  EXPECT_EQ(run_cli("fit somefile.json", "norank").code, 1);
}

TEST(CliClassify, CanonicalReportsAreExact) {
  std::string g3 = make_canonical_file("G3", "g3");
  CliRun r = run_cli("classify " + g3, "classify_g3");
  ASSERT_EQ(r.code, 0) << r.err;
  json rep = json::parse(r.out);
  EXPECT_EQ(rep["class"], "G3");
  EXPECT_EQ(rep["delta"], "-4/1");
  EXPECT_EQ(rep["mlrank"], (json{2, 2, 2}));
  EXPECT_EQ(rep["outer_rank"], 3);
  EXPECT_EQ(rep["border_rank"], 3);
  EXPECT_TRUE(rep.contains("witness"));

  std::string g2 = make_canonical_file("G2", "g2");
  json rep2 = json::parse(run_cli("classify " + g2, "classify_g2").out);
  EXPECT_EQ(rep2["class"], "G2");
  EXPECT_EQ(rep2["delta"], "1/1");
  EXPECT_EQ(rep2["border_rank"], 2);
}

TEST(CliClassify, FloatFilesUseFloatBackendUnlessForced) {
  // Same tensor as canonical G3, stored with floating-point entries.
  std::string path = temp_path("g3_float.json");
  std::ofstream(path) << R"({"shape":[2,2,2],"scalar":"f64","data":[1,0,0,1,0,-1,1,0]})";

  json float_rep = json::parse(run_cli("classify " + path, "classify_float").out);
  EXPECT_EQ(float_rep["class"], "G3");
  EXPECT_TRUE(float_rep["delta"].is_number());
  EXPECT_NEAR(float_rep["delta"].get<double>(), -4.0, 1e-12);

  json exact_rep = json::parse(run_cli("classify --exact " + path, "classify_forced").out);
  EXPECT_EQ(exact_rep["class"], "G3");
  EXPECT_EQ(exact_rep["delta"], "-4/1");
}

TEST(CliClassify, BadInputsExitOne) {
  CliRun missing = run_cli("classify " + temp_path("nonexistent.json"), "classify_missing");
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("error:"), std::string::npos);

  std::string garbled = temp_path("garbled.json");
  std::ofstream(garbled) << "{not json";
  EXPECT_EQ(run_cli("classify " + garbled, "classify_garbled").code, 1);

  std::string short_data = temp_path("short.json");
  std::ofstream(short_data) << R"({"shape":[2,2,2],"scalar":"f64","data":[1,2,3]})";
  EXPECT_EQ(run_cli("classify " + short_data, "classify_short").code, 1);

  std::string order2 = temp_path("order2.json");
  std::ofstream(order2) << R"({"shape":[2,2],"scalar":"f64","data":[1,0,0,1]})";
  EXPECT_EQ(run_cli("classify " + order2, "classify_order2").code, 1);
}

TEST(CliClassify, UnclassifiableTensorExitsTwo) {
  // A 4x4x4 tensor with full multilinear rank has no 2x2x2 core.
  std::string path = temp_path("gap41.json");
  CliRun gen = run_cli("generate gap --r 4 --s 1 --n 2 --out " + path, "gen_gap41");
  ASSERT_EQ(gen.code, 0) << gen.err;
  CliRun r = run_cli("classify " + path, "classify_gap41");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("unclassified:", 0), 0u) << r.err;
}

TEST(CliGenerate, SequenceKindsWriteWitnessSidecars) {
  std::string path = temp_path("dslseq3.json");
  CliRun gen = run_cli("generate dsl-seq --n 3 --out " + path, "gen_dslseq");
  ASSERT_EQ(gen.code, 0) << gen.err;
  EXPECT_NE(gen.out.find("wrote: " + path), std::string::npos);
  EXPECT_NE(gen.out.find("wrote: " + path + ".witness.json"), std::string::npos);

  json element = json::parse(slurp(path));
  EXPECT_EQ(element["scalar"], "rational");
  EXPECT_EQ(element["shape"], (json{2, 2, 2}));

  json sidecar = json::parse(slurp(path + ".witness.json"));
  EXPECT_EQ(sidecar["n"], 3);
  EXPECT_EQ(sidecar["element_rank_bound"], 2);
  EXPECT_EQ(sidecar["limit_rank"], 3);
  EXPECT_EQ(sidecar["limit_rank_provenance"], "verified-in-2x2x2");
  ASSERT_EQ(sidecar["witness"].size(), 2u);
  for (const auto& term : sidecar["witness"]) {
    EXPECT_TRUE(term.contains("weight"));
    ASSERT_EQ(term["vectors"].size(), 3u);
  }

  // Every finite element of the sequence still sits in the full-rank-2 class.
  json rep = json::parse(run_cli("classify " + path, "classify_dslseq").out);
  EXPECT_EQ(rep["class"], "G2");
}

TEST(CliGenerate, RankPlusOneWritesLimitAndCertificate) {
  std::string path = temp_path("rp1.json");
  CliRun gen =
      run_cli("generate rank-plus-one --shape 2,2,2 --r 2 --out " + path, "gen_rp1");
  ASSERT_EQ(gen.code, 0) << gen.err;

  json rep = json::parse(run_cli("classify " + path, "classify_rp1").out);
  EXPECT_EQ(rep["class"], "D3");
  EXPECT_EQ(rep["outer_rank"], 3);
  EXPECT_EQ(rep["border_rank"], 2);

  json sidecar = json::parse(slurp(path + ".witness.json"));
  EXPECT_EQ(sidecar["n"], 1);
  EXPECT_EQ(sidecar["limit_rank"], 3);
  EXPECT_EQ(sidecar["limit_rank_provenance"], "verified-in-2x2x2");

  std::string big = temp_path("rp1_big.json");
  CliRun gen_big =
      run_cli("generate rank-plus-one --shape 3,3,3 --r 3 --out " + big, "gen_rp1_big");
  ASSERT_EQ(gen_big.code, 0) << gen_big.err;
  json side_big = json::parse(slurp(big + ".witness.json"));
  EXPECT_EQ(side_big["limit_rank"], 4);
  EXPECT_EQ(side_big["limit_rank_provenance"], "asserted-external");
}

TEST(CliGenerate, LeibnizLimitHasOneEntryPerArrangement) {
  std::string path = temp_path("leibniz11.json");
  CliRun gen = run_cli("generate leibniz --k 3 --a 1,1 --out " + path, "gen_leibniz");
  ASSERT_EQ(gen.code, 0) << gen.err;
  json file = json::parse(slurp(path));
  EXPECT_EQ(file["shape"], (json{3, 3, 3}));
  EXPECT_EQ(file["scalar"], "rational");
  ASSERT_EQ(file["data"].size(), 27u);
  int ones = 0;
  for (const auto& entry : file["data"]) {
    if (entry == "1/1")
      ++ones;
    else
      EXPECT_EQ(entry, "0/1");
  }
  EXPECT_EQ(ones, 6);
}

TEST(CliGenerate, RandomOrbitSamplesAreSeedDeterministic) {
  std::string p1 = temp_path("orbit_a.json");
  std::string p2 = temp_path("orbit_b.json");
  std::string p3 = temp_path("orbit_c.json");
  ASSERT_EQ(run_cli("generate random-orbit --class G2 --seed 5 --out " + p1, "orbit1").code, 0);
  ASSERT_EQ(run_cli("generate random-orbit --class G2 --seed 5 --out " + p2, "orbit2").code, 0);
  ASSERT_EQ(run_cli("generate random-orbit --class G2 --seed 6 --out " + p3, "orbit3").code, 0);
  EXPECT_EQ(slurp(p1), slurp(p2));
  EXPECT_NE(slurp(p1), slurp(p3));

  json rep = json::parse(run_cli("classify " + p1, "classify_orbit").out);
  EXPECT_EQ(rep["class"], "G2");
}

TEST(CliGenerate, RejectsUnknownKindsAndBadParameters) {
  CliRun unknown = run_cli("generate nonsense --out " + temp_path("x.json"), "gen_unknown");
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("error:"), std::string::npos);

  EXPECT_EQ(run_cli("generate canonical:NOPE --out " + temp_path("y.json"), "gen_badcls").code,
            1);
  EXPECT_EQ(
      run_cli("generate gap --r 3 --s 2 --out " + temp_path("z.json"), "gen_badgap").code, 1);
  EXPECT_EQ(run_cli("generate random-orbit --class Q7 --out " + temp_path("w.json"),
                    "gen_badorbit")
                .code,
            1);
}

TEST(CliFit, EmitsModelVerdictAndTraceCsv) {
  std::string g2 = make_canonical_file("G2", "fit_g2");
  std::string trace = temp_path("fit_trace.csv");
  CliRun r = run_cli("fit " + g2 + " --rank 2 --seed 1 --trace " + trace, "fit");
  ASSERT_EQ(r.code, 0) << r.err;
  json out = json::parse(r.out);
  EXPECT_EQ(out["model"]["family"], "cp");
  EXPECT_EQ(out["model"]["shape"], (json{2, 2, 2}));
  ASSERT_EQ(out["model"]["coefficients"].size(), 2u);
  EXPECT_GE(out["model"]["coefficients"][0].get<double>(),
            out["model"]["coefficients"][1].get<double>());
  EXPECT_LE(out["residual"].get<double>(), 1e-6);
  EXPECT_FALSE(out["degeneracy"]["degenerate"].get<bool>());

  std::string csv = slurp(trace);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "iter,residual,lambda_1,lambda_2,cos_mode1,cos_mode2,cos_mode3,elapsed_ms");
  long rows = 0;
  for (std::string line; std::getline(lines, line);)
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, out["iterations"].get<long>());

  // Byte-identical reruns: the seed pins the whole trajectory.
  CliRun again = run_cli("fit " + g2 + " --rank 2 --seed 1", "fit_again");
  EXPECT_EQ(json::parse(again.out)["model"], out["model"]);

  EXPECT_EQ(run_cli("fit " + g2 + " --rank 0", "fit_rank0").code, 1);
}

TEST(CliWeak2, BoundaryApproximantForTheNoMinimumTensor) {
  std::string g3 = make_canonical_file("G3", "weak2_g3");
  CliRun r = run_cli("weak2 " + g3 + " --seed 7", "weak2");
  ASSERT_EQ(r.code, 0) << r.err;
  json out = json::parse(r.out);
  EXPECT_EQ(out["model"]["family"], "three-term-boundary");
  EXPECT_EQ(out["model"]["coefficients"], (json{1.0, 1.0, 1.0}));
  double residual = out["residual"].get<double>();
  EXPECT_GE(residual, 0.99);
  EXPECT_LE(residual, 1.01);
  EXPECT_EQ(out["approximant_class"], "D3");
}

TEST(CliBregman, HalfSquaredFrobeniusDistance) {
  std::string g3 = make_canonical_file("G3", "breg_g3");
  std::string g2 = make_canonical_file("G2", "breg_g2");
  CliRun r = run_cli("bregman " + g3 + " " + g2, "bregman");
  ASSERT_EQ(r.code, 0) << r.err;
  json out = json::parse(r.out);
  EXPECT_EQ(out["generator"], "half-squared-frobenius");
  EXPECT_NEAR(out["divergence"].get<double>(), 2.0, 1e-12);
}

TEST(CliDemo, DegeneracyDemoDefaultsShowTheBlowup) {
  CliRun r = run_cli("degeneracy-demo", "demo");
  ASSERT_EQ(r.code, 0) << r.err;
  json out = json::parse(r.out);
  EXPECT_EQ(out["target"], "canonical:G3");
  EXPECT_EQ(out["rank"], 2);
  EXPECT_EQ(out["seed"], 7);
  EXPECT_EQ(out["iterations"], 5000);
  double final_residual = out["final_residual"].get<double>();
  EXPECT_GE(final_residual, 0.9);
  EXPECT_LE(final_residual, 1.1);
  EXPECT_TRUE(out["degeneracy"]["degenerate"].get<bool>());
  EXPECT_GE(out["degeneracy"]["max_lambda"].get<double>(), 20.0);
}

TEST(CliTable, ReproducesTheCanonicalOrbitTable) {
  CliRun r = run_cli("reproduce-table1", "table");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("| class | sign(delta) | mlrank | rank | border rank |"),
            std::string::npos);
  EXPECT_NE(r.out.find("| G2 | + | (2,2,2) | 2 | 2 |"), std::string::npos);
  EXPECT_NE(r.out.find("| D3 | 0 | (2,2,2) | 3 | 2 |"), std::string::npos);
  EXPECT_NE(r.out.find("| G3 | - | (2,2,2) | 3 | 3 |"), std::string::npos);
  for (const char* cls : {"D0", "D1", "D2", "D2p", "D2pp"})
    EXPECT_NE(r.out.find(std::string("| ") + cls + " |"), std::string::npos);
}
