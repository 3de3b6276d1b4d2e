#include <capcalc/cli.hpp>

#include <cstdlib>
#include <sstream>

#include "helpers.hpp"

namespace {

struct Out {
  int code;
  std::string out, err;
};

Out run(std::vector<std::string> args) {
  args.insert(args.begin(), "capcalc");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = capcalc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const char* name) { return std::string(CAPCALC_SAMPLES) + "/" + name; }

}  // namespace

TEST(Cli, CheckWellTyped) {
  auto r = run({"check", sample("tunnel.cc"), "--env", sample("tunnel.env")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "Top\n");
}

TEST(Cli, CheckIllTypedNamesTheRule) {
  auto r = run({"check", sample("missing_box.cc"), "--env", sample("tunnel.env")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("alg-app"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("SubtypeFailure"), std::string::npos) << r.err;
}

TEST(Cli, InferBothOnEtaExample) {
  auto r = run({"infer", sample("eta.cc"), "--env", sample("eta.env"), "--system", "both"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto want = capcalc::parse_term(
      "let f' = (fun (op: Box {io} all (u: Top) -> Top) let op' = ({io} unbox op) in f op') in run f'");
  auto first = r.out.substr(0, r.out.find('\n'));
  EXPECT_TRUE(capcalc::alpha_eq(capcalc::parse_term(first), want)) << first;
  EXPECT_NE(r.out.find(": Top"), std::string::npos);
}

TEST(Cli, InferEngines) {
  auto t = run({"infer", sample("missing_box.cc"), "--env", sample("tunnel.env"), "--emit", "term"});
  EXPECT_EQ(t.code, 0);
  EXPECT_EQ(t.out, "let y' = box y in g y'\n");
  auto ty = run({"infer", sample("missing_box.cc"), "--env", sample("tunnel.env"), "--system", "type"});
  EXPECT_EQ(ty.code, 0);
  EXPECT_EQ(ty.out, ": Top\ncaptures {g}\n");
}

TEST(Cli, Sub) {
  EXPECT_EQ(run({"sub", "{l} Top", "{file, console} Top", "--env", sample("bg.env")}).code, 0);
  EXPECT_EQ(run({"sub", "{l} Top", "{file} Top", "--env", sample("bg.env")}).code, 1);
  EXPECT_EQ(run({"sub", "{l} Top", "{console} Top", "--env", sample("bg.env"), "--capsets"}).code, 0);
  EXPECT_EQ(run({"sub", "{nope} Top", "Top", "--env", sample("bg.env")}).code, 2);
}

TEST(Cli, Adapt) {
  const char* to = "{io} all (op: Box {io} all (u: Top) -> Top) -> Top";
  auto a = run({"adapt", "--env", sample("eta.env"), "--var", "f", "--to", to});
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_TRUE(capcalc::alpha_eq(
      capcalc::parse_term(a.out),
      capcalc::parse_term("fun (op: Box {io} all (u: Top) -> Top) let op' = ({io} unbox op) in f op'")));
  auto b = run({"adapt", "--env", sample("eta.env"), "--var", "f", "--to", to, "--system", "type"});
  EXPECT_EQ(b.out, "Val {f, io}\n");
  EXPECT_EQ(run({"adapt", "--env", sample("eta.env"), "--var", "io", "--to", "Box {cap} Top"}).code, 1);
}

TEST(Cli, EscapeIsATypeFailure) {
  auto r = run({"check", sample("escape.cc"), "--env", sample("escape.env")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("EscapeViolation"), std::string::npos);
}

TEST(Cli, NormalizeAndErase) {
  EXPECT_EQ(run({"normalize", sample("admin.cc")}).out, "x\n");
  auto e = run({"erase", sample("tunnel.cc"), "--env", sample("tunnel.env"), "--check-fsub"});
  EXPECT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(e.out, "let b = y in let p = pid [Top] in let r = p b in g r\n: Top\n");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"check", sample("bad_mnf.cc")}).code, 2);
  EXPECT_EQ(run({"check", sample("no_such_file.cc")}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"infer", sample("eta.cc"), "--system", "bogus"}).code, 2);
  auto d = run({"check", sample("diverge.cc"), "--env", sample("diverge.env"), "--fuel", "500"});
  EXPECT_EQ(d.code, 3);
  EXPECT_NE(d.err.find("fuel"), std::string::npos);
}

TEST(Cli, Fuzz) {
  auto ok = run({"fuzz", "--seed", "3", "--count", "20", "--check", "adp-completeness"});
  EXPECT_EQ(ok.code, 0) << ok.out;
  auto mutant = run({"fuzz", "--count", "100", "--check", "adp-adpt-equivalence", "--broken-cv", "--format", "jsonl"});
  EXPECT_EQ(mutant.code, 1);
  EXPECT_NE(mutant.out.find("\"status\":\"fail\""), std::string::npos);
  EXPECT_EQ(run({"fuzz", "--check", "no-such-property"}).code, 2);
  auto list = run({"fuzz", "--list"});
  EXPECT_NE(list.out.find("termination-mirror"), std::string::npos);
}

TEST(Cli, HelpShowsDefaults) {
  auto r = run({"fuzz", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("[10000]"), std::string::npos) << r.out;
}

TEST(Cli, BinaryRuns) {
  std::string cmd = std::string(CAPCALC_CLI_PATH) + " check " + sample("tunnel.cc") + " --env " +
                    sample("tunnel.env") + " > /dev/null";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  std::string bad = std::string(CAPCALC_CLI_PATH) + " check " + sample("bad_mnf.cc") + " 2> /dev/null";
  int st = std::system(bad.c_str());
  EXPECT_EQ(WEXITSTATUS(st), 2);
}
