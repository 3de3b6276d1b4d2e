#pragma once

// Command-line front end. Lives in a header so the tests can drive it
// in-process; tools/capcalc_cli.cpp is just main().

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "capcalc.hpp"
#include "harness/runner.hpp"

namespace capcalc::cli {

enum Exit { kOk = 0, kRejected = 1, kBadInput = 2, kOutOfFuel = 3 };

namespace detail {

inline std::string slurp(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "io", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Env load_env(const std::string& path) {
  if (path.empty()) return {};
  auto g = parse_env(slurp(path));
  wf_env(g);
  return g;
}

// Run `body`, turning the error taxonomy into exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << to_string(e.kind()) << " at " << e.what() << "\n";
    return kBadInput;
  } catch (const Error& e) {
    err << "error [" << e.rule() << "] " << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.is_input_error() ? kBadInput : kRejected;
  } catch (const FuelExhausted& e) {
    err << "error: " << e.what() << "\n";
    return kOutOfFuel;
  }
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"capcalc: capture calculus checker with box inference"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  std::string file, env_file, system = "term", emit = "both", var_name, to_type, check = "all", format = "summary";
  std::size_t fuel = kDefaultFuel;
  bool capsets = false, check_fsub = false;
  harness::RunConfig rc;
  rc.gen.max_depth = 6;
  std::uint64_t seed = 1;
  std::string t_src, u_src;
  bool list = false;
  std::string bias = "mixed";

  auto add_fuel = [&](CLI::App* c) { c->add_option("--fuel", fuel, "fuel: one unit per rule application")->capture_default_str(); };
  auto add_env = [&](CLI::App* c, bool required) {
    auto* o = c->add_option("--env", env_file, "environment file (lines `x : T` / `X <: S`)");
    if (required) o->required();
  };

  auto* check_cmd = app.add_subcommand("check", "typecheck a term");
  check_cmd->add_option("FILE", file, "term file, or - for stdin")->required();
  add_env(check_cmd, false);
  add_fuel(check_cmd);

  auto* infer_cmd = app.add_subcommand("infer", "box inference: complete missing box/unbox and eta wrappers");
  infer_cmd->add_option("FILE", file, "term file, or - for stdin")->required();
  add_env(infer_cmd, false);
  infer_cmd->add_option("--system", system, "engine")->check(CLI::IsMember({"term", "type", "both"}))->capture_default_str();
  infer_cmd->add_option("--emit", emit, "what to print")->check(CLI::IsMember({"term", "type", "both"}))->capture_default_str();
  add_fuel(infer_cmd);

  auto* sub_cmd = app.add_subcommand("sub", "decide T <: U");
  sub_cmd->add_option("T", t_src)->required();
  sub_cmd->add_option("U", u_src)->required();
  add_env(sub_cmd, true);
  sub_cmd->add_flag("--capsets", capsets, "use the capture-set-directed judgment (subtype_capt)");
  add_fuel(sub_cmd);

  auto* adapt_cmd = app.add_subcommand("adapt", "adapt a variable to an expected type");
  add_env(adapt_cmd, true);
  adapt_cmd->add_option("--var", var_name, "variable bound in the environment")->required();
  adapt_cmd->add_option("--to", to_type, "expected type")->required();
  adapt_cmd->add_option("--system", system, "engine")->check(CLI::IsMember({"term", "type"}))->capture_default_str();
  add_fuel(adapt_cmd);

  auto* norm_cmd = app.add_subcommand("normalize", "compact administrative lets and eta wrappers");
  norm_cmd->add_option("FILE", file, "term file, or - for stdin")->required();

  auto* erase_cmd = app.add_subcommand("erase", "drop captures and boxes, giving an F<: program");
  erase_cmd->add_option("FILE", file, "term file, or - for stdin")->required();
  add_env(erase_cmd, false);
  erase_cmd->add_flag("--check-fsub", check_fsub, "also typecheck the image in F<:");
  add_fuel(erase_cmd);

  auto* fuzz_cmd = app.add_subcommand("fuzz", "run the differential property checks");
  fuzz_cmd->add_option("--seed", seed, "base seed")->capture_default_str();
  fuzz_cmd->add_option("--count", rc.count, "cases per property")->capture_default_str();
  fuzz_cmd->add_option("--check", check, "property name, or all")->capture_default_str();
  fuzz_cmd->add_option("--max-depth", rc.gen.max_depth, "term depth")->capture_default_str();
  fuzz_cmd->add_option("--max-env", rc.gen.max_env, "environment size")->capture_default_str();
  fuzz_cmd->add_option("--box-bias", bias, "box/unbox bias in [0,1], or mixed")->capture_default_str();
  fuzz_cmd->add_option("--drop-rate", rc.gen.drop_rate, "chance of dropping each box when perturbing")->capture_default_str();
  fuzz_cmd->add_option("--mirror-k", rc.mirror_k, "termination mirror ratio")->capture_default_str();
  fuzz_cmd->add_option("--fuel", rc.fuel, "fuel per judgment")->capture_default_str();
  fuzz_cmd->add_flag("--hostile", rc.gen.hostile, "include the F<: divergence pattern");
  fuzz_cmd->add_flag("--broken-cv", rc.broken_cv, "mutation mode: compare against a wrong cv");
  fuzz_cmd->add_flag("--no-shrink", [&](std::int64_t) { rc.shrink = false; }, "report failures unminimized");
  fuzz_cmd->add_option("--format", format, "report format")->check(CLI::IsMember({"summary", "jsonl", "both"}))->capture_default_str();
  fuzz_cmd->add_flag("--list", list, "list properties and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }

  return detail::guarded(err, [&]() -> int {
    if (*check_cmd) {
      auto g = detail::load_env(env_file);
      auto t = parse_term(detail::slurp(file));
      Fuel f(fuel);
      out << print(typecheck(g, t, f)) << "\n";
      return kOk;
    }

    if (*infer_cmd) {
      auto g = detail::load_env(env_file);
      auto t = parse_term(detail::slurp(file));
      if (system == "term") {
        Fuel f(fuel);
        auto r = infer(g, t, f);
        if (emit != "type") out << print(r.term) << "\n";
        if (emit != "term") out << ": " << print(r.type) << "\n";
        return kOk;
      }
      if (system == "type") {
        Fuel f(fuel);
        auto r = infer_t(g, t, f);
        if (emit != "term") out << ": " << print(r.type) << "\n";
        out << "captures " << print(r.captures) << "\n";
        return kOk;
      }
      // both engines; any disagreement is a failure with a structured diff
      std::optional<Inferred> a;
      std::optional<InferredT> b;
      std::string ea, eb;
      try {
        Fuel f(fuel);
        a = infer(g, t, f);
      } catch (const Error& e) {
        ea = std::string(to_string(e.kind())) + ": " + e.what();
      }
      try {
        Fuel f(fuel);
        b = infer_t(g, t, f);
      } catch (const Error& e) {
        eb = std::string(to_string(e.kind())) + ": " + e.what();
      }
      if (!a && !b) {
        err << "error: both engines reject\n  term: " << ea << "\n  type: " << eb << "\n";
        return kRejected;
      }
      nlohmann::json diff;
      if (!a || !b) {
        diff = {{"divergence", "accept/reject"}, {"term", a ? print(a->type) : "rejected: " + ea},
                {"type", b ? print(b->type) : "rejected: " + eb}};
      } else if (!alpha_eq(a->type, b->type)) {
        diff = {{"divergence", "type"}, {"term", print(a->type)}, {"type", print(b->type)}};
      } else if (cv(a->term) != b->captures) {
        diff = {{"divergence", "captures"}, {"term", print(cv(a->term))}, {"type", print(b->captures)}};
      }
      if (!diff.is_null()) {
        err << diff.dump(2) << "\n";
        return kRejected;
      }
      if (emit != "type") out << print(a->term) << "\n";
      if (emit != "term") out << ": " << print(a->type) << "\n";
      out << "captures " << print(b->captures) << "\n";
      return kOk;
    }

    if (*sub_cmd) {
      auto g = detail::load_env(env_file);
      auto t = parse_type(t_src), u = parse_type(u_src);
      wf_type(g, t);
      wf_type(g, u);
      Fuel f(fuel);
      bool ok = capsets ? subtype_capt(g, t, u, f) : subtype(g, t, u, f);
      out << (ok ? "yes" : "no") << "\n";
      return ok ? kOk : kRejected;
    }

    if (*adapt_cmd) {
      auto g = detail::load_env(env_file);
      auto x = var(var_name);
      if (!g.binds(x)) throw Error(ErrorKind::UnboundVariable, "adapt", "unbound variable " + var_name);
      auto u = parse_type(to_type);
      Fuel f(fuel);
      if (system == "term") {
        out << print(box_adapt(g, x, u, f)) << "\n";
      } else {
        auto [k, c] = box_adapt_t(g, x, u, f);
        out << print(k) << " " << print(c) << "\n";
      }
      return kOk;
    }

    if (*norm_cmd) {
      out << print(normalize(parse_term(detail::slurp(file)))) << "\n";
      return kOk;
    }

    if (*erase_cmd) {
      auto g = detail::load_env(env_file);
      auto t = erase(parse_term(detail::slurp(file)));
      out << print(t) << "\n";
      if (check_fsub) {
        Fuel f(fuel);
        out << ": " << print(fsub_typecheck(erase(g), t, f)) << "\n";
      }
      return kOk;
    }

    // fuzz
    if (list) {
      for (auto& p : harness::properties()) out << p.name << "  " << p.about << "\n";
      return kOk;
    }
    rc.gen.seed = seed;
    if (bias == "mixed") {
      rc.mixed_bias = true;
    } else {
      rc.mixed_bias = false;
      try {
        rc.gen.box_bias = std::stod(bias);
      } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, "fuzz", "--box-bias wants a number or `mixed`");
      }
    }
    std::vector<std::string> names;
    if (check == "all") {
      names = harness::property_names();
    } else {
      if (!harness::find_property(check)) throw Error(ErrorKind::ParseError, "fuzz", "unknown property " + check);
      names = {check};
    }
    auto rep = harness::run_differential(rc, names);
    if (format != "summary") harness::write_jsonl(out, rep);
    if (format != "jsonl") harness::write_summary(format == "both" ? err : out, rep);
    return rep.ok() ? kOk : kRejected;
  });
}

}  // namespace capcalc::cli
