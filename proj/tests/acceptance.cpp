// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <capcalc/capcalc.hpp>
#include <capcalc/harness/runner.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace capcalc;
using namespace capcalc::harness;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool ok;
  std::string note;
};

int failures = 0;

void report(int n, const char* name, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("unexpected exception: ") + e.what()};
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s  %2d  %-34s %s (%.2fs)\n", o.ok ? "PASS" : "FAIL", n, name, o.note.c_str(), s);
  std::fflush(stdout);
  if (!o.ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1,000 well-typed programs (depth 6, box bias cycling through 0..1) and
// their drop_boxes perturbations: the 2,000-case default corpus.
struct Corpus {
  std::vector<Program> typed, perturbed;
};

Corpus build_corpus() {
  Corpus c;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    GenConfig g;
    g.seed = mix_seed(kSeed, i);
    g.max_depth = 6;
    g.box_bias = 0.25 * static_cast<double>(i % 5);
    auto p = gen_welltyped(g);
    Rng r(mix_seed(kSeed + 1, i));
    c.typed.push_back(p);
    c.perturbed.push_back({p.env, drop_boxes(p.term, r, 0.5)});
  }
  return c;
}

std::string first_lines(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size() && i < 3; ++i) s += "\n      " + xs[i];
  return s;
}

Outcome property(const std::string& name, std::size_t checked) {
  RunConfig cfg;
  cfg.gen.seed = kSeed;
  cfg.gen.max_depth = 6;
  cfg.count = checked;
  cfg.min_checked = checked;
  cfg.max_attempts = 50 * checked;
  auto rep = run_differential(cfg, {name});
  auto& st = rep.stats[name];
  std::size_t done = st.run - st.skipped;
  std::ostringstream os;
  os << st.failed << " failures over " << done << " checked";
  if (st.skipped) os << " (" << st.skipped << " generated cases did not meet the premise)";
  bool ok = rep.ok() && done >= checked;
  if (!rep.ok()) {
    std::ostringstream w;
    write_summary(w, rep);
    os << "\n" << w.str();
  }
  return {ok, os.str()};
}

}  // namespace

int main() {
  std::printf("capcalc acceptance (seed %llu)\n", static_cast<unsigned long long>(kSeed));
  auto t0 = std::chrono::steady_clock::now();
  auto corpus = build_corpus();
  std::printf("corpus: %zu well-typed + %zu perturbed programs in %.2fs\n", corpus.typed.size(),
              corpus.perturbed.size(), seconds_since(t0));

  report(1, "completeness round-trip", [&] {
    auto start = std::chrono::steady_clock::now();
    std::vector<std::string> bad;
    for (auto& p : corpus.typed) {
      auto ty = typecheck(p.env, p.term);
      try {
        auto r = infer(p.env, p.term);
        if (!alpha_eq(r.term, p.term) || !alpha_eq(r.type, ty)) bad.push_back(print(p.term));
      } catch (const Error& e) {
        bad.push_back(print(p.term) + "  rejected: " + e.what());
      }
    }
    double s = seconds_since(start);
    return Outcome{bad.empty() && s < 60, std::to_string(bad.size()) + "/1000 failures" + first_lines(bad)};
  });

  report(2, "soundness on box-perturbed programs", [&] {
    auto start = std::chrono::steady_clock::now();
    std::vector<std::string> bad;
    std::size_t accepted = 0, repaired = 0;
    for (auto& p : corpus.perturbed) {
      std::optional<Inferred> r;
      try {
        r = infer(p.env, p.term);
      } catch (const Error&) {
        continue;
      }
      ++accepted;
      repaired += !alpha_eq(r->term, p.term);
      try {
        auto back = typecheck(p.env, r->term);
        if (!subtype(p.env, back, r->type)) bad.push_back(print(r->term));
      } catch (const Error& e) {
        bad.push_back(print(r->term) + "  rejected: " + e.what());
      }
    }
    double s = seconds_since(start);
    return Outcome{bad.empty() && s < 60, std::to_string(bad.size()) + " failures; infer accepted " +
                                              std::to_string(accepted) + "/1000, elaborated " +
                                              std::to_string(repaired) + first_lines(bad)};
  });

  report(3, "term/type engine equivalence", [&] {
    std::vector<std::string> bad;
    std::size_t agree_accept = 0;
    for (auto* set : {&corpus.typed, &corpus.perturbed})
      for (auto& p : *set) {
        std::optional<Inferred> a;
        std::optional<InferredT> b;
        try {
          a = infer(p.env, p.term);
        } catch (const Error&) {
        }
        try {
          b = infer_t(p.env, p.term);
        } catch (const Error&) {
        }
        if (!a && !b) continue;
        if (!a || !b || !alpha_eq(a->type, b->type) || cv(a->term) != b->captures) {
          bad.push_back(print(p.term));
          continue;
        }
        ++agree_accept;
      }
    return Outcome{bad.empty(), std::to_string(bad.size()) + "/2000 failures (" + std::to_string(agree_accept) +
                                    " accepted by both)" + first_lines(bad)};
  });

  report(4, "subtyping reflexivity + transitivity", [&] {
    auto a = property("sub-reflexivity", 1000);
    auto b = property("sub-transitivity", 1000);
    return Outcome{a.ok && b.ok, "refl: " + a.note + "; trans: " + b.note};
  });

  report(5, "subtype <=> subtype_capt", [&] { return property("sub-capt-equivalence", 1000); });

  report(6, "adaptation identity", [&] { return property("adapt-identity", 500); });

  report(7, "golden eta-expansion", [&] {
    auto g = parse_env("io : {cap} Top\nf : all (op: {io} all (u: Top) -> Top) -> Top");
    auto from = parse_type("{f} all (op: {io} all (u: Top) -> Top) -> Top");
    auto to = parse_type("{io} all (op: Box {io} all (u: Top) -> Top) -> Top");
    auto want = parse_term("fun (op: Box {io} all (u: Top) -> Top) let op' = ({io} unbox op) in f op'");
    auto got = adapt_sub(g, var("f"), from, to);
    auto [kind, cs] = box_adapt_t(g, var("f"), to);
    bool ok = alpha_eq(got, want) && cv(got) == parse_captures("{f, io}") && kind == Kind::Val &&
              cs == parse_captures("{f, io}");
    return Outcome{ok, print(got) + "  cv " + print(cv(got)) + "  predicted (" + print(kind) + ", " + print(cs) + ")"};
  });

  report(8, "escape checking", [&] {
    auto kind_of_failure = [](auto&& f) -> std::string {
      try {
        f();
      } catch (const Error& e) {
        return to_string(e.kind());
      }
      return "accepted";
    };
    auto g1 = parse_env("io : {cap} Top\nx : Box {cap} Top");
    auto g2 = parse_env("io : {cap} Top\nP <: Top");
    auto g3 = parse_env("f : all (a: {cap} all (u: Top) -> Top) -> Top\nx : Box {cap} all (u: Top) -> Top");
    std::vector<std::pair<std::string, std::string>> got = {
        {"unbox {cap} (typecheck)", kind_of_failure([&] { typecheck(g1, parse_term("{cap} unbox x")); })},
        {"unbox {cap} (infer)", kind_of_failure([&] { infer(g1, parse_term("{cap} unbox x")); })},
        {"adapt Box {cap} P ~> {cap} P", kind_of_failure([&] {
           adapt_sub(g2, var("x"), parse_type("Box {cap} P"), parse_type("{cap} P"));
         })},
        {"adapt_t Box {cap} P ~> {cap} P", kind_of_failure([&] {
           adapt_sub_t(g2, parse_type("Box {cap} P"), parse_type("{cap} P"));
         })},
        {"infer f x (needs unbox of cap)", kind_of_failure([&] { infer(g3, parse_term("f x")); })},
        {"infer_t f x", kind_of_failure([&] { infer_t(g3, parse_term("f x")); })},
    };
    bool ok = true;
    std::string note;
    for (auto& [what, k] : got) {
      ok = ok && k == "EscapeViolation";
      note += "\n      " + what + ": " + k;
    }
    return Outcome{ok, "3 cases, both engines" + note};
  });

  report(9, "normalization preservation", [&] {
    std::vector<std::string> bad;
    for (auto& p : corpus.typed) {
      auto ty = typecheck(p.env, p.term);
      auto n = normalize(p.term);
      try {
        if (!subtype(p.env, typecheck(p.env, n), ty)) bad.push_back(print(n));
      } catch (const Error& e) {
        bad.push_back(print(n) + "  rejected: " + e.what());
      }
    }
    return Outcome{bad.empty(), std::to_string(bad.size()) + "/1000 failures" + first_lines(bad)};
  });

  report(10, "conditional termination mirror", [&] {
    constexpr double k = 8;
    std::size_t mirrored = 0, exhausted = 0, over = 0;
    double worst = 0;
    std::vector<std::string> notes;
    for (auto* set : {&corpus.typed, &corpus.perturbed})
      for (auto& p : *set) {
        Fuel ff;
        try {
          fsub_typecheck(erase(p.env), erase(p.term), ff);
        } catch (const Error&) {
          continue;
        } catch (const FuelExhausted&) {
          continue;
        }
        ++mirrored;
        Fuel fc;
        try {
          infer(p.env, p.term, fc);
        } catch (const Error&) {
        } catch (const FuelExhausted&) {
          ++exhausted;
          notes.push_back(print(p.term));
          continue;
        }
        double ratio = static_cast<double>(fc.used()) / static_cast<double>(std::max<std::size_t>(ff.used(), 1));
        worst = std::max(worst, ratio);
        if (ratio > k) ++over;
      }
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu exhausted over %zu mirrored programs; %zu need > %.0fx F<: fuel (reported), worst %.2fx",
                  exhausted, mirrored, over, k, worst);
    return Outcome{exhausted == 0 && mirrored > 0, buf + first_lines(notes)};
  });

  std::printf("%s: %d of 10 criteria failed (total %.2fs)\n", failures ? "FAILED" : "OK", failures, seconds_since(t0));
  return failures ? 1 : 0;
}
