// Seeded property-test harness. Each suite prints one JSON summary line;
// the process exits 0 only if every requested suite passed.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ratdial/ratdial.hpp"

namespace {

using namespace ratdial;
using nlohmann::json;

struct SuiteOutcome {
  json summary;
  bool ok = true;
};

json config_json(const GeneratorConfig& cfg) {
  return json{{"max_states", cfg.max_states},
              {"max_denominator", cfg.max_denominator},
              {"max_dialogue_length", cfg.max_dialogue_length},
              {"seed", cfg.seed}};
}

SuiteOutcome run_roundtrip(GeneratorConfig cfg, int cases) {
  SuiteOutcome out;
  SplitMix64 seeder(cfg.seed);
  int failed = 0;
  json first_failure;
  for (int i = 0; i < cases; ++i) {
    GeneratorConfig case_cfg = cfg;
    case_cfg.seed = seeder.next();
    Dialogue d = gen_random_dialogue(case_cfg);
    RoundtripReport report = roundtrip_check(d);
    if (!report.pass) {
      ++failed;
      if (first_failure.is_null())
        first_failure = {{"index", i},
                         {"seed", case_cfg.seed},
                         {"message", report.message}};
    }
  }
  out.ok = failed == 0;
  out.summary = {{"suite", "roundtrip"},
                 {"cases", cases},
                 {"passed", cases - failed},
                 {"failed", failed},
                 {"config", config_json(cfg)},
                 {"first_failure", first_failure},
                 {"ok", out.ok}};
  return out;
}

SuiteOutcome run_consensus(int max_states, int max_denominator, long long stride) {
  SweepSummary sweep = exhaustive_consensus_sweep(max_states, max_denominator, stride);
  SuiteOutcome out;
  out.ok = sweep.pass;
  out.summary = {{"suite", "consensus"},
                 {"max_states", max_states},
                 {"max_denominator", max_denominator},
                 {"frameworks", sweep.frameworks},
                 {"cases", sweep.cases},
                 {"consistency_checks", sweep.consistency_checks},
                 {"max_termination_step", sweep.max_termination_step},
                 {"message", sweep.message},
                 {"ok", out.ok}};
  return out;
}

bool traces_identical(const DialogueTrace& a, const DialogueTrace& b) {
  return a.transcript == b.transcript && a.consensus_value == b.consensus_value &&
         a.termination_step == b.termination_step;
}

SuiteOutcome run_closure(GeneratorConfig cfg, int cases) {
  SuiteOutcome out;
  SplitMix64 seeder(cfg.seed);
  int failed = 0;
  json first_failure;
  for (int i = 0; i < cases; ++i) {
    GeneratorConfig a_cfg = cfg, b_cfg = cfg;
    a_cfg.seed = seeder.next();
    b_cfg.seed = seeder.next();
    std::uint64_t perturb_seed = seeder.next();
    Framework a = gen_random_framework(a_cfg);
    Framework b = gen_random_framework(b_cfg);
    Framework whole = disjoint_union(a, b);
    int anchor = static_cast<int>(SplitMix64(perturb_seed).below(
        static_cast<std::uint64_t>(a.states.size)));
    Framework shaken = perturb_outside_closure(whole, anchor, perturb_seed);
    DialogueTrace before = run_dialogue(whole, anchor);
    DialogueTrace after = run_dialogue(shaken, anchor);
    if (!traces_identical(before, after)) {
      ++failed;
      if (first_failure.is_null())
        first_failure = {{"index", i},
                         {"seed", perturb_seed},
                         {"message", "transcript changed under outside perturbation"}};
    }
  }
  out.ok = failed == 0;
  out.summary = {{"suite", "closure"},
                 {"cases", cases},
                 {"passed", cases - failed},
                 {"failed", failed},
                 {"config", config_json(cfg)},
                 {"first_failure", first_failure},
                 {"ok", out.ok}};
  return out;
}

SuiteOutcome run_format(GeneratorConfig cfg, int cases) {
  SuiteOutcome out;
  SplitMix64 seeder(cfg.seed);
  int failed = 0;
  json first_failure;
  auto record = [&](int i, std::uint64_t seed, const std::string& message) {
    ++failed;
    if (first_failure.is_null())
      first_failure = {{"index", i}, {"seed", seed}, {"message", message}};
  };
  for (int i = 0; i < cases; ++i) {
    GeneratorConfig case_cfg = cfg;
    case_cfg.seed = seeder.next();
    Framework fw = gen_random_framework(case_cfg);
    int anchor = static_cast<int>(SplitMix64(case_cfg.seed ^ 0xabcdULL)
                                      .below(static_cast<std::uint64_t>(fw.states.size)));
    std::string text1 = emit_matrix(fw, anchor);
    MatrixDocument doc = parse_matrix(text1);
    if (emit_matrix(doc) != text1) {
      record(i, case_cfg.seed, "document emission not idempotent");
      continue;
    }
    FrameworkWithAnchor back = matrix_to_framework(doc);
    if (emit_matrix(back.framework, back.omega_star) != text1) {
      record(i, case_cfg.seed, "framework emission changed after a round trip");
      continue;
    }
    DialogueTrace original = run_dialogue(fw, anchor);
    DialogueTrace reparsed = run_dialogue(back.framework, back.omega_star);
    if (!traces_identical(original, reparsed))
      record(i, case_cfg.seed, "transcript changed after a round trip");
  }
  out.ok = failed == 0;
  out.summary = {{"suite", "format"},
                 {"cases", cases},
                 {"passed", cases - failed},
                 {"failed", failed},
                 {"config", config_json(cfg)},
                 {"first_failure", first_failure},
                 {"ok", out.ok}};
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded property-test harness"};
  std::string suite = "all";
  int cases = 0;
  GeneratorConfig cfg;
  cfg.seed = 20250823;
  long long stride = 1009;
  int consensus_states = 4, consensus_denominator = 3;
  app.add_option("--suite", suite, "roundtrip | consensus | closure | format | all")
      ->check(CLI::IsMember({"roundtrip", "consensus", "closure", "format", "all"}));
  app.add_option("--cases", cases, "Case count (0 = suite default)");
  app.add_option("--seed", cfg.seed, "Base seed");
  app.add_option("--max-states", cfg.max_states, "Framework size bound");
  app.add_option("--max-denominator", cfg.max_denominator, "Denominator bound");
  app.add_option("--max-dialogue-length", cfg.max_dialogue_length,
                 "Dialogue length bound");
  app.add_option("--consensus-states", consensus_states,
                 "Exhaustive sweep state bound");
  app.add_option("--consensus-denominator", consensus_denominator,
                 "Exhaustive sweep denominator bound");
  app.add_option("--stride", stride,
                 "Sweep cross-check stride (0 disables the cross-check)");
  CLI11_PARSE(app, argc, argv);

  std::vector<SuiteOutcome> outcomes;
  try {
    if (suite == "roundtrip" || suite == "all") {
      GeneratorConfig rt = cfg;
      rt.max_dialogue_length = suite == "all" ? 8 : cfg.max_dialogue_length;
      rt.max_denominator = suite == "all" ? 12 : cfg.max_denominator;
      outcomes.push_back(run_roundtrip(rt, cases > 0 ? cases : 1000));
    }
    if (suite == "consensus" || suite == "all")
      outcomes.push_back(run_consensus(consensus_states, consensus_denominator, stride));
    if (suite == "closure" || suite == "all")
      outcomes.push_back(run_closure(cfg, cases > 0 ? cases : 100));
    if (suite == "format" || suite == "all")
      outcomes.push_back(run_format(cfg, cases > 0 ? cases : 200));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  bool ok = true;
  for (const SuiteOutcome& outcome : outcomes) {
    std::cout << outcome.summary.dump() << "\n";
    ok = ok && outcome.ok;
  }
  return ok ? 0 : 1;
}
