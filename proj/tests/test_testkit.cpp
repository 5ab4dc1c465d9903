#include <doctest.h>

#include <set>
#include <vector>

#include "ratdial/testkit.hpp"

using namespace ratdial;

TEST_CASE("seeded generator reproduces itself") {
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 5; ++i) CHECK(a.next() == b.next());
  SplitMix64 c(43);
  CHECK(SplitMix64(42).next() != c.next());
  SplitMix64 d(7);
  for (int i = 0; i < 100; ++i) CHECK(d.below(10) < 10);
}

TEST_CASE("random frameworks are valid and reproducible") {
  GeneratorConfig cfg;
  cfg.max_states = 12;
  cfg.max_denominator = 9;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    cfg.seed = s;
    Framework fw = gen_random_framework(cfg);
    CHECK(fw.states.size >= 1);
    CHECK(fw.states.size <= cfg.max_states);
    CHECK(validate_framework(fw).ok());
    for (int i = 0; i < fw.states.size; ++i) CHECK(fw.prior.mass(i).sign() > 0);
  }
  cfg.seed = 314;
  Framework x = gen_random_framework(cfg);
  Framework y = gen_random_framework(cfg);
  CHECK(x.states.size == y.states.size);
  CHECK(x.prior.masses() == y.prior.masses());
  CHECK(x.event.members() == y.event.members());
  CHECK(x.partition_p == y.partition_p);
  CHECK(x.partition_q == y.partition_q);
  CHECK(x.opener == y.opener);

  GeneratorConfig tiny;
  tiny.max_states = 1;
  CHECK(gen_random_framework(tiny).states.size == 1);
}

TEST_CASE("alternating template") {
  Dialogue d = alternating_dialogue(Rational(1, 3), Rational(2, 3), 4);
  CHECK(d.opinions ==
        std::vector<Rational>{Rational(1, 3), Rational(2, 3), Rational(1, 3),
                              Rational(2, 3), Rational(1, 3), Rational(1, 3)});
  CHECK(alternating_dialogue(Rational(1, 2), Rational(1, 3), 0).opinions ==
        std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
  CHECK_THROWS_AS(alternating_dialogue(Rational(1, 2), Rational(1, 3), -1), Error);
}

TEST_CASE("random belief sequences are admissible and reproducible") {
  GeneratorConfig cfg;
  cfg.max_dialogue_length = 7;
  cfg.max_denominator = 5;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    cfg.seed = s;
    Dialogue d = gen_random_dialogue(cfg);
    CHECK(!d.opinions.empty());
    CHECK(static_cast<int>(d.opinions.size()) <= cfg.max_dialogue_length);
    for (const Rational& v : d.opinions) CHECK(v.in_unit_interval());
    CHECK(!check_certainty_acquiescence(d));
  }
  cfg.seed = 2718;
  CHECK(gen_random_dialogue(cfg).opinions == gen_random_dialogue(cfg).opinions);
}

TEST_CASE("roundtrip verdicts") {
  Dialogue worked;
  worked.opinions = {Rational(1, 4), Rational(1, 4), Rational(1, 4),
                     Rational(1, 4), Rational(3, 4), Rational(3, 4)};
  RoundtripReport report = roundtrip_check(worked);
  CHECK(report.pass);
  CHECK(report.first_mismatch == 0);
  CHECK(report.message.empty());
  CHECK(report.trace.consensus_value == Rational(3, 4));
}

TEST_CASE("roundtrip holds for every short constant sequence") {
  std::vector<Rational> values = detail::mass_palette(6);
  values.emplace_back(0);
  for (const Rational& v : values) {
    for (int len = 1; len <= 6; ++len) {
      CAPTURE(v.str());
      CAPTURE(len);
      Dialogue d;
      d.opinions.assign(static_cast<std::size_t>(len), v);
      RoundtripReport report = roundtrip_check(d);
      CHECK(report.pass);
      // A constant sequence settles immediately.
      CHECK(report.trace.termination_step == 1);
    }
  }
}

TEST_CASE("roundtrip holds for sampled random sequences") {
  GeneratorConfig cfg;
  cfg.max_dialogue_length = 5;
  cfg.max_denominator = 5;
  for (std::uint64_t s = 0; s < 200; ++s) {
    cfg.seed = 0xD1A1ULL + s;
    RoundtripReport report = roundtrip_check(gen_random_dialogue(cfg));
    CHECK(report.pass);
    if (!report.pass) {
      CAPTURE(s);
      CAPTURE(report.message);
      break;
    }
  }
}

TEST_CASE("disjoint union composes sizes, labels and transcripts") {
  GeneratorConfig cfg;
  cfg.seed = 99;
  Framework a = gen_random_framework(cfg);
  cfg.seed = 100;
  Framework b = gen_random_framework(cfg);
  Framework u = disjoint_union(a, b);
  CHECK(u.states.size == a.states.size + b.states.size);
  CHECK(u.states.label(0) == "a." + a.states.label(0));
  CHECK(u.states.label(a.states.size) == "b." + b.states.label(0));
  CHECK(u.opener == a.opener);
  CHECK(validate_framework(u).ok());
  for (int s = 0; s < a.states.size; ++s) {
    DialogueTrace alone = run_dialogue(a, s, 10000, false);
    DialogueTrace joined = run_dialogue(u, s, 10000, false);
    CHECK(alone.transcript == joined.transcript);
    CHECK(alone.consensus_value == joined.consensus_value);
    CHECK(alone.termination_step == joined.termination_step);
  }
}

TEST_CASE("perturbation is the identity when everything is reachable") {
  Framework fw;
  fw.states = StateSpace{3, {}};
  fw.prior = Measure({Rational(1), Rational(2), Rational(3)});
  fw.event = EventSet(3, {0});
  fw.partition_p = Partition::trivial(3);
  fw.partition_q = Partition::trivial(3);
  Framework out = perturb_outside_closure(fw, 0, 555);
  CHECK(out.prior.masses() == fw.prior.masses());
  CHECK(out.partition_p == fw.partition_p);
  CHECK(out.partition_q == fw.partition_q);
}

TEST_CASE("perturbation respects the closure boundary") {
  // The certain-no base knows everything: the closure of its anchor is a
  // single state, and rewriting the other state never touches the exchange.
  RationalizationResult base = rationalize_base(Rational(0), Agent::p);
  for (std::uint64_t seed : {1ULL, 2ULL, 77ULL}) {
    Framework out = perturb_outside_closure(base.framework, base.omega_star, seed);
    CHECK(validate_framework(out).ok());
    CHECK(out.prior.mass(base.omega_star) ==
          base.framework.prior.mass(base.omega_star));
    DialogueTrace trace = run_dialogue(out, base.omega_star);
    CHECK(trace.transcript == std::vector<Rational>{Rational(0)});
    CHECK(trace.consensus_value == Rational(0));
  }
}

TEST_CASE("perturbing the far component preserves near transcripts") {
  GeneratorConfig cfg;
  for (std::uint64_t s = 0; s < 50; ++s) {
    cfg.seed = 7000 + s;
    Framework a = gen_random_framework(cfg);
    cfg.seed = 8000 + s;
    Framework b = gen_random_framework(cfg);
    Framework u = disjoint_union(a, b);
    int anchor = static_cast<int>(SplitMix64(s).below(
        static_cast<std::uint64_t>(a.states.size)));
    Framework v = perturb_outside_closure(u, anchor, 0xFACEULL + s);
    DialogueTrace before = run_dialogue(u, anchor, 10000, false);
    DialogueTrace after = run_dialogue(v, anchor, 10000, false);
    CHECK(before.transcript == after.transcript);
    CHECK(before.consensus_value == after.consensus_value);
    CHECK(before.termination_step == after.termination_step);
  }
}

TEST_CASE("partition enumeration matches the Bell numbers") {
  const int bell[] = {1, 1, 2, 5, 15, 52};
  for (int n = 1; n <= 5; ++n) {
    std::vector<Partition> parts = detail::all_partitions(n);
    CHECK(static_cast<int>(parts.size()) == bell[n]);
    std::set<std::vector<int>> distinct;
    for (const Partition& p : parts) {
      CHECK(static_cast<int>(p.cell_map().size()) == n);
      distinct.insert(p.cell_map());
    }
    CHECK(distinct.size() == parts.size());
  }
}

TEST_CASE("mass palette enumerates reduced fractions in (0,1]") {
  CHECK(detail::mass_palette(1) == std::vector<Rational>{Rational(1)});
  CHECK(detail::mass_palette(3) ==
        std::vector<Rational>{Rational(1), Rational(1, 2), Rational(1, 3),
                              Rational(2, 3)});
  CHECK(detail::mass_palette(6).size() == 12);
}

TEST_CASE("desk-scale consensus sweep") {
  SweepSummary tiny = exhaustive_consensus_sweep(2, 2, 1);
  CHECK(tiny.pass);
  CHECK(tiny.message.empty());
  CHECK(tiny.frameworks == 68);
  CHECK(tiny.cases == 132);
  CHECK(tiny.consistency_checks == 68);
  CHECK(tiny.max_termination_step <= 4);

  SweepSummary small = exhaustive_consensus_sweep(3, 2, 7);
  CHECK(small.pass);
  CHECK(small.frameworks == 1668);
  CHECK(small.cases == 4932);
  CHECK(small.consistency_checks == 1668 / 7);
  CHECK(small.max_termination_step <= 6);
}
