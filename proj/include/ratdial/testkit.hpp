#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ratdial/engine.hpp"
#include "ratdial/error.hpp"
#include "ratdial/framework.hpp"
#include "ratdial/matrix_io.hpp"
#include "ratdial/rationalize.hpp"

namespace ratdial {

/// Deterministic 64-bit generator (splitmix64). Self-contained so that
/// seeded runs reproduce everywhere, independent of any platform library.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform-enough draw in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

struct GeneratorConfig {
  int max_states = 8;
  int max_denominator = 6;
  int max_dialogue_length = 6;
  std::uint64_t seed = 0;
};

namespace detail {

/// Random partition of n states: each state joins an existing cell or
/// founds a new one.
inline std::vector<int> random_cell_map(SplitMix64& rng, int n) {
  std::vector<int> cell_of(n);
  int cells = 0;
  for (int s = 0; s < n; ++s) {
    int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(cells) + 1));
    if (pick == cells) ++cells;
    cell_of[s] = pick;
  }
  return cell_of;
}

inline Rational random_unit_rational(SplitMix64& rng, int max_denominator) {
  int den = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_denominator)));
  int num = static_cast<int>(rng.below(static_cast<std::uint64_t>(den) + 1));
  return Rational(num, den);
}

inline Rational random_interior_rational(SplitMix64& rng, int max_denominator) {
  int span = std::max(1, max_denominator - 1);
  int den = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(span)));
  int num = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(den) - 1));
  return Rational(num, den);
}

}  // namespace detail

/// Seeded random framework: up to max_states states, strictly positive
/// masses with denominators within bound, independent random partitions,
/// event and opener. Always valid.
inline Framework gen_random_framework(const GeneratorConfig& cfg) {
  SplitMix64 rng(cfg.seed);
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.max_states)));
  Framework fw;
  fw.states.size = n;
  std::vector<Rational> masses;
  masses.reserve(n);
  for (int s = 0; s < n; ++s) {
    int den = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.max_denominator)));
    int num = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(3 * cfg.max_denominator)));
    masses.emplace_back(num, den);
  }
  fw.prior = Measure(std::move(masses));
  fw.partition_p = Partition(detail::random_cell_map(rng, n));
  fw.partition_q = Partition(detail::random_cell_map(rng, n));
  fw.event = EventSet(n);
  for (int s = 0; s < n; ++s)
    if (rng.below(2) == 1) fw.event.insert(s);
  fw.opener = rng.below(2) == 0 ? Agent::p : Agent::q;
  if (!validate_framework(fw).ok())
    throw EngineError("random framework failed validation");
  return fw;
}

/// The obstinate template: n alternating entries starting at c, then the
/// settling pair (c, c).
inline Dialogue alternating_dialogue(const Rational& c, const Rational& d, int n) {
  if (n < 0) throw Error("negative alternation count");
  Dialogue out;
  for (int i = 0; i < n; ++i) out.opinions.push_back(i % 2 == 0 ? c : d);
  out.opinions.push_back(c);
  out.opinions.push_back(c);
  require_valid_dialogue(out);
  return out;
}

/// Seeded random belief sequence, always satisfying certainty acquiescence.
/// One draw in five comes from a boundary family: constant sequences,
/// obstinate alternations, or near-certain oscillations at the denominator
/// bound; the rest are independent draws with any certain entry locking
/// the tail.
inline Dialogue gen_random_dialogue(const GeneratorConfig& cfg) {
  SplitMix64 rng(cfg.seed);
  const int max_len = std::max(1, cfg.max_dialogue_length);
  const int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len)));
  Dialogue out;
  out.opener = rng.below(2) == 0 ? Agent::p : Agent::q;

  const std::uint64_t roll = rng.below(100);
  if (roll < 20) {
    switch (rng.below(3)) {
      case 0: {
        Rational v = detail::random_unit_rational(rng, cfg.max_denominator);
        out.opinions.assign(static_cast<std::size_t>(len), v);
        break;
      }
      case 1: {
        if (max_len >= 3) {
          int alts = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len - 2)));
          Rational c = detail::random_interior_rational(rng, cfg.max_denominator);
          Rational d = detail::random_interior_rational(rng, cfg.max_denominator);
          Dialogue alt = alternating_dialogue(c, d, alts);
          out.opinions = std::move(alt.opinions);
        } else {
          out.opinions.assign(static_cast<std::size_t>(len),
                              detail::random_interior_rational(rng, cfg.max_denominator));
        }
        break;
      }
      default: {
        int den = std::max(2, cfg.max_denominator);
        Rational hi(den - 1, den), lo(1, den);
        for (int t = 0; t < len; ++t) out.opinions.push_back(t % 2 == 0 ? hi : lo);
        break;
      }
    }
  } else {
    for (int t = 0; t < len; ++t) {
      Rational v = detail::random_unit_rational(rng, cfg.max_denominator);
      out.opinions.push_back(v);
      if (v.is_certain()) {
        while (static_cast<int>(out.opinions.size()) < len) out.opinions.push_back(v);
        break;
      }
    }
  }
  require_valid_dialogue(out);
  if (check_certainty_acquiescence(out))
    throw EngineError("generated dialogue violates certainty acquiescence");
  return out;
}

/// Constructs a framework for d and replays it: passes iff the first |d|
/// announcements equal d exactly, everything later stays at the final
/// entry, and the exchange settles no later than step |d|.
struct RoundtripReport {
  bool pass = true;
  int first_mismatch = 0;  // 1-based step, 0 when passing
  std::string message;
  RationalizationResult built;
  DialogueTrace trace;
};

inline RoundtripReport roundtrip_check(const Dialogue& d) {
  RoundtripReport report;
  report.built = rationalize(d);
  report.trace = run_dialogue(report.built.framework, report.built.omega_star);
  const int len = static_cast<int>(d.opinions.size());
  const int horizon =
      std::max(len, static_cast<int>(report.trace.transcript.size()));
  for (int t = 1; t <= horizon; ++t) {
    const Rational& expected =
        t <= len ? d.opinions[static_cast<std::size_t>(t - 1)] : d.opinions.back();
    if (report.trace.value_at(t) != expected) {
      report.pass = false;
      report.first_mismatch = t;
      report.message = "announcement " + std::to_string(t) + " is " +
                       report.trace.value_at(t).str() + ", expected " +
                       expected.str();
      return report;
    }
  }
  if (report.trace.consensus_value != d.opinions.back()) {
    report.pass = false;
    report.message = "consensus " + report.trace.consensus_value.str() +
                     ", expected " + d.opinions.back().str();
  } else if (report.trace.termination_step > len) {
    report.pass = false;
    report.message = "settled at step " +
                     std::to_string(report.trace.termination_step) +
                     ", later than the sequence length " + std::to_string(len);
  }
  return report;
}

/// Side-by-side composition of two frameworks with no shared cells; the
/// second component is unreachable from the first, so it can be mangled
/// freely without touching transcripts anchored in the first.
inline Framework disjoint_union(const Framework& a, const Framework& b) {
  Framework u;
  const int na = a.states.size, nb = b.states.size;
  u.states.size = na + nb;
  u.states.labels.reserve(static_cast<std::size_t>(na + nb));
  for (int s = 0; s < na; ++s) u.states.labels.push_back("a." + a.states.label(s));
  for (int s = 0; s < nb; ++s) u.states.labels.push_back("b." + b.states.label(s));
  std::vector<Rational> masses = a.prior.masses();
  masses.insert(masses.end(), b.prior.masses().begin(), b.prior.masses().end());
  u.prior = Measure(std::move(masses));
  u.event = EventSet(na + nb);
  for (int s : a.event.members()) u.event.insert(s);
  for (int s : b.event.members()) u.event.insert(na + s);
  auto splice = [&](const Partition& pa, const Partition& pb) {
    std::vector<int> cell_of = pa.cell_map();
    cell_of.reserve(static_cast<std::size_t>(na + nb));
    for (int s = 0; s < nb; ++s) cell_of.push_back(pa.cell_count() + pb.cell_of(s));
    return Partition(cell_of);
  };
  u.partition_p = splice(a.partition_p, b.partition_p);
  u.partition_q = splice(a.partition_q, b.partition_q);
  u.opener = a.opener;
  return u;
}

/// Rewrites everything strictly outside the common-knowledge closure of
/// omega_star: fresh masses and fresh cell structure for both agents.
/// Returns the input unchanged when the closure is the whole space. The
/// caller asserts that transcripts at omega_star are unaffected.
inline Framework perturb_outside_closure(const Framework& fw, int omega_star,
                                         std::uint64_t seed) {
  const EventSet inside = reachable_closure(fw, omega_star).member_states;
  const int n = fw.states.size;
  if (inside.count() == n) return fw;

  SplitMix64 rng(seed);
  Framework out = fw;
  std::vector<Rational> masses = fw.prior.masses();
  for (int s = 0; s < n; ++s)
    if (!inside.contains(s))
      masses[s] = Rational(1 + static_cast<int>(rng.below(24)),
                           1 + static_cast<int>(rng.below(8)));
  out.prior = Measure(std::move(masses));

  for (Agent agent : {Agent::p, Agent::q}) {
    const Partition& old_part = fw.partition_of(agent);
    std::vector<int> cell_of = old_part.cell_map();
    // Cells never straddle the closure boundary, so regrouping the outside
    // states cannot disturb any inside cell.
    int fresh = 0;
    for (int s = 0; s < n; ++s) {
      if (inside.contains(s)) continue;
      int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(fresh) + 1));
      if (pick == fresh) ++fresh;
      cell_of[s] = old_part.cell_count() + pick;
    }
    out.partition_of(agent) = Partition(cell_of);
  }
  if (!validate_framework(out).ok())
    throw EngineError("perturbed framework failed validation");
  return out;
}

namespace detail {

/// All partitions of n states, via restricted-growth strings.
inline std::vector<Partition> all_partitions(int n) {
  std::vector<Partition> out;
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  auto emit = [&] { out.emplace_back(rgs); };
  // Iterative odometer over restricted-growth strings.
  for (;;) {
    emit();
    int i = n - 1;
    for (; i > 0; --i) {
      int cap = 0;
      for (int j = 0; j < i; ++j) cap = std::max(cap, rgs[static_cast<std::size_t>(j)]);
      if (rgs[static_cast<std::size_t>(i)] <= cap) break;
    }
    if (i <= 0) break;
    ++rgs[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) rgs[static_cast<std::size_t>(j)] = 0;
  }
  return out;
}

/// Every value in (0,1] expressible with a denominator within the bound.
inline std::vector<Rational> mass_palette(int max_denominator) {
  std::vector<Rational> out;
  for (int den = 1; den <= max_denominator; ++den)
    for (int num = 1; num <= den; ++num)
      if (std::gcd(num, den) == 1) out.emplace_back(num, den);
  return out;
}

}  // namespace detail

struct SweepSummary {
  long long frameworks = 0;
  long long cases = 0;  // (framework, anchor) pairs
  long long consistency_checks = 0;
  int max_termination_step = 0;
  bool pass = true;
  std::string message;
};

/// Brute-force verification at desk scale: every framework assembled from
/// all state counts up to max_states, all per-state masses from the
/// denominator-bounded palette, all partition pairs and all events is run
/// from every anchor. Checks: the exchange settles within 2·|Ω|
/// announcements, both agents end at exactly equal opinions, and every
/// transcript satisfies certainty acquiescence. The partition evolution is
/// anchor-independent, so it is computed once per framework and read off
/// per anchor; every consistency_stride-th framework is re-run through
/// run_dialogue to guard the shortcut.
inline SweepSummary exhaustive_consensus_sweep(int max_states, int max_denominator,
                                               long long consistency_stride = 1009) {
  SweepSummary sum;
  const std::vector<Rational> palette = detail::mass_palette(max_denominator);
  const int palette_size = static_cast<int>(palette.size());

  auto fail = [&](const std::string& what) {
    sum.pass = false;
    if (sum.message.empty()) sum.message = what;
  };

  for (int n = 1; n <= max_states && sum.pass; ++n) {
    const std::vector<Partition> partitions = detail::all_partitions(n);
    std::vector<EventSet> events;
    for (int mask = 0; mask < (1 << n); ++mask) {
      EventSet e(n);
      for (int s = 0; s < n; ++s)
        if (mask & (1 << s)) e.insert(s);
      events.push_back(std::move(e));
    }

    std::vector<int> mass_index(static_cast<std::size_t>(n), 0);
    for (bool more_masses = true; more_masses && sum.pass;) {
      std::vector<Rational> masses;
      masses.reserve(static_cast<std::size_t>(n));
      for (int s = 0; s < n; ++s)
        masses.push_back(palette[static_cast<std::size_t>(mass_index[static_cast<std::size_t>(s)])]);
      const Measure prior(masses);

      for (std::size_t pi = 0; pi < partitions.size() && sum.pass; ++pi) {
        for (std::size_t qi = 0; qi < partitions.size() && sum.pass; ++qi) {
          for (std::size_t ei = 0; ei < events.size() && sum.pass; ++ei) {
            ++sum.frameworks;
            const EventSet& event = events[ei];
            auto describe = [&](int anchor) {
              return "n=" + std::to_string(n) + " partitions (" +
                     std::to_string(pi) + "," + std::to_string(qi) +
                     ") event mask " + std::to_string(ei) + " anchor " +
                     std::to_string(anchor);
            };

            // Anchor-independent partition evolution, opener p. Swapping
            // the two partitions covers the opener-q cases, and all
            // ordered pairs are enumerated.
            Partition cur_p = partitions[pi];
            Partition cur_q = partitions[qi];
            std::vector<std::vector<Rational>> step_values;
            int quiet = 0;
            bool evolved_ok = true;
            for (int t = 1; quiet < 2; ++t) {
              if (t > 4 * n + 8) {
                fail("no fixed point within bound at " + describe(-1));
                evolved_ok = false;
                break;
              }
              const bool p_speaks = t % 2 == 1;
              const Partition& speaker = p_speaks ? cur_p : cur_q;
              Partition& listener = p_speaks ? cur_q : cur_p;
              OpinionFunction f;
              f.cell_of = speaker.cell_map();
              for (int c = 0; c < speaker.cell_count(); ++c)
                f.by_cell.push_back(cell_opinion(prior, event, speaker.cell(c)));
              std::vector<Rational> values;
              values.reserve(static_cast<std::size_t>(n));
              for (int s = 0; s < n; ++s) values.push_back(f.at_state(s));
              step_values.push_back(std::move(values));
              Partition refined = refine_by_announcement(listener, f);
              quiet = refined == listener ? quiet + 1 : 0;
              listener = std::move(refined);
            }
            if (!evolved_ok) break;

            std::vector<Rational> final_p, final_q;
            for (int s = 0; s < n; ++s) {
              final_p.push_back(cell_opinion(prior, event, cur_p.cell_at(s)));
              final_q.push_back(cell_opinion(prior, event, cur_q.cell_at(s)));
            }
            for (int s = 0; s < n && sum.pass; ++s)
              if (final_p[static_cast<std::size_t>(s)] != final_q[static_cast<std::size_t>(s)])
                fail("opinions differ at the fixed point, " + describe(s));
            if (!sum.pass) break;

            const int recorded = static_cast<int>(step_values.size());
            std::vector<int> termination(static_cast<std::size_t>(n), 1);
            for (int s = 0; s < n && sum.pass; ++s) {
              const Rational& consensus = final_p[static_cast<std::size_t>(s)];
              ++sum.cases;
              int last_off = recorded;
              while (last_off >= 1 &&
                     step_values[static_cast<std::size_t>(last_off - 1)]
                                [static_cast<std::size_t>(s)] == consensus)
                --last_off;
              int term = std::max(last_off + 1, 1);
              termination[static_cast<std::size_t>(s)] = term;
              sum.max_termination_step = std::max(sum.max_termination_step, term);
              if (term > 2 * n)
                fail("settled after more than 2|states| announcements, " + describe(s));
              for (int t = 1; t < recorded && sum.pass; ++t) {
                const Rational& here =
                    step_values[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(s)];
                const Rational& next =
                    step_values[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
                if (here.is_certain() && next != here)
                  fail("certainty not acquiesced, " + describe(s));
              }
            }
            if (!sum.pass) break;

            if (consistency_stride > 0 && sum.frameworks % consistency_stride == 0) {
              ++sum.consistency_checks;
              Framework fw;
              fw.states.size = n;
              fw.prior = prior;
              fw.event = event;
              fw.partition_p = partitions[pi];
              fw.partition_q = partitions[qi];
              fw.opener = Agent::p;
              for (int s = 0; s < n && sum.pass; ++s) {
                DialogueTrace trace = run_dialogue(fw, s, 4 * n + 8, false);
                if (trace.consensus_value != final_p[static_cast<std::size_t>(s)] ||
                    trace.termination_step != termination[static_cast<std::size_t>(s)]) {
                  fail("direct simulation disagrees with the shared evolution, " +
                       describe(s));
                  break;
                }
                for (int t = 1; t <= recorded; ++t)
                  if (trace.value_at(t) !=
                      step_values[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(s)]) {
                    fail("direct transcript disagrees with the shared evolution, " +
                         describe(s));
                    break;
                  }
              }
            }
          }
        }
      }

      more_masses = false;
      for (int s = 0; s < n; ++s) {
        if (++mass_index[static_cast<std::size_t>(s)] < palette_size) {
          more_masses = true;
          break;
        }
        mass_index[static_cast<std::size_t>(s)] = 0;
      }
    }
  }
  return sum;
}

}  // namespace ratdial
