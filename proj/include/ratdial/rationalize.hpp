#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ratdial/engine.hpp"
#include "ratdial/error.hpp"
#include "ratdial/framework.hpp"
#include "ratdial/rational.hpp"

namespace ratdial {

/// First position (0-based) whose entry is 0 or 1 while the next entry
/// differs. Such a sequence cannot arise from any exchange: certainty,
/// once announced, is immediately shared.
struct CertaintyViolation {
  int index = 0;
};

struct AcquiescenceError : Error {
  CertaintyViolation violation;
  explicit AcquiescenceError(CertaintyViolation v)
      : Error("certainty acquiescence violated at t=" + std::to_string(v.index + 1)),
        violation(v) {}
};

inline std::optional<CertaintyViolation> check_certainty_acquiescence(const Dialogue& d) {
  for (std::size_t t = 0; t + 1 < d.opinions.size(); ++t)
    if (d.opinions[t].is_certain() && d.opinions[t + 1] != d.opinions[t])
      return CertaintyViolation{static_cast<int>(t)};
  return std::nullopt;
}

/// Masses for the per-cell pair of fresh states added by one construction
/// level; both strictly positive.
struct AddedMasses {
  Rational y_mass;
  Rational n_mass;
};

/// Picks masses so that a cell of prior mass `p`, holding `a` of it inside
/// the event, reports opinion exactly b1 once the two fresh states join it:
/// (a + y_mass)/(p + y_mass + n_mass) = b1. The closed form
/// s = a/b1 + (p-a)/(1-b1), y = b1(p+s) - a, n = s - y keeps both masses
/// at least b1*p and (1-b1)*p respectively, hence positive.
inline AddedMasses choose_added_masses(const Rational& b1, const Rational& a,
                                       const Rational& p) {
  if (!b1.in_unit_interval() || b1.is_certain())
    throw Error("added masses require an interior opinion, got " + b1.str());
  if (p.sign() <= 0) throw Error("cell mass must be positive");
  if (a.sign() < 0 || a > p) throw Error("event mass outside [0, cell mass]");
  const Rational one(1);
  Rational s = a / b1 + (p - a) / (one - b1);
  AddedMasses out;
  out.y_mass = b1 * (p + s) - a;
  out.n_mass = s - out.y_mass;
  if (out.y_mass.sign() <= 0 || out.n_mass.sign() <= 0 ||
      (a + out.y_mass) / (p + out.y_mass + out.n_mass) != b1)
    throw EngineError("added-mass rule violated its own guarantee");
  return out;
}

/// One level of the backward construction, for inspection and size
/// accounting. suffix_length counts how many trailing entries of the input
/// are reproduced once this level is in place.
struct ExtensionRecord {
  int suffix_length = 0;
  Rational opinion;          // announced first at this level
  int opener_cells = 0;      // cells extended; 0 for the base level
  int states_before = 0;
  int states_after = 0;
  std::vector<AddedMasses> per_cell;
};

/// A framework plus fixed state that replays a requested belief sequence,
/// with the per-level construction log.
struct RationalizationResult {
  Framework framework;
  int omega_star = 0;
  std::vector<ExtensionRecord> construction_log;
};

/// Smallest framework with a constant transcript at b. Interior b: two
/// states carrying (b, 1-b) and no information anywhere. b=1: the lone
/// state y. b=0: two states with nothing left to learn (discrete
/// partitions), anchored at n.
inline RationalizationResult rationalize_base(const Rational& b, Agent opener) {
  if (!b.in_unit_interval()) throw Error("opinion " + b.str() + " outside [0,1]");
  RationalizationResult result;
  Framework& fw = result.framework;
  fw.opener = opener;
  if (b.is_one()) {
    fw.states = StateSpace{1, {"y"}};
    fw.prior = Measure({Rational(1)});
    fw.event = EventSet(1, {0});
    fw.partition_p = Partition::trivial(1);
    fw.partition_q = Partition::trivial(1);
    result.omega_star = 0;
  } else if (b.is_zero()) {
    fw.states = StateSpace{2, {"y", "n"}};
    fw.prior = Measure({Rational(1), Rational(1)});
    fw.event = EventSet(2, {0});
    fw.partition_p = Partition::discrete(2);
    fw.partition_q = Partition::discrete(2);
    result.omega_star = 1;
  } else {
    fw.states = StateSpace{2, {"y", "n"}};
    fw.prior = Measure({b, Rational(1) - b});
    fw.event = EventSet(2, {0});
    fw.partition_p = Partition::trivial(2);
    fw.partition_q = Partition::trivial(2);
    result.omega_star = 0;
  }
  ExtensionRecord record;
  record.suffix_length = 1;
  record.opinion = b;
  record.states_before = 0;
  record.states_after = fw.states.size;
  result.construction_log.push_back(std::move(record));
  return result;
}

/// Wraps one more announcement around an existing construction: the agent
/// opposite inner's opener becomes the new opener and must announce b1
/// first. Every cell of that agent gains a fresh in-event state y_c and a
/// fresh out-of-event state n_c, with masses tuned so each cell's opinion
/// is exactly b1; the first announcement therefore reveals nothing. The
/// other agent learns only the two fresh cells (all y_c, all n_c), so from
/// step 2 the exchange proceeds as in inner.
inline RationalizationResult extend_with_opening_opinion(
    const RationalizationResult& inner, const Rational& b1) {
  if (!b1.in_unit_interval() || b1.is_certain())
    throw Error("extension requires an interior opinion, got " + b1.str());

  const Framework& in = inner.framework;
  const Agent new_opener = other(in.opener);
  const Partition& speaker_cells = in.partition_of(new_opener);
  const int n = in.states.size;
  const int cells = speaker_cells.cell_count();
  const int level = static_cast<int>(inner.construction_log.size());

  RationalizationResult result;
  result.omega_star = inner.omega_star;
  result.construction_log = inner.construction_log;
  Framework& fw = result.framework;
  fw.opener = new_opener;

  std::vector<Rational> masses = in.prior.masses();
  std::vector<std::string> labels =
      in.states.labels.empty() ? std::vector<std::string>() : in.states.labels;
  if (labels.empty())
    for (int s = 0; s < n; ++s) labels.push_back(in.states.label(s));
  std::vector<int> speaker_cell_of = speaker_cells.cell_map();
  std::vector<int> listener_cell_of = in.partition_of(in.opener).cell_map();
  std::vector<int> event_members = in.event.members();
  const int listener_cells = in.partition_of(in.opener).cell_count();

  ExtensionRecord record;
  record.suffix_length = result.construction_log.back().suffix_length + 1;
  record.opinion = b1;
  record.opener_cells = cells;
  record.states_before = n;

  for (int c = 0; c < cells; ++c) {
    Rational cell_mass, event_mass;
    for (int s : speaker_cells.cell(c)) {
      cell_mass += in.prior.mass(s);
      if (in.event.contains(s)) event_mass += in.prior.mass(s);
    }
    AddedMasses add = choose_added_masses(b1, event_mass, cell_mass);
    const std::string suffix =
        std::to_string(level) + "." + std::to_string(c + 1);
    int y_state = static_cast<int>(masses.size());
    masses.push_back(add.y_mass);
    labels.push_back("y" + suffix);
    speaker_cell_of.push_back(c);
    listener_cell_of.push_back(listener_cells);  // the all-y cell
    event_members.push_back(y_state);
    masses.push_back(add.n_mass);
    labels.push_back("n" + suffix);
    speaker_cell_of.push_back(c);
    listener_cell_of.push_back(listener_cells + 1);  // the all-n cell
    record.per_cell.push_back(std::move(add));
  }

  const int total = static_cast<int>(masses.size());
  fw.states = StateSpace{total, std::move(labels)};
  fw.prior = Measure(std::move(masses));
  fw.event = EventSet(total, event_members);
  fw.partition_of(new_opener) = Partition(speaker_cell_of);
  fw.partition_of(in.opener) = Partition(listener_cell_of);

  record.states_after = total;
  if (record.states_after != record.states_before + 2 * cells)
    throw EngineError("extension state-count identity failed");
  for (int c = 0; c < fw.partition_of(new_opener).cell_count(); ++c)
    if (cell_opinion(fw.prior, fw.event, fw.partition_of(new_opener).cell(c)) != b1)
      throw EngineError("extended opener cell does not announce b1");
  result.construction_log.push_back(std::move(record));
  return result;
}

/// Builds, by backward induction over the sequence, a framework whose
/// exchange replays d exactly and settles at its last value: the base level
/// realizes the constant tail, then each earlier entry wraps one extension
/// around it. A certain entry anywhere forces a constant tail (acquiescence)
/// and short-circuits straight to the base. The result is re-simulated
/// before returning; any discrepancy is an engine bug.
inline RationalizationResult rationalize(const Dialogue& d) {
  require_valid_dialogue(d);
  if (auto violation = check_certainty_acquiescence(d))
    throw AcquiescenceError(*violation);

  const int length = static_cast<int>(d.opinions.size());
  int cut = length - 1;
  for (int t = 0; t < length; ++t)
    if (d.opinions[t].is_certain()) {
      cut = t;
      break;
    }
  Agent cut_opener = cut % 2 == 0 ? d.opener : other(d.opener);
  RationalizationResult result = rationalize_base(d.opinions[cut], cut_opener);
  result.construction_log.back().suffix_length = length - cut;
  for (int t = cut - 1; t >= 0; --t)
    result = extend_with_opening_opinion(result, d.opinions[t]);

  if (result.framework.opener != d.opener)
    throw EngineError("constructed opener does not match the dialogue");
  DialogueTrace trace = run_dialogue(result.framework, result.omega_star);
  for (int t = 1; t <= length; ++t)
    if (trace.value_at(t) != d.opinions[static_cast<std::size_t>(t - 1)])
      throw EngineError("construction failed to replay entry " + std::to_string(t));
  if (trace.consensus_value != d.opinions.back() || trace.termination_step > length)
    throw EngineError("construction failed to settle at the final entry");
  return result;
}

/// Fills `_` placeholders: a silent turn repeats the same speaker's
/// previous announcement, two positions back. Undefined before position 3.
inline Dialogue expand_silence(const std::vector<std::optional<Rational>>& tape) {
  Dialogue out;
  for (std::size_t t = 0; t < tape.size(); ++t) {
    if (tape[t]) {
      out.opinions.push_back(*tape[t]);
    } else {
      if (t < 2)
        throw Error("silence mark too early at position " + std::to_string(t + 1));
      out.opinions.push_back(out.opinions[t - 2]);
    }
  }
  return out;
}

/// Interleaves a fixed expert announcement with student responses:
/// (expert, s1, expert, s2, ..., expert). Students must stay strictly
/// between 0 and 1 unless the expert is certain, in which case only
/// immediate agreement is consistent.
inline Dialogue make_didactic_dialogue(const Rational& expert_value,
                                       const std::vector<Rational>& student_values) {
  if (!expert_value.in_unit_interval())
    throw Error("expert value " + expert_value.str() + " outside [0,1]");
  for (const Rational& s : student_values) {
    if (expert_value.is_certain()) {
      if (s != expert_value)
        throw Error("a certain expert admits no dissenting student (got " +
                    s.str() + ")");
    } else if (!s.in_unit_interval() || s.is_certain()) {
      throw Error("student value " + s.str() +
                  " must lie strictly between 0 and 1");
    }
  }
  Dialogue out;
  out.opinions.push_back(expert_value);
  for (const Rational& s : student_values) {
    out.opinions.push_back(s);
    out.opinions.push_back(expert_value);
  }
  return out;
}

}  // namespace ratdial
