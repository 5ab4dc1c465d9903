#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "ratdial/error.hpp"
#include "ratdial/framework.hpp"
#include "ratdial/rational.hpp"

namespace ratdial {

/// An agent's opinion as a function of the state: constant on each cell of
/// the agent's partition, equal there to mass(event ∩ cell)/mass(cell).
/// Carries its own state→cell map so it can be evaluated without the
/// partition it came from.
struct OpinionFunction {
  std::vector<Rational> by_cell;
  std::vector<int> cell_of;

  const Rational& at_cell(int cell) const { return by_cell.at(cell); }
  const Rational& at_state(int state) const { return by_cell.at(cell_of.at(state)); }
  int state_count() const { return static_cast<int>(cell_of.size()); }
};

/// Conditional probability of the event given one cell.
inline Rational cell_opinion(const Measure& prior, const EventSet& event,
                             const std::vector<int>& cell) {
  Rational in_event, total;
  for (int s : cell) {
    total += prior.mass(s);
    if (event.contains(s)) in_event += prior.mass(s);
  }
  if (total.sign() <= 0) throw EngineError("opinion over a zero-mass cell");
  return in_event / total;
}

inline OpinionFunction opinion_function(const Framework& fw, Agent agent) {
  const Partition& part = fw.partition_of(agent);
  OpinionFunction f;
  f.cell_of = part.cell_map();
  f.by_cell.reserve(part.cell_count());
  for (int c = 0; c < part.cell_count(); ++c)
    f.by_cell.push_back(cell_opinion(fw.prior, fw.event, part.cell(c)));
  return f;
}

inline Rational opinion(const Framework& fw, Agent agent, int omega) {
  if (omega < 0 || omega >= fw.states.size)
    throw Error("state " + std::to_string(omega) + " out of range");
  return cell_opinion(fw.prior, fw.event, fw.partition_of(agent).cell_at(omega));
}

/// Hearing an opinion function splits each listener cell by the announced
/// values: states stay together only if the speaker would have said the same
/// thing at both. Always refines; returns the input exactly when the speaker's
/// opinion is constant on every listener cell.
inline Partition refine_by_announcement(const Partition& listener,
                                        const OpinionFunction& speaker_opinions) {
  if (listener.size() != speaker_opinions.state_count())
    throw Error("announcement over a different state space than the listener");
  std::vector<int> cell_of(listener.size());
  std::map<std::pair<int, Rational>, int> ids;
  for (int s = 0; s < listener.size(); ++s) {
    auto key = std::make_pair(listener.cell_of(s), speaker_opinions.at_state(s));
    auto [it, inserted] = ids.try_emplace(key, static_cast<int>(ids.size()));
    cell_of[s] = it->second;
  }
  return Partition(cell_of);
}

/// One announcement: the opener speaks, the listener refines, the turn flips.
inline Framework dialogue_step(const Framework& fw) {
  Framework next = fw;
  Agent speaker = fw.opener;
  OpinionFunction f = opinion_function(fw, speaker);
  Partition& listener = next.partition_of(other(speaker));
  listener = refine_by_announcement(listener, f);
  next.opener = other(speaker);
  return next;
}

/// Per-step record kept when a trace is run with recording on.
struct TraceStep {
  Agent speaker;
  Rational announced;
  bool changed_listener = false;
  Partition partition_p_after;
  Partition partition_q_after;
};

/// Result of simulating the exchange from a fixed state. The infinite
/// constant tail is summarized by (termination_step, consensus_value):
/// announcement t equals transcript[t-1] while recorded and consensus_value
/// for every later t. The recorded transcript runs through step
/// termination_step + 1 so the agreement is visible, except that a certain
/// consensus (0 or 1) ends the transcript at termination_step: a certain
/// announcement is final on its own.
struct DialogueTrace {
  std::vector<Rational> transcript;
  Rational consensus_value;
  int termination_step = 0;
  Agent opener = Agent::p;
  std::vector<TraceStep> steps;  // filled only when requested

  /// Announcement at 1-based step t of the infinite exchange.
  const Rational& value_at(int t) const {
    if (t >= 1 && t <= static_cast<int>(transcript.size()))
      return transcript[static_cast<std::size_t>(t - 1)];
    return consensus_value;
  }
};

/// Iterates dialogue_step from the framework's opener, announcing at
/// omega_star, until a full round changes neither partition. At that fixed
/// point both opinions at omega_star must coincide; anything else is an
/// engine bug, as is running past max_steps, since refinement is monotone
/// over a finite state space.
inline DialogueTrace run_dialogue(const Framework& fw, int omega_star,
                                  int max_steps = 10000,
                                  bool record_steps = true) {
  const int n = fw.states.size;
  if (omega_star < 0 || omega_star >= n)
    throw Error("fixed state " + std::to_string(omega_star) + " out of range");

  DialogueTrace trace;
  trace.opener = fw.opener;
  Framework cur = fw;
  std::vector<Rational> announced;
  int quiet_steps = 0;
  for (int t = 1; quiet_steps < 2; ++t) {
    if (t > max_steps) throw EngineError("no fixed point within max_steps");
    Agent speaker = cur.opener;
    OpinionFunction f = opinion_function(cur, speaker);
    announced.push_back(f.at_state(omega_star));
    Partition& listener = cur.partition_of(other(speaker));
    Partition refined = refine_by_announcement(listener, f);
    bool changed = !(refined == listener);
    if (!refined.refines(listener) || refined.cell_count() < listener.cell_count() ||
        refined.cell_count() > n)
      throw EngineError("announcement failed to refine the listener");
    listener = std::move(refined);
    cur.opener = other(speaker);
    quiet_steps = changed ? 0 : quiet_steps + 1;
    if (record_steps)
      trace.steps.push_back(TraceStep{speaker, announced.back(), changed,
                                      cur.partition_p, cur.partition_q});
  }

  Rational at_p = opinion(cur, Agent::p, omega_star);
  Rational at_q = opinion(cur, Agent::q, omega_star);
  if (at_p != at_q) throw EngineError("opinions differ at the fixed point");
  trace.consensus_value = at_p;

  int last_off = static_cast<int>(announced.size());  // last index with r != consensus
  while (last_off >= 1 && announced[static_cast<std::size_t>(last_off - 1)] ==
                              trace.consensus_value)
    --last_off;
  trace.termination_step = std::max(last_off + 1, 1);

  int keep = trace.termination_step + (trace.consensus_value.is_certain() ? 0 : 1);
  if (keep > static_cast<int>(announced.size()))
    throw EngineError("transcript shorter than its own termination step");
  announced.resize(static_cast<std::size_t>(keep));
  trace.transcript = std::move(announced);
  return trace;
}

/// Smallest set of states containing the anchor and closed under both
/// agents' cells. Within it the exchange from the anchor is fully
/// determined; outside it nothing matters.
struct CommonKnowledgeComponent {
  EventSet member_states;
  int anchor = 0;
};

inline CommonKnowledgeComponent reachable_closure(const Framework& fw, int omega_star) {
  const int n = fw.states.size;
  if (omega_star < 0 || omega_star >= n)
    throw Error("state " + std::to_string(omega_star) + " out of range");
  CommonKnowledgeComponent comp;
  comp.anchor = omega_star;
  comp.member_states = EventSet(n);
  std::vector<int> frontier{omega_star};
  comp.member_states.insert(omega_star);
  while (!frontier.empty()) {
    int s = frontier.back();
    frontier.pop_back();
    for (const Partition* part : {&fw.partition_p, &fw.partition_q})
      for (int t : part->cell_at(s))
        if (!comp.member_states.contains(t)) {
          comp.member_states.insert(t);
          frontier.push_back(t);
        }
  }
  return comp;
}

/// True iff e contains omega_star and both agents' cells at every member.
inline bool is_common_knowledge(const Framework& fw, const EventSet& e, int omega_star) {
  if (!e.contains(omega_star)) return false;
  for (int s : e.members())
    for (const Partition* part : {&fw.partition_p, &fw.partition_q})
      for (int t : part->cell_at(s))
        if (!e.contains(t)) return false;
  return true;
}

/// Which pooled-information cells an expert check ranges over: those inside
/// the agent's own cell at the fixed state, or all of them within the
/// common-knowledge closure.
enum class ExpertScope { current_cell, closure };

/// An expert's opinion would survive full disclosure: conditioning on any
/// in-scope cell of the pooled partition join(P,Q) returns the same value
/// the agent already holds at omega_star.
inline bool is_expert(const Framework& fw, Agent agent, int omega_star,
                      ExpertScope scope = ExpertScope::current_cell) {
  Rational held = opinion(fw, agent, omega_star);
  Partition join = join_partitions(fw.partition_p, fw.partition_q);
  EventSet in_scope;
  if (scope == ExpertScope::closure)
    in_scope = reachable_closure(fw, omega_star).member_states;
  const Partition& own = fw.partition_of(agent);
  for (int c = 0; c < join.cell_count(); ++c) {
    int rep = join.cell(c).front();
    bool relevant = scope == ExpertScope::current_cell
                        ? own.cell_of(rep) == own.cell_of(omega_star)
                        : in_scope.contains(rep);
    if (!relevant) continue;
    if (cell_opinion(fw.prior, fw.event, join.cell(c)) != held) return false;
  }
  return true;
}

}  // namespace ratdial
