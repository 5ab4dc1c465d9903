#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ratdial/error.hpp"
#include "ratdial/rational.hpp"

namespace ratdial {

/// The two interlocutors. Agent p owns the row partition in grid notation,
/// agent q the column partition.
enum class Agent : std::uint8_t { p, q };

inline Agent other(Agent a) { return a == Agent::p ? Agent::q : Agent::p; }
inline char agent_char(Agent a) { return a == Agent::p ? 'p' : 'q'; }
inline Agent agent_from_char(char c) {
  if (c == 'p') return Agent::p;
  if (c == 'q') return Agent::q;
  throw Error(std::string("unknown agent '") + c + "'");
}

/// Finite set of states 0..size-1 with optional display labels.
struct StateSpace {
  int size = 0;
  std::vector<std::string> labels;  // empty, or one label per state

  std::string label(int state) const {
    if (state >= 0 && state < static_cast<int>(labels.size())) return labels[state];
    return "s" + std::to_string(state);
  }
};

/// Subset of the state space.
class EventSet {
 public:
  EventSet() = default;
  explicit EventSet(int size) : member_(size, false) {}
  EventSet(int size, const std::vector<int>& members) : member_(size, false) {
    for (int s : members) {
      check_range(s);
      member_[s] = true;
    }
  }
  static EventSet full(int size) {
    EventSet e(size);
    e.member_.assign(size, true);
    return e;
  }

  int size() const { return static_cast<int>(member_.size()); }
  bool contains(int state) const {
    return state >= 0 && state < size() && member_[state];
  }
  void insert(int state) {
    check_range(state);
    member_[state] = true;
  }
  int count() const {
    return static_cast<int>(std::count(member_.begin(), member_.end(), true));
  }
  std::vector<int> members() const {
    std::vector<int> out;
    for (int s = 0; s < size(); ++s)
      if (member_[s]) out.push_back(s);
    return out;
  }

  friend bool operator==(const EventSet&, const EventSet&) = default;

 private:
  void check_range(int state) const {
    if (state < 0 || state >= size())
      throw Error("event member " + std::to_string(state) + " out of range");
  }
  std::vector<bool> member_;
};

/// Unnormalized measure: one nonnegative mass per state. Frameworks require
/// strictly positive mass everywhere; zeros are tolerated here so that grid
/// documents with placeholder entries can be represented before dropping.
class Measure {
 public:
  Measure() = default;
  explicit Measure(std::vector<Rational> masses) : mass_(std::move(masses)) {
    for (const Rational& m : mass_)
      if (m.sign() < 0) throw Error("negative mass");
  }

  int size() const { return static_cast<int>(mass_.size()); }
  const Rational& mass(int state) const { return mass_.at(state); }
  const std::vector<Rational>& masses() const { return mass_; }

  Rational total() const {
    Rational t;
    for (const Rational& m : mass_) t += m;
    return t;
  }

  friend bool operator==(const Measure&, const Measure&) = default;

 private:
  std::vector<Rational> mass_;
};

/// Partition of the state space into disjoint nonempty cells. Stored in a
/// canonical form: cells are numbered by the first state they contain and
/// list their states in ascending order, so value equality is structural
/// equality.
class Partition {
 public:
  Partition() = default;

  /// From a state -> cell-id map; ids are renumbered canonically.
  explicit Partition(const std::vector<int>& cell_of) {
    rebuild(cell_of);
  }

  static Partition trivial(int size) {
    return Partition(std::vector<int>(size, 0));
  }
  static Partition discrete(int size) {
    std::vector<int> ids(size);
    for (int s = 0; s < size; ++s) ids[s] = s;
    return Partition(ids);
  }

  /// From explicit cells; throws unless they are disjoint, nonempty and
  /// cover 0..size-1.
  static Partition from_cells(int size, const std::vector<std::vector<int>>& cells) {
    std::vector<int> cell_of(size, -1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) throw Error("partition cell " + std::to_string(c) + " is empty");
      for (int s : cells[c]) {
        if (s < 0 || s >= size)
          throw Error("partition state " + std::to_string(s) + " out of range");
        if (cell_of[s] != -1)
          throw Error("partition cells overlap at state " + std::to_string(s));
        cell_of[s] = static_cast<int>(c);
      }
    }
    for (int s = 0; s < size; ++s)
      if (cell_of[s] == -1)
        throw Error("partition cells do not cover state " + std::to_string(s));
    return Partition(cell_of);
  }

  /// Builds without any validation or canonicalization. Exists so that
  /// deliberately broken instances can be fed to validate_framework.
  static Partition unchecked(std::vector<int> cell_of,
                             std::vector<std::vector<int>> cells) {
    Partition p;
    p.cell_of_ = std::move(cell_of);
    p.cells_ = std::move(cells);
    return p;
  }

  int size() const { return static_cast<int>(cell_of_.size()); }
  int cell_count() const { return static_cast<int>(cells_.size()); }
  int cell_of(int state) const { return cell_of_.at(state); }
  const std::vector<int>& cell(int id) const { return cells_.at(id); }
  const std::vector<std::vector<int>>& cells() const { return cells_; }
  const std::vector<int>& cell_map() const { return cell_of_; }

  /// The cell containing a given state.
  const std::vector<int>& cell_at(int state) const { return cells_.at(cell_of_.at(state)); }

  /// True if every cell of *this lies inside a single cell of coarser.
  bool refines(const Partition& coarser) const {
    if (size() != coarser.size()) return false;
    for (const auto& cell : cells_) {
      int home = coarser.cell_of(cell.front());
      for (int s : cell)
        if (coarser.cell_of(s) != home) return false;
    }
    return true;
  }

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.cell_of_ == b.cell_of_;
  }

 private:
  void rebuild(const std::vector<int>& raw) {
    cell_of_.assign(raw.size(), -1);
    cells_.clear();
    std::map<int, int> renumber;
    for (std::size_t s = 0; s < raw.size(); ++s) {
      auto [it, inserted] = renumber.try_emplace(raw[s], static_cast<int>(cells_.size()));
      if (inserted) cells_.emplace_back();
      cell_of_[s] = it->second;
      cells_[it->second].push_back(static_cast<int>(s));
    }
  }

  std::vector<int> cell_of_;
  std::vector<std::vector<int>> cells_;
};

/// Bayesian opinion framework: finite states, strictly positive common
/// prior, target event, one partition per agent, and the agent who speaks
/// first. Together with a fixed state this determines the whole infinite
/// exchange.
struct Framework {
  StateSpace states;
  Measure prior;
  EventSet event;
  Partition partition_p;
  Partition partition_q;
  Agent opener = Agent::p;

  const Partition& partition_of(Agent a) const {
    return a == Agent::p ? partition_p : partition_q;
  }
  Partition& partition_of(Agent a) {
    return a == Agent::p ? partition_p : partition_q;
  }
};

/// Finite sequence of announced opinions, each in [0,1].
struct Dialogue {
  std::vector<Rational> opinions;
  Agent opener = Agent::p;

  std::size_t length() const { return opinions.size(); }
};

/// Throws unless the dialogue is nonempty with all entries in [0,1].
inline void require_valid_dialogue(const Dialogue& d) {
  if (d.opinions.empty()) throw Error("empty dialogue");
  for (std::size_t t = 0; t < d.opinions.size(); ++t)
    if (!d.opinions[t].in_unit_interval())
      throw Error("dialogue entry " + d.opinions[t].str() + " at position " +
                  std::to_string(t + 1) + " outside [0,1]");
}

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline void validate_partition(const Partition& part, int size, const char* name,
                               ValidationReport& report) {
  auto add = [&](const std::string& msg) {
    report.violations.push_back(std::string("partition ") + name + ": " + msg);
  };
  if (part.size() != size) {
    add("covers " + std::to_string(part.size()) + " states, expected " +
        std::to_string(size));
    return;
  }
  std::vector<int> seen(size, -1);
  for (int c = 0; c < part.cell_count(); ++c) {
    if (part.cell(c).empty()) add("cell " + std::to_string(c) + " is empty");
    for (int s : part.cell(c)) {
      if (s < 0 || s >= size) {
        add("cell " + std::to_string(c) + " references state " + std::to_string(s) +
            " out of range");
        continue;
      }
      if (seen[s] != -1)
        add("cells " + std::to_string(seen[s]) + " and " + std::to_string(c) +
            " overlap at state " + std::to_string(s));
      seen[s] = c;
    }
  }
  for (int s = 0; s < size; ++s)
    if (seen[s] == -1)
      add("cells do not cover the state space (state " + std::to_string(s) +
          " missing)");
  for (int s = 0; s < size; ++s)
    if (seen[s] != -1 && part.cell_of(s) != seen[s])
      add("cell_of inconsistent with cells at state " + std::to_string(s));
}

}  // namespace detail

/// Checks every definitional constraint and reports each failure rather than
/// throwing; an empty report means the framework is well formed.
inline ValidationReport validate_framework(const Framework& fw) {
  ValidationReport report;
  const int n = fw.states.size;
  if (n < 1) report.violations.push_back("state space is empty");
  if (!fw.states.labels.empty() && static_cast<int>(fw.states.labels.size()) != n)
    report.violations.push_back("label count does not match state count");
  if (fw.prior.size() != n) {
    report.violations.push_back("prior covers " + std::to_string(fw.prior.size()) +
                                " states, expected " + std::to_string(n));
  } else {
    for (int s = 0; s < n; ++s)
      if (fw.prior.mass(s).sign() <= 0)
        report.violations.push_back("prior not strictly positive at state " +
                                    fw.states.label(s));
  }
  if (fw.event.size() != n)
    report.violations.push_back("event set sized " + std::to_string(fw.event.size()) +
                                ", expected " + std::to_string(n));
  detail::validate_partition(fw.partition_p, n, "P", report);
  detail::validate_partition(fw.partition_q, n, "Q", report);
  return report;
}

/// Coarsest common refinement: two states share a cell iff they share a cell
/// in both inputs.
inline Partition join_partitions(const Partition& a, const Partition& b) {
  if (a.size() != b.size())
    throw Error("join of partitions over different state spaces");
  std::map<std::pair<int, int>, int> ids;
  std::vector<int> cell_of(a.size());
  for (int s = 0; s < a.size(); ++s) {
    auto key = std::make_pair(a.cell_of(s), b.cell_of(s));
    auto [it, inserted] = ids.try_emplace(key, static_cast<int>(ids.size()));
    cell_of[s] = it->second;
  }
  return Partition(cell_of);
}

struct DropResult {
  Framework framework;
  std::vector<int> old_to_new;  // -1 for dropped states
};

/// Removes all zero-mass states and reindexes the survivors. Grid documents
/// use zero entries as placeholders; a valid framework must not.
inline DropResult drop_null_states(const StateSpace& states, const Measure& mass,
                                   const EventSet& event, const Partition& p,
                                   const Partition& q, Agent opener = Agent::p) {
  const int n = states.size;
  if (mass.size() != n || event.size() != n || p.size() != n || q.size() != n)
    throw Error("drop_null_states: component sizes disagree");
  if (mass.total().sign() <= 0) throw Error("total mass is zero");

  std::vector<int> old_to_new(n, -1);
  int kept = 0;
  for (int s = 0; s < n; ++s)
    if (mass.mass(s).sign() > 0) old_to_new[s] = kept++;

  for (const Partition* part : {&p, &q}) {
    for (int c = 0; c < part->cell_count(); ++c) {
      bool alive = false;
      for (int s : part->cell(c)) alive = alive || old_to_new[s] != -1;
      if (!alive)
        throw Error("empty cell after drop (" +
                    std::string(part == &p ? "P" : "Q") + " cell " +
                    std::to_string(c) + ")");
    }
  }

  Framework fw;
  fw.states.size = kept;
  if (!states.labels.empty()) {
    fw.states.labels.resize(kept);
    for (int s = 0; s < n; ++s)
      if (old_to_new[s] != -1) fw.states.labels[old_to_new[s]] = states.label(s);
  }
  std::vector<Rational> new_mass(kept);
  std::vector<int> cp(kept), cq(kept);
  fw.event = EventSet(kept);
  for (int s = 0; s < n; ++s) {
    int t = old_to_new[s];
    if (t == -1) continue;
    new_mass[t] = mass.mass(s);
    if (event.contains(s)) fw.event.insert(t);
    cp[t] = p.cell_of(s);
    cq[t] = q.cell_of(s);
  }
  fw.prior = Measure(std::move(new_mass));
  fw.partition_p = Partition(cp);
  fw.partition_q = Partition(cq);
  fw.opener = opener;
  return DropResult{std::move(fw), std::move(old_to_new)};
}

/// Rescales so the total is exactly 1. Opinions are invariant under this,
/// so it is display-only.
inline Measure normalize_measure(const Measure& m) {
  Rational total = m.total();
  if (total.sign() <= 0) throw Error("cannot normalize: total mass is zero");
  std::vector<Rational> out;
  out.reserve(m.size());
  for (const Rational& x : m.masses()) out.push_back(x / total);
  return Measure(std::move(out));
}

}  // namespace ratdial
