#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ratdial/error.hpp"
#include "ratdial/framework.hpp"
#include "ratdial/rationalize.hpp"

namespace ratdial {

/// One bracketed entry of a grid document: `y[3/4]`, `n[0]`, `*y[1/2]`.
/// Zero masses are legal here; they are presentation placeholders and
/// disappear when a framework is built.
struct MatrixEntry {
  bool in_event = false;
  Rational mass;
  bool starred = false;

  friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

/// A grid cell: the (possibly empty) list of entries at one row/column
/// intersection.
struct MatrixCell {
  std::vector<MatrixEntry> entries;

  friend bool operator==(const MatrixCell&, const MatrixCell&) = default;
};

/// Rectangular grid of cells plus the opening speaker. Rows belong to agent
/// p, columns to agent q; exactly one entry carries the fixed-state star.
struct MatrixDocument {
  std::vector<std::vector<MatrixCell>> rows;
  Agent opener = Agent::p;

  int row_count() const { return static_cast<int>(rows.size()); }
  int column_count() const {
    return rows.empty() ? 0 : static_cast<int>(rows.front().size());
  }

  friend bool operator==(const MatrixDocument&, const MatrixDocument&) = default;
};

namespace detail {

inline bool is_space_char(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

/// Single-line scanner with 1-based column reporting.
class LineScanner {
 public:
  LineScanner(const std::string& text, int line) : text_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() && is_space_char(text_[pos_])) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  char take() { return text_[pos_++]; }
  int column() { return static_cast<int>(pos_) + 1; }
  int line_number() const { return line_; }
  bool raw_end() const { return pos_ >= text_.size(); }
  char raw_peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  [[noreturn]] void fail(const std::string& msg) {
    skip_ws();
    throw ParseError(msg, line_, column());
  }

 private:
  const std::string& text_;
  int line_;
  std::size_t pos_ = 0;
};

inline MatrixEntry parse_entry(LineScanner& sc) {
  MatrixEntry entry;
  if (sc.peek() == '*') {
    entry.starred = true;
    sc.take();
  }
  char tag = sc.peek();
  if (tag != 'y' && tag != 'n') sc.fail("expected entry tag 'y' or 'n'");
  entry.in_event = tag == 'y';
  sc.take();
  char open = sc.peek();
  if (open != '[' && open != '(') sc.fail("expected '[' after entry tag");
  sc.take();
  const char close = open == '[' ? ']' : ')';
  const int value_line = sc.line_number();
  const int value_col = (sc.skip_ws(), sc.column());
  std::string body;
  while (!sc.raw_end() && sc.raw_peek() != close && sc.raw_peek() != '|')
    body.push_back(sc.take());
  if (sc.raw_end() || sc.raw_peek() != close)
    sc.fail(std::string("expected '") + close + "' closing the mass");
  sc.take();
  while (!body.empty() && is_space_char(body.back())) body.pop_back();
  try {
    entry.mass = Rational::parse(body);
  } catch (const ParseError&) {
    throw ParseError("malformed rational '" + body + "'", value_line, value_col);
  }
  if (entry.mass.sign() < 0)
    throw ParseError("negative mass " + entry.mass.str(), value_line, value_col);
  return entry;
}

/// Recognizes an `opener: p|q` directive line; returns the named agent or
/// nothing if the line is not a directive.
inline std::optional<Agent> parse_opener_directive(const std::string& raw, int line) {
  LineScanner sc(raw, line);
  static const std::string key = "opener";
  sc.skip_ws();
  for (char expect : key) {
    if (sc.raw_peek() != expect) return std::nullopt;
    sc.take();
  }
  if (sc.peek() != ':') return std::nullopt;
  sc.take();
  char who = sc.peek();
  if (who != 'p' && who != 'q') sc.fail("expected 'p' or 'q' after 'opener:'");
  sc.take();
  if (!sc.at_end()) sc.fail("trailing characters after opener directive");
  return who == 'p' ? Agent::p : Agent::q;
}

}  // namespace detail

/// Parses the grid notation. Rows are lines; cells are separated by `|`;
/// a cell is `-` or a comma-separated entry list; an entry is an optional
/// `*`, a `y`/`n` tag, and a bracketed rational (parentheses accepted as a
/// typographical variant). Blank lines are ignored; the first content line
/// may be an `opener: q` directive.
inline MatrixDocument parse_matrix(std::string_view text) {
  MatrixDocument doc;
  int star_count = 0;
  bool any_positive = false;
  bool seen_row = false;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t stop = text.find('\n', start);
    if (stop == std::string_view::npos) stop = text.size();
    const std::string raw(text.substr(start, stop - start));
    ++line_no;
    start = stop + 1;
    if (stop == text.size() && raw.empty()) break;

    bool blank = true;
    for (char c : raw) blank = blank && detail::is_space_char(c);
    if (blank) continue;

    if (!seen_row) {
      if (auto opener = detail::parse_opener_directive(raw, line_no)) {
        doc.opener = *opener;
        continue;
      }
    }
    seen_row = true;

    detail::LineScanner sc(raw, line_no);
    std::vector<MatrixCell> row;
    for (;;) {
      MatrixCell cell;
      if (sc.peek() == '-') {
        sc.take();
      } else if (sc.at_end() || sc.peek() == '|') {
        sc.fail("empty cell (use '-')");
      } else {
        for (;;) {
          MatrixEntry entry = detail::parse_entry(sc);
          if (entry.starred && ++star_count > 1)
            sc.fail("multiple fixed states");
          if (entry.mass.sign() > 0) any_positive = true;
          cell.entries.push_back(std::move(entry));
          if (sc.peek() == ',') {
            sc.take();
            continue;
          }
          break;
        }
      }
      row.push_back(std::move(cell));
      if (sc.at_end()) break;
      if (sc.peek() != '|') sc.fail("expected ',', '|' or end of row");
      sc.take();
    }
    if (!doc.rows.empty() && row.size() != doc.rows.front().size())
      throw ParseError("row has " + std::to_string(row.size()) +
                           " cells, expected " +
                           std::to_string(doc.rows.front().size()),
                       line_no, 1);
    doc.rows.push_back(std::move(row));
  }

  if (doc.rows.empty()) throw ParseError("empty document");
  if (star_count == 0) throw ParseError("missing fixed state (no '*' entry)");
  if (!any_positive) throw ParseError("no positive-mass entries");
  return doc;
}

struct FrameworkWithAnchor {
  Framework framework;
  int omega_star = 0;
};

/// Builds the framework a grid document denotes: rows become p-cells,
/// columns q-cells, y-entries the event; zero-mass entries are dropped.
/// Rows and columns whose entries are all zero-mass are placeholders from
/// staged constructions and vanish with them.
inline FrameworkWithAnchor matrix_to_framework(const MatrixDocument& doc) {
  const int nrows = doc.row_count();
  const int ncols = doc.column_count();
  // Check the star before liveness filtering: a zero-mass fixed state must
  // be reported as such even when its whole row or column vanishes.
  for (const auto& doc_row : doc.rows)
    for (const MatrixCell& doc_cell : doc_row)
      for (const MatrixEntry& doc_entry : doc_cell.entries)
        if (doc_entry.starred && doc_entry.mass.sign() <= 0)
          throw Error("starred entry has zero mass");
  std::vector<bool> row_live(nrows, false), col_live(ncols, false);
  for (int r = 0; r < nrows; ++r)
    for (int c = 0; c < ncols; ++c)
      for (const MatrixEntry& e : doc.rows[r][c].entries)
        if (e.mass.sign() > 0) row_live[r] = col_live[c] = true;

  std::vector<Rational> masses;
  std::vector<int> row_of, col_of;
  std::vector<std::string> labels;
  std::vector<int> event_members;
  int star_state = -1;
  int y_count = 0, n_count = 0, zero_count = 0;
  for (int r = 0; r < nrows; ++r) {
    if (!row_live[r]) continue;
    for (int c = 0; c < ncols; ++c) {
      if (!col_live[c]) continue;
      for (const MatrixEntry& e : doc.rows[r][c].entries) {
        int s = static_cast<int>(masses.size());
        masses.push_back(e.mass);
        row_of.push_back(r);
        col_of.push_back(c);
        if (e.mass.sign() > 0) {
          int serial = e.in_event ? ++y_count : ++n_count;
          labels.push_back(std::string(e.in_event ? "y" : "n") +
                           std::to_string(serial));
        } else {
          labels.push_back("zero" + std::to_string(++zero_count));
        }
        if (e.in_event) event_members.push_back(s);
        if (e.starred) {
          if (e.mass.sign() <= 0) throw Error("starred entry has zero mass");
          star_state = s;
        }
      }
    }
  }
  if (masses.empty()) throw Error("no positive-mass entries");
  if (star_state == -1) throw Error("missing fixed state (no '*' entry)");

  const int n = static_cast<int>(masses.size());
  StateSpace states{n, std::move(labels)};
  Measure measure{std::move(masses)};
  EventSet event(n, event_members);
  DropResult dropped =
      drop_null_states(states, measure, event, Partition(row_of),
                       Partition(col_of), doc.opener);
  int anchor = dropped.old_to_new[star_state];
  if (anchor < 0) throw EngineError("fixed state dropped despite positive mass");
  return FrameworkWithAnchor{std::move(dropped.framework), anchor};
}

/// Lays a framework back out as a grid: p-cells as rows in cell order,
/// q-cells as columns ordered by (topmost occupied row, then lowest state).
/// That column order is stable under reparsing, which renumbers states in
/// reading order, so canonical emission is a fixed point. If reading_order
/// is given it receives the framework's state index at each grid position.
inline MatrixDocument framework_to_matrix(const Framework& fw, int omega_star,
                                          std::vector<int>* reading_order = nullptr) {
  const Partition& rows = fw.partition_p;
  const Partition& cols = fw.partition_q;
  if (omega_star < 0 || omega_star >= fw.states.size)
    throw Error("state " + std::to_string(omega_star) + " out of range");

  std::vector<std::pair<std::pair<int, int>, int>> order;  // ((top row, min state), cell)
  for (int c = 0; c < cols.cell_count(); ++c) {
    int top_row = rows.cell_count();
    for (int s : cols.cell(c)) top_row = std::min(top_row, rows.cell_of(s));
    order.emplace_back(std::make_pair(top_row, cols.cell(c).front()), c);
  }
  std::sort(order.begin(), order.end());

  MatrixDocument doc;
  doc.opener = fw.opener;
  if (reading_order) reading_order->clear();
  doc.rows.resize(rows.cell_count());
  for (int r = 0; r < rows.cell_count(); ++r) {
    doc.rows[r].resize(cols.cell_count());
    for (int ci = 0; ci < cols.cell_count(); ++ci) {
      int c = order[ci].second;
      MatrixCell& cell = doc.rows[r][ci];
      for (int s : cols.cell(c)) {
        if (rows.cell_of(s) != r) continue;
        cell.entries.push_back(MatrixEntry{fw.event.contains(s), fw.prior.mass(s),
                                           s == omega_star});
        if (reading_order) reading_order->push_back(s);
      }
    }
  }
  return doc;
}

/// Canonical byte emission: `opener: q` directive only when q opens, rows
/// newline-terminated, cells joined by ` | `, entries by `,`, masses as
/// reduced fractions in square brackets, `-` for empty cells.
inline std::string emit_matrix(const MatrixDocument& doc) {
  std::string out;
  if (doc.opener == Agent::q) out += "opener: q\n";
  for (const auto& row : doc.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += " | ";
      if (row[c].entries.empty()) {
        out += '-';
        continue;
      }
      for (std::size_t e = 0; e < row[c].entries.size(); ++e) {
        const MatrixEntry& entry = row[c].entries[e];
        if (e) out += ',';
        if (entry.starred) out += '*';
        out += entry.in_event ? 'y' : 'n';
        out += '[';
        out += entry.mass.str();
        out += ']';
      }
    }
    out += '\n';
  }
  return out;
}

inline std::string emit_matrix(const Framework& fw, int omega_star) {
  return emit_matrix(framework_to_matrix(fw, omega_star));
}

/// Parses a belief sequence: rationals (fractions or exact decimals)
/// separated by whitespace or commas. `_` repeats the same speaker's
/// previous value, which is only defined from the third position on.
inline Dialogue parse_dialogue(std::string_view text) {
  std::vector<std::optional<Rational>> tape;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (token == "_") {
      tape.emplace_back(std::nullopt);
    } else {
      Rational value = Rational::parse(token);
      if (!value.in_unit_interval())
        throw ParseError("dialogue entry " + value.str() + " outside [0,1]");
      tape.emplace_back(value);
    }
    token.clear();
  };
  for (char c : text) {
    if (detail::is_space_char(c) || c == ',')
      flush();
    else
      token.push_back(c);
  }
  flush();
  if (tape.empty()) throw ParseError("empty dialogue");
  return expand_silence(tape);
}

/// The worked grids: the full example and its three construction stages,
/// plus the expert-and-student grid. Texts are in canonical emission form.
inline const std::vector<std::pair<std::string, std::string>>& builtin_fixture_texts() {
  static const std::vector<std::pair<std::string, std::string>> fixtures = {
      {"example-5x5",
       "*y[3/4],n[1/4] | y[0] | n[2] | y[0] | n[0]\n"
       "y[0] | y[1/4] | n[3/4] | y[0] | n[0]\n"
       "n[2] | y[2/3] | n[0] | y[0] | n[0]\n"
       "y[0] | y[0] | y[1] | y[0] | n[3]\n"
       "n[0] | n[11/4] | n[1/4] | y[1] | n[0]\n"},
      {"didactic-5x5",
       "*y[3/4],n[1/4] | y[0] | n[0] | y[0] | n[0]\n"
       "y[0] | y[3/4] | n[1/4] | y[0] | n[0]\n"
       "n[2] | y[6] | n[0] | y[0] | n[0]\n"
       "y[0] | y[0] | y[1/12] | y[0] | n[1/36]\n"
       "n[0] | n[81/4] | n[0] | y[243/4] | n[0]\n"},
      {"example-stage-1", "*y[3/4],n[1/4]\n"},
      {"example-stage-2",
       "opener: q\n"
       "*y[3/4],n[1/4]\n"
       "y[0]\n"
       "n[2]\n"},
      {"example-stage-3",
       "*y[3/4],n[1/4] | y[0] | n[2]\n"
       "y[0] | y[1/4] | n[3/4]\n"
       "n[2] | y[2/3] | n[0]\n"},
  };
  return fixtures;
}

inline std::vector<std::string> builtin_fixture_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : builtin_fixture_texts()) names.push_back(name);
  return names;
}

inline MatrixDocument builtin_fixture(const std::string& name) {
  for (const auto& [candidate, text] : builtin_fixture_texts())
    if (candidate == name) return parse_matrix(text);
  throw Error("unknown fixture '" + name + "'");
}

/// Structured export for programmatic consumers: labels, masses as
/// `num/den` strings, partitions and event as index lists.
inline nlohmann::json framework_to_json(const Framework& fw, int omega_star) {
  nlohmann::json j;
  j["states"] = nlohmann::json::array();
  j["masses"] = nlohmann::json::array();
  for (int s = 0; s < fw.states.size; ++s) {
    j["states"].push_back(fw.states.label(s));
    j["masses"].push_back(fw.prior.mass(s).str());
  }
  j["event"] = fw.event.members();
  j["partition_p"] = fw.partition_p.cells();
  j["partition_q"] = fw.partition_q.cells();
  j["opener"] = std::string(1, agent_char(fw.opener));
  j["omega_star"] = omega_star;
  return j;
}

}  // namespace ratdial
