// Command-line front end: simulate grid files, construct frameworks for
// belief sequences, verify transcripts, and print the built-in grids.
// Exit codes: 0 success, 1 input or validation error, 2 verification
// mismatch or failed self-check.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ratdial/ratdial.hpp"

namespace {

using namespace ratdial;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Resolves a matrix argument: inline grid text, a file path, a file under
/// $RATDIAL_FIXTURE_DIR, or a built-in fixture name.
std::string resolve_matrix_text(const std::string& arg) {
  if (arg.find('[') != std::string::npos || arg.find('\n') != std::string::npos)
    return arg;
  if (std::filesystem::exists(arg)) return read_file(arg);
  if (const char* dir = std::getenv("RATDIAL_FIXTURE_DIR")) {
    std::filesystem::path candidate = std::filesystem::path(dir) / arg;
    if (std::filesystem::exists(candidate)) return read_file(candidate.string());
  }
  for (const auto& [name, text] : builtin_fixture_texts())
    if (name == arg) return text;
  throw Error("cannot resolve '" + arg +
              "': not inline grid text, not a file, not a built-in fixture");
}

std::string resolve_dialogue_text(const std::string& arg) {
  if (std::filesystem::exists(arg)) return read_file(arg);
  return arg;
}

std::string transcript_line(const DialogueTrace& trace) {
  std::string line;
  for (std::size_t i = 0; i < trace.transcript.size(); ++i) {
    if (i) line += ' ';
    line += trace.transcript[i].str();
  }
  return line;
}

void print_partition(std::ostream& os, const char* name, const Partition& part,
                     const StateSpace& states) {
  os << "  " << name << ":";
  for (int c = 0; c < part.cell_count(); ++c) {
    os << " {";
    const auto& cell = part.cell(c);
    for (std::size_t i = 0; i < cell.size(); ++i) {
      if (i) os << ',';
      os << states.label(cell[i]);
    }
    os << "}";
  }
  os << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

int cmd_simulate(const std::string& input, int max_steps, bool with_trace,
                 bool as_json, bool stats) {
  auto t0 = std::chrono::steady_clock::now();
  FrameworkWithAnchor loaded = matrix_to_framework(parse_matrix(resolve_matrix_text(input)));
  ValidationReport report = validate_framework(loaded.framework);
  if (!report.ok()) {
    for (const auto& v : report.violations) std::cerr << "error: " << v << "\n";
    return 1;
  }
  DialogueTrace trace =
      run_dialogue(loaded.framework, loaded.omega_star, max_steps, with_trace);

  if (as_json) {
    nlohmann::json j;
    j["framework"] = framework_to_json(loaded.framework, loaded.omega_star);
    j["transcript"] = nlohmann::json::array();
    for (const Rational& r : trace.transcript) j["transcript"].push_back(r.str());
    j["consensus"] = trace.consensus_value.str();
    j["termination_step"] = trace.termination_step;
    j["closure"] =
        reachable_closure(loaded.framework, loaded.omega_star).member_states.members();
    j["expert_p"] = is_expert(loaded.framework, Agent::p, loaded.omega_star);
    j["expert_q"] = is_expert(loaded.framework, Agent::q, loaded.omega_star);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << transcript_line(trace) << "\n";
    std::cout << "consensus=" << trace.consensus_value.str() << " at step "
              << trace.termination_step << "\n";
    if (with_trace) {
      for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const TraceStep& step = trace.steps[i];
        std::cout << "step " << i + 1 << ": " << agent_char(step.speaker)
                  << " announces " << step.announced.str()
                  << (step.changed_listener ? "" : " (reveals nothing)") << "\n";
        print_partition(std::cout, "P", step.partition_p_after,
                        loaded.framework.states);
        print_partition(std::cout, "Q", step.partition_q_after,
                        loaded.framework.states);
      }
    }
  }
  if (stats)
    std::cerr << "states=" << loaded.framework.states.size
              << " announcements_recorded=" << trace.transcript.size()
              << " elapsed=" << seconds_since(t0) << "s\n";
  return 0;
}

int cmd_rationalize(const std::string& input, const std::string& opener_name,
                    const std::string& out_path, bool verify, bool stats) {
  auto t0 = std::chrono::steady_clock::now();
  Dialogue d = parse_dialogue(resolve_dialogue_text(input));
  d.opener = agent_from_char(opener_name.at(0));
  RationalizationResult built = rationalize(d);
  std::string text = emit_matrix(built.framework, built.omega_star);

  if (verify) {
    RoundtripReport check = roundtrip_check(d);
    if (!check.pass) {
      std::cerr << "error: self-verification failed: " << check.message << "\n";
      return 2;
    }
  }
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error("cannot write file '" + out_path + "'");
    out << text;
  }
  if (stats) {
    std::cerr << "states=" << built.framework.states.size
              << " levels=" << built.construction_log.size()
              << " elapsed=" << seconds_since(t0) << "s\n";
    for (const ExtensionRecord& rec : built.construction_log)
      std::cerr << "  level covering last " << rec.suffix_length
                << " entries: announces " << rec.opinion.str() << ", "
                << rec.states_before << " -> " << rec.states_after
                << " states (" << rec.opener_cells << " cells extended)\n";
  }
  return 0;
}

int cmd_verify(const std::string& matrix_arg, const std::string& dialogue_arg,
               int max_steps) {
  FrameworkWithAnchor loaded =
      matrix_to_framework(parse_matrix(resolve_matrix_text(matrix_arg)));
  Dialogue d = parse_dialogue(resolve_dialogue_text(dialogue_arg));
  DialogueTrace trace = run_dialogue(loaded.framework, loaded.omega_star, max_steps);
  const int len = static_cast<int>(d.opinions.size());
  const int horizon = std::max(len, static_cast<int>(trace.transcript.size()));
  for (int t = 1; t <= horizon; ++t) {
    const Rational& expected =
        t <= len ? d.opinions[static_cast<std::size_t>(t - 1)] : d.opinions.back();
    if (trace.value_at(t) != expected) {
      std::cerr << "diverges at step " << t << ": simulated "
                << trace.value_at(t).str() << ", expected " << expected.str()
                << "\n";
      return 2;
    }
  }
  if (trace.consensus_value != d.opinions.back()) {
    std::cerr << "consensus " << trace.consensus_value.str() << ", expected "
              << d.opinions.back().str() << "\n";
    return 2;
  }
  if (trace.termination_step > len) {
    std::cerr << "settles at step " << trace.termination_step
              << ", later than the sequence length " << len << "\n";
    return 2;
  }
  std::cout << "ok: transcript matches through step " << len
            << ", consensus " << trace.consensus_value.str() << "\n";
  return 0;
}

int cmd_fixtures(bool list, const std::string& name, bool print_text) {
  (void)print_text;  // --name always prints the canonical text
  if (!name.empty()) {
    if (const char* dir = std::getenv("RATDIAL_FIXTURE_DIR")) {
      std::filesystem::path candidate = std::filesystem::path(dir) / name;
      if (std::filesystem::exists(candidate)) {
        std::cout << emit_matrix(parse_matrix(read_file(candidate.string())));
        return 0;
      }
    }
    for (const auto& [candidate, text] : builtin_fixture_texts())
      if (candidate == name) {
        std::cout << text;
        return 0;
      }
    std::cerr << "error: unknown fixture '" << name << "'\n";
    return 1;
  }
  (void)list;  // listing is also the default action
  std::string line;
  for (const auto& fixture_name : builtin_fixture_names()) {
    if (!line.empty()) line += ' ';
    line += fixture_name;
  }
  std::cout << line << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Bayesian dialogue simulator and constructor"};
  app.require_subcommand(1);

  std::string sim_input;
  int sim_max_steps = 10000;
  bool sim_trace = false, sim_json = false, sim_stats = false;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run the exchange described by a grid to consensus");
  sim->add_option("matrix", sim_input,
                  "Grid file, built-in fixture name, or inline grid text")
      ->required();
  sim->add_option("--max-steps", sim_max_steps, "Step safety bound");
  sim->add_flag("--trace", sim_trace, "Print both partitions after every step");
  sim->add_flag("--json", sim_json, "Structured output");
  sim->add_flag("--stats", sim_stats, "Timing and size notes on stderr");

  std::string rat_input, rat_opener = "p", rat_out;
  bool rat_verify = true, rat_stats = false;
  CLI::App* rat = app.add_subcommand(
      "rationalize", "Construct a grid whose exchange replays a belief sequence");
  rat->add_option("dialogue", rat_input, "Belief sequence (or a file holding one)")
      ->required();
  rat->add_option("--opener", rat_opener, "Which agent speaks first (p or q)")
      ->check(CLI::IsMember({"p", "q"}));
  rat->add_option("--out", rat_out, "Write the grid to a file instead of stdout");
  rat->add_flag("--verify,!--no-verify", rat_verify,
                "Re-simulate and confirm the replay (default on)");
  rat->add_flag("--stats", rat_stats, "Construction log on stderr");

  std::string ver_matrix, ver_dialogue;
  int ver_max_steps = 10000;
  CLI::App* ver = app.add_subcommand(
      "verify", "Check that a grid's exchange replays a belief sequence");
  ver->add_option("matrix", ver_matrix, "Grid file, fixture name, or inline text")
      ->required();
  ver->add_option("dialogue", ver_dialogue, "Belief sequence (or a file)")
      ->required();
  ver->add_option("--max-steps", ver_max_steps, "Step safety bound");

  bool fix_list = false, fix_print = false;
  std::string fix_name;
  CLI::App* fix = app.add_subcommand("fixtures", "List or print built-in grids");
  fix->add_flag("--list", fix_list, "List fixture names");
  fix->add_option("--name", fix_name, "Print one fixture byte-exactly");
  fix->add_flag("--print", fix_print, "Print the named fixture (default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(sim_input, sim_max_steps, sim_trace, sim_json, sim_stats);
    if (rat->parsed())
      return cmd_rationalize(rat_input, rat_opener, rat_out, rat_verify, rat_stats);
    if (ver->parsed()) return cmd_verify(ver_matrix, ver_dialogue, ver_max_steps);
    if (fix->parsed()) return cmd_fixtures(fix_list, fix_name, fix_print);
  } catch (const EngineError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
