// Walks the staged grids from one cell to the full 5x5 example, printing
// the transcript each stage produces, then rebuilds the same final
// transcript from scratch with the constructor.

#include <iostream>

#include "ratdial/ratdial.hpp"

int main() {
  using namespace ratdial;
  for (const char* name : {"example-stage-1", "example-stage-2",
                           "example-stage-3", "example-5x5"}) {
    auto [fw, anchor] = matrix_to_framework(builtin_fixture(name));
    DialogueTrace trace = run_dialogue(fw, anchor);
    std::cout << name << " (" << fw.states.size << " states): ";
    for (const Rational& r : trace.transcript) std::cout << r.str() << " ";
    std::cout << "-> consensus " << trace.consensus_value.str() << " at step "
              << trace.termination_step << "\n";
  }

  Dialogue target = parse_dialogue("1/4 1/4 1/4 1/4 3/4 3/4");
  RationalizationResult built = rationalize(target);
  std::cout << "\nconstructed replay of the full transcript ("
            << built.framework.states.size << " states):\n"
            << emit_matrix(built.framework, built.omega_star);
  return 0;
}
