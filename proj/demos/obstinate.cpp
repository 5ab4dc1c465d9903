// Builds frameworks for ever-longer stubborn alternations (c, d, c, d, ...)
// and reports how the constructed state spaces grow level by level.

#include <iostream>

#include "ratdial/ratdial.hpp"

int main() {
  using namespace ratdial;
  const Rational c(1, 3), d(2, 3);
  for (int n = 1; n <= 6; ++n) {
    Dialogue seq = alternating_dialogue(c, d, n);
    RationalizationResult built = rationalize(seq);
    std::cout << "alternations=" << n << " length=" << seq.opinions.size()
              << " states=" << built.framework.states.size << " levels:";
    for (const ExtensionRecord& rec : built.construction_log)
      std::cout << " " << rec.states_after;
    std::cout << "\n";
  }
  return 0;
}
