#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qfc/assign.hpp"
#include "qfc/criterion.hpp"
#include "qfc/maxpoly.hpp"
#include "qfc/syntax.hpp"

namespace qfc {

struct TemplateFamily {
  int max_degree = 2;
  std::vector<Rat> coefficients = {Rat(0), Rat(1), Rat(2), Rat(3)};
  std::vector<Rat> constants = {Rat(0), Rat(1), Rat(2), Rat(3)};
  // Survivor cap per stratum; dominance-minimal partial assignments are
  // kept, the rest dropped once the cap is reached.
  int beam_width = 24;
};

struct SynthResult {
  std::optional<AssignmentSet> found;   // origin flag synthesized
  QiReport failure;                     // tightest verdicts when not found
  bool timed_out = false;
  long candidates_screened = 0;
};

// Bottom-up stratified search over normalized Max-Poly templates:
// constructors get additive shapes, function symbols the family's shapes;
// each stratum keeps dominance-minimal surviving partial assignments.
// Unknown verdicts count as rejection.
SynthResult synthesize_qi(const Program& p, const TemplateFamily& fam = {},
                          std::chrono::milliseconds timeout =
                              std::chrono::milliseconds(60000));

// A quasi-interpretation serves as both sup and weight for the friendliness
// check; this repackages the map accordingly.
AssignmentSet qi_to_supinterpretation(
    const std::map<std::string, MaxPoly>& qi);

}  // namespace qfc
