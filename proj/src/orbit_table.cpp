#include <sstream>
#include <stdexcept>
#include <string>

#include "tenrank/orbit222.hpp"

namespace tenrank {

// Renders the canonical orbit table with every cell recomputed from scratch:
// each canonical array is classified in exact arithmetic and the resulting
// invariants are cross-checked against the stored class constants before
// printing. A mismatch means the classifier and the constants have drifted
// apart, which is a bug, so it throws instead of printing a wrong table.
std::string orbit_table_markdown() {
  std::ostringstream out;
  out << "| class | sign(delta) | mlrank | rank | border rank |\n";
  out << "|---|---|---|---|---|\n";
  for (OrbitClass c : all_orbit_classes) {
    OrbitReport<Rational> rep = classify222(canonical<Rational>(c));
    int sign = sign_of(rep.delta_value);
    bool consistent = rep.orbit_class == c && sign == delta_sign_of(c) &&
                      rep.mlrank == mlrank_of(c) && rep.outer_rank == outer_rank_of(c) &&
                      rep.border_rank == border_rank_of(c);
    if (!consistent)
      throw std::runtime_error(
          std::string("orbit table: computed invariants disagree with the stored "
                      "constants for class ") +
          to_string(c));
    const char* sign_text = sign > 0 ? "+" : (sign < 0 ? "-" : "0");
    out << "| " << to_string(c) << " | " << sign_text << " | " << rep.mlrank.to_string()
        << " | " << rep.outer_rank << " | " << rep.border_rank << " |\n";
  }
  return out.str();
}

}  // namespace tenrank
