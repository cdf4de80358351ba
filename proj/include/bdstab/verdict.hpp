#pragma once

#include <string>

namespace bdstab {

enum class Label { Stable, Unstable, Boundary, Inconclusive };

/// Label of a simulation-based estimate; never authoritative.
enum class Empirical { Stable, Unstable, Inconclusive };

inline std::string to_string(Label l) {
  switch (l) {
    case Label::Stable: return "stable";
    case Label::Unstable: return "unstable";
    case Label::Boundary: return "boundary";
    case Label::Inconclusive: return "inconclusive";
  }
  return "?";
}

inline std::string to_string(Empirical e) {
  switch (e) {
    case Empirical::Stable: return "empirically_stable";
    case Empirical::Unstable: return "empirically_unstable";
    case Empirical::Inconclusive: return "inconclusive";
  }
  return "?";
}

}  // namespace bdstab
