#pragma once

#include <optional>
#include <string>

#include "sdfe/substitutes.hpp"

namespace sdfe {

// Economy spec file, JSON:
//   {
//     "goods": ["U", "D"],
//     "firms": [
//       {"name": "U", "output": "U", "inputs": {}, "f_L": 0, "kappa": 0},
//       {"name": "D", "output": "D", "inputs": {"U": 1.0}, "f_L": 0, "kappa": 0}
//     ],
//     "consumer": {"goods": ["D", "U"], "A": [1, 1], "B_c": [[1,0],[0,1]]}
//   }
// Firm entries may instead carry {"sigma": [[...]], "omega": [...],
// "alpha": x} replacing {f_L, kappa}; such files describe the substitutes
// extension and must do so for every firm.
struct LoadedEconomy {
  Economy economy;
  std::optional<SubstitutesEconomy> substitutes;
};

LoadedEconomy load_economy_file(const std::string& path);
LoadedEconomy load_economy_json(const std::string& text);

std::string economy_to_json(const Economy& economy);

}  // namespace sdfe
