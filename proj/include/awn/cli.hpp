#pragma once

#include <string>
#include <utility>
#include <vector>

namespace awn::cli {

/// Entry point behind the awn binary. args excludes the program name.
/// Returns 0 on success, 1 on input/validation errors (including bad
/// flags), 2 on internal errors.
int run(std::vector<std::string> args);

/// Parses "start:end:step" into (alpha, beta) pairs with beta <= alpha.
/// Values are snapped to 1e-9 so grids like 0:1:0.05 contain exact 0.45.
std::vector<std::pair<double, double>> parse_grid_spec(const std::string& spec);

}  // namespace awn::cli
