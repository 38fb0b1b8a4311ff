#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfa/errors.hpp"

namespace sfa::cli {

/// Fully resolved command configuration (JSON file, then flags on top).
struct RunConfig {
  std::vector<double> wavelength_nm{800.0};
  std::vector<double> intensity_wcm2{2e14};
  std::vector<double> ip_ev{15.76};
  double lambda2 = 0.05;
  std::vector<int> orders;  // empty: every even order inside the plateau
  double omega_step = 0.1;  // units of w
  int phi_steps = 180;
  std::string branch = "both";
  std::string mode = "coherent";
  std::string window = "interior";
  bool classical_shift = false;
  std::string format = "csv";
  std::string out;

  nlohmann::ordered_json to_json() const;
};

/// "x", "x,y,z" or "start:stop[:step]" (inclusive, step defaults to 1).
std::vector<double> parse_list(const std::string& text);

/// Applies the keys of a JSON config object; unknown keys are an error.
void apply_json(RunConfig& config, const nlohmann::json& j);

int exit_code(ErrorKind kind);

/// Entry point; returns the process exit code. Tables go to `out` (or the
/// --out file), diagnostics and error JSON to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sfa::cli
