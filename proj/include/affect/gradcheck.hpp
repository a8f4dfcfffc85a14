#pragma once

#include <string>
#include <vector>

#include "affect/layers.hpp"

namespace affect {

// End-to-end gradient verification: every layer type, plus one full forward
// pass per model family, is checked against central finite differences on a
// small deterministic network. `inject_fault` names a layer whose backward
// pass is deliberately corrupted (identity forward, gradient scaled 1.5x) —
// the negative control that proves the checker can fail.
struct GradCheckOptions {
  double epsilon = 1e-5;
  double threshold = 1e-4;
  std::string inject_fault = "none";
};

struct GradCheckRow {
  std::string layer;
  GradCheckResult result;
  bool pass = false;
};

struct GradCheckReport {
  std::vector<GradCheckRow> rows;
  double epsilon = 0.0;
  double threshold = 0.0;
  bool pass = false;
  // Worst offender across failing rows; empty when everything passes.
  std::string worst_layer;
  std::string worst_param;
  double worst_error = 0.0;

  // Fixed-width table, one row per layer, then a PASS/FAIL summary line that
  // names the worst parameter on failure.
  std::string render() const;
};

// The layers run_gradcheck covers, in report order.
std::vector<std::string> gradcheck_layers();

GradCheckReport run_gradcheck(const GradCheckOptions& opt);

}  // namespace affect
