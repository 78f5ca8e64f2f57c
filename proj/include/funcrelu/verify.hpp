#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace funcrelu::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

CriterionResult min_network();
CriterionResult spike_equivalence();
CriterionResult triangulation_geometry();
CriterionResult interpolation_contract();
CriterionResult weight_growth();
CriterionResult end_to_end_decomposition();
CriterionResult rate_shape();
/// `suite_seconds` is the time already spent by the criteria run before
/// this one; the end-to-end budget covers both.
CriterionResult oracle_and_serialization(double suite_seconds = 0.0);

/// Runs the listed criteria (all of 1..8 when empty) in order, printing one
/// line per criterion to `out` as each finishes.
std::vector<CriterionResult> run_all(std::ostream& out, std::span<const int> only = {});

std::string format(const CriterionResult& r);

}  // namespace funcrelu::verify
