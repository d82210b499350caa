#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bwk/environments.hpp"

namespace bwk {

// Raw reward/cost table as stored in a matrix CSV file:
//
//   t,arm,reward,cost
//   1,0,0.25,1
//   1,1,0.5,0.75
//   ...
//
// Rows are round-major: every arm of round t before round t+1, t counted
// from 1 and arms from 0.
struct MatrixTable {
  std::size_t num_arms = 0;
  std::size_t horizon = 0;
  std::vector<double> rewards;
  std::vector<double> costs;

  double min_cost() const;
  double max_cost() const;
};

// Throws std::runtime_error naming the offending line on malformed input.
MatrixTable read_matrix_csv(std::istream& in);
MatrixTable read_matrix_csv(const std::filesystem::path& path);

void write_matrix_csv(std::ostream& out, const AdversarialMatrixSpec& spec);
void write_matrix_csv(const std::filesystem::path& path, const AdversarialMatrixSpec& spec);

// Attaches instance parameters to a table and validates the result.
AdversarialMatrixSpec make_matrix_spec(const MatrixTable& table, double budget, double c_min,
                                       double c_max);

}  // namespace bwk
