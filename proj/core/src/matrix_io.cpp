#include "bwk/matrix_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bwk {

namespace {

constexpr std::string_view kHeader = "t,arm,reward,cost";

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw std::runtime_error("matrix csv line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view row) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = row.find(',', start);
    fields.push_back(row.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <class T>
T parse_number(std::string_view field, std::size_t line, const char* name) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    fail(line, std::string("cannot parse ") + name + " '" + std::string(field) + "'");
  return value;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double MatrixTable::min_cost() const {
  if (costs.empty()) throw std::logic_error("empty matrix");
  return *std::min_element(costs.begin(), costs.end());
}

double MatrixTable::max_cost() const {
  if (costs.empty()) throw std::logic_error("empty matrix");
  return *std::max_element(costs.begin(), costs.end());
}

MatrixTable read_matrix_csv(std::istream& in) {
  std::string row;
  std::size_t line = 0;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (!row.empty()) break;
  }
  if (row != kHeader) fail(line, "expected header '" + std::string(kHeader) + "'");

  MatrixTable table;
  // Round 1 fixes K; every later round must list arms 0..K-1 in order.
  std::size_t next_t = 1;
  std::size_t next_arm = 0;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    const auto fields = split_fields(row);
    if (fields.size() != 4) fail(line, "expected 4 fields, got " + std::to_string(fields.size()));
    const auto t = parse_number<std::size_t>(fields[0], line, "t");
    const auto arm = parse_number<std::size_t>(fields[1], line, "arm");
    const auto reward = parse_number<double>(fields[2], line, "reward");
    const auto cost = parse_number<double>(fields[3], line, "cost");

    if (table.num_arms == 0 && t == 2 && arm == 0 && next_t == 1 && next_arm > 0) {
      table.num_arms = next_arm;
    }
    if (table.num_arms != 0 && next_arm == table.num_arms) {
      ++next_t;
      next_arm = 0;
    }
    if (t != next_t || arm != next_arm)
      fail(line, "expected (t, arm) = (" + std::to_string(next_t) + ", " +
                     std::to_string(next_arm) + "), rows must be round-major");
    if (!(reward >= 0.0 && reward <= 1.0)) fail(line, "reward outside [0,1]");
    if (!(cost > 0.0) || !std::isfinite(cost)) fail(line, "cost must be positive and finite");
    table.rewards.push_back(reward);
    table.costs.push_back(cost);
    ++next_arm;
  }
  if (table.rewards.empty()) fail(line, "matrix has no rows");
  if (table.num_arms == 0) table.num_arms = next_arm;
  if (next_arm != table.num_arms) fail(line, "last round is incomplete");
  table.horizon = table.rewards.size() / table.num_arms;
  return table;
}

MatrixTable read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file " + path.string());
  try {
    return read_matrix_csv(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_matrix_csv(std::ostream& out, const AdversarialMatrixSpec& spec) {
  out << kHeader << '\n';
  const std::size_t k = spec.params.num_arms;
  for (std::size_t t = 1; t <= spec.horizon; ++t) {
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t idx = (t - 1) * k + i;
      out << t << ',' << i << ',' << format_double(spec.rewards[idx]) << ','
          << format_double(spec.costs[idx]) << '\n';
    }
  }
}

void write_matrix_csv(const std::filesystem::path& path, const AdversarialMatrixSpec& spec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix file " + path.string());
  write_matrix_csv(out, spec);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

AdversarialMatrixSpec make_matrix_spec(const MatrixTable& table, double budget, double c_min,
                                       double c_max) {
  AdversarialMatrixSpec spec;
  spec.params = InstanceParams{table.num_arms, budget, c_min, c_max};
  spec.horizon = table.horizon;
  spec.rewards = table.rewards;
  spec.costs = table.costs;
  spec.validate();
  return spec;
}

}  // namespace bwk
