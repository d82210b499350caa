#include "bwk/results_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace bwk {

namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& row) {
  std::vector<std::string> out;
  std::stringstream ss(row);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!row.empty() && row.back() == ',') out.emplace_back();
  return out;
}

template <class T>
T parse(const std::string& s, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::runtime_error("summary csv line " + std::to_string(line) + ": cannot parse '" + s +
                             "'");
  return value;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.policy << ',' << fmt12(r.budget) << ',' << r.replications << ','
        << fmt12(r.mean_regret) << ',' << fmt12(r.stderr_regret) << ',' << fmt12(r.mean_tau) << ','
        << fmt12(r.mean_total_cost) << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::string row;
  std::size_t line = 0;
  if (!std::getline(in, row)) throw std::runtime_error("summary csv is empty");
  ++line;
  if (!row.empty() && row.back() == '\r') row.pop_back();
  if (row != kSummaryHeader)
    throw std::runtime_error("summary csv line 1: expected header '" + std::string(kSummaryHeader) +
                             "'");
  std::vector<SummaryRow> rows;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    const auto f = split(row);
    if (f.size() != 7)
      throw std::runtime_error("summary csv line " + std::to_string(line) + ": expected 7 fields");
    rows.push_back({f[0], parse<double>(f[1], line), parse<std::size_t>(f[2], line),
                    parse<double>(f[3], line), parse<double>(f[4], line), parse<double>(f[5], line),
                    parse<double>(f[6], line)});
  }
  return rows;
}

std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open summary " + path.string());
  return read_summary_csv(in);
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.rounds) {
    out << r.t << ',' << r.arm << ',' << fmt17(r.outcome.reward) << ',' << fmt17(r.outcome.cost)
        << ',' << fmt17(r.budget_after) << ',' << fmt17(r.probs[r.arm]) << '\n';
  }
}

std::vector<std::filesystem::path> emit_results(const ExperimentResult& result,
                                                const ExperimentConfig& config,
                                                const std::string& output_prefix,
                                                bool emit_traces) {
  if (output_prefix.empty()) throw std::invalid_argument("output prefix is empty");
  const std::filesystem::path prefix(output_prefix);
  if (prefix.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(prefix.parent_path(), ec);
    if (ec)
      throw std::runtime_error("cannot create " + prefix.parent_path().string() + ": " +
                               ec.message());
  }

  std::vector<std::filesystem::path> written;
  const std::filesystem::path summary = output_prefix + "_summary.csv";
  {
    auto out = open_for_write(summary);
    write_summary_csv(out, result.rows);
    finish(out, summary);
  }
  written.push_back(summary);

  const std::filesystem::path config_path = output_prefix + "_config.json";
  {
    auto out = open_for_write(config_path);
    out << resolved_config_json(config);
    finish(out, config_path);
  }
  written.push_back(config_path);

  if (emit_traces) {
    for (const auto& ep : result.episodes) {
      if (ep.trace.rounds.empty() && !ep.trace.aborted_pull) continue;
      const std::filesystem::path path = output_prefix + "_trace_" + std::to_string(ep.seed) + ".csv";
      auto out = open_for_write(path);
      write_trace_csv(out, ep.trace);
      finish(out, path);
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace bwk
