#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bwk/config.hpp"
#include "bwk/harness.hpp"

namespace bwk {

inline constexpr const char* kSummaryHeader =
    "policy,B,replications,mean_regret,stderr_regret,mean_tau,mean_total_cost";
inline constexpr const char* kTraceHeader = "t,arm,reward,cost,budget_after,prob_selected";

// Numbers are written with 12 significant digits.
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(std::istream& in);
std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);

void write_trace_csv(std::ostream& out, const RunTrace& trace);

// Writes <prefix>_summary.csv, <prefix>_config.json and, when the episodes
// carry traces, one <prefix>_trace_<seed>.csv per episode. Returns the
// paths written.
std::vector<std::filesystem::path> emit_results(const ExperimentResult& result,
                                                const ExperimentConfig& config,
                                                const std::string& output_prefix,
                                                bool emit_traces);

}  // namespace bwk
