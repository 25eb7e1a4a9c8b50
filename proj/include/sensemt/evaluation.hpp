#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sensemt/corpus.hpp"
#include "sensemt/exec.hpp"
#include "sensemt/stats.hpp"

namespace sensemt {

enum class VerdictKind { hit, error, miss };
std::string_view to_string(VerdictKind kind);

struct Verdict {
  VerdictKind kind = VerdictKind::miss;
  std::optional<std::string> matched;

  bool operator==(const Verdict&) const = default;
};

enum class MatchMode {
  automatic,    // per variant: substring if it contains unsegmented script, else token
  token,        // whole-token sequence match
  substring,    // case-folded substring
};

struct MatcherConfig {
  MatchMode mode = MatchMode::automatic;
};

/// Good variants are checked before bad ones.
Verdict judge(std::string_view hypothesis, const EvalItem& item, const MatcherConfig& matcher = {});

/// Case-folded match of one lexicalization variant in a hypothesis.
bool variant_matches(std::string_view hypothesis, std::string_view variant, MatchMode mode);

enum class MissPolicy { exclude, count_as_error };
std::string_view to_string(MissPolicy policy);
MissPolicy parse_miss_policy(std::string_view name);

struct ItemVerdict {
  std::string id;
  Verdict verdict;
};

struct EvalReport {
  std::vector<ItemVerdict> verdicts;
  std::size_t hits = 0;
  std::size_t errors = 0;
  std::size_t misses = 0;
  MissPolicy policy = MissPolicy::exclude;
  double accuracy = 0.0;  // under `policy`
  double accuracy_exclude = 0.0;
  double accuracy_count_as_error = 0.0;
  bool empty_denominator = false;
  std::vector<Diagnostic> diagnostics;
};

double accuracy_for(MissPolicy policy, std::size_t hits, std::size_t errors, std::size_t misses);

/// Items without a hypothesis are judged Miss with a diagnostic; hypotheses
/// for unknown ids are reported as diagnostics.
EvalReport evaluate_run(const std::map<std::string, std::string, std::less<>>& hypotheses,
                        const std::vector<EvalItem>& items, MissPolicy policy = MissPolicy::exclude,
                        const MatcherConfig& matcher = {}, Exec exec = Exec::parallel);

/// Hypotheses file: "id<TAB>translation" per line, with \t \n \\ escapes.
/// Throws Error on a duplicate id or a line without a tab.
std::map<std::string, std::string, std::less<>> parse_hypotheses(std::string_view contents);
std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s);

std::string render_report_text(const EvalReport& report);
std::string render_report_json(const EvalReport& report);

struct MetricsTable {
  std::vector<std::string> systems;
  std::vector<double> accuracy;
  std::vector<std::string> metric_names;
  std::vector<std::vector<double>> metrics;  // [column][row]
  std::vector<Diagnostic> diagnostics;
};

/// Delimited table with a header: system, accuracy, metric columns. The
/// delimiter is a tab if the header contains one, else a comma. Rows with a
/// missing or non-numeric cell are dropped with a diagnostic.
MetricsTable parse_metrics_table(std::string_view contents);

struct MetricCorrelation {
  std::string metric;
  stats::CorrelationResult result;
};

/// One correlation against accuracy per metric column.
std::vector<MetricCorrelation> correlate_metrics(const MetricsTable& table);

}  // namespace sensemt
