#include "sensemt/evaluation.hpp"

#include "sensemt/io.hpp"
#include "sensemt/text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

namespace sensemt {

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::hit: return "hit";
    case VerdictKind::error: return "error";
    case VerdictKind::miss: return "miss";
  }
  return "miss";
}

std::string_view to_string(MissPolicy policy) {
  return policy == MissPolicy::exclude ? "exclude" : "count-as-error";
}

MissPolicy parse_miss_policy(std::string_view name) {
  if (name == "exclude") return MissPolicy::exclude;
  if (name == "count-as-error") return MissPolicy::count_as_error;
  throw Error(fmt::format("unknown miss policy '{}'", name));
}

bool variant_matches(std::string_view hypothesis, std::string_view variant, MatchMode mode) {
  const auto hyp = text::fold_case(hypothesis);
  const auto var = text::fold_case(text::trim(variant));
  if (var.empty()) return false;
  if (mode == MatchMode::automatic)
    mode = text::contains_unsegmented_script(var) ? MatchMode::substring : MatchMode::token;
  if (mode == MatchMode::substring) return hyp.find(var) != std::string::npos;

  const auto needle = text::word_tokens(var);
  if (needle.empty()) return hyp.find(var) != std::string::npos;
  const auto hay = text::word_tokens(hyp);
  if (hay.size() < needle.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

Verdict judge(std::string_view hypothesis, const EvalItem& item, const MatcherConfig& matcher) {
  for (const auto& g : item.good) {
    if (variant_matches(hypothesis, g, matcher.mode)) return {VerdictKind::hit, g};
  }
  for (const auto& b : item.bad) {
    if (variant_matches(hypothesis, b, matcher.mode)) return {VerdictKind::error, b};
  }
  return {VerdictKind::miss, std::nullopt};
}

double accuracy_for(MissPolicy policy, std::size_t hits, std::size_t errors, std::size_t misses) {
  const auto denom = policy == MissPolicy::exclude ? hits + errors : hits + errors + misses;
  return denom == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(denom);
}

EvalReport evaluate_run(const std::map<std::string, std::string, std::less<>>& hypotheses,
                        const std::vector<EvalItem>& items, MissPolicy policy,
                        const MatcherConfig& matcher, Exec exec) {
  EvalReport report;
  report.policy = policy;
  report.verdicts.resize(items.size());
  std::vector<char> missing(items.size(), 0);
  const auto n = static_cast<std::ptrdiff_t>(items.size());
  auto work = [&](std::ptrdiff_t i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto& item = items[idx];
    report.verdicts[idx].id = item.id;
    auto it = hypotheses.find(item.id);
    if (it == hypotheses.end()) {
      missing[idx] = 1;
      return;
    }
    report.verdicts[idx].verdict = judge(it->second, item, matcher);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) work(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) work(i);
  }

  std::set<std::string_view> item_ids;
  for (std::size_t i = 0; i < items.size(); ++i) {
    item_ids.insert(items[i].id);
    if (missing[i]) report.diagnostics.push_back({0, fmt::format("no hypothesis for item '{}'", items[i].id)});
    switch (report.verdicts[i].verdict.kind) {
      case VerdictKind::hit: ++report.hits; break;
      case VerdictKind::error: ++report.errors; break;
      case VerdictKind::miss: ++report.misses; break;
    }
  }
  for (const auto& [id, hyp] : hypotheses) {
    if (!item_ids.contains(id))
      report.diagnostics.push_back({0, fmt::format("hypothesis for unknown item '{}'", id)});
  }
  report.accuracy_exclude = accuracy_for(MissPolicy::exclude, report.hits, report.errors, report.misses);
  report.accuracy_count_as_error =
      accuracy_for(MissPolicy::count_as_error, report.hits, report.errors, report.misses);
  report.accuracy = policy == MissPolicy::exclude ? report.accuracy_exclude : report.accuracy_count_as_error;
  report.empty_denominator =
      policy == MissPolicy::exclude ? report.hits + report.errors == 0 : items.empty();
  return report;
}

std::string escape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out.push_back(s[i]);
      continue;
    }
    switch (s[++i]) {
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case '\\': out.push_back('\\'); break;
      default:
        out.push_back('\\');
        out.push_back(s[i]);
    }
  }
  return out;
}

std::map<std::string, std::string, std::less<>> parse_hypotheses(std::string_view contents) {
  std::map<std::string, std::string, std::less<>> out;
  std::size_t line_no = 0;
  for (const auto& line : io::split_lines(contents)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(fmt::format("line {}: expected id<TAB>translation", line_no));
    auto id = line.substr(0, tab);
    if (id.empty()) throw Error(fmt::format("line {}: empty id", line_no));
    auto [it, inserted] = out.emplace(id, unescape_field(std::string_view(line).substr(tab + 1)));
    if (!inserted) throw Error(fmt::format("line {}: duplicate hypothesis id '{}'", line_no, id));
  }
  return out;
}

std::string render_report_text(const EvalReport& r) {
  std::string out;
  out += fmt::format("items: {}\n", r.verdicts.size());
  out += fmt::format("hits: {}  errors: {}  misses: {}\n", r.hits, r.errors, r.misses);
  out += fmt::format("accuracy ({}): {:.4f}{}\n", to_string(r.policy), r.accuracy,
                     r.empty_denominator ? "  [empty denominator]" : "");
  out += fmt::format("accuracy (exclude): {:.4f}\n", r.accuracy_exclude);
  out += fmt::format("accuracy (count-as-error): {:.4f}\n", r.accuracy_count_as_error);
  for (const auto& d : r.diagnostics) out += fmt::format("warning: {}\n", d.message);
  return out;
}

std::string render_report_json(const EvalReport& r) {
  nlohmann::ordered_json obj;
  obj["items"] = r.verdicts.size();
  obj["hits"] = r.hits;
  obj["errors"] = r.errors;
  obj["misses"] = r.misses;
  obj["miss_policy"] = std::string(to_string(r.policy));
  obj["accuracy"] = r.accuracy;
  obj["accuracy_exclude"] = r.accuracy_exclude;
  obj["accuracy_count_as_error"] = r.accuracy_count_as_error;
  obj["empty_denominator"] = r.empty_denominator;
  auto verdicts = nlohmann::ordered_json::array();
  for (const auto& v : r.verdicts) {
    nlohmann::ordered_json vj;
    vj["id"] = v.id;
    vj["verdict"] = std::string(to_string(v.verdict.kind));
    if (v.verdict.matched) vj["matched"] = *v.verdict.matched;
    verdicts.push_back(std::move(vj));
  }
  obj["verdicts"] = std::move(verdicts);
  auto diags = nlohmann::ordered_json::array();
  for (const auto& d : r.diagnostics) diags.push_back(d.message);
  obj["diagnostics"] = std::move(diags);
  return obj.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n";
}

namespace {

std::optional<double> parse_number(std::string_view cell) {
  cell = text::trim(cell);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

MetricsTable parse_metrics_table(std::string_view contents) {
  MetricsTable table;
  const auto lines = io::split_lines(contents);
  std::size_t header_line = 0;
  while (header_line < lines.size() && text::trim(lines[header_line]).empty()) ++header_line;
  if (header_line == lines.size()) throw Error("metrics table is empty");
  const char sep = lines[header_line].find('\t') != std::string::npos ? '\t' : ',';
  const auto header = text::split(lines[header_line], sep);
  if (header.size() < 3)
    throw Error("metrics table needs a system column, an accuracy column and at least one metric");
  for (std::size_t c = 2; c < header.size(); ++c) table.metric_names.emplace_back(text::trim(header[c]));
  table.metrics.resize(table.metric_names.size());

  for (std::size_t i = header_line + 1; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    const auto cells = text::split(lines[i], sep);
    const auto line_no = i + 1;
    if (cells.size() != header.size()) {
      table.diagnostics.push_back(
          {line_no, fmt::format("expected {} cells, found {}; row excluded", header.size(), cells.size())});
      continue;
    }
    std::vector<double> values;
    std::optional<std::size_t> bad;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      auto v = parse_number(cells[c]);
      if (!v) {
        bad = c;
        break;
      }
      values.push_back(*v);
    }
    if (bad) {
      table.diagnostics.push_back({line_no, fmt::format("missing or non-numeric '{}' cell; row excluded",
                                                        text::trim(header[*bad]))});
      continue;
    }
    table.systems.emplace_back(text::trim(cells[0]));
    table.accuracy.push_back(values[0]);
    for (std::size_t c = 0; c < table.metrics.size(); ++c) table.metrics[c].push_back(values[c + 1]);
  }
  return table;
}

std::vector<MetricCorrelation> correlate_metrics(const MetricsTable& table) {
  std::vector<MetricCorrelation> out;
  for (std::size_t c = 0; c < table.metric_names.size(); ++c) {
    try {
      out.push_back({table.metric_names[c], stats::pearson(table.accuracy, table.metrics[c])});
    } catch (const Error& e) {
      throw Error(fmt::format("metric '{}': {}", table.metric_names[c], e.what()));
    }
  }
  return out;
}

}  // namespace sensemt
