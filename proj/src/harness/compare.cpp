#include "uforge/harness/compare.hpp"

#include <cmath>
#include <sstream>

#include "uforge/numcore/error.hpp"
#include "uforge/numcore/format.hpp"

namespace uforge::harness {

namespace {

std::vector<std::string> names_of(const metrics::EvalReport& r) {
  std::vector<std::string> out;
  for (const auto& [name, value] : r.metrics) out.push_back(name);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

CompareTable compare(std::vector<CompareRow> rows) {
  if (rows.empty()) throw InvalidArgument("compare needs at least one report");
  CompareTable t;
  t.metric_names = names_of(rows.front().eval);
  const nlohmann::json provenance = rows.front().eval.meta.value("provenance", nlohmann::json());
  int references = 0;
  for (const CompareRow& row : rows) {
    if (names_of(row.eval) != t.metric_names) throw InvalidArgument("reports have different metrics: " + row.label);
    if (row.eval.meta.value("provenance", nlohmann::json()) != provenance) {
      throw InvalidArgument("reports come from different datasets or splits: " + row.label);
    }
    if (row.is_reference) ++references;
  }
  if (references > 1) throw InvalidArgument("more than one reference row");

  const CompareRow* ref = nullptr;
  for (const CompareRow& row : rows) {
    if (row.is_reference) ref = &row;
  }
  for (const CompareRow& row : rows) {
    std::vector<double> gaps;
    std::optional<double> avg;
    if (ref != nullptr) {
      for (std::size_t k = 0; k < t.metric_names.size(); ++k) {
        gaps.push_back(std::abs(row.eval.metrics[k].second - ref->eval.metrics[k].second));
      }
      avg = metrics::avg_gap(gaps);
    }
    t.gaps.push_back(std::move(gaps));
    t.avg_gaps.push_back(avg);
  }
  t.rows = std::move(rows);
  t.rcd_rank.assign(t.rows.size(), std::nullopt);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (!t.rows[r].rcd) continue;
    int rank = 1;
    for (std::size_t q = 0; q < t.rows.size(); ++q) {
      if (!t.rows[q].rcd) continue;
      if (*t.rows[q].rcd > *t.rows[r].rcd || (*t.rows[q].rcd == *t.rows[r].rcd && q < r)) ++rank;
    }
    t.rcd_rank[r] = rank;
  }
  return t;
}

std::string to_csv(const CompareTable& t) {
  std::ostringstream os;
  os << "label";
  for (const auto& name : t.metric_names) os << ',' << name;
  os << ",avg_gap,rcd,rcd_rank\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const CompareRow& row = t.rows[r];
    os << csv_field(row.label);
    for (std::size_t k = 0; k < t.metric_names.size(); ++k) {
      os << ',' << format_double(row.eval.metrics[k].second);
      if (!t.gaps[r].empty()) os << " (" << format_double(t.gaps[r][k]) << ')';
    }
    os << ',' << (t.avg_gaps[r] ? format_double(*t.avg_gaps[r]) : "");
    os << ',' << (row.rcd ? format_double(*row.rcd) : "");
    os << ',' << (t.rcd_rank[r] ? std::to_string(*t.rcd_rank[r]) : "") << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const CompareTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json pairs = nlohmann::json::array();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const CompareRow& row = t.rows[r];
    nlohmann::json m = nlohmann::json::object();
    for (std::size_t k = 0; k < t.metric_names.size(); ++k) {
      nlohmann::json cell = {{"value", row.eval.metrics[k].second}};
      if (!t.gaps[r].empty()) cell["gap"] = t.gaps[r][k];
      m[t.metric_names[k]] = cell;
    }
    const nlohmann::json avg = t.avg_gaps[r] ? nlohmann::json(*t.avg_gaps[r]) : nlohmann::json(nullptr);
    const nlohmann::json rcd = row.rcd ? nlohmann::json(*row.rcd) : nlohmann::json(nullptr);
    rows.push_back({{"label", row.label},
                    {"reference", row.is_reference},
                    {"checkpoint_id", row.eval.meta.value("checkpoint_id", "")},
                    {"metrics", m},
                    {"avg_gap", avg},
                    {"rcd", rcd},
                    {"rcd_rank", t.rcd_rank[r] ? nlohmann::json(*t.rcd_rank[r]) : nlohmann::json(nullptr)}});
    if (t.avg_gaps[r] && row.rcd) pairs.push_back({{"label", row.label}, {"avg_gap", avg}, {"rcd", rcd}});
  }
  return {{"metric_names", t.metric_names}, {"rows", rows}, {"pairs", pairs}};
}

}  // namespace uforge::harness
