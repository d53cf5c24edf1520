#include "citymap/percentile.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

namespace citymap {

std::string_view to_string(R6Class c) {
  switch (c) {
    case R6Class::top1: return "top1";
    case R6Class::top5: return "top5";
    case R6Class::top10: return "top10";
    case R6Class::top25: return "top25";
    case R6Class::top50: return "top50";
    case R6Class::bottom50: return "bottom50";
  }
  return "unknown";
}

std::vector<double> rousseau_percentiles(std::span<const int> citations) {
  std::vector<int> sorted(citations.begin(), citations.end());
  std::sort(sorted.begin(), sorted.end());
  const auto size = static_cast<double>(sorted.size());
  std::vector<double> out;
  out.reserve(citations.size());
  for (const int c : citations) {
    const auto at_or_below = std::upper_bound(sorted.begin(), sorted.end(), c) - sorted.begin();
    out.push_back(100.0 * static_cast<double>(at_or_below) / size);
  }
  return out;
}

std::vector<PercentileAssignment> assign_percentiles(std::span<const PublicationRecord> records,
                                                     ReferenceGrouping grouping) {
  using Key = std::tuple<int, std::string, std::string>;
  std::map<Key, std::vector<std::size_t>> partitions;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (!rec.analyzable()) {
      throw std::invalid_argument("record " + std::to_string(i) + " lacks a publication year or citation count");
    }
    Key key{*rec.pub_year, grouping.group_by == GroupBy::year_and_doctype ? rec.doc_type : std::string{},
            grouping.scope == Scope::journal ? rec.journal : std::string{}};
    partitions[std::move(key)].push_back(i);
  }

  std::vector<PercentileAssignment> out(records.size());
  std::vector<int> citations;
  for (const auto& [key, members] : partitions) {
    citations.clear();
    for (const auto i : members) citations.push_back(records[i].times_cited);
    const auto pct = rousseau_percentiles(citations);
    for (std::size_t j = 0; j < members.size(); ++j) {
      auto& a = out[members[j]];
      a.record = members[j];
      a.percentile = pct[j];
      a.r6 = r6_classify(pct[j]);
    }
  }
  return out;
}

void flag_top(std::span<PercentileAssignment> assignments, double k) {
  if (!(k > 0.0 && k < 100.0)) throw ConfigError("top percentage must lie in (0, 100), got " + std::to_string(k));
  const double cutoff = 100.0 - k;
  for (auto& a : assignments) a.top = a.percentile > cutoff;
}

R6Class r6_classify(double percentile) {
  if (percentile > 99.0) return R6Class::top1;
  if (percentile > 95.0) return R6Class::top5;
  if (percentile > 90.0) return R6Class::top10;
  if (percentile > 75.0) return R6Class::top25;
  if (percentile > 50.0) return R6Class::top50;
  return R6Class::bottom50;
}

std::vector<YearThreshold> year_thresholds(std::span<const PublicationRecord> records,
                                           std::span<const PercentileAssignment> assignments) {
  std::map<int, YearThreshold> by_year;
  for (const auto& a : assignments) {
    const auto& rec = records[a.record];
    auto& t = by_year[*rec.pub_year];
    t.year = *rec.pub_year;
    if (!a.top) continue;
    ++t.top_count;
    if (!t.min_citations_for_top || rec.times_cited < *t.min_citations_for_top) {
      t.min_citations_for_top = rec.times_cited;
    }
  }
  std::vector<YearThreshold> out;
  out.reserve(by_year.size());
  for (auto& [year, t] : by_year) out.push_back(t);
  return out;
}

void write_py_txt(std::ostream& out, std::span<const YearThreshold> thresholds) {
  for (const auto& t : thresholds) {
    out << t.year << '\t' << t.top_count << '\t';
    if (t.min_citations_for_top) out << *t.min_citations_for_top;
    out << '\n';
  }
}

}  // namespace citymap
