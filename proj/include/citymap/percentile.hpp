#pragma once

// Citation percentiles within reference sets. A paper's percentile is
// 100 * (papers in its reference set cited no more than it) / (set size), so
// the most-cited paper of every set scores exactly 100.

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "citymap/wos_parser.hpp"

namespace citymap {

enum class GroupBy { year, year_and_doctype };
enum class Scope { field, journal };

struct ReferenceGrouping {
  GroupBy group_by = GroupBy::year;
  Scope scope = Scope::field;
};

/// The six NSF percentile-rank classes.
enum class R6Class { top1, top5, top10, top25, top50, bottom50 };

std::string_view to_string(R6Class c);

struct PercentileAssignment {
  std::size_t record = 0;  // index into the analyzed record sequence
  double percentile = 0.0;
  bool top = false;
  R6Class r6 = R6Class::bottom50;
};

/// Percentiles for one reference set, in input order.
std::vector<double> rousseau_percentiles(std::span<const int> citations);

/// One assignment per record, in record order (assignments[i].record == i).
/// Throws std::invalid_argument if a record is not analyzable.
std::vector<PercentileAssignment> assign_percentiles(std::span<const PublicationRecord> records,
                                                     ReferenceGrouping grouping);

/// Thrown for out-of-range thresholds.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Marks papers whose percentile is strictly above 100 - k. k must lie in
/// the open interval (0, 100).
void flag_top(std::span<PercentileAssignment> assignments, double k);

R6Class r6_classify(double percentile);

struct YearThreshold {
  int year = 0;
  int top_count = 0;
  std::optional<int> min_citations_for_top;
};

/// Per publication year: number of flagged papers and the lowest citation
/// count among them. Years come out ascending.
std::vector<YearThreshold> year_thresholds(std::span<const PublicationRecord> records,
                                           std::span<const PercentileAssignment> assignments);

/// `year<TAB>top_count<TAB>min_citations` per line, LF terminated.
void write_py_txt(std::ostream& out, std::span<const YearThreshold> thresholds);

}  // namespace citymap
