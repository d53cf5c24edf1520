#pragma once

// Reader for Web of Science "full record" tagged plain-text exports.
//
// Grammar: an optional FN/VR header, then records made of lines that start
// with a two-character tag at column 0 followed by a space. Continuation
// lines start with three spaces. `ER` closes a record and `EF` closes the
// file.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citymap/text.hpp"

namespace citymap {

struct PublicationRecord {
  std::string accession_id;  // UT; empty when absent
  std::optional<int> pub_year;
  std::string journal;
  std::string doc_type;
  int times_cited = 0;
  bool has_times_cited = false;
  std::vector<std::string> addresses;  // raw C1 segments, author brackets included
  std::vector<std::string> authors;

  /// Percentile analysis needs both a publication year and a citation count.
  bool analyzable() const { return pub_year.has_value() && has_times_cited; }
};

struct ParseDiagnostic {
  std::string source;
  std::size_t line = 0;
  std::string message;
  bool record_skipped = false;
};

struct ParseResult {
  std::string source;
  std::vector<PublicationRecord> records;
  std::vector<ParseDiagnostic> diagnostics;
  std::size_t skipped_blocks = 0;
  bool saw_end_of_file = false;
  TextEncoding encoding = TextEncoding::utf8;
};

ParseResult parse_export(std::string_view text, std::string_view source = {});

/// Reads a file, detects its encoding and parses it. Throws
/// std::runtime_error if the file cannot be read.
ParseResult parse_export_file(const std::filesystem::path& path);

/// Serializes records back into the tagged format, header and EF included.
std::string write_export(std::span<const PublicationRecord> records);

struct Corpus {
  std::vector<PublicationRecord> records;
  std::vector<std::string> source_files;
  std::vector<std::string> duplicate_ids;
};

/// Concatenates parsed files in order, keeping the first record for every
/// accession id that occurs more than once.
Corpus merge_exports(std::span<const ParseResult> files);

struct CorpusFilter {
  std::set<std::string> doc_types{"Article"};
  int min_year = 1989;
  int max_year = 2009;

  bool admits(const PublicationRecord& record) const;
};

struct FilterResult {
  Corpus corpus;
  std::vector<const PublicationRecord*> invalid;  // lacking PY or TC, points into the input
  std::size_t excluded = 0;                       // analyzable but rejected by the filter
};

/// Splits a corpus into analyzable records that pass `filter`, records that
/// cannot be analyzed, and a count of the rest. The input must outlive the
/// result's `invalid` pointers.
FilterResult filter_corpus(const Corpus& corpus, const CorpusFilter& filter);

/// Inspection dump: one row per record.
void write_corpus_csv(std::ostream& out, const Corpus& corpus);

}  // namespace citymap
