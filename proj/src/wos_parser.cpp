#include "citymap/wos_parser.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "citymap/csv.hpp"

namespace citymap {

namespace {

bool is_tag_char(char c, bool first) {
  if (c >= 'A' && c <= 'Z') return true;
  return !first && c >= '0' && c <= '9';
}

bool is_tag_line(std::string_view line) {
  if (line.size() < 2 || !is_tag_char(line[0], true) || !is_tag_char(line[1], false)) return false;
  return line.size() == 2 || line[2] == ' ';
}

std::optional<int> parse_int(std::string_view s) {
  s = trim(s);
  int value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

// Splits one C1 line into address segments. A new segment starts at every
// '[' that opens an author group after some address text.
void split_c1_line(std::string_view line, std::vector<std::string>& out) {
  std::size_t start = 0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    if (line[i] == '[' && !trim(line.substr(start, i - start)).empty()) {
      out.emplace_back(trim(line.substr(start, i - start)));
      start = i;
    }
  }
  auto last = trim(line.substr(start));
  while (!last.empty() && last.back() == ';') last = trim(last.substr(0, last.size() - 1));
  if (!last.empty()) out.emplace_back(last);
}

struct Field {
  std::string tag;
  std::vector<std::string> lines;
};

struct Block {
  std::size_t first_line = 0;
  std::vector<Field> fields;
  std::string error;  // non-empty marks the block malformed
};

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (l.empty()) continue;
    if (!out.empty()) out += ' ';
    out += l;
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view source) { result_.source = std::string(source); }

  ParseResult run(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(pos, nl - pos);
      pos = nl + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      handle_line(line, line_no);
      if (nl == text.size()) break;
    }
    if (block_) {
      skip_block("record not terminated by ER before end of input");
    }
    if (!result_.saw_end_of_file) {
      diag(line_no, "missing EF terminator", false);
    }
    return std::move(result_);
  }

 private:
  void handle_line(std::string_view line, std::size_t line_no) {
    if (trim(line).empty()) return;
    if (line.starts_with("   ")) {
      if (block_ && current_ != nullptr) {
        current_->lines.emplace_back(trim(line));
      } else {
        malformed(line_no, "continuation line without a field");
      }
      return;
    }
    // Trailing blanks after a bare tag such as "ER  " are tolerated.
    const std::string_view rstripped = line.substr(0, line.find_last_not_of(" \t") + 1);
    if (!is_tag_line(rstripped)) {
      malformed(line_no, "malformed tag line: " + std::string(line.substr(0, 40)));
      return;
    }
    const std::string tag(rstripped.substr(0, 2));
    const std::string_view value = rstripped.size() > 3 ? trim(rstripped.substr(3)) : std::string_view{};

    if (!block_ && (tag == "FN" || tag == "VR")) return;
    if (tag == "EF") {
      if (block_) skip_block("record not terminated by ER before EF");
      result_.saw_end_of_file = true;
      return;
    }
    if (tag == "ER") {
      if (block_) {
        finish_block();
      } else {
        diag(line_no, "ER outside of a record", false);
      }
      return;
    }
    if (!block_) open_block(line_no);
    if (!block_->error.empty()) return;
    block_->fields.push_back({tag, {std::string(value)}});
    current_ = &block_->fields.back();
  }

  void open_block(std::size_t line_no) {
    block_.emplace();
    block_->first_line = line_no;
    current_ = nullptr;
  }

  void malformed(std::size_t line_no, std::string message) {
    if (!block_) open_block(line_no);
    if (block_->error.empty()) {
      block_->error = "line " + std::to_string(line_no) + ": " + std::move(message);
    }
    current_ = nullptr;
  }

  void skip_block(const std::string& why) {
    const std::string message = block_->error.empty() ? why : block_->error;
    diag(block_->first_line, "record skipped: " + message, true);
    ++result_.skipped_blocks;
    block_.reset();
    current_ = nullptr;
  }

  void finish_block() {
    if (!block_->error.empty()) {
      skip_block(block_->error);
      return;
    }
    PublicationRecord rec;
    for (const auto& field : block_->fields) {
      if (field.tag == "AU") {
        for (const auto& l : field.lines)
          if (!l.empty()) rec.authors.push_back(l);
      } else if (field.tag == "C1") {
        for (const auto& l : field.lines) split_c1_line(l, rec.addresses);
      } else if (field.tag == "PY") {
        rec.pub_year = parse_int(join_lines(field.lines));
        if (!rec.pub_year) diag(block_->first_line, "unparseable PY value", false);
      } else if (field.tag == "TC") {
        if (const auto tc = parse_int(join_lines(field.lines)); tc && *tc >= 0) {
          rec.times_cited = *tc;
          rec.has_times_cited = true;
        } else {
          diag(block_->first_line, "unparseable TC value", false);
        }
      } else if (field.tag == "SO") {
        rec.journal = join_lines(field.lines);
      } else if (field.tag == "DT") {
        rec.doc_type = join_lines(field.lines);
      } else if (field.tag == "UT") {
        rec.accession_id = join_lines(field.lines);
      }
    }
    if (!rec.pub_year) {
      diag(block_->first_line, "record without PY retained but not analyzable", false);
    }
    result_.records.push_back(std::move(rec));
    block_.reset();
    current_ = nullptr;
  }

  void diag(std::size_t line, std::string message, bool skipped) {
    result_.diagnostics.push_back({result_.source, line, std::move(message), skipped});
  }

  ParseResult result_;
  std::optional<Block> block_;
  Field* current_ = nullptr;
};

}  // namespace

ParseResult parse_export(std::string_view text, std::string_view source) {
  return Parser(source).run(text);
}

ParseResult parse_export_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read input file: " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw std::runtime_error("error while reading input file: " + path.string());
  auto decoded = decode_text(bytes);
  auto result = parse_export(decoded.utf8, path.string());
  result.encoding = decoded.encoding;
  return result;
}

std::string write_export(std::span<const PublicationRecord> records) {
  std::ostringstream out;
  out << "FN Clarivate Analytics Web of Science\nVR 1.0\n";
  const auto multi = [&out](std::string_view tag, const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out << (i == 0 ? tag : std::string_view("  ")) << ' ' << values[i] << '\n';
    }
  };
  for (const auto& rec : records) {
    out << "PT J\n";
    multi("AU", rec.authors);
    if (!rec.journal.empty()) out << "SO " << rec.journal << '\n';
    if (!rec.doc_type.empty()) out << "DT " << rec.doc_type << '\n';
    multi("C1", rec.addresses);
    if (rec.has_times_cited) out << "TC " << rec.times_cited << '\n';
    if (rec.pub_year) out << "PY " << *rec.pub_year << '\n';
    if (!rec.accession_id.empty()) out << "UT " << rec.accession_id << '\n';
    out << "ER\n\n";
  }
  out << "EF\n";
  return out.str();
}

Corpus merge_exports(std::span<const ParseResult> files) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  for (const auto& file : files) {
    corpus.source_files.push_back(file.source);
    for (const auto& rec : file.records) {
      if (!rec.accession_id.empty() && !seen.insert(rec.accession_id).second) {
        corpus.duplicate_ids.push_back(rec.accession_id);
        continue;
      }
      corpus.records.push_back(rec);
    }
  }
  return corpus;
}

bool CorpusFilter::admits(const PublicationRecord& record) const {
  return record.pub_year && *record.pub_year >= min_year && *record.pub_year <= max_year &&
         doc_types.contains(record.doc_type);
}

FilterResult filter_corpus(const Corpus& corpus, const CorpusFilter& filter) {
  FilterResult result;
  result.corpus.source_files = corpus.source_files;
  for (const auto& rec : corpus.records) {
    if (!rec.analyzable()) {
      result.invalid.push_back(&rec);
    } else if (filter.admits(rec)) {
      result.corpus.records.push_back(rec);
    } else {
      ++result.excluded;
    }
  }
  return result;
}

void write_corpus_csv(std::ostream& out, const Corpus& corpus) {
  out << "accession_id,pub_year,journal,doc_type,times_cited,addresses\n";
  for (const auto& rec : corpus.records) {
    std::string addresses;
    for (const auto& a : rec.addresses) {
      if (!addresses.empty()) addresses += " | ";
      addresses += a;
    }
    out << csv::row({rec.accession_id, rec.pub_year ? std::to_string(*rec.pub_year) : "", rec.journal,
                     rec.doc_type, rec.has_times_cited ? std::to_string(rec.times_cited) : "", addresses})
        << '\n';
  }
}

}  // namespace citymap
