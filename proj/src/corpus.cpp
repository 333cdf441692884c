#include "suggest/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "suggest/error.hpp"
#include "suggest/rng.hpp"

namespace suggest {

namespace {

bool is_valid_utf8(const std::string& s, std::size_t* bad_offset) {
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t extra;
    unsigned min_cp;
    if (c < 0x80) {
      i += 1;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      min_cp = 0x80;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      min_cp = 0x800;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      min_cp = 0x10000;
    } else {
      *bad_offset = i;
      return false;
    }
    if (i + extra >= n) {
      *bad_offset = i;
      return false;
    }
    unsigned cp = c & (0x3F >> extra);
    for (std::size_t k = 1; k <= extra; ++k) {
      unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) {
        *bad_offset = i;
        return false;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      *bad_offset = i;
      return false;
    }
    i += extra + 1;
  }
  return true;
}

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
           c == '\v';
  });
}

struct Row {
  std::vector<std::string> fields;
  std::size_t line;  // 1-based line where the row starts
};

// RFC-4180-style parse over the whole file contents. Quoted fields may
// contain delimiters, doubled quotes, and newlines.
std::vector<Row> parse_delimited(const std::string& content, char delim,
                                 const std::string& path) {
  std::vector<Row> rows;
  std::size_t i = 0;
  const std::size_t n = content.size();
  std::size_t line = 1;
  while (i < n) {
    Row row;
    row.line = line;
    std::string field;
    bool in_quotes = false;
    bool row_done = false;
    bool saw_any = false;
    while (i < n && !row_done) {
      char c = content[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < n && content[i + 1] == '"') {
            field.push_back('"');
            i += 2;
          } else {
            in_quotes = false;
            ++i;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
          ++i;
        }
      } else if (c == '"' && field.empty()) {
        in_quotes = true;
        saw_any = true;
        ++i;
      } else if (c == delim) {
        row.fields.push_back(std::move(field));
        field.clear();
        saw_any = true;
        ++i;
      } else if (c == '\n' || (c == '\r' && i + 1 < n && content[i + 1] == '\n')) {
        i += (c == '\r') ? 2 : 1;
        ++line;
        row_done = true;
      } else {
        field.push_back(c);
        saw_any = true;
        ++i;
      }
    }
    if (in_quotes)
      fail(path, ": row starting at line ", row.line, ": unterminated quote");
    if (!row_done && !saw_any && field.empty()) break;  // trailing EOF
    row.fields.push_back(std::move(field));
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;  // blank line
    rows.push_back(std::move(row));
  }
  return rows;
}

bool parse_label(const std::string& s, Label* out) {
  std::string t = s;
  while (!t.empty() && (t.back() == ' ' || t.back() == '\r' || t.back() == '\t'))
    t.pop_back();
  std::size_t b = 0;
  while (b < t.size() && (t[b] == ' ' || t[b] == '\t')) ++b;
  t = t.substr(b);
  if (t == "0") {
    *out = Label::NonSuggestion;
    return true;
  }
  if (t == "1") {
    *out = Label::Suggestion;
    return true;
  }
  return false;
}

bool needs_quoting(const std::string& s, char delim) {
  if (!s.empty() && (s.front() == ' ' || s.back() == ' ')) return true;
  return s.find_first_of(std::string{delim} + "\"\n\r") != std::string::npos;
}

void write_field(std::ostream& os, const std::string& s, char delim) {
  if (!needs_quoting(s, delim)) {
    os << s;
    return;
  }
  os << '"';
  for (char c : s) {
    if (c == '"') os << "\"\"";
    else os << c;
  }
  os << '"';
}

}  // namespace

const char* split_tag_name(SplitTag tag) {
  switch (tag) {
    case SplitTag::Train: return "train";
    case SplitTag::Trial: return "trial";
    case SplitTag::Test: return "test";
    case SplitTag::Other: return "other";
  }
  return "other";
}

DatasetFormat parse_format(const std::string& spec) {
  DatasetFormat fmt;
  std::string base = spec;
  std::string opt;
  auto colon = spec.find(':');
  if (colon != std::string::npos) {
    base = spec.substr(0, colon);
    opt = spec.substr(colon + 1);
  }
  if (base == "csv") fmt.delimiter = ',';
  else if (base == "tsv") fmt.delimiter = '\t';
  else fail("unknown dataset format \"", spec, "\" (expected csv or tsv)");
  if (opt == "header") fmt.header = DatasetFormat::Header::Yes;
  else if (opt == "noheader") fmt.header = DatasetFormat::Header::No;
  else if (!opt.empty())
    fail("unknown dataset format option \"", opt, "\" in \"", spec, "\"");
  return fmt;
}

Dataset load_dataset(const std::string& path, const DatasetFormat& format,
                     SplitTag tag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open dataset file: ", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string content = buf.str();

  std::size_t bad = 0;
  if (!is_valid_utf8(content, &bad)) {
    std::size_t line = 1 + static_cast<std::size_t>(std::count(
                               content.begin(), content.begin() + bad, '\n'));
    fail(path, ": line ", line, ": invalid UTF-8 byte sequence at offset ", bad);
  }

  std::vector<Row> rows = parse_delimited(content, format.delimiter, path);

  Dataset d;
  d.split_tag = tag;
  std::set<std::string> seen_ids;
  bool first = true;
  for (const Row& row : rows) {
    if (first) {
      first = false;
      bool skip = false;
      if (format.header == DatasetFormat::Header::Yes) {
        skip = true;
      } else if (format.header == DatasetFormat::Header::Auto) {
        Label ignored;
        skip = row.fields.size() == 3 && !parse_label(row.fields[2], &ignored);
      }
      if (skip) continue;
    }
    if (row.fields.size() != 3)
      fail(path, ": row at line ", row.line, ": expected 3 columns, got ",
           row.fields.size());
    LabeledSentence rec;
    rec.id = row.fields[0];
    rec.text = row.fields[1];
    if (rec.id.empty())
      fail(path, ": row at line ", row.line, ": empty id");
    if (is_blank(rec.text))
      fail(path, ": row at line ", row.line, ": empty sentence text");
    if (!parse_label(row.fields[2], &rec.label))
      fail(path, ": row at line ", row.line, ": label \"", row.fields[2],
           "\" outside {0,1}");
    if (!seen_ids.insert(rec.id).second)
      fail(path, ": row at line ", row.line, ": duplicate id \"", rec.id, "\"");
    d.records.push_back(std::move(rec));
  }
  return d;
}

void save_dataset(const Dataset& d, const std::string& path,
                  const DatasetFormat& format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write dataset file: ", path);
  const char delim = format.delimiter;
  out << "id" << delim << "sentence" << delim << "label\n";
  for (const LabeledSentence& rec : d.records) {
    write_field(out, rec.id, delim);
    out << delim;
    write_field(out, rec.text, delim);
    out << delim << (rec.label == Label::Suggestion ? '1' : '0') << '\n';
  }
  if (!out) fail("failed writing dataset file: ", path);
}

std::map<Label, std::size_t> class_distribution(const Dataset& d) {
  std::map<Label, std::size_t> counts{{Label::Suggestion, 0},
                                      {Label::NonSuggestion, 0}};
  for (const LabeledSentence& rec : d.records) ++counts[rec.label];
  return counts;
}

Dataset oversample(const Dataset& d, std::uint64_t seed) {
  if (d.split_tag == SplitTag::Trial || d.split_tag == SplitTag::Test)
    fail("refusing to oversample evaluation split \"",
         split_tag_name(d.split_tag), "\"");

  std::set<std::string> ids;
  std::size_t positives = 0;
  for (const LabeledSentence& rec : d.records) {
    ids.insert(rec.id);
    if (rec.label == Label::Suggestion) ++positives;
  }
  if (positives == 0) fail("oversample: no positive instances in dataset");

  Dataset out;
  out.split_tag = d.split_tag;
  out.records = d.records;
  for (const LabeledSentence& rec : d.records) {
    if (rec.label != Label::Suggestion) continue;
    LabeledSentence dup = rec;
    std::string candidate = rec.id + "-dup";
    for (int k = 2; !ids.insert(candidate).second; ++k)
      candidate = rec.id + "-dup" + std::to_string(k);
    dup.id = candidate;
    out.records.push_back(std::move(dup));
  }

  Rng rng(seed);
  rng.shuffle(out.records);
  return out;
}

}  // namespace suggest
