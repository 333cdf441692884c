#ifndef SUGGEST_CORPUS_HPP
#define SUGGEST_CORPUS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace suggest {

// Suggestion is the positive class for every metric in this project.
enum class Label { NonSuggestion = 0, Suggestion = 1 };

inline const char* label_name(Label l) {
  return l == Label::Suggestion ? "suggestion" : "non_suggestion";
}

struct LabeledSentence {
  std::string id;
  std::string text;
  Label label = Label::NonSuggestion;

  bool operator==(const LabeledSentence&) const = default;
};

enum class SplitTag { Train, Trial, Test, Other };

const char* split_tag_name(SplitTag tag);

struct Dataset {
  std::vector<LabeledSentence> records;
  SplitTag split_tag = SplitTag::Other;
};

// Delimiter-separated files with columns (id, sentence, label) and
// RFC-4180-style quoting. Header::Auto treats the first row as a header when
// its label column does not parse as 0/1.
struct DatasetFormat {
  enum class Header { Auto, Yes, No };
  char delimiter = ',';
  Header header = Header::Auto;
};

// Parses "csv", "tsv", optionally suffixed ":header" / ":noheader".
DatasetFormat parse_format(const std::string& spec);

Dataset load_dataset(const std::string& path, const DatasetFormat& format = {},
                     SplitTag tag = SplitTag::Other);
void save_dataset(const Dataset& d, const std::string& path,
                  const DatasetFormat& format = {});

// Counts per label; both labels are always present as keys.
std::map<Label, std::size_t> class_distribution(const Dataset& d);

// Duplicates every Suggestion record exactly once (duplicate ids get a "-dup"
// suffix, disambiguated on collision) and shuffles the result with the given
// seed. Refuses to run on evaluation splits and on datasets with no positives.
Dataset oversample(const Dataset& d, std::uint64_t seed = 42);

}  // namespace suggest

#endif
