#ifndef SUGGEST_NORMALIZE_HPP
#define SUGGEST_NORMALIZE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace suggest {

// Closed vocabulary of mask tokens. Every normalizer output that looks like
// <...> is one of these.
enum class MaskTag {
  Url,
  Hashtag,
  Date,
  Time,
  Phone,
  Money,
  User,
  Percent,
  Censored,
  Number,
  EmHappy,
  EmSad,
  EmNeutral,
};

const char* mask_string(MaskTag m);
std::optional<MaskTag> mask_from_string(const std::string& s);
const std::vector<MaskTag>& all_masks();

enum class TokenKind { Word, Mask, Punct, Number };

struct Token {
  std::string surface;
  TokenKind kind = TokenKind::Word;
  std::uint32_t begin = 0;  // byte offsets into the original text
  std::uint32_t end = 0;
  // Entity recognized by the tokenizer (url, hashtag, ...); normalize() turns
  // these into mask tokens.
  std::optional<MaskTag> entity;
};

struct TokenStream {
  std::vector<Token> tokens;
};

// One row of the ordered pattern table. Rules are data so conformance tests
// can pin them; matching is longest-match-first with earlier rules winning
// ties. The names "mask", "url", "hashtag" and "emoticon" carry behavior
// (literal mask pass-through, broken-URL reassembly, mask-and-unpack, and
// lexicon-driven matching respectively).
struct PatternRule {
  std::string name;
  std::optional<MaskTag> mask;  // empty for the literal-mask rule
  bool icase = false;
  std::string pattern;  // empty for the emoticon lexicon rule
  std::regex compiled;
};

enum class LowercasePolicy { Preserve, LowercaseAll, LowercaseModifiedOnly };
enum class PunctPolicy { DropQuoted, KeepAll, DropAll };

struct NormalizerConfig {
  std::map<std::string, std::string> slang_lexicon;
  std::map<std::string, MaskTag> emoticon_lexicon;
  LowercasePolicy lowercase_policy = LowercasePolicy::LowercaseModifiedOnly;
  PunctPolicy punct_policy = PunctPolicy::DropQuoted;
  std::vector<PatternRule> rules;

  // Content hash binding trained models to the exact preprocessing they saw.
  std::uint64_t fingerprint() const;
};

// Shipped defaults: the embedded copies of the lexicon and rule files under
// data/lexicons/.
const NormalizerConfig& default_config();

// Raw text of one embedded default table ("slang", "emoticons", "rules");
// byte-identical to the corresponding file under data/lexicons/.
const std::string& default_table_text(const std::string& which);

// Loaders for the versioned tab-separated lexicon and rule files.
std::map<std::string, std::string> load_slang_lexicon(const std::string& path);
std::map<std::string, MaskTag> load_emoticon_lexicon(const std::string& path);
std::vector<PatternRule> load_rule_table(const std::string& path);

std::map<std::string, std::string> parse_slang_lexicon(const std::string& text,
                                                       const std::string& origin);
std::map<std::string, MaskTag> parse_emoticon_lexicon(const std::string& text,
                                                      const std::string& origin);
std::vector<PatternRule> parse_rule_table(const std::string& text,
                                          const std::string& origin);

// Total on arbitrary byte strings; never throws on malformed input.
TokenStream tokenize(const std::string& text);
TokenStream tokenize(const std::string& text, const NormalizerConfig& cfg);

TokenStream normalize(const TokenStream& ts, const NormalizerConfig& cfg);

// Splits at letter/non-letter boundaries: returns the maximal letter runs,
// lowercased. The input must contain at least one letter.
std::vector<std::string> segment_word(const std::string& w);

// normalize(tokenize(text)) joined with single spaces.
std::string preprocess(const std::string& text);
std::string preprocess(const std::string& text, const NormalizerConfig& cfg);

}  // namespace suggest

#endif
