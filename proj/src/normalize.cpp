#include "suggest/normalize.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <sstream>

#include "suggest/error.hpp"
#include "suggest/fingerprint.hpp"

namespace suggest {

namespace {

// ---------------------------------------------------------------------------
// Shipped defaults. These embedded tables are byte-identical to the files
// under data/lexicons/ (pinned by a test); the library works without any
// files on disk.
// ---------------------------------------------------------------------------

const char kDefaultSlang[] =
    R"(version	1
# Slang, shorthand and case-normalization lexicon.
# key<TAB>replacement, one per line. Keys are matched case-insensitively
# against whole tokens; replacements are emitted verbatim.
r	are
u	you
ur	your
plz	please
pls	please
thx	thanks
b4	before
gr8	great
2day	today
2moro	tomorrow
cuz	because
coz	because
dont	do not
doesnt	does not
wont	will not
cant	cannot
im	i am
ive	i have
tumblr	tumblr
)";

const char kDefaultEmoticons[] =
    R"(version	1
# Emoticon lexicon: literal emoticon<TAB>sentiment mask.
# Matching is case-sensitive and longest-match-first.
:)	<emhappy>
:-)	<emhappy>
:]	<emhappy>
:}	<emhappy>
:D	<emhappy>
:-D	<emhappy>
=D	<emhappy>
=)	<emhappy>
=]	<emhappy>
;)	<emhappy>
;-)	<emhappy>
;]	<emhappy>
:P	<emhappy>
:-P	<emhappy>
:p	<emhappy>
:-p	<emhappy>
xD	<emhappy>
XD	<emhappy>
<3	<emhappy>
^_^	<emhappy>
^^	<emhappy>
:'D	<emhappy>
:(	<emsad>
:-(	<emsad>
:[	<emsad>
:{	<emsad>
=(	<emsad>
:'(	<emsad>
:c	<emsad>
;(	<emsad>
</3	<emsad>
:|	<emneutral>
:-|	<emneutral>
:/	<emneutral>
:-/	<emneutral>
:\	<emneutral>
:-\	<emneutral>
=/	<emneutral>
=\	<emneutral>
-_-	<emneutral>
o_O	<emneutral>
O_o	<emneutral>
:o	<emneutral>
:O	<emneutral>
@_@	<emneutral>
)";

// Ordered pattern table. Matching semantics: at each scan position every rule
// is tried; the longest match wins and ties go to the earlier row. The rule
// names are part of the contract: "mask" passes existing mask tokens through,
// "url" enables broken-URL reassembly across single spaces, "hashtag" selects
// mask-and-unpack, "emoticon" matches the emoticon lexicon instead of a regex.
const char kDefaultRules[] =
    R"(version	1
# name	mask	flags	regex
mask	=	-	<(url|hashtag|date|time|phone|money|user|percent|censored|number|emhappy|emsad|emneutral)>
url	<url>	i	(https?://|www\.)[^\s"';]*
user	<user>	-	@[A-Za-z0-9_]+
hashtag	<hashtag>	-	#[A-Za-z0-9_]+
emoticon	-	-	-
date	<date>	i	(\d{1,2}[./-]\d{1,2}[./-]\d{2,4}\b|\d{4}[./-]\d{1,2}[./-]\d{1,2}\b|(jan(uary)?|feb(ruary)?|mar(ch)?|apr(il)?|may|jun(e)?|jul(y)?|aug(ust)?|sep(t(ember)?)?|oct(ober)?|nov(ember)?|dec(ember)?)\.?\s\d{1,2}(st|nd|rd|th)?(,?\s\d{4})?\b|\d{1,2}(st|nd|rd|th)?\s(of\s)?(jan(uary)?|feb(ruary)?|mar(ch)?|apr(il)?|may|jun(e)?|jul(y)?|aug(ust)?|sep(t(ember)?)?|oct(ober)?|nov(ember)?|dec(ember)?)(\s\d{4})?\b)
time	<time>	i	(\d{1,2}:\d{2}(:\d{2})?(\s?[ap]\.?m\.?)?\b|\d{1,2}\s?[ap]m\b)
phone	<phone>	-	(\+\d{1,3}[.-]?)?(\(\d{2,4}\)[.-]?)?\d{3}[.-]\d{3,4}([.-]\d{3,4})?\b
money	<money>	i	((\$|€|£)\s?\d+([.,]\d+)*(k|m|b)?\b|(\$|€|£)\s?\d+([.,]\d+)*|\d+([.,]\d+)*\s?(dollars?|bucks?|cents?|usd|eur|gbp)\b|\d+([.,]\d+)*\s?(\$|€|£))
percent	<percent>	i	\d+([.,]\d+)*\s?(%|percent\b)
censored	<censored>	i	([a-z0-9]*[a-z][a-z0-9]*\*+[a-z0-9*]*|[a-z0-9*]*\*+[a-z0-9]*[a-z][a-z0-9*]*)
)";

// ---------------------------------------------------------------------------
// Character classes. Bytes >= 0x80 (UTF-8 multibyte pieces) are treated as
// letters so the tokenizer is total on arbitrary input.
// ---------------------------------------------------------------------------

inline bool is_space_byte(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}
inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_letter_byte(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         static_cast<unsigned char>(c) >= 0x80;
}
inline bool is_word_byte(char c) {
  return is_letter_byte(c) || is_ascii_digit(c) || c == '_';
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

const std::string kDroppedPunct = "\"';`";

// ---------------------------------------------------------------------------
// Lexicon / rule-table parsing
// ---------------------------------------------------------------------------

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

// Yields the content lines of a versioned table file: checks the version
// header, skips '#' comments and blank lines.
std::vector<std::string> table_lines(const std::string& text,
                                     const std::string& origin) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  bool version_seen = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!version_seen) {
      if (line != "version\t1")
        fail(origin, ": line ", lineno,
             ": expected version header \"version<TAB>1\"");
      version_seen = true;
      continue;
    }
    out.push_back(line);
  }
  if (!version_seen) fail(origin, ": missing version header");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open file: ", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

const char* mask_string(MaskTag m) {
  switch (m) {
    case MaskTag::Url: return "<url>";
    case MaskTag::Hashtag: return "<hashtag>";
    case MaskTag::Date: return "<date>";
    case MaskTag::Time: return "<time>";
    case MaskTag::Phone: return "<phone>";
    case MaskTag::Money: return "<money>";
    case MaskTag::User: return "<user>";
    case MaskTag::Percent: return "<percent>";
    case MaskTag::Censored: return "<censored>";
    case MaskTag::Number: return "<number>";
    case MaskTag::EmHappy: return "<emhappy>";
    case MaskTag::EmSad: return "<emsad>";
    case MaskTag::EmNeutral: return "<emneutral>";
  }
  return "<url>";
}

const std::vector<MaskTag>& all_masks() {
  static const std::vector<MaskTag> masks = {
      MaskTag::Url,      MaskTag::Hashtag,  MaskTag::Date,
      MaskTag::Time,     MaskTag::Phone,    MaskTag::Money,
      MaskTag::User,     MaskTag::Percent,  MaskTag::Censored,
      MaskTag::Number,   MaskTag::EmHappy,  MaskTag::EmSad,
      MaskTag::EmNeutral};
  return masks;
}

std::optional<MaskTag> mask_from_string(const std::string& s) {
  for (MaskTag m : all_masks())
    if (s == mask_string(m)) return m;
  return std::nullopt;
}

std::map<std::string, std::string> parse_slang_lexicon(
    const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> out;
  for (const std::string& line : table_lines(text, origin)) {
    auto cols = split_tabs(line);
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty())
      fail(origin, ": malformed slang entry \"", line, "\"");
    std::string key = ascii_lower(cols[0]);
    if (!out.emplace(key, cols[1]).second)
      fail(origin, ": duplicate slang key \"", key, "\"");
  }
  return out;
}

std::map<std::string, MaskTag> parse_emoticon_lexicon(
    const std::string& text, const std::string& origin) {
  std::map<std::string, MaskTag> out;
  for (const std::string& line : table_lines(text, origin)) {
    auto cols = split_tabs(line);
    if (cols.size() != 2 || cols[0].empty())
      fail(origin, ": malformed emoticon entry \"", line, "\"");
    auto mask = mask_from_string(cols[1]);
    if (!mask)
      fail(origin, ": emoticon \"", cols[0], "\" maps to unknown mask \"",
           cols[1], "\"");
    if (!out.emplace(cols[0], *mask).second)
      fail(origin, ": duplicate emoticon key \"", cols[0], "\"");
  }
  return out;
}

std::vector<PatternRule> parse_rule_table(const std::string& text,
                                          const std::string& origin) {
  std::vector<PatternRule> rules;
  for (const std::string& line : table_lines(text, origin)) {
    auto cols = split_tabs(line);
    if (cols.size() != 4)
      fail(origin, ": malformed rule line \"", line, "\" (need 4 columns)");
    PatternRule rule;
    rule.name = cols[0];
    for (const PatternRule& r : rules)
      if (r.name == rule.name) fail(origin, ": duplicate rule \"", r.name, "\"");
    if (cols[1] == "=" || cols[1] == "-") {
      rule.mask = std::nullopt;
    } else {
      auto mask = mask_from_string(cols[1]);
      if (!mask)
        fail(origin, ": rule \"", rule.name, "\" names unknown mask \"",
             cols[1], "\"");
      rule.mask = mask;
    }
    rule.icase = cols[2] == "i";
    if (!rule.icase && cols[2] != "-")
      fail(origin, ": rule \"", rule.name, "\" has unknown flags \"", cols[2],
           "\"");
    rule.pattern = cols[3] == "-" ? "" : cols[3];
    if (rule.name == "emoticon") {
      if (!rule.pattern.empty())
        fail(origin, ": emoticon rule takes its patterns from the lexicon");
    } else {
      if (rule.pattern.empty())
        fail(origin, ": rule \"", rule.name, "\" has no regex");
      auto flags = std::regex::ECMAScript | std::regex::optimize;
      if (rule.icase) flags |= std::regex::icase;
      try {
        rule.compiled = std::regex(rule.pattern, flags);
      } catch (const std::regex_error& e) {
        fail(origin, ": rule \"", rule.name, "\": bad regex: ", e.what());
      }
    }
    rules.push_back(std::move(rule));
  }
  if (rules.empty()) fail(origin, ": empty rule table");
  return rules;
}

std::map<std::string, std::string> load_slang_lexicon(const std::string& path) {
  return parse_slang_lexicon(read_file(path), path);
}
std::map<std::string, MaskTag> load_emoticon_lexicon(const std::string& path) {
  return parse_emoticon_lexicon(read_file(path), path);
}
std::vector<PatternRule> load_rule_table(const std::string& path) {
  return parse_rule_table(read_file(path), path);
}

std::uint64_t NormalizerConfig::fingerprint() const {
  std::string canon;
  canon += "lowercase_policy=";
  canon += lowercase_policy == LowercasePolicy::Preserve ? "preserve"
           : lowercase_policy == LowercasePolicy::LowercaseAll
               ? "lowercase_all"
               : "lowercase_modified_only";
  canon += "\npunct_policy=";
  canon += punct_policy == PunctPolicy::DropQuoted ? "drop_quoted"
           : punct_policy == PunctPolicy::KeepAll ? "keep_all"
                                                  : "drop_all";
  canon += "\n";
  for (const auto& [k, v] : slang_lexicon) canon += "s:" + k + "\t" + v + "\n";
  for (const auto& [k, v] : emoticon_lexicon)
    canon += concat("e:", k, "\t", mask_string(v), "\n");
  for (const PatternRule& r : rules)
    canon += concat("r:", r.name, "\t",
                    r.mask ? mask_string(*r.mask) : "-", "\t",
                    r.icase ? "i" : "-", "\t", r.pattern, "\n");
  return fnv1a64(canon);
}

const NormalizerConfig& default_config() {
  static const NormalizerConfig cfg = [] {
    NormalizerConfig c;
    c.slang_lexicon = parse_slang_lexicon(kDefaultSlang, "<builtin slang>");
    c.emoticon_lexicon =
        parse_emoticon_lexicon(kDefaultEmoticons, "<builtin emoticons>");
    c.rules = parse_rule_table(kDefaultRules, "<builtin rules>");
    return c;
  }();
  return cfg;
}

const std::string& default_table_text(const std::string& which) {
  static const std::string slang = kDefaultSlang;
  static const std::string emoticons = kDefaultEmoticons;
  static const std::string rules = kDefaultRules;
  if (which == "slang") return slang;
  if (which == "emoticons") return emoticons;
  if (which == "rules") return rules;
  fail("unknown default table \"", which, "\"");
}

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

namespace {

struct Candidate {
  std::size_t len = 0;
  std::size_t priority = SIZE_MAX;  // lower wins ties
  enum class Kind { Rule, Emoticon, Blob, CliticSuffix, NumberTok } kind =
      Kind::Rule;
  const PatternRule* rule = nullptr;
  MaskTag emoticon_mask = MaskTag::EmNeutral;
  // For Blob: offset of the clitic split within [pos, pos+len), or npos.
  std::size_t split_at = std::string::npos;

  bool beats(const Candidate& other) const {
    if (len != other.len) return len > other.len;
    return priority < other.priority;
  }
};

// Cheap first-byte prefilter per rule name; skips regex probes that cannot
// match. Unknown rule names are probed at every position.
bool rule_plausible_at(const PatternRule& rule, char c) {
  if (rule.name == "mask") return c == '<';
  if (rule.name == "url") return c == 'h' || c == 'H' || c == 'w' || c == 'W';
  if (rule.name == "user") return c == '@';
  if (rule.name == "hashtag") return c == '#';
  if (rule.name == "date")
    return is_ascii_digit(c) ||
           std::string("jJfFmMaAsSoOnNdD").find(c) != std::string::npos;
  if (rule.name == "time" || rule.name == "percent") return is_ascii_digit(c);
  if (rule.name == "phone")
    return is_ascii_digit(c) || c == '+' || c == '(';
  if (rule.name == "money")
    return is_ascii_digit(c) || c == '$' ||
           static_cast<unsigned char>(c) == 0xE2 ||  // €
           static_cast<unsigned char>(c) == 0xC2;    // £
  if (rule.name == "censored")
    return c == '*' || is_ascii_digit(c) || (c >= 'a' && c <= 'z') ||
           (c >= 'A' && c <= 'Z');
  return true;
}

// Clitic suffixes recognized after an apostrophe, longest first. "n't" gets
// special treatment so "wouldn't" splits into "would" + "n't".
const std::array<const char*, 8> kClitics = {"re", "ll", "ve", "em",
                                             "m",  "s",  "d",  "t"};

// Returns the clitic length (not counting the apostrophe) if text[pos] is an
// apostrophe introducing a clitic suffix, else 0.
std::size_t clitic_at(const std::string& text, std::size_t pos) {
  if (pos >= text.size() || text[pos] != '\'') return 0;
  for (const char* sfx : kClitics) {
    std::size_t len = std::strlen(sfx);
    if (pos + 1 + len > text.size()) continue;
    bool match = true;
    for (std::size_t k = 0; k < len; ++k) {
      char a = text[pos + 1 + k];
      char b = sfx[k];
      if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
      if (a != b) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    std::size_t after = pos + 1 + len;
    if (after < text.size() &&
        (is_word_byte(text[after]) || text[after] == '\''))
      continue;
    return len;
  }
  return 0;
}

class Scanner {
 public:
  Scanner(const std::string& text, const NormalizerConfig& cfg)
      : text_(text), cfg_(cfg) {
    // Emoticon keys grouped by first byte, longest first.
    for (const auto& [key, mask] : cfg.emoticon_lexicon)
      by_first_[static_cast<unsigned char>(key[0])].push_back({key, mask});
    for (auto& [first, keys] : by_first_)
      std::stable_sort(keys.begin(), keys.end(),
                       [](const auto& a, const auto& b) {
                         return a.first.size() > b.first.size();
                       });
  }

  TokenStream run() {
    TokenStream out;
    const std::size_t n = text_.size();
    std::size_t pos = 0;
    while (pos < n) {
      if (is_space_byte(text_[pos])) {
        ++pos;
        continue;
      }
      Candidate best = best_candidate(pos);
      if (best.len > 0) {
        emit(out, pos, best);
        pos += best.len;
      } else {
        // Punctuation run: grows until whitespace or until any candidate
        // (entity, word, number) matches at the next byte. Angle brackets
        // stay single-character tokens so runs can never form accidental
        // mask-shaped strings like "<@>".
        std::size_t end = pos + 1;
        if (text_[pos] != '<' && text_[pos] != '>') {
          while (end < n && !is_space_byte(text_[end]) &&
                 !is_word_byte(text_[end]) && text_[end] != '<' &&
                 text_[end] != '>' && best_candidate(end).len == 0)
            ++end;
        }
        push(out, text_.substr(pos, end - pos), TokenKind::Punct, pos, end);
        pos = end;
      }
    }
    return out;
  }

 private:
  void push(TokenStream& out, std::string surface, TokenKind kind,
            std::size_t begin, std::size_t end,
            std::optional<MaskTag> entity = std::nullopt) {
    Token t;
    t.surface = std::move(surface);
    t.kind = kind;
    t.begin = static_cast<std::uint32_t>(begin);
    t.end = static_cast<std::uint32_t>(end);
    t.entity = entity;
    out.tokens.push_back(std::move(t));
  }

  Candidate best_candidate(std::size_t pos) {
    Candidate best;
    best.len = 0;
    const char c = text_[pos];
    for (std::size_t r = 0; r < cfg_.rules.size(); ++r) {
      const PatternRule& rule = cfg_.rules[r];
      Candidate cand;
      cand.priority = r;
      if (rule.name == "emoticon") {
        auto it = by_first_.find(static_cast<unsigned char>(c));
        if (it == by_first_.end()) continue;
        for (const auto& [key, mask] : it->second) {
          if (text_.compare(pos, key.size(), key) == 0) {
            cand.len = key.size();
            cand.kind = Candidate::Kind::Emoticon;
            cand.emoticon_mask = mask;
            break;  // keys are longest-first
          }
        }
      } else {
        if (!rule_plausible_at(rule, c)) continue;
        std::cmatch m;
        const char* begin = text_.data() + pos;
        const char* end = text_.data() + text_.size();
        if (std::regex_search(begin, end, m, rule.compiled,
                              std::regex_constants::match_continuous)) {
          cand.len = static_cast<std::size_t>(m.length(0));
          cand.kind = Candidate::Kind::Rule;
          cand.rule = &rule;
          if (rule.name == "url" && cand.len > 0)
            cand.len = extend_url(pos, cand.len);
        }
      }
      if (cand.len > 0 && cand.beats(best)) best = cand;
    }
    // Word/blob fallback.
    if (is_word_byte(c)) {
      Candidate cand = scan_blob(pos);
      if (cand.len > 0 && cand.beats(best)) best = cand;
      Candidate num = scan_number(pos);
      if (num.len > 0 && num.beats(best)) best = num;
    } else if (c == '\'') {
      std::size_t clen = clitic_at(text_, pos);
      if (clen > 0) {
        Candidate cand;
        cand.len = clen + 1;
        cand.priority = cfg_.rules.size() + 1;
        cand.kind = Candidate::Kind::CliticSuffix;
        if (cand.beats(best)) best = cand;
      }
    }
    return best;
  }

  // Broken-URL reassembly: forum text wraps URLs across spaces. A URL match
  // absorbs the following space-separated fragment when the current match
  // ends in '+' or the fragment starts with '.', repeatedly.
  std::size_t extend_url(std::size_t pos, std::size_t len) {
    const std::size_t n = text_.size();
    while (true) {
      std::size_t end = pos + len;
      if (end >= n || text_[end] != ' ') return len;
      std::size_t frag_begin = end + 1;
      std::size_t frag_end = frag_begin;
      while (frag_end < n && !is_space_byte(text_[frag_end]) &&
             kDroppedPunct.find(text_[frag_end]) == std::string::npos)
        ++frag_end;
      if (frag_end == frag_begin) return len;
      bool ends_plus = text_[end - 1] == '+';
      bool frag_dot = text_[frag_begin] == '.';
      if (!ends_plus && !frag_dot) return len;
      len = frag_end - pos;
    }
  }

  // Maximal run of word bytes with apostrophe handling: clitic suffixes split
  // the token ("I'm" -> "I" + "'m", "wouldn't" -> "would" + "n't"); other
  // internal apostrophes are absorbed ("o'clock").
  Candidate scan_blob(std::size_t pos) {
    const std::size_t n = text_.size();
    std::size_t j = pos;
    bool has_letter = false;
    std::size_t split = std::string::npos;
    while (j < n) {
      if (is_word_byte(text_[j])) {
        if (is_letter_byte(text_[j])) has_letter = true;
        ++j;
        continue;
      }
      if (text_[j] == '\'' && j > pos) {
        std::size_t clen = clitic_at(text_, j);
        if (clen > 0) {
          // "n't": split before the n when it isn't the whole prefix.
          if (clen == 1 && (text_[j + 1] == 't' || text_[j + 1] == 'T') &&
              (text_[j - 1] == 'n' || text_[j - 1] == 'N')) {
            split = (j - 1 > pos) ? j - 1 : std::string::npos;
          } else {
            split = j;
          }
          j += 1 + clen;
          break;
        }
        if (j + 1 < n && is_letter_byte(text_[j + 1])) {
          ++j;  // absorbed apostrophe
          continue;
        }
      }
      break;
    }
    Candidate cand;
    if (!has_letter) return cand;
    cand.len = j - pos;
    cand.priority = cfg_.rules.size();
    cand.kind = Candidate::Kind::Blob;
    cand.split_at = split;
    return cand;
  }

  // Digits with internal [.,]digit groups: "12,000", "3.14".
  Candidate scan_number(std::size_t pos) {
    const std::size_t n = text_.size();
    Candidate cand;
    if (!is_ascii_digit(text_[pos])) return cand;
    std::size_t j = pos;
    while (j < n && is_ascii_digit(text_[j])) ++j;
    while (j + 1 < n && (text_[j] == '.' || text_[j] == ',') &&
           is_ascii_digit(text_[j + 1])) {
      ++j;
      while (j < n && is_ascii_digit(text_[j])) ++j;
    }
    cand.len = j - pos;
    cand.priority = cfg_.rules.size() + 2;
    cand.kind = Candidate::Kind::NumberTok;
    return cand;
  }

  void emit(TokenStream& out, std::size_t pos, const Candidate& best) {
    const std::size_t end = pos + best.len;
    switch (best.kind) {
      case Candidate::Kind::Rule: {
        const PatternRule& rule = *best.rule;
        if (rule.name == "mask") {
          auto mask = mask_from_string(text_.substr(pos, best.len));
          push(out, text_.substr(pos, best.len), TokenKind::Mask, pos, end,
               mask);
        } else {
          push(out, text_.substr(pos, best.len), TokenKind::Word, pos, end,
               rule.mask);
        }
        break;
      }
      case Candidate::Kind::Emoticon:
        push(out, text_.substr(pos, best.len), TokenKind::Word, pos, end,
             best.emoticon_mask);
        break;
      case Candidate::Kind::CliticSuffix:
        push(out, text_.substr(pos, best.len), TokenKind::Word, pos, end);
        break;
      case Candidate::Kind::NumberTok:
        push(out, text_.substr(pos, best.len), TokenKind::Number, pos, end);
        break;
      case Candidate::Kind::Blob: {
        if (best.split_at == std::string::npos) {
          push(out, text_.substr(pos, best.len), TokenKind::Word, pos, end);
        } else {
          push(out, text_.substr(pos, best.split_at - pos), TokenKind::Word,
               pos, best.split_at);
          push(out, text_.substr(best.split_at, end - best.split_at),
               TokenKind::Word, best.split_at, end);
        }
        break;
      }
    }
  }

  const std::string& text_;
  const NormalizerConfig& cfg_;
  std::map<unsigned char, std::vector<std::pair<std::string, MaskTag>>>
      by_first_;
};

}  // namespace

TokenStream tokenize(const std::string& text, const NormalizerConfig& cfg) {
  return Scanner(text, cfg).run();
}

TokenStream tokenize(const std::string& text) {
  return tokenize(text, default_config());
}

std::vector<std::string> segment_word(const std::string& w) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < w.size()) {
    if (!is_letter_byte(w[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < w.size() && is_letter_byte(w[j])) ++j;
    out.push_back(ascii_lower(std::string_view(w).substr(i, j - i)));
    i = j;
  }
  if (out.empty())
    fail("segment_word: no letters in \"", w, "\"");
  return out;
}

namespace {

bool contains_dropped_punct(const std::string& s) {
  return s.find_first_of(kDroppedPunct) != std::string::npos;
}

bool has_digit_or_underscore(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return is_ascii_digit(c) || c == '_';
  });
}

// Letter runs of w, preserving case (the Preserve-policy variant of
// segment_word).
std::vector<std::string> letter_runs(const std::string& w) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < w.size()) {
    if (!is_letter_byte(w[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < w.size() && is_letter_byte(w[j])) ++j;
    out.push_back(w.substr(i, j - i));
    i = j;
  }
  return out;
}

void emit_word(TokenStream& out, const Token& src, std::string surface,
               const NormalizerConfig& cfg) {
  Token t;
  t.surface = cfg.lowercase_policy == LowercasePolicy::LowercaseAll
                  ? ascii_lower(surface)
                  : std::move(surface);
  t.kind = TokenKind::Word;
  t.begin = src.begin;
  t.end = src.end;
  out.tokens.push_back(std::move(t));
}

void emit_mask(TokenStream& out, const Token& src, MaskTag mask) {
  Token t;
  t.surface = mask_string(mask);
  t.kind = TokenKind::Mask;
  t.begin = src.begin;
  t.end = src.end;
  t.entity = mask;
  out.tokens.push_back(std::move(t));
}

}  // namespace

TokenStream normalize(const TokenStream& ts, const NormalizerConfig& cfg) {
  TokenStream out;
  for (const Token& t : ts.tokens) {
    if (t.kind == TokenKind::Mask) {
      out.tokens.push_back(t);
      continue;
    }
    if (t.entity) {
      if (*t.entity == MaskTag::Hashtag) {
        // Mask-and-unpack: "<hashtag>" followed by the segmented tag body.
        emit_mask(out, t, MaskTag::Hashtag);
        std::string body = t.surface.substr(1);
        auto frags = letter_runs(body);
        if (frags.empty()) {
          if (std::any_of(body.begin(), body.end(), is_ascii_digit))
            emit_mask(out, t, MaskTag::Number);
        } else {
          for (std::string& frag : frags) {
            if (cfg.lowercase_policy != LowercasePolicy::Preserve)
              frag = ascii_lower(frag);
            emit_word(out, t, std::move(frag), cfg);
          }
        }
      } else {
        emit_mask(out, t, *t.entity);
      }
      continue;
    }
    if (t.kind == TokenKind::Number) {
      emit_mask(out, t, MaskTag::Number);
      continue;
    }
    if (t.kind == TokenKind::Punct) {
      bool drop = false;
      switch (cfg.punct_policy) {
        case PunctPolicy::DropQuoted:
          drop = contains_dropped_punct(t.surface);
          break;
        case PunctPolicy::KeepAll: drop = false; break;
        case PunctPolicy::DropAll: drop = true; break;
      }
      if (!drop) out.tokens.push_back(t);
      continue;
    }
    // Word: slang lookup first, then segmentation of digit/underscore blobs.
    std::string lower = ascii_lower(t.surface);
    auto slang = cfg.slang_lexicon.find(lower);
    if (slang != cfg.slang_lexicon.end()) {
      // Replacement values may be multi-word ("dont" -> "do not").
      std::istringstream words(slang->second);
      std::string word;
      while (words >> word) emit_word(out, t, word, cfg);
      continue;
    }
    if (has_digit_or_underscore(t.surface)) {
      auto frags = letter_runs(t.surface);
      if (frags.empty()) {
        out.tokens.push_back(t);  // hand-built stream; nothing to segment
      } else {
        for (std::string& frag : frags) {
          if (cfg.lowercase_policy != LowercasePolicy::Preserve)
            frag = ascii_lower(frag);
          emit_word(out, t, std::move(frag), cfg);
        }
      }
      continue;
    }
    emit_word(out, t, t.surface, cfg);
  }
  return out;
}

std::string preprocess(const std::string& text, const NormalizerConfig& cfg) {
  TokenStream ts = normalize(tokenize(text, cfg), cfg);
  std::string out;
  for (std::size_t i = 0; i < ts.tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += ts.tokens[i].surface;
  }
  return out;
}

std::string preprocess(const std::string& text) {
  return preprocess(text, default_config());
}

}  // namespace suggest
