#include "hcmc/utterance.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <regex>

namespace hcmc {

namespace {

// ASCII base letters for U+00C0..U+00FF; empty entries are not letters.
constexpr const char* kLatin1[64] = {
    "A", "A", "A", "A", "A", "A", "AE", "C", "E", "E", "E", "E", "I", "I", "I", "I",
    "D", "N", "O", "O", "O", "O", "O", "",  "O", "U", "U", "U", "U", "Y", "TH", "ss",
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o", "",  "o", "u", "u", "u", "u", "y", "th", "y",
};

// Upper-case bases of case pairs in U+0100..U+017F, by run.
constexpr const char* kExtA_even1[28] = {"A", "A", "A", "C", "C", "C", "C", "D", "D", "E", "E", "E", "E", "E",
                                         "G", "G", "G", "G", "H", "H", "I", "I", "I", "I", "I", "IJ", "J", "K"};
constexpr const char* kExtA_odd1[8] = {"L", "L", "L", "L", "L", "N", "N", "N"};
constexpr const char* kExtA_even2[23] = {"N", "O", "O", "O", "OE", "R", "R", "R", "S", "S", "S", "S",
                                         "T", "T", "T", "U", "U", "U", "U", "U", "U", "W", "Y"};
constexpr const char* kExtA_odd2[3] = {"Z", "Z", "Z"};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string cased(const char* base, bool upper) { return upper ? std::string(base) : lower(base); }

// Replacement for a code point, or nullopt to keep it as is.
std::optional<std::string> fold(char32_t cp) {
  if (cp >= 0x300 && cp <= 0x36F) return std::string();
  if (cp == 0xA0) return std::string(" ");
  if (cp >= 0xC0 && cp <= 0xFF) {
    const char* base = kLatin1[cp - 0xC0];
    if (*base == '\0') return std::nullopt;
    return std::string(base);
  }
  if (cp >= 0x100 && cp <= 0x137) return cased(kExtA_even1[(cp - 0x100) / 2], cp % 2 == 0);
  if (cp == 0x138) return std::string("k");
  if (cp >= 0x139 && cp <= 0x148) return cased(kExtA_odd1[(cp - 0x139) / 2], cp % 2 == 1);
  if (cp == 0x149) return std::string("n");
  if (cp >= 0x14A && cp <= 0x177) return cased(kExtA_even2[(cp - 0x14A) / 2], cp % 2 == 0);
  if (cp == 0x178) return std::string("Y");
  if (cp >= 0x179 && cp <= 0x17E) return cased(kExtA_odd2[(cp - 0x179) / 2], cp % 2 == 1);
  if (cp == 0x17F) return std::string("s");
  return std::nullopt;
}

// Decodes one UTF-8 sequence at `i`; returns its length, or 0 if malformed.
std::size_t decode(std::string_view s, std::size_t i, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 0;
  if (len == 0 || i + len > s.size()) return 0;
  cp = len == 1 ? b0 : len == 2 ? (b0 & 0x1F) : len == 3 ? (b0 & 0x0F) : (b0 & 0x07);
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b >> 6) != 0x2) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  return len;
}

const std::string kNotes[] = {"\xE2\x99\xAA", "\xE2\x99\xAB"};  // ♪ ♫

// Removes text between pairs of music notes, and after an unpaired final note.
std::string strip_music(const std::string& s) {
  std::string out;
  bool in_song = false;
  for (std::size_t i = 0; i < s.size();) {
    bool note = false;
    for (const auto& n : kNotes) {
      if (s.compare(i, n.size(), n) == 0) {
        note = true;
        i += n.size();
        break;
      }
    }
    if (note) {
      in_song = !in_song;
      out += ' ';
      continue;
    }
    if (!in_song) out += s[i];
    ++i;
  }
  return out;
}

}  // namespace

std::string fold_diacritics(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  for (std::size_t i = 0; i < utf8.size();) {
    char32_t cp = 0;
    const std::size_t len = decode(utf8, i, cp);
    if (len == 0) {
      out += utf8[i++];
      continue;
    }
    if (auto r = fold(cp)) {
      out += *r;
    } else {
      out.append(utf8.substr(i, len));
    }
    i += len;
  }
  return out;
}

std::optional<std::string> normalize_utterance(std::string_view text) {
  static const std::regex markup(R"(<[^>]*>|\{\\[^}]*\})");
  static const std::regex sound(R"(\[[^\]]*\]|\([^)]*\))");
  static const std::regex speaker(R"(^\s*-?\s*[A-Z][A-Z0-9 .'-]*[A-Z0-9]\s*:)");
  static const std::regex spaces(R"(\s+)");

  std::string s = fold_diacritics(text);
  s = std::regex_replace(s, markup, " ");
  s = strip_music(s);
  s = std::regex_replace(s, sound, " ");
  s = std::regex_replace(s, speaker, " ", std::regex_constants::format_first_only);
  s = std::regex_replace(s, spaces, " ");
  const auto b = s.find_first_not_of(' ');
  if (b == std::string::npos) return std::nullopt;
  s = s.substr(b, s.find_last_not_of(' ') - b + 1);
  if (std::none_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c >= 0x80; })) {
    return std::nullopt;
  }
  return s;
}

}  // namespace hcmc
