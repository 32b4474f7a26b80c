#include "hcmc/srt.hpp"

#include <charconv>
#include <cstdio>
#include <regex>

namespace hcmc {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::int64_t to_ms(const std::smatch& m, std::size_t first) {
  auto num = [&](std::size_t i) { return std::stoll(m[first + i].str()); };
  return ((num(0) * 60 + num(1)) * 60 + num(2)) * 1000 + num(3);
}

}  // namespace

SrtDocument parse_srt(std::string_view raw) {
  if (raw.starts_with("\xEF\xBB\xBF")) raw.remove_prefix(3);
  std::string text;
  text.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\r') {
      text += '\n';
      if (i + 1 < raw.size() && raw[i + 1] == '\n') ++i;
    } else {
      text += raw[i];
    }
  }

  static const std::regex timing(
      R"(^(\d+):([0-5]\d):([0-5]\d)[,.](\d{3})[ \t]*-->[ \t]*(\d+):([0-5]\d):([0-5]\d)[,.](\d{3})(?:[ \t].*)?$)");

  SrtDocument doc;
  std::vector<std::string_view> block;
  std::size_t block_no = 0;
  auto flush = [&] {
    if (block.empty()) return;
    ++block_no;
    int index = 0;
    const auto idx = trim(block[0]);
    const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), index);
    if (ec != std::errc() || ptr != idx.data() + idx.size() || index < 1) {
      throw SrtParseError(block_no, "bad cue index '" + std::string(idx) + "'");
    }
    if (block.size() < 2) throw SrtParseError(block_no, "missing timing line");
    const std::string time_line(trim(block[1]));
    std::smatch m;
    if (!std::regex_match(time_line, m, timing)) {
      throw SrtParseError(block_no, "malformed timestamp '" + time_line + "'");
    }
    SrtCue cue{index, to_ms(m, 1), to_ms(m, 5), {}};
    if (cue.end_ms < cue.start_ms) throw SrtParseError(block_no, "end before start");
    if (cue.end_ms == cue.start_ms) throw SrtParseError(block_no, "zero-length cue");
    if (block.size() < 3) throw SrtParseError(block_no, "missing cue text");
    for (std::size_t i = 2; i < block.size(); ++i) {
      const auto line = trim(block[i]);
      if (line.empty()) continue;
      if (!cue.text.empty()) cue.text += ' ';
      cue.text += line;
    }
    if (!doc.cues.empty() && cue.start_ms < doc.cues.back().end_ms) {
      doc.warnings.push_back("cue " + std::to_string(cue.index) + " overlaps cue " +
                             std::to_string(doc.cues.back().index));
    }
    doc.cues.push_back(std::move(cue));
    block.clear();
  };

  for (auto line : split_lines(text)) {
    if (trim(line).empty()) {
      flush();
    } else {
      block.push_back(line);
    }
  }
  flush();
  return doc;
}

std::string format_srt_time(std::int64_t ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld,%03lld", static_cast<long long>(ms / 3600000),
                static_cast<long long>(ms / 60000 % 60), static_cast<long long>(ms / 1000 % 60),
                static_cast<long long>(ms % 1000));
  return buf;
}

std::string serialize_srt(std::span<const SrtCue> cues) {
  std::string out;
  for (const auto& c : cues) {
    out += std::to_string(c.index) + "\n" + format_srt_time(c.start_ms) + " --> " + format_srt_time(c.end_ms) +
           "\n" + c.text + "\n\n";
  }
  return out;
}

}  // namespace hcmc
