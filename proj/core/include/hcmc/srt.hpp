#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hcmc {

struct SrtCue {
  int index = 1;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::string text;  // lines joined with single spaces

  bool operator==(const SrtCue&) const = default;
};

struct SrtDocument {
  std::vector<SrtCue> cues;  // file order
  std::vector<std::string> warnings;
};

/// Malformed block; block() is the 1-based block number in the file.
class SrtParseError : public std::runtime_error {
 public:
  SrtParseError(std::size_t block, const std::string& what)
      : std::runtime_error("srt block " + std::to_string(block) + ": " + what), block_(block) {}

  std::size_t block() const { return block_; }

 private:
  std::size_t block_;
};

/// Accepts a UTF-8 BOM, CRLF line endings, '.' or ',' before milliseconds and
/// trailing blank lines. Overlapping cues are kept and reported as warnings.
SrtDocument parse_srt(std::string_view text);

/// "index\nHH:MM:SS,mmm --> HH:MM:SS,mmm\ntext\n\n" per cue.
std::string serialize_srt(std::span<const SrtCue> cues);

std::string format_srt_time(std::int64_t ms);

}  // namespace hcmc
