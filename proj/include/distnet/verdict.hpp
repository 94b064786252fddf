#pragma once

#include <string>
#include <vector>

namespace distnet {

// Three-valued analysis outcome. Truncated explorations report Unknown rather
// than pretending to a definite answer.
enum class Truth { Yes, No, Unknown };

inline const char* to_string(Truth t) {
  switch (t) {
    case Truth::Yes: return "yes";
    case Truth::No: return "no";
    case Truth::Unknown: return "unknown";
  }
  return "?";
}

struct Verdict {
  Truth truth = Truth::Unknown;
  std::string detail;                // human-readable reason
  std::vector<std::string> witness;  // element ids involved, if any

  static Verdict yes(std::string detail = "") { return {Truth::Yes, std::move(detail), {}}; }
  static Verdict no(std::string detail, std::vector<std::string> witness = {}) {
    return {Truth::No, std::move(detail), std::move(witness)};
  }
  static Verdict unknown(std::string detail) { return {Truth::Unknown, std::move(detail), {}}; }

  explicit operator bool() const { return truth == Truth::Yes; }
};

}  // namespace distnet
