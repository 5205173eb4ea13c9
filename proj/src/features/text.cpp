#include "patentlens/features/text.hpp"

#include <cstdio>

namespace patentlens::features {

namespace {

bool is_alnum(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }

template <class Emit>
void scan_tokens(std::string_view text, std::size_t max_tokens, Emit&& emit) {
  std::size_t emitted = 0;
  std::size_t i = 0;
  while (i < text.size() && emitted < max_tokens) {
    while (i < text.size() && !is_alnum(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && is_alnum(text[i])) ++i;
    if (i - start >= 2) {
      emit(text.substr(start, i - start));
      ++emitted;
    }
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, std::size_t max_tokens) {
  std::vector<std::string> out;
  scan_tokens(text, max_tokens, [&](std::string_view raw) {
    bool digits = true;
    std::string token(raw);
    for (char& c : token) {
      if (c < '0' || c > '9') digits = false;
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    out.push_back(digits ? std::string(kNumberToken) : std::move(token));
  });
  return out;
}

std::size_t count_tokens(std::string_view text, std::size_t max_tokens) {
  std::size_t n = 0;
  scan_tokens(text, max_tokens, [&](std::string_view) { ++n; });
  return n;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace patentlens::features
