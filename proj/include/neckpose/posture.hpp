#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "neckpose/error.hpp"

namespace neckpose {

/// The nine static neck postures. The enumerator order is the class index
/// order used by the classifier, including its tie-breaking.
enum class PostureLabel : std::uint8_t { NU, ND, NR, NL, NRU, NRD, NLU, NLD, NM };

inline constexpr std::size_t kPostureCount = 9;

inline constexpr std::array<PostureLabel, kPostureCount> kAllPostures = {
    PostureLabel::NU,  PostureLabel::ND,  PostureLabel::NR,  PostureLabel::NL, PostureLabel::NRU,
    PostureLabel::NRD, PostureLabel::NLU, PostureLabel::NLD, PostureLabel::NM};

constexpr std::size_t index_of(PostureLabel p) noexcept { return static_cast<std::size_t>(p); }

constexpr PostureLabel posture_at(std::size_t index) {
  if (index >= kPostureCount) throw DomainError("posture index out of range");
  return kAllPostures[index];
}

constexpr std::string_view to_string(PostureLabel p) noexcept {
  constexpr std::array<std::string_view, kPostureCount> names = {"NU",  "ND",  "NR",  "NL", "NRU",
                                                                 "NRD", "NLU", "NLD", "NM"};
  return names[index_of(p)];
}

inline std::optional<PostureLabel> try_parse_posture(std::string_view s) {
  for (auto p : kAllPostures)
    if (to_string(p) == s) return p;
  return std::nullopt;
}

inline PostureLabel parse_posture(std::string_view s) {
  if (auto p = try_parse_posture(s)) return *p;
  throw FormatError("unknown posture label '" + std::string(s) + "'");
}

/// Left/right counterpart; NU, ND and NM map to themselves.
constexpr PostureLabel mirror(PostureLabel p) noexcept {
  switch (p) {
    case PostureLabel::NR: return PostureLabel::NL;
    case PostureLabel::NL: return PostureLabel::NR;
    case PostureLabel::NRU: return PostureLabel::NLU;
    case PostureLabel::NLU: return PostureLabel::NRU;
    case PostureLabel::NRD: return PostureLabel::NLD;
    case PostureLabel::NLD: return PostureLabel::NRD;
    default: return p;
  }
}

inline std::array<std::string, kPostureCount> posture_names() {
  std::array<std::string, kPostureCount> out;
  for (std::size_t i = 0; i < kPostureCount; ++i) out[i] = std::string(to_string(kAllPostures[i]));
  return out;
}

}  // namespace neckpose
