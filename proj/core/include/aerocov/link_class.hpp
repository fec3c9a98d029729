#pragma once

#include <string_view>

namespace aerocov {

/// Propagation condition of a single air-to-ground link.
enum class LinkClass { los, nlos };

inline constexpr LinkClass kLinkClasses[] = {LinkClass::los, LinkClass::nlos};

constexpr std::string_view to_string(LinkClass link) {
  return link == LinkClass::los ? "LoS" : "NLoS";
}

constexpr LinkClass other(LinkClass link) {
  return link == LinkClass::los ? LinkClass::nlos : LinkClass::los;
}

}  // namespace aerocov
