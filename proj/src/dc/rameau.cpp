#include "alp/dc_metadata.hpp"
#include "alp/textnorm.hpp"

namespace alp::dc {

RameauHeading parse_rameau(std::string_view raw) {
  // The delimiter is "--" standing alone between spaces (" -- "); a "--" at
  // either end of the string next to a space counts too, so "Peinture --"
  // reports its empty last subdivision. Hyphens inside words are untouched.
  auto is_space = [](char c) { return c == ' ' || c == '\t'; };
  std::vector<std::string> segments;
  std::size_t start = 0;
  for (std::size_t pos = raw.find("--"); pos != std::string_view::npos;
       pos = raw.find("--", pos + 1)) {
    const bool left = pos == 0 || is_space(raw[pos - 1]);
    const bool right = pos + 2 == raw.size() || is_space(raw[pos + 2]);
    if (!left || !right || pos < start) continue;
    segments.push_back(textnorm::trim(raw.substr(start, pos - start)));
    start = pos + 2;
  }
  segments.push_back(textnorm::trim(raw.substr(start)));
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].empty()) {
      throw RameauParseError(i == 0 ? "empty heading" : "empty subdivision at segment " +
                                                            std::to_string(i),
                             i);
    }
  }
  RameauHeading heading;
  heading.head = std::move(segments.front());
  heading.subdivisions.assign(std::make_move_iterator(segments.begin() + 1),
                              std::make_move_iterator(segments.end()));
  return heading;
}

std::string serialize_rameau(const RameauHeading& heading) {
  std::string out = heading.head;
  for (const auto& s : heading.subdivisions) {
    out += " -- ";
    out += s;
  }
  return out;
}

}  // namespace alp::dc
