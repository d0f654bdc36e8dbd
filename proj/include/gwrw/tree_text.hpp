#pragma once

// Line-oriented text format shared by environments and truncations:
//
//   # gwrw-tree key=value key=value ...
//   id parent_id generation conductance
//   ...
//
// The virtual ancestor (id 0, generation -1) is implicit. Rows list the root
// first and then every other vertex; conductance is that of the edge to the
// parent, in shortest round-trip decimal form.

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gwrw/format.hpp"

namespace gwrw {

using NodeId = std::uint32_t;

struct TreeTextRow {
  NodeId id;
  NodeId parent;
  std::int32_t generation;
  double conductance;
};

struct TreeText {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<TreeTextRow> rows;

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : header) {
      if (k == key) return &v;
    }
    return nullptr;
  }
};

inline constexpr std::string_view kTreeTextMagic = "# gwrw-tree";

inline void write_tree_text(std::ostream& os, const TreeText& text) {
  os << kTreeTextMagic;
  for (const auto& [k, v] : text.header) os << ' ' << k << '=' << v;
  os << '\n';
  for (const auto& r : text.rows) {
    os << r.id << ' ' << r.parent << ' ' << r.generation << ' ' << format_double(r.conductance) << '\n';
  }
}

inline TreeText read_tree_text(std::istream& is) {
  TreeText text;
  std::string line;
  if (!std::getline(is, line) || line.rfind(kTreeTextMagic, 0) != 0) {
    throw std::invalid_argument("tree file must start with '" + std::string(kTreeTextMagic) + "'");
  }
  {
    std::istringstream fields(line.substr(kTreeTextMagic.size()));
    std::string field;
    while (fields >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("malformed header field '" + field + "'");
      text.header.emplace_back(field.substr(0, eq), field.substr(eq + 1));
    }
  }
  std::size_t line_number = 1;
  while (std::getline(is, line)) {
    ++line_number;
    if (trim(line).empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string id, parent, generation, conductance, extra;
    fields >> id >> parent >> generation >> conductance;
    const auto id_value = parse_integer<NodeId>(id);
    const auto parent_value = parse_integer<NodeId>(parent);
    const auto generation_value = parse_integer<std::int32_t>(generation);
    const auto conductance_value = parse_double(conductance);
    if (!id_value || !parent_value || !generation_value || !conductance_value || (fields >> extra)) {
      throw std::invalid_argument("line " + std::to_string(line_number) + ": expected 'id parent_id generation conductance'");
    }
    text.rows.push_back({*id_value, *parent_value, *generation_value, *conductance_value});
  }
  return text;
}

}  // namespace gwrw
