#pragma once

// Graphviz export of a page model: one node per page (annotated with its
// progress value, dashed when excluded), one edge per observed transition
// labeled with its probability. Output is fully deterministic.

#include <cstdio>
#include <string>

#include "navmine/model.hpp"

namespace navmine {

namespace detail {

inline bool dot_safe_id(const std::string& s) {
  if (s.empty()) return false;
  if (s[0] >= '0' && s[0] <= '9') return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

inline std::string dot_id(const std::string& s) {
  if (dot_safe_id(s)) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') quoted += '\\';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

inline std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace detail

inline std::string to_dot(const PageModel& model) {
  std::string out = "digraph task {\n  rankdir=LR;\n";

  for (const auto& page : model.transitions.pages()) {
    out += "  " + detail::dot_id(page.value()) + " [label=\"" + page.value();
    if (model.progress.contains(page))
      out += " (progress=" + detail::two_decimals(model.progress.at(page)) + ")";
    out += "\"";
    if (model.excluded.contains(page)) out += ", style=dashed";
    out += "];\n";
  }

  const auto& pages = model.transitions.pages();
  for (std::size_t i = 0; i < pages.size(); ++i) {
    for (std::size_t j = 0; j < pages.size(); ++j) {
      if (model.transitions.count(i, j) == 0) continue;
      out += "  " + detail::dot_id(pages[i].value()) + " -> " + detail::dot_id(pages[j].value()) +
             " [label=\"" + detail::two_decimals(model.transitions.prob(i, j)) + "\"];\n";
    }
  }
  out += "}\n";
  return out;
}

}  // namespace navmine
