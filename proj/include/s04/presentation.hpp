// Finite group presentations: named generators and freely reduced relator
// words. Words reuse the rank encoding of the free-group module (letter l
// denotes generator l>>1, inverted when l&1), extended to any number of
// generators.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "s04/errors.hpp"

namespace s04::pres {

using GLetter = std::uint8_t;
using GenWord = std::vector<GLetter>;

inline GLetter gl_inverse(GLetter l) { return l ^ 1; }
inline int gl_generator(GLetter l) { return l >> 1; }
inline GLetter gl_make(int generator, bool inverse) {
  return static_cast<GLetter>(2 * generator + (inverse ? 1 : 0));
}

inline GenWord reduce(const GenWord& w) {
  GenWord out;
  out.reserve(w.size());
  for (GLetter l : w) {
    if (!out.empty() && out.back() == gl_inverse(l)) out.pop_back();
    else out.push_back(l);
  }
  return out;
}

inline GenWord invert(const GenWord& w) {
  GenWord out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(gl_inverse(*it));
  return out;
}

struct GroupPresentation {
  std::vector<std::string> generator_names;
  std::vector<GenWord> relators;  // freely reduced

  std::size_t num_generators() const { return generator_names.size(); }
};

inline GroupPresentation make_presentation(std::vector<std::string> names,
                                           std::vector<GenWord> relators) {
  if (names.empty()) throw domain_error("presentation: generator set is empty");
  GroupPresentation p{std::move(names), {}};
  p.relators.reserve(relators.size());
  for (auto& r : relators) {
    GenWord red = reduce(r);
    for (GLetter l : red)
      if (static_cast<std::size_t>(gl_generator(l)) >= p.generator_names.size())
        throw domain_error("presentation: relator uses an unknown generator");
    p.relators.push_back(std::move(red));
  }
  return p;
}

// Run-length text form of a relator, e.g. "t x1 t^-1 x2^-1".
inline std::string to_string(const GenWord& w, const std::vector<std::string>& names) {
  if (w.empty()) return "1";
  std::string out;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    long long run = static_cast<long long>(j - i);
    if (!out.empty()) out += ' ';
    out += names[static_cast<std::size_t>(gl_generator(w[i]))];
    long long e = (w[i] & 1) ? -run : run;
    if (e != 1) out += "^" + std::to_string(e);
    i = j;
  }
  return out;
}

// `< x1, x2, x3, t | r1, r2, r3 >`
inline std::string to_string(const GroupPresentation& p) {
  std::string out = "< ";
  for (std::size_t i = 0; i < p.generator_names.size(); ++i) {
    if (i) out += ", ";
    out += p.generator_names[i];
  }
  out += " | ";
  for (std::size_t i = 0; i < p.relators.size(); ++i) {
    if (i) out += ", ";
    out += to_string(p.relators[i], p.generator_names);
  }
  out += " >";
  return out;
}

}  // namespace s04::pres
