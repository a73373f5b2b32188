// Error types shared by all s04 modules.
//
// parse_error:  malformed textual input (words, catalog lines, presentations).
// domain_error: precondition violation (e.g. asking for the primitive root of
//               a finite-order element).
// budget_error: a configured resource budget (node count, class count, wall
//               clock) was exhausted before the computation finished.

#pragma once

#include <stdexcept>
#include <string>

namespace s04 {

struct parse_error : std::runtime_error {
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

struct budget_error : std::runtime_error {
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace s04
