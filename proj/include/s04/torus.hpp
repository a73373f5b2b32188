// Mapping-torus groups of four-punctured-sphere monodromies as finite
// presentations, their first homology via Smith normal form over exact
// integers, and the Thurston norm of the fibered class.
//
// The bundle group is the semidirect product F3 x| Z: generators x1, x2, x3
// of the fiber and a stable letter t, with relators t xi t^-1 phi(xi)^-1
// where phi is the induced fiber automorphism of the monodromy. Abelianized,
// H1 = Z (+) coker(A - I) with A the abelianized action, which the Smith
// form of the relator matrix computes in general.

#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "s04/errors.hpp"
#include "s04/fgroup.hpp"
#include "s04/presentation.hpp"

namespace s04::torus {

using boost::multiprecision::cpp_int;
using pres::GenWord;
using pres::GroupPresentation;

// Generators x1, x2, x3, t; fiber letters keep their free-group encoding.
inline GroupPresentation torus_presentation(const fgroup::FreeAutomorphism& phi) {
  std::vector<GenWord> relators;
  for (int i = 0; i < 3; ++i) {
    GenWord r;
    r.push_back(pres::gl_make(3, false));  // t
    r.push_back(pres::gl_make(i, false));  // xi
    r.push_back(pres::gl_make(3, true));   // t^-1
    fgroup::FreeWord image = phi.fwd[static_cast<std::size_t>(i)];
    for (auto it = image.rbegin(); it != image.rend(); ++it)
      r.push_back(fgroup::fl_inverse(*it));
    relators.push_back(std::move(r));
  }
  return pres::make_presentation({"x1", "x2", "x3", "t"}, std::move(relators));
}

inline GroupPresentation torus_presentation(const std::string& monodromy) {
  return torus_presentation(fgroup::induced_automorphism(monodromy));
}

// Exponent-sum matrix: one row per relator, one column per generator.
inline std::vector<std::vector<cpp_int>> abelianized_relator_matrix(
    const GroupPresentation& p) {
  std::vector<std::vector<cpp_int>> m(
      p.relators.size(), std::vector<cpp_int>(p.num_generators(), 0));
  for (std::size_t i = 0; i < p.relators.size(); ++i)
    for (pres::GLetter l : p.relators[i])
      m[i][static_cast<std::size_t>(pres::gl_generator(l))] += (l & 1) ? -1 : 1;
  return m;
}

// Nonzero diagonal of the Smith normal form (length = rank), positive, each
// entry dividing the next. Pivoting by minimal absolute value keeps
// intermediate entries tame; correctness does not depend on it.
inline std::vector<cpp_int> smith_normal_form(std::vector<std::vector<cpp_int>> m) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  const std::size_t steps = std::min(rows, cols);
  std::vector<cpp_int> diag;

  for (std::size_t t = 0; t < steps; ++t) {
    // Locate a minimal-magnitude nonzero pivot in the trailing submatrix.
    bool found = false;
    std::size_t pr = t, pc = t;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j)
        if (m[i][j] != 0 &&
            (!found || abs(m[i][j]) < abs(m[pr][pc]))) {
          pr = i;
          pc = j;
          found = true;
        }
    if (!found) break;
    std::swap(m[t], m[pr]);
    for (std::size_t i = 0; i < rows; ++i) std::swap(m[i][t], m[i][pc]);

    for (bool dirty = true; dirty;) {
      dirty = false;
      // Clear column t by division; a nonzero remainder becomes the new pivot.
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (m[i][t] == 0) continue;
        cpp_int q = m[i][t] / m[t][t];
        for (std::size_t j = t; j < cols; ++j) m[i][j] -= q * m[t][j];
        if (m[i][t] != 0) {
          std::swap(m[t], m[i]);
          dirty = true;
        }
      }
      // Same for row t.
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (m[t][j] == 0) continue;
        cpp_int q = m[t][j] / m[t][t];
        for (std::size_t i = 0; i < rows; ++i) m[i][j] -= q * m[i][t];
        if (m[t][j] != 0) {
          for (std::size_t i = 0; i < rows; ++i) std::swap(m[i][t], m[i][j]);
          dirty = true;
        }
      }
      if (dirty) continue;
      // Pivot must divide the rest of the submatrix for the divisibility
      // chain; fold an offending row into row t and re-eliminate.
      for (std::size_t i = t + 1; i < rows && !dirty; ++i)
        for (std::size_t j = t + 1; j < cols && !dirty; ++j)
          if (m[i][j] % m[t][t] != 0) {
            for (std::size_t c = t; c < cols; ++c) m[t][c] += m[i][c];
            dirty = true;
          }
    }
    diag.push_back(abs(m[t][t]));
  }

  // Belt-and-suspenders: enforce the divisibility chain pairwise.
  for (std::size_t i = 0; i < diag.size(); ++i)
    for (std::size_t j = i + 1; j < diag.size(); ++j)
      if (diag[j] % diag[i] != 0) {
        cpp_int g = gcd(diag[i], diag[j]);
        cpp_int l = diag[i] / g * diag[j];
        diag[i] = g;
        diag[j] = l;
      }
  return diag;
}

struct AbelianInvariants {
  long long free_rank = 0;
  std::vector<cpp_int> torsion;  // entries >= 2, each dividing the next

  bool operator==(const AbelianInvariants& o) const = default;
};

inline AbelianInvariants torus_homology(const GroupPresentation& p) {
  std::vector<cpp_int> diag = smith_normal_form(abelianized_relator_matrix(p));
  AbelianInvariants inv;
  std::size_t nonzero = 0;
  for (const cpp_int& d : diag) {
    if (d == 0) continue;
    ++nonzero;
    if (d > 1) inv.torsion.push_back(d);
  }
  inv.free_rank = static_cast<long long>(p.num_generators() - nonzero);
  return inv;
}

// `Z^r + Z/c1 + ...`; the trivial group prints as `1`.
inline std::string to_string(const AbelianInvariants& inv) {
  std::string out;
  if (inv.free_rank == 1) out = "Z";
  else if (inv.free_rank > 1) out = "Z^" + std::to_string(inv.free_rank);
  for (const cpp_int& c : inv.torsion) {
    if (!out.empty()) out += " + ";
    out += "Z/" + c.str();
  }
  return out.empty() ? "1" : out;
}

// Thurston norm of the fibered class: -chi of the fiber, a four-punctured
// sphere (genus 0, 4 punctures).
inline int fibered_thurston_norm() {
  constexpr int genus = 0, punctures = 4;
  return -(2 - 2 * genus - punctures);
}

}  // namespace s04::torus
