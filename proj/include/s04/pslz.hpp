// Exact word arithmetic in PSL(2,Z) presented as the free product C2 * C3.
//
// Conventions fixed for the whole library:
//   s   generator of the C2 factor, matrix realization [[0,-1],[1,0]]
//   r   generator of the C3 factor, matrix realization [[0,-1],[1,1]]
//   R   shorthand for r^2 in the textual syntax; the empty word prints as 1.
// A word is a syllable sequence; the canonical form is the unique alternating
// sequence with no trivial syllable (free product normal form). Conjugacy is
// decided on cyclically reduced cores: infinite-order classes are cyclic
// rotations, finite-order classes live inside a factor. All witnesses are
// verified by multiplication before they are returned.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "s04/errors.hpp"

namespace s04::pslz {

using boost::multiprecision::cpp_int;

enum class Syl : std::uint8_t { S = 0, R = 1, RR = 2 };

// 0 = order-two factor, 1 = order-three factor.
inline int factor_of(Syl x) { return x == Syl::S ? 0 : 1; }

inline Syl syl_inverse(Syl x) {
  switch (x) {
    case Syl::S: return Syl::S;
    case Syl::R: return Syl::RR;
    default: return Syl::R;
  }
}

// Merge two syllables of the same factor; 0 exponent encodes the identity.
inline std::optional<Syl> syl_merge(Syl a, Syl b) {
  if (factor_of(a) == 0) return std::nullopt;  // s*s = 1
  int e = (a == Syl::R ? 1 : 2) + (b == Syl::R ? 1 : 2);
  e %= 3;
  if (e == 0) return std::nullopt;
  return e == 1 ? Syl::R : Syl::RR;
}

struct PslWord {
  std::vector<Syl> syls;

  bool operator==(const PslWord& o) const = default;
};

inline PslWord identity_word() { return PslWord{}; }

inline PslWord canonicalize(const PslWord& w) {
  std::vector<Syl> out;
  out.reserve(w.syls.size());
  for (Syl x : w.syls) {
    while (true) {
      if (out.empty() || factor_of(out.back()) != factor_of(x)) {
        out.push_back(x);
        break;
      }
      auto merged = syl_merge(out.back(), x);
      out.pop_back();
      if (!merged) break;  // annihilated
      x = *merged;         // re-test merged syllable against the new top
    }
  }
  return PslWord{std::move(out)};
}

inline PslWord multiply(const PslWord& a, const PslWord& b) {
  PslWord raw;
  raw.syls.reserve(a.syls.size() + b.syls.size());
  raw.syls.insert(raw.syls.end(), a.syls.begin(), a.syls.end());
  raw.syls.insert(raw.syls.end(), b.syls.begin(), b.syls.end());
  return canonicalize(raw);
}

inline PslWord invert(const PslWord& w) {
  PslWord raw;
  raw.syls.reserve(w.syls.size());
  for (auto it = w.syls.rbegin(); it != w.syls.rend(); ++it)
    raw.syls.push_back(syl_inverse(*it));
  return canonicalize(raw);
}

inline PslWord power(const PslWord& w, long long n) {
  PslWord base = n < 0 ? invert(canonicalize(w)) : canonicalize(w);
  unsigned long long k = n < 0 ? static_cast<unsigned long long>(-(n + 1)) + 1
                               : static_cast<unsigned long long>(n);
  PslWord acc = identity_word();
  while (k) {
    if (k & 1) acc = multiply(acc, base);
    base = multiply(base, base);
    k >>= 1;
  }
  return acc;
}

inline bool equal(const PslWord& a, const PslWord& b) {
  return canonicalize(a).syls == canonicalize(b).syls;
}

// ----- matrix realization -------------------------------------------------

struct Mat2 {
  cpp_int a, b, c, d;

  // Sign-normalize so that +M and -M compare equal (projective equality).
  void proj_normalize() {
    const cpp_int* p = &a;
    if (a == 0) p = b != 0 ? &b : (c != 0 ? &c : &d);
    if (*p < 0) { a = -a; b = -b; c = -c; d = -d; }
  }

  bool operator==(const Mat2& o) const = default;
};

inline Mat2 mat_mul(const Mat2& x, const Mat2& y) {
  return Mat2{x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
              x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

inline Mat2 to_matrix(const PslWord& w) {
  static const Mat2 kS{0, -1, 1, 0};
  static const Mat2 kR{0, -1, 1, 1};
  static const Mat2 kRR{-1, -1, 1, 0};  // r^2
  Mat2 m{1, 0, 0, 1};
  for (Syl x : w.syls)
    m = mat_mul(m, x == Syl::S ? kS : (x == Syl::R ? kR : kRR));
  m.proj_normalize();
  return m;
}

inline cpp_int trace_abs(const PslWord& w) {
  Mat2 m = to_matrix(w);
  cpp_int t = m.a + m.d;
  return t < 0 ? -t : t;
}

// ----- cyclic forms and conjugacy ------------------------------------------

// w = conj * core * conj^-1 with core cyclically reduced (first and last
// syllables in different factors, or length <= 1).
struct CyclicForm {
  PslWord core;
  PslWord conj;
};

inline CyclicForm cyclic_reduce(const PslWord& w0) {
  PslWord w = canonicalize(w0);
  std::vector<Syl> core = w.syls;
  std::vector<Syl> conj;
  while (core.size() >= 2 && factor_of(core.front()) == factor_of(core.back())) {
    Syl first = core.front();
    Syl last = core.back();
    conj.push_back(first);
    core.erase(core.begin());
    core.pop_back();
    if (auto merged = syl_merge(last, first)) core.push_back(*merged);
  }
  return CyclicForm{PslWord{std::move(core)}, PslWord{std::move(conj)}};
}

inline std::vector<Syl> rotate_left(const std::vector<Syl>& v, std::size_t t) {
  std::vector<Syl> out;
  out.reserve(v.size());
  out.insert(out.end(), v.begin() + static_cast<std::ptrdiff_t>(t), v.end());
  out.insert(out.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(t));
  return out;
}

// Lexicographically least rotation of the cyclically reduced core; canonical
// representative of the conjugacy class for infinite-order elements.
inline PslWord canonical_cyclic(const PslWord& w) {
  CyclicForm cf = cyclic_reduce(w);
  const auto& v = cf.core.syls;
  if (v.size() <= 1) return cf.core;
  std::vector<Syl> best = v;
  for (std::size_t t = 1; t < v.size(); ++t) {
    auto rot = rotate_left(v, t);
    if (rot < best) best = rot;
  }
  return PslWord{std::move(best)};
}

// Witness k with k * u * k^-1 = v, if one exists.
inline std::optional<PslWord> conjugator(const PslWord& u0, const PslWord& v0) {
  PslWord u = canonicalize(u0), v = canonicalize(v0);
  CyclicForm cu = cyclic_reduce(u), cv = cyclic_reduce(v);
  if (cu.core.syls.size() != cv.core.syls.size()) return std::nullopt;

  auto finish = [&](const PslWord& mid) -> std::optional<PslWord> {
    PslWord k = multiply(multiply(cv.conj, mid), invert(cu.conj));
    // Witnesses are always re-verified by multiplication.
    if (equal(multiply(multiply(k, u), invert(k)), v)) return k;
    return std::nullopt;
  };

  std::size_t n = cu.core.syls.size();
  if (n == 0) return finish(identity_word());
  if (n == 1) {
    // Finite-order classes: elements of a free factor are conjugate iff they
    // are conjugate inside the factor; both factors here are abelian.
    if (cu.core.syls[0] != cv.core.syls[0]) return std::nullopt;
    return finish(identity_word());
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (rotate_left(cu.core.syls, t) == cv.core.syls) {
      PslWord alpha{std::vector<Syl>(cu.core.syls.begin(),
                                     cu.core.syls.begin() + static_cast<std::ptrdiff_t>(t))};
      if (auto k = finish(invert(alpha))) return k;
    }
  }
  return std::nullopt;
}

inline bool is_conjugate(const PslWord& u, const PslWord& v) {
  return conjugator(u, v).has_value();
}

inline bool is_finite_order(const PslWord& w) {
  return cyclic_reduce(w).core.syls.size() <= 1;
}

// 1, 2 or 3 for finite-order elements, nullopt for infinite order.
inline std::optional<int> element_order(const PslWord& w) {
  CyclicForm cf = cyclic_reduce(w);
  if (cf.core.syls.empty()) return 1;
  if (cf.core.syls.size() == 1) return factor_of(cf.core.syls[0]) == 0 ? 2 : 3;
  return std::nullopt;
}

struct PrimitiveRoot {
  PslWord root;        // primitive z with u = z^exponent
  long long exponent;  // >= 1
};

// Generator of the (infinite cyclic) centralizer of an infinite-order element.
inline PrimitiveRoot centralizer_generator(const PslWord& u) {
  CyclicForm cf = cyclic_reduce(u);
  std::size_t n = cf.core.syls.size();
  if (n < 2) throw domain_error("centralizer_generator: element has finite order");
  std::size_t period = n;
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    if (rotate_left(cf.core.syls, p) == cf.core.syls) { period = p; break; }
  }
  PslWord prim{std::vector<Syl>(cf.core.syls.begin(),
                                cf.core.syls.begin() + static_cast<std::ptrdiff_t>(period))};
  PslWord root = multiply(multiply(cf.conj, prim), invert(cf.conj));
  return PrimitiveRoot{root, static_cast<long long>(n / period)};
}

// ----- text form ------------------------------------------------------------

inline std::string to_string(const PslWord& w) {
  if (w.syls.empty()) return "1";
  std::string out;
  out.reserve(w.syls.size());
  for (Syl x : w.syls)
    out.push_back(x == Syl::S ? 's' : (x == Syl::R ? 'r' : 'R'));
  return out;
}

inline PslWord parse(const std::string& text) {
  PslWord raw;
  bool saw_one = false;
  for (char ch : text) {
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') continue;
    switch (ch) {
      case 's': raw.syls.push_back(Syl::S); break;
      case 'r': raw.syls.push_back(Syl::R); break;
      case 'R': raw.syls.push_back(Syl::RR); break;
      case '1': saw_one = true; break;
      default:
        throw parse_error(std::string("psl word: unexpected character '") + ch + "'");
    }
  }
  if (saw_one && !raw.syls.empty())
    throw parse_error("psl word: '1' may only denote the empty word");
  return canonicalize(raw);
}

}  // namespace s04::pslz
