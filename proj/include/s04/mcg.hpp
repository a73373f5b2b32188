// The mapping class group of the four-punctured sphere, modeled as the
// semidirect product PSL(2,Z) x| (Z/2)^2.
//
// Composition rule: (p1,w1)*(p2,w2) = (p1*p2, rho(p2)^-1 w1 + w2), where rho
// is reduction of the matrix realization mod 2 (well defined projectively
// because -I = I mod 2). Generators of the monodromy alphabet:
//   a  twist with matrix [[1,2],[0,1]], word srsr, vector 0
//   b  twist with matrix [[1,0],[2,1]], word sRsR, vector 0
//   u  involution (1, e1)   puncture pairing (P1 P2)(P3 P4)
//   v  involution (1, e2)   puncture pairing (P1 P4)(P2 P3)
// Punctures carry the labels P1=00, P2=01, P3=11, P4=10 (bit0 = e1 coefficient)
// and (p,w) moves puncture h to rho(p)(h+w); this matches translation followed
// by a linear map on the pillowcase.
//
// A class is pseudo-Anosov exactly when |trace| of its PSL part exceeds 2;
// the conjugacy solver reduces to PSL conjugacy plus a finite search over
// centralizer coset representatives and (Z/2)^2 vectors.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "s04/errors.hpp"
#include "s04/pslz.hpp"

namespace s04::mcg {

using pslz::PslWord;
using pslz::cpp_int;

// ----- GL(2, F2) ------------------------------------------------------------

// Bits: a = (m>>0)&1, b = (m>>1)&1, c = (m>>2)&1, d = (m>>3)&1 for [[a,b],[c,d]].
struct F2Mat {
  std::uint8_t m = 0b1001;  // identity

  bool operator==(const F2Mat& o) const = default;
};

inline F2Mat f2_mul(F2Mat x, F2Mat y) {
  int xa = x.m & 1, xb = (x.m >> 1) & 1, xc = (x.m >> 2) & 1, xd = (x.m >> 3) & 1;
  int ya = y.m & 1, yb = (y.m >> 1) & 1, yc = (y.m >> 2) & 1, yd = (y.m >> 3) & 1;
  int a = (xa & ya) ^ (xb & yc), b = (xa & yb) ^ (xb & yd);
  int c = (xc & ya) ^ (xd & yc), d = (xc & yb) ^ (xd & yd);
  return F2Mat{static_cast<std::uint8_t>(a | (b << 1) | (c << 2) | (d << 3))};
}

inline F2Mat f2_inverse(F2Mat x) {
  // det = 1 in F2, so the inverse is the adjugate [[d,b],[c,a]].
  int a = x.m & 1, b = (x.m >> 1) & 1, c = (x.m >> 2) & 1, d = (x.m >> 3) & 1;
  return F2Mat{static_cast<std::uint8_t>(d | (b << 1) | (c << 2) | (a << 3))};
}

// Column vector over F2: bit0 = e1 coefficient, bit1 = e2 coefficient.
inline std::uint8_t f2_apply(F2Mat x, std::uint8_t v) {
  int a = x.m & 1, b = (x.m >> 1) & 1, c = (x.m >> 2) & 1, d = (x.m >> 3) & 1;
  int v1 = v & 1, v2 = (v >> 1) & 1;
  return static_cast<std::uint8_t>(((a & v1) ^ (b & v2)) | ((((c & v1) ^ (d & v2))) << 1));
}

inline F2Mat rho(const PslWord& w) {
  static const F2Mat kS{0b0110};  // [[0,1],[1,0]]
  static const F2Mat kR{0b1110};  // [[0,1],[1,1]]
  F2Mat m;
  for (pslz::Syl x : pslz::canonicalize(w).syls) {
    if (x == pslz::Syl::S) m = f2_mul(m, kS);
    else if (x == pslz::Syl::R) m = f2_mul(m, kR);
    else m = f2_mul(m, f2_mul(kR, kR));
  }
  return m;
}

// ----- mapping classes -------------------------------------------------------

struct MappingClass {
  PslWord psl;           // always kept canonical
  std::uint8_t vec = 0;  // element of (Z/2)^2

  bool operator==(const MappingClass& o) const {
    return psl.syls == o.psl.syls && vec == o.vec;
  }
};

inline MappingClass identity_class() { return MappingClass{pslz::identity_word(), 0}; }

inline MappingClass make_class(const PslWord& p, std::uint8_t vec) {
  return MappingClass{pslz::canonicalize(p), static_cast<std::uint8_t>(vec & 3)};
}

inline MappingClass multiply(const MappingClass& g, const MappingClass& h) {
  std::uint8_t moved = f2_apply(f2_inverse(rho(h.psl)), g.vec);
  return MappingClass{pslz::multiply(g.psl, h.psl),
                      static_cast<std::uint8_t>(moved ^ h.vec)};
}

inline MappingClass invert(const MappingClass& g) {
  return MappingClass{pslz::invert(g.psl), f2_apply(rho(g.psl), g.vec)};
}

inline MappingClass power(const MappingClass& g, long long n) {
  MappingClass base = n < 0 ? invert(g) : g;
  unsigned long long k = n < 0 ? static_cast<unsigned long long>(-(n + 1)) + 1
                               : static_cast<unsigned long long>(n);
  MappingClass acc = identity_class();
  while (k) {
    if (k & 1) acc = multiply(acc, base);
    base = multiply(base, base);
    k >>= 1;
  }
  return acc;
}

inline cpp_int trace_abs(const MappingClass& g) { return pslz::trace_abs(g.psl); }

inline bool is_pseudo_anosov(const MappingClass& g) { return trace_abs(g) > 2; }

// Puncture permutation on labels P1..P4 (see header comment).
inline std::array<int, 4> puncture_permutation(const MappingClass& g) {
  static constexpr std::uint8_t kLabel[4] = {0b00, 0b01, 0b11, 0b10};
  auto index_of = [](std::uint8_t h) {
    for (int i = 0; i < 4; ++i)
      if (kLabel[i] == h) return i;
    return -1;
  };
  F2Mat m = rho(g.psl);
  std::array<int, 4> perm{};
  for (int i = 0; i < 4; ++i)
    perm[static_cast<std::size_t>(i)] =
        index_of(f2_apply(m, static_cast<std::uint8_t>(kLabel[i] ^ g.vec)));
  return perm;
}

// ----- monodromy words -------------------------------------------------------

enum class Letter : std::uint8_t { A, Ainv, B, Binv, U, V };

inline Letter letter_inverse(Letter l) {
  switch (l) {
    case Letter::A: return Letter::Ainv;
    case Letter::Ainv: return Letter::A;
    case Letter::B: return Letter::Binv;
    case Letter::Binv: return Letter::B;
    default: return l;  // u, v are involutions
  }
}

// Grammar: letters a, A, b, B, u, v; whitespace ignored; an optional ^n
// (n a possibly negative decimal integer) repeats the letter before it.
inline std::vector<Letter> parse_monodromy(const std::string& text) {
  constexpr std::size_t kExpansionCap = 1u << 20;
  std::vector<Letter> out;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() &&
           (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' || text[i] == '\r'))
      ++i;
  };
  while (true) {
    skip_ws();
    if (i >= text.size()) break;
    Letter l;
    switch (text[i]) {
      case 'a': l = Letter::A; break;
      case 'A': l = Letter::Ainv; break;
      case 'b': l = Letter::B; break;
      case 'B': l = Letter::Binv; break;
      case 'u': l = Letter::U; break;
      case 'v': l = Letter::V; break;
      default:
        throw parse_error(std::string("monodromy word: unexpected character '") +
                          text[i] + "'");
    }
    ++i;
    skip_ws();
    long long rep = 1;
    if (i < text.size() && text[i] == '^') {
      ++i;
      skip_ws();
      bool neg = false;
      if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        neg = text[i] == '-';
        ++i;
      }
      if (i >= text.size() || text[i] < '0' || text[i] > '9')
        throw parse_error("monodromy word: '^' must be followed by an integer");
      long long mag = 0;
      while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
        mag = mag * 10 + (text[i] - '0');
        if (mag > static_cast<long long>(kExpansionCap))
          throw budget_error("monodromy word: exponent too large");
        ++i;
      }
      rep = neg ? -mag : mag;
    }
    Letter eff = rep < 0 ? letter_inverse(l) : l;
    long long count = rep < 0 ? -rep : rep;
    if (out.size() + static_cast<std::size_t>(count) > kExpansionCap)
      throw budget_error("monodromy word: expansion too large");
    for (long long k = 0; k < count; ++k) out.push_back(eff);
  }
  return out;
}

inline const MappingClass& letter_class(Letter l) {
  static const MappingClass kA = make_class(pslz::parse("srsr"), 0);
  static const MappingClass kAinv = invert(kA);
  static const MappingClass kB = make_class(pslz::parse("sRsR"), 0);
  static const MappingClass kBinv = invert(kB);
  static const MappingClass kU = make_class(pslz::identity_word(), 0b01);
  static const MappingClass kV = make_class(pslz::identity_word(), 0b10);
  switch (l) {
    case Letter::A: return kA;
    case Letter::Ainv: return kAinv;
    case Letter::B: return kB;
    case Letter::Binv: return kBinv;
    case Letter::U: return kU;
    default: return kV;
  }
}

inline MappingClass eval(const std::vector<Letter>& word) {
  MappingClass g = identity_class();
  for (Letter l : word) g = multiply(g, letter_class(l));
  return g;
}

inline MappingClass eval(const std::string& text) { return eval(parse_monodromy(text)); }

// ----- conjugacy -------------------------------------------------------------

namespace detail {

// Coset representatives of ker(rho): their rho images exhaust GL(2,F2).
inline const std::vector<PslWord>& rho_coset_reps() {
  static const std::vector<PslWord> reps = {
      pslz::parse("1"), pslz::parse("s"),  pslz::parse("r"),
      pslz::parse("R"), pslz::parse("sr"), pslz::parse("sR")};
  return reps;
}

// Representatives of the centralizer of p sufficient for the vector search:
// every coset of ker(rho) that meets C(p) is represented.
inline std::vector<PslWord> centralizer_reps(const PslWord& p) {
  std::vector<PslWord> out;
  if (pslz::is_finite_order(p)) {
    pslz::CyclicForm cf = pslz::cyclic_reduce(p);
    if (cf.core.syls.empty()) return rho_coset_reps();  // centralizer = everything
    out.push_back(pslz::identity_word());
    PslWord base = multiply(multiply(cf.conj, cf.core), pslz::invert(cf.conj));
    out.push_back(base);
    if (pslz::factor_of(cf.core.syls[0]) == 1)  // order three: also the square
      out.push_back(pslz::multiply(base, base));
    return out;
  }
  // Infinite order: centralizer is <z>; rho(z^j) is periodic with period | 6.
  PslWord z = pslz::centralizer_generator(p).root;
  PslWord acc = pslz::identity_word();
  for (int j = 0; j < 6; ++j) {
    out.push_back(acc);
    acc = pslz::multiply(acc, z);
  }
  return out;
}

}  // namespace detail

// Witness xi with xi * g * xi^-1 = h, if the classes are conjugate.
inline std::optional<MappingClass> conjugate(const MappingClass& g,
                                             const MappingClass& h) {
  auto k0 = pslz::conjugator(g.psl, h.psl);
  if (!k0) return std::nullopt;
  F2Mat p_inv = f2_inverse(rho(g.psl));
  for (const PslWord& c : detail::centralizer_reps(g.psl)) {
    PslWord k = pslz::multiply(*k0, c);
    F2Mat rk = rho(k);
    for (std::uint8_t y = 0; y < 4; ++y) {
      // Direct formula: xi g xi^-1 = (k p k^-1, rho(k)(rho(p)^-1 y + y + g.vec)).
      std::uint8_t moved = f2_apply(rk, static_cast<std::uint8_t>(
                                            f2_apply(p_inv, y) ^ y ^ g.vec));
      if (moved != h.vec) continue;
      MappingClass xi{k, y};
      if (multiply(multiply(xi, g), invert(xi)) == h) return xi;
    }
  }
  return std::nullopt;
}

struct SignedWitness {
  int sign;          // +1: conjugates to h, -1: conjugates to h^-1
  MappingClass xi;
};

inline std::optional<SignedWitness> conjugate_up_to_inversion(const MappingClass& g,
                                                              const MappingClass& h) {
  if (auto xi = conjugate(g, h)) return SignedWitness{+1, *xi};
  if (auto xi = conjugate(g, invert(h))) return SignedWitness{-1, *xi};
  return std::nullopt;
}

struct PowerWitness {
  long long exponent;  // smallest m in 1..max with g^m ~ h^(+-m)
  int sign;
  MappingClass xi;
};

inline std::optional<PowerWitness> common_conjugate_power(const MappingClass& g,
                                                          const MappingClass& h,
                                                          long long max_power) {
  if (!is_pseudo_anosov(g) || !is_pseudo_anosov(h))
    throw domain_error("common_conjugate_power: both classes must be pseudo-Anosov");
  for (long long m = 1; m <= max_power; ++m) {
    if (auto w = conjugate_up_to_inversion(power(g, m), power(h, m)))
      return PowerWitness{m, w->sign, w->xi};
  }
  return std::nullopt;
}

// ----- text form -------------------------------------------------------------

inline std::string to_string(const MappingClass& g) {
  std::string out = "(";
  out += pslz::to_string(g.psl);
  out += "; ";
  out += (g.vec & 1) ? '1' : '0';
  out += (g.vec & 2) ? '1' : '0';
  out += ")";
  return out;
}

}  // namespace s04::mcg
