// The fundamental group of the four-punctured sphere as the free group
// F3 = <x1, x2, x3>, with the fourth puncture word x4 = (x1 x2 x3)^-1.
//
// Letters are rank-encoded bytes 0..5 in the order x < X < y < Y < z < Z
// (uppercase = inverse), so plain lexicographic comparison of letter vectors
// is the canonical word order and rank^1 is inversion.
//
// Automorphisms carry images of the generators under both the map and its
// inverse; the checked constructor verifies the two compose to the identity,
// so a typo in a generator table cannot survive construction. Monodromy
// letters map to automorphisms via the braid half-twists:
//   sigma1: x->xyX, y->x        sigma2: y->yzY, z->y        sigma3: z->YXZ
// with a = sigma1^2, b = sigma2^-2, u = sigma1 sigma3^-1, t = (sigma1
// sigma2 sigma3)^2, v = u t. Induced maps compose so that word evaluation
// is a homomorphism matching the mapping-class model.
//
// fixed_classes enumerates conjugacy classes of bounded cyclic length whose
// class is preserved by some power of an automorphism. The period test
// meets in the middle: alpha^j [w] = [w] iff alpha^(j-m) [w] = alpha^-m [w]
// for any m, checked at m = floor(j/2) so that neither side is iterated more
// than ceil(powers/2) times. Pruning is two-sided and sound: if the class is
// fixed at period j then alpha^i [w] is conjugate to alpha^(i-j) [w], so its
// cyclic length is at most len(w) * K-(j-i), and symmetrically alpha^-i [w]
// has cyclic length at most len(w) * K+(j-i), where K+-(m) are the exact
// iterated generator-image lengths of alpha and its inverse.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "s04/errors.hpp"
#include "s04/mcg.hpp"

namespace s04::fgroup {

// ----- words ------------------------------------------------------------------

using FLetter = std::uint8_t;               // 0..5, rank order x X y Y z Z
using FreeWord = std::vector<FLetter>;      // always kept freely reduced

inline FLetter fl_inverse(FLetter l) { return l ^ 1; }
inline int fl_generator(FLetter l) { return l >> 1; }
inline FLetter fl_make(int generator, bool inverse) {
  return static_cast<FLetter>(2 * generator + (inverse ? 1 : 0));
}

inline void push_reduced(FreeWord& w, FLetter l) {
  if (!w.empty() && w.back() == fl_inverse(l)) w.pop_back();
  else w.push_back(l);
}

inline FreeWord reduce(const FreeWord& w) {
  FreeWord out;
  out.reserve(w.size());
  for (FLetter l : w) push_reduced(out, l);
  return out;
}

inline FreeWord multiply(const FreeWord& a, const FreeWord& b) {
  FreeWord out = a;
  out.reserve(a.size() + b.size());
  for (FLetter l : b) push_reduced(out, l);
  return out;
}

inline FreeWord invert(const FreeWord& w) {
  FreeWord out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(fl_inverse(*it));
  return out;
}

inline FreeWord power(const FreeWord& w, long long n) {
  FreeWord base = n < 0 ? invert(w) : w;
  unsigned long long k = n < 0 ? static_cast<unsigned long long>(-(n + 1)) + 1
                               : static_cast<unsigned long long>(n);
  FreeWord acc;
  while (k) {
    if (k & 1) acc = multiply(acc, base);
    base = multiply(base, base);
    k >>= 1;
  }
  return acc;
}

inline std::string to_string(const FreeWord& w) {
  static const char kChars[] = "xXyYzZ";
  if (w.empty()) return "1";
  std::string out;
  out.reserve(w.size());
  for (FLetter l : w) out += kChars[l];
  return out;
}

inline FreeWord parse(const std::string& text) {
  FreeWord out;
  bool saw_one = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    if (c == '1') {
      saw_one = true;
      continue;
    }
    switch (c) {
      case 'x': out.push_back(0); break;
      case 'X': out.push_back(1); break;
      case 'y': out.push_back(2); break;
      case 'Y': out.push_back(3); break;
      case 'z': out.push_back(4); break;
      case 'Z': out.push_back(5); break;
      default:
        throw parse_error(std::string("free word: unexpected character '") + c + "'");
    }
  }
  if (saw_one && !out.empty())
    throw parse_error("free word: '1' denotes the identity and must stand alone");
  return reduce(out);
}

// ----- cyclic words -------------------------------------------------------------

struct CyclicForm {
  FreeWord core;  // cyclically reduced
  FreeWord conj;  // word = conj * core * conj^-1
};

inline CyclicForm cyclic_reduce(const FreeWord& w) {
  CyclicForm cf;
  FreeWord red = reduce(w);
  std::size_t lo = 0, hi = red.size();
  while (hi - lo >= 2 && red[lo] == fl_inverse(red[hi - 1])) {
    cf.conj.push_back(red[lo]);
    ++lo;
    --hi;
  }
  cf.core.assign(red.begin() + static_cast<long>(lo),
                 red.begin() + static_cast<long>(hi));
  return cf;
}

// Cyclically reduced core alone, skipping the conjugator bookkeeping.
inline FreeWord cyclic_core(const FreeWord& w) {
  FreeWord red = reduce(w);
  std::size_t lo = 0, hi = red.size();
  while (hi - lo >= 2 && red[lo] == fl_inverse(red[hi - 1])) {
    ++lo;
    --hi;
  }
  red.erase(red.begin() + static_cast<long>(hi), red.end());
  red.erase(red.begin(), red.begin() + static_cast<long>(lo));
  return red;
}

inline FreeWord rotate_left(const FreeWord& w, std::size_t t) {
  FreeWord out;
  out.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out.push_back(w[(i + t) % w.size()]);
  return out;
}

// Booth's least-rotation algorithm; returns the starting index.
inline std::size_t least_rotation(const FreeWord& s) {
  const std::size_t n = s.size();
  if (n <= 1) return 0;
  std::vector<long long> f(2 * n, -1);
  std::size_t k = 0;
  for (std::size_t j = 1; j < 2 * n; ++j) {
    long long i = f[j - k - 1];
    while (i != -1 && s[j % n] != s[(k + static_cast<std::size_t>(i) + 1) % n]) {
      if (s[j % n] < s[(k + static_cast<std::size_t>(i) + 1) % n])
        k = j - static_cast<std::size_t>(i) - 1;
      i = f[static_cast<std::size_t>(i)];
    }
    if (i == -1 && s[j % n] != s[k % n]) {
      if (s[j % n] < s[k % n]) k = j;
      f[j - k] = -1;
    } else {
      f[j - k] = i + 1;
    }
  }
  return k % n;
}

// Canonical representative of the conjugacy class: least rotation of the core.
inline FreeWord canonical_cyclic(const FreeWord& w) {
  FreeWord core = cyclic_reduce(w).core;
  return rotate_left(core, least_rotation(core));
}

// True when the word is not a proper power (checked on the cyclic core).
inline bool is_primitive_class(const FreeWord& canonical_core) {
  const std::size_t n = canonical_core.size();
  if (n == 0) return false;
  std::vector<std::size_t> pi(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t j = pi[i - 1];
    while (j > 0 && canonical_core[i] != canonical_core[j]) j = pi[j - 1];
    if (canonical_core[i] == canonical_core[j]) ++j;
    pi[i] = j;
  }
  const std::size_t p = n - pi[n - 1];
  return p == n || n % p != 0;
}

// Witness k with k * u * k^-1 = v, if the words are conjugate.
inline std::optional<FreeWord> conjugator(const FreeWord& u, const FreeWord& v) {
  CyclicForm cu = cyclic_reduce(u), cv = cyclic_reduce(v);
  if (cu.core.size() != cv.core.size()) return std::nullopt;
  const std::size_t n = cu.core.size();
  for (std::size_t t = 0; t <= (n == 0 ? 0 : n - 1); ++t) {
    if (n != 0 && rotate_left(cu.core, t) != cv.core) continue;
    // rotate_left(core, t) = alpha^-1 core alpha with alpha the length-t prefix.
    FreeWord alpha(cu.core.begin(), cu.core.begin() + static_cast<long>(t));
    FreeWord k = multiply(multiply(cv.conj, invert(alpha)), invert(cu.conj));
    if (multiply(multiply(k, u), invert(k)) == reduce(v)) return k;
    if (n == 0) break;
  }
  return std::nullopt;
}

inline bool is_conjugate(const FreeWord& u, const FreeWord& v) {
  return canonical_cyclic(u) == canonical_cyclic(v);
}

// ----- automorphisms ------------------------------------------------------------

struct FreeAutomorphism {
  std::array<FreeWord, 3> fwd;  // images of x, y, z
  std::array<FreeWord, 3> bwd;  // images under the inverse

  FreeWord apply(const FreeWord& w) const { return map_through(fwd, w); }
  FreeWord apply_inverse(const FreeWord& w) const { return map_through(bwd, w); }

  bool operator==(const FreeAutomorphism& o) const { return fwd == o.fwd; }

 private:
  static FreeWord map_through(const std::array<FreeWord, 3>& images,
                              const FreeWord& w) {
    std::size_t cap = 0;
    for (const FreeWord& img : images) cap = std::max(cap, img.size());
    FreeWord out;
    out.reserve(std::min<std::size_t>(w.size() * cap + 8, 1u << 22));
    for (FLetter l : w) {
      const FreeWord& img = images[static_cast<std::size_t>(fl_generator(l))];
      if ((l & 1) == 0)
        for (FLetter m : img) push_reduced(out, m);
      else
        for (auto it = img.rbegin(); it != img.rend(); ++it)
          push_reduced(out, fl_inverse(*it));
    }
    return out;
  }
};

inline FreeAutomorphism make_automorphism(std::array<FreeWord, 3> fwd,
                                          std::array<FreeWord, 3> bwd) {
  FreeAutomorphism a{std::move(fwd), std::move(bwd)};
  for (int i = 0; i < 3; ++i) {
    FreeWord gen{fl_make(i, false)};
    if (a.apply(a.bwd[static_cast<std::size_t>(i)]) != gen ||
        a.apply_inverse(a.fwd[static_cast<std::size_t>(i)]) != gen)
      throw domain_error("automorphism tables do not invert each other");
  }
  return a;
}

inline FreeAutomorphism identity_automorphism() {
  std::array<FreeWord, 3> id = {FreeWord{0}, FreeWord{2}, FreeWord{4}};
  return FreeAutomorphism{id, id};
}

inline FreeAutomorphism compose(const FreeAutomorphism& f, const FreeAutomorphism& g) {
  FreeAutomorphism h;
  for (std::size_t i = 0; i < 3; ++i) {
    h.fwd[i] = f.apply(g.fwd[i]);
    h.bwd[i] = g.apply_inverse(f.bwd[i]);
  }
  return h;
}

inline FreeAutomorphism invert(const FreeAutomorphism& f) {
  return FreeAutomorphism{f.bwd, f.fwd};
}

// Conjugation by g (as an automorphism w -> g w g^-1).
inline FreeAutomorphism inner_automorphism(const FreeWord& g) {
  FreeAutomorphism a;
  FreeWord gi = invert(g);
  for (std::size_t i = 0; i < 3; ++i) {
    FreeWord gen{fl_make(static_cast<int>(i), false)};
    a.fwd[i] = multiply(multiply(g, gen), gi);
    a.bwd[i] = multiply(multiply(gi, gen), g);
  }
  return a;
}

// If alpha is conjugation by some g, returns g.
inline std::optional<FreeWord> is_inner(const FreeAutomorphism& alpha) {
  // alpha(x) must be c x c^-1; the conjugator is then c * x^k for some k.
  CyclicForm cf = cyclic_reduce(alpha.fwd[0]);
  if (cf.core != FreeWord{0}) return std::nullopt;
  // Need x^k y x^-k = c^-1 alpha(y) c for some integer k.
  FreeWord d = multiply(multiply(invert(cf.conj), alpha.fwd[1]), cf.conj);
  long long k = 0;
  for (std::size_t i = 0; i < d.size() && fl_generator(d[i]) == 0; ++i)
    k += (d[i] & 1) ? -1 : 1;
  FreeWord g = multiply(cf.conj, power(FreeWord{0}, k));
  FreeWord gi = invert(g);
  for (std::size_t i = 0; i < 3; ++i) {
    FreeWord gen{fl_make(static_cast<int>(i), false)};
    if (multiply(multiply(g, gen), gi) != alpha.fwd[i]) return std::nullopt;
  }
  return g;
}

// ----- braid generators and induced maps ----------------------------------------

namespace detail {

inline FreeAutomorphism table(const char* x, const char* y, const char* z,
                              const char* xi, const char* yi, const char* zi) {
  return make_automorphism({parse(x), parse(y), parse(z)},
                           {parse(xi), parse(yi), parse(zi)});
}

}  // namespace detail

// Half-twist braid generators acting on the fiber group (puncture i swapped
// with i+1); the twist and involution maps below are words in these.
inline const FreeAutomorphism& sigma1() {
  static const FreeAutomorphism a = detail::table("xyX", "x", "z", "y", "Yxy", "z");
  return a;
}
inline const FreeAutomorphism& sigma2() {
  static const FreeAutomorphism a = detail::table("x", "yzY", "y", "x", "z", "Zyz");
  return a;
}
inline const FreeAutomorphism& sigma3() {
  static const FreeAutomorphism a = detail::table("x", "y", "YXZ", "x", "y", "ZYX");
  return a;
}

inline const FreeAutomorphism& auto_a() {
  static const FreeAutomorphism a = compose(sigma1(), sigma1());
  return a;
}
inline const FreeAutomorphism& auto_b() {
  static const FreeAutomorphism a = compose(invert(sigma2()), invert(sigma2()));
  return a;
}
inline const FreeAutomorphism& auto_u() {
  static const FreeAutomorphism a = compose(sigma1(), invert(sigma3()));
  return a;
}
inline const FreeAutomorphism& auto_t() {
  static const FreeAutomorphism d = compose(compose(sigma1(), sigma2()), sigma3());
  static const FreeAutomorphism a = compose(d, d);
  return a;
}
inline const FreeAutomorphism& auto_v() {
  static const FreeAutomorphism a = compose(auto_u(), auto_t());
  return a;
}

inline const FreeAutomorphism& letter_automorphism(mcg::Letter l) {
  static const FreeAutomorphism kAinv = invert(auto_a());
  static const FreeAutomorphism kBinv = invert(auto_b());
  switch (l) {
    case mcg::Letter::A: return auto_a();
    case mcg::Letter::Ainv: return kAinv;
    case mcg::Letter::B: return auto_b();
    case mcg::Letter::Binv: return kBinv;
    case mcg::Letter::U: return auto_u();
    default: return auto_v();
  }
}

inline FreeAutomorphism induced_automorphism(const std::vector<mcg::Letter>& word) {
  FreeAutomorphism r = identity_automorphism();
  for (mcg::Letter l : word) r = compose(r, letter_automorphism(l));
  return r;
}

inline FreeAutomorphism induced_automorphism(const std::string& text) {
  return induced_automorphism(mcg::parse_monodromy(text));
}

// ----- peripheral structure ------------------------------------------------------

// Canonical class reps of the 8 oriented puncture loops: x1..x4 and inverses.
inline const std::array<FreeWord, 8>& peripheral_reps() {
  static const std::array<FreeWord, 8> reps = [] {
    std::array<FreeWord, 8> r;
    const FreeWord x4 = invert(parse("xyz"));
    for (int i = 0; i < 3; ++i) {
      r[static_cast<std::size_t>(2 * i)] = FreeWord{fl_make(i, false)};
      r[static_cast<std::size_t>(2 * i + 1)] = FreeWord{fl_make(i, true)};
    }
    r[6] = canonical_cyclic(x4);
    r[7] = canonical_cyclic(invert(x4));
    return r;
  }();
  return reps;
}

inline bool is_peripheral_class(const FreeWord& canonical_rep) {
  const auto& reps = peripheral_reps();
  return std::find(reps.begin(), reps.end(), canonical_rep) != reps.end();
}

// Permutation of the punctures 1..4 induced on conjugacy classes of the
// oriented loops; throws if some loop class is not carried to a loop class.
inline std::array<int, 4> peripheral_permutation(const FreeAutomorphism& alpha) {
  const std::array<FreeWord, 4> loops = {parse("x"), parse("y"), parse("z"),
                                         invert(parse("xyz"))};
  std::array<int, 4> perm{};
  for (std::size_t i = 0; i < 4; ++i) {
    FreeWord image = canonical_cyclic(alpha.apply(loops[i]));
    int found = -1;
    for (std::size_t j = 0; j < 4; ++j)
      if (image == canonical_cyclic(loops[j])) found = static_cast<int>(j);
    if (found < 0)
      throw domain_error("automorphism does not preserve the puncture loops");
    perm[i] = found;
  }
  return perm;
}

// ----- fixed conjugacy classes ----------------------------------------------------

struct FixedClassOptions {
  int max_len = 8;    // cyclic length bound on enumerated classes
  int powers = 6;     // consider alpha^1 .. alpha^powers
  std::uint64_t max_classes = 2'000'000;    // enumeration budget
  std::uint64_t max_work = 4'000'000'000;   // total letters produced by images
};

struct FixedClass {
  FreeWord rep;  // canonical representative
  int power;     // least j with alpha^j [rep] = [rep]
};

namespace detail {

// k[m] = max_i |phi^m(x_i)| for m = 0..powers, computed exactly while cheap
// and extended by the submultiplicative bound k[m+1] <= k[m]*k[1] once the
// images get large. A cyclic word of length n has phi^m image of cyclic
// length at most n * k[m].
inline std::vector<std::size_t> iterated_image_lengths(const FreeAutomorphism& phi,
                                                       int powers) {
  std::vector<std::size_t> k(static_cast<std::size_t>(powers) + 1, 1);
  std::array<FreeWord, 3> img = {FreeWord{0}, FreeWord{2}, FreeWord{4}};
  bool exact = true;
  for (int m = 1; m <= powers; ++m) {
    if (exact) {
      std::size_t total = 0;
      for (auto& w : img) {
        w = phi.apply(w);
        k[static_cast<std::size_t>(m)] =
            std::max(k[static_cast<std::size_t>(m)], w.size());
        total += w.size();
      }
      if (total > 5'000'000) exact = false;  // stop materializing giants
    } else {
      k[static_cast<std::size_t>(m)] =
          k[static_cast<std::size_t>(m - 1)] * k[1];
    }
  }
  return k;
}

}  // namespace detail

// Canonical reps of primitive conjugacy classes of cyclic length <= max_len
// whose class is fixed by alpha^j for some 1 <= j <= powers.
inline std::vector<FixedClass> fixed_classes(const FreeAutomorphism& alpha,
                                             const FixedClassOptions& opt = {}) {
  const FreeAutomorphism beta = invert(alpha);
  const std::vector<std::size_t> k_fwd =
      detail::iterated_image_lengths(alpha, opt.powers);
  const std::vector<std::size_t> k_bwd =
      detail::iterated_image_lengths(beta, opt.powers);
  const std::size_t L = static_cast<std::size_t>(opt.max_len);

  std::vector<FixedClass> out;
  std::uint64_t scanned = 0, work = 0;

  // fwd[i] and bwd[i] hold cyclically reduced (not canonical) reps of the
  // classes alpha^+-i [w]; canonical forms are computed lazily at the meet
  // comparisons, guarded by a length check. alive[j] tracks periods not yet
  // excluded by the length bounds in the file comment.
  const int half_up = (opt.powers + 1) / 2, half_down = opt.powers / 2;
  std::vector<FreeWord> fwd(static_cast<std::size_t>(half_up) + 1);
  std::vector<FreeWord> bwd(static_cast<std::size_t>(half_down) + 1);
  std::vector<FreeWord> fwd_canon(fwd.size()), bwd_canon(bwd.size());
  std::vector<bool> fwd_have_canon(fwd.size()), bwd_have_canon(bwd.size());

  auto visit = [&](const FreeWord& w) {
    if (++scanned > opt.max_classes)
      throw budget_error("fixed_classes: class enumeration budget exhausted");
    std::vector<bool> alive(static_cast<std::size_t>(opt.powers) + 1, true);
    fwd[0] = w;
    bwd[0] = w;
    fwd_canon[0] = w;
    bwd_canon[0] = w;
    std::fill(fwd_have_canon.begin(), fwd_have_canon.end(), false);
    std::fill(bwd_have_canon.begin(), bwd_have_canon.end(), false);
    fwd_have_canon[0] = bwd_have_canon[0] = true;  // enumerated w is canonical
    int have_f = 0, have_b = 0;
    auto any_alive = [&] {
      for (int j = 1; j <= opt.powers; ++j)
        if (alive[static_cast<std::size_t>(j)]) return true;
      return false;
    };
    auto apply_bounds = [&](std::size_t len, int i, const std::vector<std::size_t>& k) {
      // |alpha^+-i(w)| <= L * k_opposite[j - i] for every surviving period
      // j >= i; k here is the bound table for the opposite direction.
      for (int j = std::max(i, 1); j <= opt.powers; ++j)
        if (len > L * k[static_cast<std::size_t>(j - i)])
          alive[static_cast<std::size_t>(j)] = false;
    };
    auto canon_of = [](std::vector<FreeWord>& slots, std::vector<FreeWord>& canon,
                       std::vector<bool>& have, int i) -> const FreeWord& {
      auto ui = static_cast<std::size_t>(i);
      if (!have[ui]) {
        canon[ui] = rotate_left(slots[ui], least_rotation(slots[ui]));
        have[ui] = true;
      }
      return canon[ui];
    };
    for (int j = 1; j <= opt.powers; ++j) {
      const int need_f = j - j / 2, need_b = j / 2;
      while (have_f < need_f && any_alive()) {
        work += fwd[static_cast<std::size_t>(have_f)].size() * k_fwd[1];
        if (work > opt.max_work)
          throw budget_error("fixed_classes: work budget exhausted");
        fwd[static_cast<std::size_t>(have_f + 1)] =
            cyclic_core(alpha.apply(fwd[static_cast<std::size_t>(have_f)]));
        ++have_f;
        apply_bounds(fwd[static_cast<std::size_t>(have_f)].size(), have_f, k_bwd);
      }
      while (have_b < need_b && any_alive()) {
        work += bwd[static_cast<std::size_t>(have_b)].size() * k_bwd[1];
        if (work > opt.max_work)
          throw budget_error("fixed_classes: work budget exhausted");
        bwd[static_cast<std::size_t>(have_b + 1)] =
            cyclic_core(beta.apply(bwd[static_cast<std::size_t>(have_b)]));
        ++have_b;
        apply_bounds(bwd[static_cast<std::size_t>(have_b)].size(), have_b, k_fwd);
      }
      if (!any_alive()) return;
      if (alive[static_cast<std::size_t>(j)]) {
        const auto uf = static_cast<std::size_t>(need_f);
        const auto ub = static_cast<std::size_t>(need_b);
        if (fwd[uf].size() == bwd[ub].size() &&
            canon_of(fwd, fwd_canon, fwd_have_canon, need_f) ==
                canon_of(bwd, bwd_canon, bwd_have_canon, need_b)) {
          out.push_back(FixedClass{w, j});
          return;
        }
        alive[static_cast<std::size_t>(j)] = false;  // period j refuted
      }
    }
  };

  // Enumerate canonical primitive cyclically-reduced words by length then lex.
  FreeWord word;
  auto dfs = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      if (word.back() == fl_inverse(word.front())) return;
      if (least_rotation(word) != 0) return;
      if (!is_primitive_class(word)) return;
      visit(word);
      return;
    }
    for (FLetter l = 0; l < 6; ++l) {
      if (l < word.front()) continue;  // a smaller letter would win the rotation
      if (word.back() == fl_inverse(l)) continue;
      word.push_back(l);
      self(self, remaining - 1);
      word.pop_back();
    }
  };
  for (int len = 1; len <= opt.max_len; ++len) {
    for (FLetter first = 0; first < 6; ++first) {
      word.assign(1, first);
      if (len == 1) {
        visit(word);
        continue;
      }
      dfs(dfs, len - 1);
    }
  }
  return out;
}

}  // namespace s04::fgroup
