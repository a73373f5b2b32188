// Finite-quotient engine: finite groups as permutation groups, a catalog of
// small targets, homomorphism and surjection enumeration from finite
// presentations, low-index subgroup enumeration, characteristic kernels K_i
// (intersections of all subgroups of index <= i), congruence images of
// fiber automorphisms, quotient fingerprints, and the order-separating
// witness search for pairs of monodromies.
//
// Groups live in one of two modes. Table mode stores every element as a
// permutation (BFS closure from the generators, capped); it supports exact
// conjugacy classes, centralizers, automorphism groups, and hom counting.
// Large mode keeps only the generator permutations: element orders still
// work (cycle structure), but any operation needing enumeration reports a
// budget error instead of guessing.
//
// Surjection counts "up to automorphism" are orbit counts of the Aut(T)
// action on surjection tuples, never a division by |Aut(T)|.

#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "s04/errors.hpp"
#include "s04/fgroup.hpp"
#include "s04/mcg.hpp"
#include "s04/presentation.hpp"
#include "s04/torus.hpp"

namespace s04::quot {

using pres::GenWord;
using pres::GroupPresentation;

// ----- permutations ----------------------------------------------------------

using Perm = std::vector<std::uint16_t>;

inline Perm perm_identity(std::size_t degree) {
  Perm p(degree);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

// compose(p, q) applies p first, then q.
inline Perm perm_compose(const Perm& p, const Perm& q) {
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = q[p[i]];
  return r;
}

inline Perm perm_inverse(const Perm& p) {
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<std::uint16_t>(i);
  return r;
}

inline long long perm_order(const Perm& p) {
  std::vector<bool> seen(p.size(), false);
  long long ord = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    long long len = 0;
    for (std::size_t j = i; !seen[j]; j = p[j]) {
      seen[j] = true;
      ++len;
    }
    ord = std::lcm(ord, len);
  }
  return ord;
}

struct PermHash {
  std::size_t operator()(const Perm& p) const {
    std::size_t h = 1469598103934665603ull;
    for (std::uint16_t v : p) {
      h ^= v;
      h *= 1099511628211ull;
    }
    return h;
  }
};

// Evaluates a word over given generator permutations.
inline Perm perm_eval(const GenWord& w, const std::vector<Perm>& gens,
                      std::size_t degree) {
  Perm acc = perm_identity(degree);
  for (pres::GLetter l : w) {
    const Perm& g = gens[static_cast<std::size_t>(pres::gl_generator(l))];
    acc = perm_compose(acc, (l & 1) ? perm_inverse(g) : g);
  }
  return acc;
}

// ----- finite groups ---------------------------------------------------------

class FiniteGroupTable {
 public:
  std::string name;
  std::size_t degree = 0;
  std::vector<Perm> gens;

  // Table mode data (empty in large mode).
  bool has_table = false;
  std::vector<Perm> elements;        // BFS order, elements[0] = identity
  std::vector<GenWord> def_words;    // word over gens evaluating to the element
  std::vector<std::uint32_t> inv_of;
  std::vector<std::uint32_t> gen_index;  // element index of each generator

  static FiniteGroupTable make(std::string name, std::size_t degree,
                               std::vector<Perm> generators,
                               std::size_t table_cap = 100'000) {
    FiniteGroupTable t;
    t.name = std::move(name);
    t.degree = degree;
    t.gens = std::move(generators);
    for (const Perm& g : t.gens)
      if (g.size() != degree) throw domain_error("group: generator degree mismatch");
    t.close(table_cap);
    return t;
  }

  std::size_t order() const {
    if (!has_table) throw budget_error("group " + name + ": order needs table mode");
    return elements.size();
  }

  std::uint32_t index_of(const Perm& p) const {
    auto it = index_.find(p);
    if (it == index_.end()) throw domain_error("group " + name + ": foreign element");
    return it->second;
  }

  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    return index_of(perm_compose(elements[a], elements[b]));
  }

  std::uint32_t conj(std::uint32_t g, std::uint32_t x) const {
    return mul(mul(g, x), inv_of[g]);  // g x g^-1
  }

  long long element_order(std::uint32_t e) const { return perm_order(elements[e]); }

  // Conjugacy classes, computed on first use.
  const std::vector<std::uint32_t>& class_of() const {
    ensure_classes();
    return class_of_;
  }
  const std::vector<std::uint32_t>& class_reps() const {
    ensure_classes();
    return class_reps_;
  }

  std::vector<std::uint32_t> centralizer(std::uint32_t a) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t c = 0; c < elements.size(); ++c)
      if (mul(c, a) == mul(a, c)) out.push_back(c);
    return out;
  }

  // witness[b] = some g with g b0 g^-1 = b for b in the class of b0.
  std::vector<std::optional<std::uint32_t>> conjugating_witnesses(
      std::uint32_t b0) const {
    std::vector<std::optional<std::uint32_t>> wit(elements.size());
    std::queue<std::uint32_t> q;
    wit[b0] = 0;  // identity
    q.push(b0);
    while (!q.empty()) {
      std::uint32_t b = q.front();
      q.pop();
      for (std::uint32_t gi : gen_index) {
        std::uint32_t nb = conj(gi, b);
        if (!wit[nb]) {
          wit[nb] = mul(gi, *wit[b]);  // (g * w) b0 (g * w)^-1 = g b g^-1
          q.push(nb);
        }
      }
    }
    return wit;
  }

  // Subgroup closure size of the given element indices (capped by the order).
  std::size_t closure_size(const std::vector<std::uint32_t>& seed) const {
    std::vector<bool> in(elements.size(), false);
    std::vector<std::uint32_t> stack;
    auto add = [&](std::uint32_t e) {
      if (!in[e]) {
        in[e] = true;
        stack.push_back(e);
      }
    };
    add(0);
    for (std::uint32_t e : seed) add(e);
    std::size_t count = stack.size();
    for (std::size_t i = 0; i < stack.size(); ++i)
      for (std::uint32_t s : seed) {
        std::uint32_t e = mul(stack[i], s);
        if (!in[e]) {
          in[e] = true;
          stack.push_back(e);
          ++count;
        }
      }
    return count;
  }

  // All automorphisms as permutations of element indices, sorted; computed on
  // first use by assigning generator images of matching order and verifying
  // the induced map is a bijective homomorphism.
  const std::vector<Perm>& automorphisms() const {
    if (!auts_.empty()) return auts_;
    if (!has_table) throw budget_error("group " + name + ": Aut needs table mode");
    const std::size_t n = elements.size();
    std::vector<long long> orders(n);
    for (std::uint32_t e = 0; e < n; ++e) orders[e] = element_order(e);
    std::vector<std::uint32_t> images(gens.size());
    auto try_candidate = [&] {
      // phi(e) = def_word(e) evaluated at the candidate images.
      Perm phi(n);
      std::vector<bool> hit(n, false);
      for (std::uint32_t e = 0; e < n; ++e) {
        std::uint32_t v = 0;
        for (pres::GLetter l : def_words[e]) {
          std::uint32_t g = images[static_cast<std::size_t>(pres::gl_generator(l))];
          v = mul(v, (l & 1) ? inv_of[g] : g);
        }
        if (hit[v]) return;
        hit[v] = true;
        phi[e] = static_cast<std::uint16_t>(v);
      }
      for (std::uint32_t e = 0; e < n; ++e)
        for (std::size_t gi = 0; gi < gens.size(); ++gi)
          if (phi[mul(e, gen_index[gi])] != mul(phi[e], images[gi])) return;
      auts_.push_back(std::move(phi));
    };
    auto rec = [&](auto&& self, std::size_t pos) -> void {
      if (pos == gens.size()) {
        try_candidate();
        return;
      }
      long long want = orders[gen_index[pos]];
      for (std::uint32_t e = 0; e < n; ++e)
        if (orders[e] == want) {
          images[pos] = e;
          self(self, pos + 1);
        }
    };
    rec(rec, 0);
    std::sort(auts_.begin(), auts_.end());
    return auts_;
  }

 private:
  std::unordered_map<Perm, std::uint32_t, PermHash> index_;
  mutable std::vector<std::uint32_t> class_of_, class_reps_;
  mutable std::vector<Perm> auts_;

  void close(std::size_t cap) {
    elements.clear();
    def_words.clear();
    index_.clear();
    elements.push_back(perm_identity(degree));
    def_words.push_back({});
    index_[elements[0]] = 0;
    for (std::size_t i = 0; i < elements.size(); ++i) {
      for (std::size_t g = 0; g < gens.size(); ++g) {
        Perm next = perm_compose(elements[i], gens[g]);
        if (index_.count(next)) continue;
        if (elements.size() >= cap) {  // too big: fall back to large mode
          elements.clear();
          def_words.clear();
          index_.clear();
          has_table = false;
          return;
        }
        index_[next] = static_cast<std::uint32_t>(elements.size());
        GenWord w = def_words[i];
        w.push_back(pres::gl_make(static_cast<int>(g), false));
        elements.push_back(std::move(next));
        def_words.push_back(std::move(w));
      }
    }
    has_table = true;
    inv_of.resize(elements.size());
    for (std::uint32_t e = 0; e < elements.size(); ++e)
      inv_of[e] = index_of(perm_inverse(elements[e]));
    gen_index.resize(gens.size());
    for (std::size_t g = 0; g < gens.size(); ++g)
      gen_index[g] = index_of(gens[g]);
  }

  void ensure_classes() const {
    if (!class_of_.empty() || elements.empty()) return;
    if (!has_table) throw budget_error("group " + name + ": classes need table mode");
    const std::uint32_t none = 0xffffffffu;
    class_of_.assign(elements.size(), none);
    for (std::uint32_t e = 0; e < elements.size(); ++e) {
      if (class_of_[e] != none) continue;
      std::uint32_t id = static_cast<std::uint32_t>(class_reps_.size());
      class_reps_.push_back(e);
      std::queue<std::uint32_t> q;
      class_of_[e] = id;
      q.push(e);
      while (!q.empty()) {
        std::uint32_t x = q.front();
        q.pop();
        for (std::uint32_t gi : gen_index) {
          std::uint32_t nx = conj(gi, x);
          if (class_of_[nx] == none) {
            class_of_[nx] = id;
            q.push(nx);
          }
        }
      }
    }
  }
};

// ----- catalog ---------------------------------------------------------------

namespace detail {

inline Perm cycle_perm(std::size_t degree, const std::vector<int>& cycle) {
  Perm p = perm_identity(degree);
  for (std::size_t i = 0; i < cycle.size(); ++i)
    p[static_cast<std::size_t>(cycle[i])] =
        static_cast<std::uint16_t>(cycle[(i + 1) % cycle.size()]);
  return p;
}

}  // namespace detail

inline FiniteGroupTable make_cyclic(const std::string& name, int n) {
  if (n < 1) throw parse_error("cyclic: order must be positive");
  std::vector<int> cyc(static_cast<std::size_t>(n));
  std::iota(cyc.begin(), cyc.end(), 0);
  return FiniteGroupTable::make(name, static_cast<std::size_t>(n),
                                {detail::cycle_perm(static_cast<std::size_t>(n), cyc)});
}

// (Z/2)^k on 2k points, generator i swapping {2i, 2i+1}.
inline FiniteGroupTable make_elem2(const std::string& name, int k) {
  if (k < 1) throw parse_error("elem2: rank must be positive");
  std::size_t deg = 2 * static_cast<std::size_t>(k);
  std::vector<Perm> gens;
  for (int i = 0; i < k; ++i)
    gens.push_back(detail::cycle_perm(deg, {2 * i, 2 * i + 1}));
  return FiniteGroupTable::make(name, deg, gens);
}

inline FiniteGroupTable make_symmetric(const std::string& name, int n) {
  if (n < 2) throw parse_error("symmetric: degree must be at least 2");
  std::size_t deg = static_cast<std::size_t>(n);
  std::vector<int> cyc(deg);
  std::iota(cyc.begin(), cyc.end(), 0);
  return FiniteGroupTable::make(
      name, deg, {detail::cycle_perm(deg, {0, 1}), detail::cycle_perm(deg, cyc)});
}

inline FiniteGroupTable make_alternating(const std::string& name, int n) {
  if (n < 3) throw parse_error("alternating: degree must be at least 3");
  std::size_t deg = static_cast<std::size_t>(n);
  std::vector<int> cyc;
  for (int i = n % 2 == 0 ? 1 : 0; i < n; ++i) cyc.push_back(i);
  return FiniteGroupTable::make(
      name, deg, {detail::cycle_perm(deg, {0, 1, 2}), detail::cycle_perm(deg, cyc)});
}

inline FiniteGroupTable make_dihedral(const std::string& name, int n) {
  if (n < 3) throw parse_error("dihedral: polygon must have at least 3 vertices");
  std::size_t deg = static_cast<std::size_t>(n);
  std::vector<int> cyc(deg);
  std::iota(cyc.begin(), cyc.end(), 0);
  Perm flip(deg);
  for (std::size_t i = 0; i < deg; ++i)
    flip[i] = static_cast<std::uint16_t>((deg - i) % deg);
  return FiniteGroupTable::make(name, deg, {detail::cycle_perm(deg, cyc), flip});
}

// Q8 by left multiplication on {1, i, -1, -i, j, k, -j, -k}.
inline FiniteGroupTable make_quaternion(const std::string& name) {
  const int by_i[8] = {1, 2, 3, 0, 5, 6, 7, 4};
  const int by_j[8] = {4, 7, 6, 5, 2, 1, 0, 3};
  Perm mi(8), mj(8);
  for (std::size_t t = 0; t < 8; ++t) {
    mi[t] = static_cast<std::uint16_t>(by_i[t]);
    mj[t] = static_cast<std::uint16_t>(by_j[t]);
  }
  return FiniteGroupTable::make(name, 8, {mi, mj});
}

// PSL(2,p) on the projective line {0..p-1, infinity=p}: z -> z+1 and z -> -1/z.
inline FiniteGroupTable make_psl2(const std::string& name, int p) {
  if (p < 3 || p > 251) throw parse_error("psl2: prime out of range");
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) throw parse_error("psl2: parameter must be prime");
  std::size_t deg = static_cast<std::size_t>(p) + 1;
  auto inv_mod = [&](int a) {
    int r = 1, base = ((a % p) + p) % p, e = p - 2;
    while (e) {
      if (e & 1) r = r * base % p;
      base = base * base % p;
      e >>= 1;
    }
    return r;
  };
  Perm t(deg), s(deg);
  for (int z = 0; z < p; ++z) t[static_cast<std::size_t>(z)] =
      static_cast<std::uint16_t>((z + 1) % p);
  t[deg - 1] = static_cast<std::uint16_t>(p);  // infinity fixed
  s[0] = static_cast<std::uint16_t>(p);        // 0 -> infinity
  s[deg - 1] = 0;                              // infinity -> 0
  for (int z = 1; z < p; ++z)
    s[static_cast<std::size_t>(z)] = static_cast<std::uint16_t>((p - inv_mod(z)) % p);
  return FiniteGroupTable::make(name, deg, {s, t});
}

struct Catalog {
  std::string id;
  std::vector<FiniteGroupTable> targets;
};

// Line format: `name kind params`, e.g. `C6 cyclic 6`, `S4 symmetric 4`,
// `PSL27 psl2 7`. Blank lines and lines starting with '#' are skipped.
inline Catalog parse_catalog(const std::string& id, const std::string& text) {
  Catalog cat;
  cat.id = id;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    std::vector<std::string> tok;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
        ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r')
        ++j;
      if (j > i) tok.push_back(line.substr(i, j - i));
      i = j;
    }
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok.size() < 2) throw parse_error("catalog: malformed line '" + line + "'");
    const std::string& name = tok[0];
    const std::string& kind = tok[1];
    auto param = [&]() -> int {
      if (tok.size() < 3) throw parse_error("catalog: '" + kind + "' needs a parameter");
      return std::stoi(tok[2]);
    };
    if (kind == "cyclic") cat.targets.push_back(make_cyclic(name, param()));
    else if (kind == "elem2") cat.targets.push_back(make_elem2(name, param()));
    else if (kind == "symmetric") cat.targets.push_back(make_symmetric(name, param()));
    else if (kind == "alternating")
      cat.targets.push_back(make_alternating(name, param()));
    else if (kind == "dihedral") cat.targets.push_back(make_dihedral(name, param()));
    else if (kind == "quaternion") cat.targets.push_back(make_quaternion(name));
    else if (kind == "psl2") cat.targets.push_back(make_psl2(name, param()));
    else throw parse_error("catalog: unknown kind '" + kind + "'");
  }
  return cat;
}

inline const char* default_catalog_text() {
  return "C2 cyclic 2\n"
         "C3 cyclic 3\n"
         "C4 cyclic 4\n"
         "V4 elem2 2\n"
         "C5 cyclic 5\n"
         "C6 cyclic 6\n"
         "S3 symmetric 3\n"
         "C7 cyclic 7\n"
         "C8 cyclic 8\n"
         "D4 dihedral 4\n"
         "Q8 quaternion 8\n"
         "E8 elem2 3\n"
         "C9 cyclic 9\n"
         "C10 cyclic 10\n"
         "D5 dihedral 5\n"
         "C11 cyclic 11\n"
         "C12 cyclic 12\n"
         "A4 alternating 4\n"
         "D6 dihedral 6\n"
         "S4 symmetric 4\n"
         "A5 alternating 5\n"
         "PSL27 psl2 7\n";
}

inline const Catalog& default_catalog() {
  static const Catalog cat = parse_catalog("default", default_catalog_text());
  return cat;
}

// ----- search budgets ---------------------------------------------------------

struct SearchBudget {
  std::uint64_t max_nodes = 200'000'000;
  std::optional<std::chrono::steady_clock::time_point> deadline;

  mutable std::uint64_t nodes = 0;

  void spend(std::uint64_t n = 1) const {
    nodes += n;
    if (nodes > max_nodes) throw budget_error("search: node budget exhausted");
    if (deadline && (nodes & 0xfffu) == 0 &&
        std::chrono::steady_clock::now() > *deadline)
      throw budget_error("search: time budget exhausted");
  }
};

// ----- homomorphism enumeration ------------------------------------------------

// All homomorphisms p -> T as tuples of element indices, by backtracking over
// generator images; relators are checked as soon as their last generator is
// assigned. Requires table mode.
inline std::vector<std::vector<std::uint32_t>> enumerate_homs(
    const GroupPresentation& p, const FiniteGroupTable& T, bool surjective_only,
    const SearchBudget& budget = {}) {
  if (!T.has_table)
    throw budget_error("enumerate_homs: target " + T.name + " is not tabulated");
  const std::size_t k = p.num_generators();
  const std::uint32_t n = static_cast<std::uint32_t>(T.order());

  // Relators bucketed by the largest generator they mention.
  std::vector<std::vector<const GenWord*>> by_max(k);
  for (const GenWord& r : p.relators) {
    int mx = 0;
    for (pres::GLetter l : r) mx = std::max(mx, pres::gl_generator(l));
    if (!r.empty()) by_max[static_cast<std::size_t>(mx)].push_back(&r);
  }

  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> img(k, 0);
  auto eval_ok = [&](const GenWord& r) {
    std::uint32_t acc = 0;
    for (pres::GLetter l : r) {
      std::uint32_t g = img[static_cast<std::size_t>(pres::gl_generator(l))];
      acc = T.mul(acc, (l & 1) ? T.inv_of[g] : g);
    }
    return acc == 0;
  };
  auto rec = [&](auto&& self, std::size_t pos) -> void {
    if (pos == k) {
      if (surjective_only && T.closure_size(img) != n) return;
      out.push_back(img);
      return;
    }
    for (std::uint32_t e = 0; e < n; ++e) {
      budget.spend();
      img[pos] = e;
      bool ok = true;
      for (const GenWord* r : by_max[pos]) {
        budget.spend(r->size());
        if (!eval_ok(*r)) {
          ok = false;
          break;
        }
      }
      if (ok) self(self, pos + 1);
    }
  };
  rec(rec, 0);
  return out;
}

namespace detail {

// Canonical representative of the Aut(T)-orbit of an image tuple.
inline std::vector<std::uint32_t> aut_canonical(const FiniteGroupTable& T,
                                                const std::vector<std::uint32_t>& t) {
  std::vector<std::uint32_t> best;
  std::vector<std::uint32_t> cur(t.size());
  for (const Perm& a : T.automorphisms()) {
    for (std::size_t i = 0; i < t.size(); ++i) cur[i] = a[t[i]];
    if (best.empty() || cur < best) best = cur;
  }
  return best;
}

inline long long count_orbits(const FiniteGroupTable& T,
                              const std::vector<std::vector<std::uint32_t>>& tuples) {
  std::vector<std::vector<std::uint32_t>> canon;
  canon.reserve(tuples.size());
  for (const auto& t : tuples) canon.push_back(aut_canonical(T, t));
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
  return static_cast<long long>(canon.size());
}

// Mapping-torus relator shape t x_i t^-1 W_i(x): returns the W_i if the
// presentation has generators x1,x2,x3,t and all three relators match.
inline std::optional<std::array<GenWord, 3>> fibered_shape(
    const GroupPresentation& p) {
  if (p.num_generators() != 4 || p.relators.size() != 3) return std::nullopt;
  std::array<GenWord, 3> w;
  std::array<bool, 3> seen{};
  for (const GenWord& r : p.relators) {
    if (r.size() < 3) return std::nullopt;
    if (r[0] != pres::gl_make(3, false) || r[2] != pres::gl_make(3, true))
      return std::nullopt;
    int i = pres::gl_generator(r[1]);
    if ((r[1] & 1) || i > 2 || seen[static_cast<std::size_t>(i)]) return std::nullopt;
    for (std::size_t j = 3; j < r.size(); ++j)
      if (pres::gl_generator(r[j]) > 2) return std::nullopt;
    seen[static_cast<std::size_t>(i)] = true;
    w[static_cast<std::size_t>(i)] = GenWord(r.begin() + 3, r.end());
  }
  return w;
}

// Surjections of a mapping-torus group onto T, up to Aut(T). The fiber tuple
// (h1,h2,h3) is enumerated with h1 restricted to class representatives (every
// Aut-orbit has such a member), the stable letter solved from the conjugation
// constraints, and survivors deduplicated by Aut-canonical form.
inline long long count_surjections_fibered(const std::array<GenWord, 3>& w,
                                           const FiniteGroupTable& T,
                                           const SearchBudget& budget) {
  const std::uint32_t n = static_cast<std::uint32_t>(T.order());
  std::vector<std::vector<std::uint32_t>> found;
  for (std::uint32_t rep : T.class_reps()) {
    auto witness = T.conjugating_witnesses(rep);
    auto cent = T.centralizer(rep);
    for (std::uint32_t h2 = 0; h2 < n; ++h2) {
      for (std::uint32_t h3 = 0; h3 < n; ++h3) {
        budget.spend();
        std::array<std::uint32_t, 3> h = {rep, h2, h3};
        // c_i = W_i(h)^-1 must equal tau h_i tau^-1.
        std::array<std::uint32_t, 3> c;
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i) {
          std::uint32_t acc = 0;
          for (pres::GLetter l : w[static_cast<std::size_t>(i)]) {
            std::uint32_t g = h[static_cast<std::size_t>(pres::gl_generator(l))];
            acc = T.mul(acc, (l & 1) ? T.inv_of[g] : g);
          }
          c[static_cast<std::size_t>(i)] = T.inv_of[acc];
          if (i == 0 && !witness[c[0]]) ok = false;  // c1 not conjugate to h1
        }
        if (!ok) continue;
        budget.spend(w[0].size() + w[1].size() + w[2].size());
        std::uint32_t tau0 = *witness[c[0]];
        for (std::uint32_t z : cent) {
          std::uint32_t tau = T.mul(tau0, z);
          if (T.conj(tau, h[1]) != c[1] || T.conj(tau, h[2]) != c[2]) continue;
          if (T.closure_size({h[0], h[1], h[2], tau}) != n) continue;
          found.push_back({h[0], h[1], h[2], tau});
        }
      }
    }
  }
  return count_orbits(T, found);
}

}  // namespace detail

// Surjections p ->> T counted up to Aut(T); uses the mapping-torus fast path
// when the relators have the fibered shape.
inline long long count_surjections_up_to_aut(const GroupPresentation& p,
                                             const FiniteGroupTable& T,
                                             const SearchBudget& budget = {}) {
  if (!T.has_table)
    throw budget_error("surjection count: target " + T.name + " is not tabulated");
  if (auto w = detail::fibered_shape(p))
    return detail::count_surjections_fibered(*w, T, budget);
  return detail::count_orbits(T, enumerate_homs(p, T, true, budget));
}

// ----- fingerprints ------------------------------------------------------------

struct QuotientFingerprint {
  std::string catalog_id;
  // Target name -> surjection count up to Aut, or nullopt when the budget ran
  // out for that target.
  std::vector<std::pair<std::string, std::optional<long long>>> counts;

  bool operator==(const QuotientFingerprint& o) const = default;
};

inline QuotientFingerprint fingerprint(const GroupPresentation& p,
                                       const Catalog& catalog,
                                       const SearchBudget& per_target = {}) {
  QuotientFingerprint fp;
  fp.catalog_id = catalog.id;
  for (const FiniteGroupTable& T : catalog.targets) {
    SearchBudget b;
    b.max_nodes = per_target.max_nodes;
    b.deadline = per_target.deadline;
    try {
      fp.counts.emplace_back(T.name, count_surjections_up_to_aut(p, T, b));
    } catch (const budget_error&) {
      fp.counts.emplace_back(T.name, std::nullopt);
    }
  }
  return fp;
}

// ----- low-index subgroups -------------------------------------------------------

struct CosetTable {
  // tab[coset][letter] with letters rank-encoded over the presentation's
  // generators; complete tables only.
  std::vector<std::vector<int>> tab;

  int index() const { return static_cast<int>(tab.size()); }

  // Permutation action of generator g on the cosets.
  Perm action(int g) const {
    Perm p(tab.size());
    for (std::size_t c = 0; c < tab.size(); ++c)
      p[c] = static_cast<std::uint16_t>(
          tab[c][static_cast<std::size_t>(pres::gl_make(g, false))]);
    return p;
  }
};

// One complete coset table per conjugacy class of subgroups of index
// <= max_index (standard low-index backtracking with first-in-class
// canonicity, deduction by relator scanning, no coincidence handling: a
// contradiction backtracks).
inline std::vector<CosetTable> low_index_subgroups(const GroupPresentation& p,
                                                   int max_index,
                                                   const SearchBudget& budget = {}) {
  if (max_index < 1) throw domain_error("low_index: index bound must be positive");
  const std::size_t k = p.num_generators();
  const std::size_t cols = 2 * k;
  std::vector<std::vector<int>> tab(1, std::vector<int>(cols, -1));
  std::vector<CosetTable> out;

  struct Def {
    int row;
    int col;
  };
  std::vector<Def> trail;

  auto define = [&](int r, int c, int d) {
    tab[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = d;
    trail.push_back({r, c});
    int ic = static_cast<int>(pres::gl_inverse(static_cast<pres::GLetter>(c)));
    if (tab[static_cast<std::size_t>(d)][static_cast<std::size_t>(ic)] == -1) {
      tab[static_cast<std::size_t>(d)][static_cast<std::size_t>(ic)] = r;
      trail.push_back({d, ic});
    }
  };

  // Scans a relator from every coset; fills single gaps, reports conflicts.
  // Returns false on contradiction.
  auto deduce = [&]() -> bool {
    bool progress = true;
    while (progress) {
      progress = false;
      for (const GenWord& r : p.relators) {
        for (int start = 0; start < static_cast<int>(tab.size()); ++start) {
          budget.spend();
          // Trace forward until stuck, then backward; a single gap deduces.
          int fwd = start;
          std::size_t fi = 0;
          while (fi < r.size()) {
            int next = tab[static_cast<std::size_t>(fwd)][r[fi]];
            if (next == -1) break;
            fwd = next;
            ++fi;
          }
          if (fi == r.size()) {
            if (fwd != start) return false;
            continue;
          }
          int bwd = start;
          std::size_t bi = r.size();
          while (bi > fi) {
            int prev = tab[static_cast<std::size_t>(bwd)][pres::gl_inverse(r[bi - 1])];
            if (prev == -1) break;
            bwd = prev;
            --bi;
          }
          if (bi == fi + 1) {
            define(fwd, r[fi], bwd);
            progress = true;
          } else if (bi == fi) {
            if (bwd != fwd) return false;
          }
        }
      }
    }
    return true;
  };

  // First-in-class: reject the table if renumbering from another basepoint
  // gives a lexicographically smaller complete table.
  auto is_canonical = [&]() -> bool {
    const int n = static_cast<int>(tab.size());
    for (int base = 1; base < n; ++base) {
      std::vector<int> newnum(static_cast<std::size_t>(n), -1);
      std::vector<int> order;
      newnum[static_cast<std::size_t>(base)] = 0;
      order.push_back(base);
      bool smaller = false, bigger = false;
      for (std::size_t qi = 0; qi < order.size() && !smaller && !bigger; ++qi) {
        int oc = order[qi];
        for (std::size_t c = 0; c < cols && !smaller && !bigger; ++c) {
          int t = tab[static_cast<std::size_t>(oc)][c];
          if (newnum[static_cast<std::size_t>(t)] == -1) {
            newnum[static_cast<std::size_t>(t)] = static_cast<int>(order.size());
            order.push_back(t);
          }
          int renum = newnum[static_cast<std::size_t>(t)];
          int orig = tab[qi][c];
          if (renum != orig) {
            if (renum < orig) smaller = true;
            else bigger = true;
          }
        }
      }
      if (smaller) return false;
    }
    return true;
  };

  auto rec = [&](auto&& self) -> void {
    budget.spend();
    // First undefined slot in row-major order.
    int fr = -1, fc = -1;
    for (std::size_t r = 0; r < tab.size() && fr == -1; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        if (tab[r][c] == -1) {
          fr = static_cast<int>(r);
          fc = static_cast<int>(c);
          break;
        }
    if (fr == -1) {
      if (is_canonical()) out.push_back(CosetTable{tab});
      return;
    }
    int limit = static_cast<int>(tab.size());
    for (int d = 0; d <= limit; ++d) {
      if (d == limit) {
        if (limit >= max_index) break;
        tab.emplace_back(cols, -1);
      } else {
        int ic = static_cast<int>(pres::gl_inverse(static_cast<pres::GLetter>(fc)));
        if (tab[static_cast<std::size_t>(d)][static_cast<std::size_t>(ic)] != -1)
          continue;
      }
      std::size_t mark = trail.size();
      std::size_t rows_before = tab.size();
      define(fr, fc, d);
      if (deduce()) self(self);
      while (trail.size() > mark) {
        tab[static_cast<std::size_t>(trail.back().row)]
           [static_cast<std::size_t>(trail.back().col)] = -1;
        trail.pop_back();
      }
      while (tab.size() > rows_before) tab.pop_back();
    }
  };
  rec(rec);
  return out;
}

// Number of subgroups (not classes) a class representative stands for:
// index / #points whose stabilizer equals that of the basepoint.
inline long long subgroups_in_class(const GroupPresentation& p, const CosetTable& t) {
  const int n = t.index();
  std::vector<Perm> gens;
  for (std::size_t g = 0; g < p.num_generators(); ++g)
    gens.push_back(t.action(static_cast<int>(g)));
  FiniteGroupTable img = FiniteGroupTable::make("coset-action",
                                                static_cast<std::size_t>(n), gens);
  // Stabilizer of 0 inside the image group, then its common fixed points.
  std::vector<bool> fixed(static_cast<std::size_t>(n), true);
  for (const Perm& e : img.elements) {
    if (e[0] != 0) continue;
    for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j)
      if (e[j] != j) fixed[j] = false;
  }
  long long f = std::count(fixed.begin(), fixed.end(), true);
  return n / f;
}

// ----- characteristic kernels ----------------------------------------------------

struct CharacteristicKernelData {
  int index_bound = 1;
  FiniteGroupTable quotient;  // F3/K_i in the product of the coset actions
};

inline GroupPresentation free_group_presentation() {
  return pres::make_presentation({"x1", "x2", "x3"}, {});
}

// F3/K_i as the image of F3 in the product of the coset actions of one
// subgroup per conjugacy class (conjugate subgroups share their core, so the
// kernel is exactly K_i and is characteristic).
inline CharacteristicKernelData characteristic_quotient(
    int index_bound, std::size_t table_cap = 100'000,
    const SearchBudget& budget = {}) {
  GroupPresentation f3 = free_group_presentation();
  std::vector<CosetTable> tables = low_index_subgroups(f3, index_bound, budget);
  std::size_t degree = 0;
  for (const CosetTable& t : tables) degree += static_cast<std::size_t>(t.index());
  std::vector<Perm> gens(3, Perm(degree));
  std::size_t off = 0;
  for (const CosetTable& t : tables) {
    for (int g = 0; g < 3; ++g) {
      Perm a = t.action(g);
      for (std::size_t i = 0; i < a.size(); ++i)
        gens[static_cast<std::size_t>(g)][off + i] =
            static_cast<std::uint16_t>(off + a[i]);
    }
    off += static_cast<std::size_t>(t.index());
  }
  CharacteristicKernelData out{index_bound,
                               FiniteGroupTable::make(
                                   "F3/K" + std::to_string(index_bound), degree,
                                   gens, table_cap)};
  return out;
}

// ----- congruence images ----------------------------------------------------------

struct CongruenceImage {
  Perm action;           // permutation of quotient element indices
  long long aut_order;   // order as an automorphism of the quotient
  long long out_order;   // least e with the e-th power inner
};

// Whether an automorphism (given as a permutation of element indices) is
// conjugation by some element. Agreement on generators suffices.
inline bool is_inner_automorphism(const FiniteGroupTable& Q, const Perm& f) {
  for (std::uint32_t c = 0; c < Q.order(); ++c) {
    bool ok = true;
    for (std::uint32_t gi : Q.gen_index)
      if (f[gi] != Q.conj(c, gi)) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

// The automorphism of F3/K induced by alpha. Well-definedness is certified:
// the element-wise map built from definition words is checked to be a
// bijective homomorphism, which fails if the kernel were not invariant.
inline CongruenceImage congruence_image(const fgroup::FreeAutomorphism& alpha,
                                        const CharacteristicKernelData& K,
                                        std::size_t inner_search_cap = 10'000) {
  const FiniteGroupTable& Q = K.quotient;
  if (!Q.has_table)
    throw budget_error("congruence image: quotient is not tabulated");
  const std::size_t n = Q.order();

  auto eval_in_quotient = [&](const fgroup::FreeWord& w) -> std::uint32_t {
    std::uint32_t acc = 0;
    for (fgroup::FLetter l : w) {
      std::uint32_t g = Q.gen_index[static_cast<std::size_t>(fgroup::fl_generator(l))];
      acc = Q.mul(acc, (l & 1) ? Q.inv_of[g] : g);
    }
    return acc;
  };

  Perm phi(n);
  std::vector<bool> hit(n, false);
  for (std::uint32_t e = 0; e < n; ++e) {
    // Definition words are over the same three generators as free words.
    fgroup::FreeWord w(Q.def_words[e].begin(), Q.def_words[e].end());
    std::uint32_t v = eval_in_quotient(alpha.apply(w));
    if (hit[v]) throw domain_error("congruence image: kernel is not invariant");
    hit[v] = true;
    phi[e] = static_cast<std::uint16_t>(v);
  }
  for (std::uint32_t e = 0; e < n; ++e)
    for (std::uint32_t gi : Q.gen_index)
      if (phi[Q.mul(e, gi)] != Q.mul(phi[e], phi[gi]))
        throw domain_error("congruence image: kernel is not invariant");

  CongruenceImage out;
  out.action = phi;
  out.aut_order = perm_order(phi);

  if (n > inner_search_cap)
    throw budget_error("congruence image: innerness search over " +
                       std::to_string(n) + " elements exceeds the cap");
  Perm pow = phi;
  out.out_order = out.aut_order;
  for (long long e = 1; e <= out.aut_order; ++e) {
    if (e > 1) {
      Perm next(n);
      for (std::size_t i = 0; i < n; ++i) next[i] = phi[pow[i]];
      pow = std::move(next);
    }
    if (is_inner_automorphism(Q, pow)) {
      out.out_order = e;
      break;
    }
  }
  return out;
}

// ----- separating witness -----------------------------------------------------------

struct SeparationCertificate {
  enum class Kind { Congruence, Catalog };
  Kind kind;
  int level = 0;        // congruence: the index bound i of K_i
  std::string target;   // catalog: target group name
  long long value1 = 0; // out-orders (congruence) or surjection counts (catalog)
  long long value2 = 0;

  bool operator==(const SeparationCertificate& o) const = default;
};

struct WitnessOutcome {
  enum class Status { Rejected, Found, Exhausted };
  Status status;
  std::string detail;
  std::optional<SeparationCertificate> certificate;
  std::optional<mcg::SignedWitness> conjugacy;  // when rejected as conjugate
};

struct WitnessOptions {
  int max_index = 3;                       // congruence stage bound
  std::uint64_t per_target_nodes = 50'000'000;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

namespace detail {

inline std::optional<SeparationCertificate> congruence_stage(
    const std::string& w1, const std::string& w2, const WitnessOptions& opt) {
  fgroup::FreeAutomorphism a1 = fgroup::induced_automorphism(w1);
  fgroup::FreeAutomorphism a2 = fgroup::induced_automorphism(w2);
  for (int i = 2; i <= opt.max_index; ++i) {
    try {
      CharacteristicKernelData K = characteristic_quotient(i);
      CongruenceImage c1 = congruence_image(a1, K);
      CongruenceImage c2 = congruence_image(a2, K);
      if (c1.out_order != c2.out_order)
        return SeparationCertificate{SeparationCertificate::Kind::Congruence, i, "",
                                     c1.out_order, c2.out_order};
    } catch (const budget_error&) {
      return std::nullopt;  // quotients from here on are too large
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Searches congruence quotients (increasing index bound) and then catalog
// quotients of the two mapping-torus groups for a separating certificate.
// Precondition failures (parse handled by the caller, non-pA, or conjugacy up
// to inversion) return Rejected; budget exhaustion returns Exhausted.
inline WitnessOutcome separating_witness(const std::string& w1, const std::string& w2,
                                         const Catalog& catalog,
                                         const WitnessOptions& opt = {}) {
  mcg::MappingClass g1 = mcg::eval(w1), g2 = mcg::eval(w2);
  for (auto* pair : {&w1, &w2}) {
    mcg::MappingClass g = mcg::eval(*pair);
    if (!mcg::is_pseudo_anosov(g))
      return WitnessOutcome{WitnessOutcome::Status::Rejected,
                            "not pseudo-Anosov: " + *pair, std::nullopt, std::nullopt};
  }
  if (auto wit = mcg::conjugate_up_to_inversion(g1, g2))
    return WitnessOutcome{WitnessOutcome::Status::Rejected,
                          "conjugate up to inversion", std::nullopt, wit};

  if (auto cert = detail::congruence_stage(w1, w2, opt))
    return WitnessOutcome{WitnessOutcome::Status::Found,
                          "congruence quotient of index bound " +
                              std::to_string(cert->level),
                          cert, std::nullopt};

  GroupPresentation p1 = torus::torus_presentation(w1);
  GroupPresentation p2 = torus::torus_presentation(w2);
  std::vector<std::size_t> order(catalog.targets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return catalog.targets[a].order() < catalog.targets[b].order();
  });
  for (std::size_t idx : order) {
    const FiniteGroupTable& T = catalog.targets[idx];
    SearchBudget budget;
    budget.max_nodes = opt.per_target_nodes;
    budget.deadline = opt.deadline;
    try {
      long long c1 = count_surjections_up_to_aut(p1, T, budget);
      long long c2 = count_surjections_up_to_aut(p2, T, budget);
      if (c1 != c2)
        return WitnessOutcome{
            WitnessOutcome::Status::Found, "catalog quotient " + T.name,
            SeparationCertificate{SeparationCertificate::Kind::Catalog, 0, T.name, c1,
                                  c2},
            std::nullopt};
    } catch (const budget_error& e) {
      if (opt.deadline && std::chrono::steady_clock::now() > *opt.deadline)
        return WitnessOutcome{WitnessOutcome::Status::Exhausted,
                              std::string("time budget exhausted at target ") + T.name,
                              std::nullopt, std::nullopt};
      // Node budget only: record and move to the next target.
      (void)e;
    }
  }
  return WitnessOutcome{WitnessOutcome::Status::Exhausted,
                        "catalog exhausted without separation", std::nullopt,
                        std::nullopt};
}

// Recomputes the quantities named by a certificate; true when they reproduce
// exactly and still differ.
inline bool replay_certificate(const SeparationCertificate& cert,
                               const std::string& w1, const std::string& w2,
                               const Catalog& catalog) {
  if (cert.kind == SeparationCertificate::Kind::Congruence) {
    CharacteristicKernelData K = characteristic_quotient(cert.level);
    long long o1 = congruence_image(fgroup::induced_automorphism(w1), K).out_order;
    long long o2 = congruence_image(fgroup::induced_automorphism(w2), K).out_order;
    return o1 == cert.value1 && o2 == cert.value2 && o1 != o2;
  }
  for (const FiniteGroupTable& T : catalog.targets) {
    if (T.name != cert.target) continue;
    long long c1 =
        count_surjections_up_to_aut(torus::torus_presentation(w1), T);
    long long c2 =
        count_surjections_up_to_aut(torus::torus_presentation(w2), T);
    return c1 == cert.value1 && c2 == cert.value2 && c1 != c2;
  }
  return false;
}

}  // namespace s04::quot
