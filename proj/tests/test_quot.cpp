// Finite-quotient engine: permutation group tables, target catalog,
// homomorphism and surjection enumeration, low-index subgroups against
// Hall's recursive formula (independent oracle), characteristic kernels,
// congruence images, and the separating-witness search with certificate
// replay.

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "s04/fgroup.hpp"
#include "s04/quot.hpp"
#include "s04/torus.hpp"

using namespace s04;
using quot::FiniteGroupTable;
using quot::Perm;

namespace {

const FiniteGroupTable& target(const std::string& name) {
  for (const auto& t : quot::default_catalog().targets)
    if (t.name == name) return t;
  throw std::runtime_error("no catalog target " + name);
}

// Hall's recursion for the number of index-n subgroups of a free group of
// rank r: N_n = n (n!)^{r-1} - sum_{i<n} ((n-i)!)^{r-1} N_i.
long long hall_subgroup_count(int rank, int n) {
  std::vector<long long> N(static_cast<std::size_t>(n) + 1, 0);
  auto powfact = [&](int m) {
    long long f = 1;
    for (int i = 2; i <= m; ++i) f *= i;
    long long p = 1;
    for (int i = 1; i < rank; ++i) p *= f;
    return p;
  };
  for (int k = 1; k <= n; ++k) {
    long long total = k * powfact(k);
    for (int i = 1; i < k; ++i) total -= powfact(k - i) * N[static_cast<std::size_t>(i)];
    N[static_cast<std::size_t>(k)] = total;
  }
  return N[static_cast<std::size_t>(n)];
}

// Nielsen substitution x_i -> x_i x_j^-1 on the relators: produces a
// presentation of an isomorphic group on the same generator count.
pres::GroupPresentation nielsen_substitution(const pres::GroupPresentation& p,
                                             int i, int j) {
  pres::GroupPresentation q;
  q.generator_names = p.generator_names;
  for (const auto& r : p.relators) {
    pres::GenWord w;
    for (pres::GLetter l : r) {
      if (pres::gl_generator(l) == i) {
        if (l & 1) {
          w.push_back(pres::gl_make(j, false));
          w.push_back(pres::gl_make(i, true));
        } else {
          w.push_back(pres::gl_make(i, false));
          w.push_back(pres::gl_make(j, true));
        }
      } else {
        w.push_back(l);
      }
    }
    q.relators.push_back(pres::reduce(w));
  }
  return q;
}

}  // namespace

TEST_CASE("permutation basics") {
  Perm p = {1, 2, 0};
  Perm q = {0, 2, 1};
  CHECK(quot::perm_compose(p, q) == Perm{2, 1, 0});
  CHECK(quot::perm_compose(p, quot::perm_inverse(p)) == quot::perm_identity(3));
  CHECK(quot::perm_order(p) == 3);
  CHECK(quot::perm_order(quot::perm_identity(5)) == 1);
  CHECK(quot::perm_order(Perm{1, 0, 3, 4, 2}) == 6);
}

TEST_CASE("catalog orders, class counts, automorphism groups") {
  struct Row {
    const char* name;
    std::size_t order, classes, auts;
  };
  // |Aut| values frozen from the order-matched generator-image search.
  for (const Row& r : std::initializer_list<Row>{{"C2", 2, 2, 1},
                                                 {"C12", 12, 12, 4},
                                                 {"V4", 4, 4, 6},
                                                 {"E8", 8, 8, 168},
                                                 {"S3", 6, 3, 6},
                                                 {"S4", 24, 5, 24},
                                                 {"A4", 12, 4, 24},
                                                 {"A5", 60, 5, 120},
                                                 {"D4", 8, 5, 8},
                                                 {"D5", 10, 4, 20},
                                                 {"Q8", 8, 5, 24},
                                                 {"PSL27", 168, 6, 336}}) {
    const auto& T = target(r.name);
    INFO(r.name);
    CHECK(T.order() == r.order);
    CHECK(T.class_reps().size() == r.classes);
    CHECK(T.automorphisms().size() == r.auts);
  }
  // Q8 has a unique element of order 2 and six of order 4.
  const auto& q8 = target("Q8");
  int ord2 = 0, ord4 = 0;
  for (std::uint32_t e = 0; e < q8.order(); ++e) {
    if (q8.element_order(e) == 2) ++ord2;
    if (q8.element_order(e) == 4) ++ord4;
  }
  CHECK(ord2 == 1);
  CHECK(ord4 == 6);
}

TEST_CASE("catalog parsing") {
  auto cat = quot::parse_catalog("test", "# comment\nC2 cyclic 2\n\nS3 symmetric 3\n");
  CHECK(cat.targets.size() == 2);
  CHECK(cat.targets[1].order() == 6);
  CHECK_THROWS_AS(quot::parse_catalog("x", "C2 wat 2\n"), parse_error);
  CHECK_THROWS_AS(quot::parse_catalog("x", "C2\n"), parse_error);
  CHECK_THROWS_AS(quot::parse_catalog("x", "P psl2 9\n"), parse_error);
}

TEST_CASE("hom enumeration with relator re-checks") {
  auto f3 = quot::free_group_presentation();
  auto homs = quot::enumerate_homs(f3, target("C2"), false);
  auto surj = quot::enumerate_homs(f3, target("C2"), true);
  CHECK(homs.size() == 8);
  CHECK(surj.size() == 7);
  CHECK(quot::enumerate_homs(f3, target("S3"), false).size() == 216);

  // Presentation with relators: the fiber-and-circle group of the identity
  // (F3 x Z). Every returned hom must satisfy every relator independently.
  auto p = torus::torus_presentation("uab");
  const auto& s3 = target("S3");
  auto hs = quot::enumerate_homs(p, s3, false);
  for (const auto& h : hs)
    for (const auto& r : p.relators) {
      std::uint32_t acc = 0;
      for (pres::GLetter l : r) {
        std::uint32_t g = h[static_cast<std::size_t>(pres::gl_generator(l))];
        acc = s3.mul(acc, (l & 1) ? s3.inv_of[g] : g);
      }
      CHECK(acc == 0);
    }
}

TEST_CASE("surjection counts up to automorphism") {
  auto f3 = quot::free_group_presentation();
  CHECK(quot::count_surjections_up_to_aut(f3, target("S3")) == 28);
  CHECK(quot::count_surjections_up_to_aut(f3, target("C2")) == 7);

  // The mapping-torus fast path agrees with the generic path.
  for (const char* w : {"ab", "uab", "aab"}) {
    auto p = torus::torus_presentation(w);
    for (const char* t : {"C2", "C3", "V4", "S3"}) {
      long long fast = quot::count_surjections_up_to_aut(p, target(t));
      long long slow = quot::detail::count_orbits(
          target(t), quot::enumerate_homs(p, target(t), true));
      INFO(w << " onto " << t);
      CHECK(fast == slow);
    }
  }
  // Frozen values: abelian counts match the homology computation.
  CHECK(quot::count_surjections_up_to_aut(torus::torus_presentation("ab"),
                                          target("C2")) == 15);
  CHECK(quot::count_surjections_up_to_aut(torus::torus_presentation("uab"),
                                          target("C2")) == 7);
  CHECK(quot::count_surjections_up_to_aut(torus::torus_presentation("ab"),
                                          target("S3")) == 16);
  CHECK(quot::count_surjections_up_to_aut(torus::torus_presentation("uab"),
                                          target("S3")) == 4);
}

TEST_CASE("fingerprints are invariant under Nielsen moves") {
  quot::Catalog small = quot::parse_catalog(
      "small", "C2 cyclic 2\nC3 cyclic 3\nV4 elem2 2\nS3 symmetric 3\nC6 cyclic 6\n");
  for (const char* w : {"ab", "uab"}) {
    auto p = torus::torus_presentation(w);
    auto fp = quot::fingerprint(p, small);
    std::mt19937 rng(5);
    for (int k = 0; k < 3; ++k) {
      int i = static_cast<int>(rng() % 4), j;
      do j = static_cast<int>(rng() % 4);
      while (j == i);
      p = nielsen_substitution(p, i, j);
      auto fq = quot::fingerprint(p, small);
      CHECK(fq.counts == fp.counts);
    }
  }
}

TEST_CASE("low-index subgroups match Hall's formula") {
  auto f3 = quot::free_group_presentation();
  auto tables = quot::low_index_subgroups(f3, 4);
  std::map<int, long long> total;
  for (const auto& t : tables) total[t.index()] += quot::subgroups_in_class(f3, t);
  for (int n = 1; n <= 4; ++n) {
    INFO("index " << n);
    CHECK(total[n] == hall_subgroup_count(3, n));
  }
  CHECK(total[2] == 7);
  CHECK(total[3] == 97);
}

TEST_CASE("coset tables are complete transitive actions") {
  auto f3 = quot::free_group_presentation();
  for (const auto& t : quot::low_index_subgroups(f3, 3)) {
    for (int g = 0; g < 3; ++g) {
      Perm a = t.action(g);
      CHECK(a.size() == static_cast<std::size_t>(t.index()));
      CHECK(quot::perm_compose(a, quot::perm_inverse(a)) ==
            quot::perm_identity(a.size()));
    }
  }
}

TEST_CASE("characteristic quotients") {
  auto K1 = quot::characteristic_quotient(1);
  CHECK(K1.quotient.order() == 1);
  auto K2 = quot::characteristic_quotient(2);
  CHECK(K2.quotient.order() == 8);
  // Elementary abelian of exponent 2.
  for (std::uint32_t e = 0; e < 8; ++e) {
    CHECK(K2.quotient.element_order(e) <= 2);
    for (std::uint32_t f = 0; f < 8; ++f)
      CHECK(K2.quotient.mul(e, f) == K2.quotient.mul(f, e));
  }
  CHECK(K2.quotient.automorphisms().size() == 168);  // GL(3, 2)

  // Tower nesting: every index <= 2 coset table appears among the index <= 3
  // tables, so the kernel at bound 3 is contained in the kernel at bound 2.
  auto f3 = quot::free_group_presentation();
  auto t2 = quot::low_index_subgroups(f3, 2);
  auto t3 = quot::low_index_subgroups(f3, 3);
  for (const auto& a : t2) {
    bool found = false;
    for (const auto& b : t3)
      if (a.tab == b.tab) found = true;
    CHECK(found);
  }
}

TEST_CASE("congruence images and outer orders") {
  auto K2 = quot::characteristic_quotient(2);
  auto id = quot::congruence_image(fgroup::identity_automorphism(), K2);
  CHECK(id.aut_order == 1);
  CHECK(id.out_order == 1);

  auto ab = quot::congruence_image(fgroup::induced_automorphism("ab"), K2);
  auto uab = quot::congruence_image(fgroup::induced_automorphism("uab"), K2);
  CHECK(ab.out_order == 1);
  CHECK(uab.out_order == 2);
  CHECK(uab.aut_order == 2);
  // Orders divide |Aut(F3/K2)| = 168.
  CHECK(168 % ab.aut_order == 0);
  CHECK(168 % uab.aut_order == 0);

  // Outer homomorphism property: composing word representatives that differ
  // by a rotation changes the induced map by an inner automorphism only.
  auto r1 = quot::congruence_image(fgroup::induced_automorphism("uabv"), K2);
  auto r2 = quot::congruence_image(fgroup::induced_automorphism("vuab"), K2);
  Perm d = quot::perm_compose(r1.action, quot::perm_inverse(r2.action));
  CHECK(quot::is_inner_automorphism(K2.quotient, d));
}

namespace {

// Least e >= 1 with p^e inner on Q; the congruence image of phi^m is the m-th
// power of the image, so this is the outer order of q(phi^m).
long long outer_order_of_perm(const quot::FiniteGroupTable& Q, const Perm& p) {
  Perm pow = p;
  for (long long e = 1;; ++e) {
    if (quot::is_inner_automorphism(Q, pow)) return e;
    pow = quot::perm_compose(pow, p);
  }
}

}  // namespace

TEST_CASE("order identity under powers") {
  auto K2 = quot::characteristic_quotient(2);

  // Functoriality through real composition: concatenating monodromy words
  // composes the induced maps, and the congruence action follows along
  // (composition applies the right factor first).
  for (auto [w1, w2] : std::initializer_list<std::pair<const char*, const char*>>{
           {"uab", "vb"}, {"u", "v"}, {"uab", "uab"}, {"ab", "uv"}}) {
    auto q1 = quot::congruence_image(fgroup::induced_automorphism(w1), K2);
    auto q2 = quot::congruence_image(fgroup::induced_automorphism(w2), K2);
    auto q12 = quot::congruence_image(
        fgroup::induced_automorphism(std::string(w1) + w2), K2);
    CHECK(q12.action == quot::perm_compose(q2.action, q1.action));
  }
  // Materialized small powers of a pseudo-Anosov word agree with action
  // powers (image lengths grow like the stretch factor, so stop early).
  {
    auto base = fgroup::induced_automorphism("uab");
    auto q = quot::congruence_image(base, K2);
    auto phi = base;
    Perm pw = q.action;
    for (int m = 2; m <= 4; ++m) {
      phi = fgroup::compose(phi, base);
      pw = quot::perm_compose(pw, q.action);
      CHECK(quot::congruence_image(phi, K2).action == pw);
    }
  }

  // Order identity o(q(phi^m)) = o(q(phi)) / gcd(o, m) for m <= 12.
  for (const char* w : {"uab", "vb", "uvab", "aubv", "u", "ab"}) {
    auto q = quot::congruence_image(fgroup::induced_automorphism(w), K2);
    long long o = q.out_order;
    CHECK(outer_order_of_perm(K2.quotient, q.action) == o);
    Perm pw = quot::perm_identity(q.action.size());
    for (long long m = 1; m <= 12; ++m) {
      pw = quot::perm_compose(pw, q.action);
      INFO(w << " power " << m);
      CHECK(outer_order_of_perm(K2.quotient, pw) == o / std::gcd(o, m));
    }
  }
}

TEST_CASE("separating witness outcomes and replay") {
  const auto& cat = quot::default_catalog();

  auto rejected = quot::separating_witness("ab", "ba", cat);
  CHECK(rejected.status == quot::WitnessOutcome::Status::Rejected);
  REQUIRE(rejected.conjugacy.has_value());

  auto not_pa = quot::separating_witness("a", "b", cat);
  CHECK(not_pa.status == quot::WitnessOutcome::Status::Rejected);
  CHECK_FALSE(not_pa.conjugacy.has_value());

  auto congruence = quot::separating_witness("ab", "uab", cat);
  REQUIRE(congruence.status == quot::WitnessOutcome::Status::Found);
  REQUIRE(congruence.certificate.has_value());
  CHECK(congruence.certificate->kind ==
        quot::SeparationCertificate::Kind::Congruence);
  CHECK(quot::replay_certificate(*congruence.certificate, "ab", "uab", cat));

  auto catalog = quot::separating_witness("ab", "aab", cat);
  REQUIRE(catalog.status == quot::WitnessOutcome::Status::Found);
  REQUIRE(catalog.certificate.has_value());
  CHECK(catalog.certificate->kind == quot::SeparationCertificate::Kind::Catalog);
  CHECK(catalog.certificate->target == "S3");
  CHECK(quot::replay_certificate(*catalog.certificate, "ab", "aab", cat));
  // A doctored certificate does not replay.
  auto bad = *catalog.certificate;
  bad.value1 += 1;
  CHECK_FALSE(quot::replay_certificate(bad, "ab", "aab", cat));

  // A catalog that cannot separate the pair reports exhaustion.
  quot::Catalog tiny = quot::parse_catalog("tiny", "C2 cyclic 2\n");
  auto exhausted = quot::separating_witness("ab", "abab", tiny);
  CHECK(exhausted.status == quot::WitnessOutcome::Status::Exhausted);
}

TEST_CASE("large targets stay enumerable but refuse tabulation") {
  auto psl13 = quot::make_psl2("PSL213", 13);  // order 1092
  CHECK(psl13.order() == 1092);
  auto capped = quot::FiniteGroupTable::make("capped", psl13.degree, psl13.gens, 100);
  CHECK_FALSE(capped.has_table);
  CHECK_THROWS_AS(capped.order(), budget_error);
  CHECK_THROWS_AS(
      quot::enumerate_homs(quot::free_group_presentation(), capped, false),
      budget_error);
}
