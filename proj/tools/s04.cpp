// Command-line front end. Subcommands wrap one library operation each:
//
//   nf WORD            normal form of a word in the s/r presentation
//   conj W1 W2         conjugacy of mapping classes, up to inversion
//   pa WORD            periodic / reducible / pseudo-Anosov classification
//   aut WORD           induced automorphism of the fiber group
//   fixed WORD         fixed conjugacy classes of the induced automorphism
//   torus WORD         mapping-torus presentation, homology, fibered norm
//   spectrum WORD      surjection-count fingerprint over a target catalog
//   witness W1 W2      search for a separating finite quotient
//   distinguish W1 W2  homeomorphism verdict for the two mapping tori
//
// Exit codes: 0 definite answer (including diagnostics), 2 malformed input
// or usage, 3 budget exhausted / inconclusive.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "s04/cache.hpp"
#include "s04/distinguish.hpp"
#include "s04/errors.hpp"
#include "s04/fgroup.hpp"
#include "s04/mcg.hpp"
#include "s04/pslz.hpp"
#include "s04/quot.hpp"
#include "s04/torus.hpp"

namespace {

using json = nlohmann::ordered_json;

struct GlobalOpts {
  bool json_out = false;
  bool stable = false;
  std::optional<std::string> catalog_path;
  std::optional<std::string> cache_dir;
  std::optional<double> budget_secs;
  int len = 8;
  int powers = 6;
  int index_bound = 3;
};

std::string timestamp_utc() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void stamp(json& j, const GlobalOpts& g) {
  j["schema"] = 1;
  if (!g.stable) j["generated_at"] = timestamp_utc();
}

int emit(const std::string& text, int code = 0) {
  std::fputs(text.c_str(), stdout);
  return code;
}

s04::quot::Catalog load_catalog(const GlobalOpts& g) {
  if (!g.catalog_path) return s04::quot::default_catalog();
  std::ifstream in(*g.catalog_path, std::ios::binary);
  if (!in) throw s04::parse_error("catalog: cannot read " + *g.catalog_path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return s04::quot::parse_catalog(*g.catalog_path, text);
}

s04::quot::WitnessOptions witness_options(const GlobalOpts& g) {
  s04::quot::WitnessOptions opt;
  opt.max_index = g.index_bound;
  if (g.budget_secs)
    opt.deadline = std::chrono::steady_clock::now() +
                   std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                       std::chrono::duration<double>(*g.budget_secs));
  return opt;
}

std::string describe(const s04::quot::SeparationCertificate& c) {
  if (c.kind == s04::quot::SeparationCertificate::Kind::Congruence)
    return "congruence quotient at index bound " + std::to_string(c.level) +
           ", outer orders " + std::to_string(c.value1) + " vs " +
           std::to_string(c.value2);
  return "catalog target " + c.target + ", surjection counts " +
         std::to_string(c.value1) + " vs " + std::to_string(c.value2);
}

json certificate_json(const s04::quot::SeparationCertificate& c) {
  json j;
  if (c.kind == s04::quot::SeparationCertificate::Kind::Congruence) {
    j["kind"] = "congruence";
    j["index_bound"] = c.level;
    j["outer_orders"] = {c.value1, c.value2};
  } else {
    j["kind"] = "catalog";
    j["target"] = c.target;
    j["surjection_counts"] = {c.value1, c.value2};
  }
  return j;
}

json witness_json(const s04::mcg::SignedWitness& w) {
  return json{{"sign", w.sign}, {"conjugator", s04::mcg::to_string(w.xi)}};
}

// ---- subcommand bodies -------------------------------------------------------

int run_nf(const GlobalOpts& g, const std::string& word) {
  s04::pslz::PslWord nf = s04::pslz::parse(word);
  std::string str = s04::pslz::to_string(nf);
  if (!g.json_out) return emit(str + "\n");
  json j;
  stamp(j, g);
  j["command"] = "nf";
  j["input"] = word;
  j["normal_form"] = str;
  return emit(j.dump(2) + "\n");
}

int run_conj(const GlobalOpts& g, const std::string& w1, const std::string& w2) {
  auto g1 = s04::mcg::eval(w1), g2 = s04::mcg::eval(w2);
  auto wit = s04::mcg::conjugate_up_to_inversion(g1, g2);
  if (!g.json_out) {
    std::string out;
    if (wit) {
      out = "conjugate up to inversion: sign " +
            std::string(wit->sign > 0 ? "+1" : "-1") + "\nconjugator: " +
            s04::mcg::to_string(wit->xi) + "\n";
    } else {
      out = "not conjugate (even up to inversion)\n";
    }
    return emit(out);
  }
  json j;
  stamp(j, g);
  j["command"] = "conj";
  j["inputs"] = {w1, w2};
  j["conjugate_up_to_inversion"] = wit.has_value();
  if (wit) j["witness"] = witness_json(*wit);
  return emit(j.dump(2) + "\n");
}

int run_pa(const GlobalOpts& g, const std::string& word) {
  auto cls = s04::mcg::eval(word);
  auto tr = s04::mcg::trace_abs(cls);
  // Finite order (periodic) exactly when the s/r part has finite order: the
  // translation part has exponent 2. Infinite order with |trace| = 2 means a
  // twist along a reducing curve.
  const char* kind = tr > 2 ? "pseudo-Anosov"
                            : (s04::pslz::is_finite_order(cls.psl) ? "periodic"
                                                                   : "reducible");
  if (!g.json_out)
    return emit(std::string(kind) + " (|trace| = " + tr.str() + ")\n");
  json j;
  stamp(j, g);
  j["command"] = "pa";
  j["input"] = word;
  j["class"] = kind;
  j["abs_trace"] = tr.str();
  j["pseudo_anosov"] = tr > 2;
  return emit(j.dump(2) + "\n");
}

int run_aut(const GlobalOpts& g, const std::string& word) {
  auto phi = s04::fgroup::induced_automorphism(word);
  const char* names = "xyz";
  if (!g.json_out) {
    std::string out;
    for (int i = 0; i < 3; ++i)
      out += std::string(1, names[i]) + " -> " +
             s04::fgroup::to_string(phi.fwd[static_cast<std::size_t>(i)]) + "\n";
    return emit(out);
  }
  json j;
  stamp(j, g);
  j["command"] = "aut";
  j["input"] = word;
  json img;
  for (int i = 0; i < 3; ++i)
    img[std::string(1, names[i])] = s04::fgroup::to_string(phi.fwd[static_cast<std::size_t>(i)]);
  j["images"] = img;
  return emit(j.dump(2) + "\n");
}

int run_fixed(const GlobalOpts& g, const std::string& word) {
  auto phi = s04::fgroup::induced_automorphism(word);
  s04::fgroup::FixedClassOptions opt;
  opt.max_len = static_cast<std::size_t>(g.len);
  opt.powers = g.powers;
  auto classes = s04::fgroup::fixed_classes(phi, opt);
  // Unoriented count: orbits of class inversion on the result.
  std::size_t unoriented = 0;
  for (const auto& c : classes) {
    auto inv = s04::fgroup::canonical_cyclic(s04::fgroup::invert(c.rep));
    if (!(s04::fgroup::canonical_cyclic(c.rep) > inv)) ++unoriented;
  }
  if (!g.json_out) {
    std::string out;
    for (const auto& c : classes)
      out += s04::fgroup::to_string(c.rep) + " (power " + std::to_string(c.power) +
             ")\n";
    out += "oriented classes: " + std::to_string(classes.size()) + "\n";
    out += "unoriented classes: " + std::to_string(unoriented) + "\n";
    return emit(out);
  }
  json j;
  stamp(j, g);
  j["command"] = "fixed";
  j["input"] = word;
  j["max_len"] = g.len;
  j["powers"] = g.powers;
  json arr = json::array();
  for (const auto& c : classes)
    arr.push_back({{"rep", s04::fgroup::to_string(c.rep)}, {"power", c.power}});
  j["classes"] = arr;
  j["oriented"] = classes.size();
  j["unoriented"] = unoriented;
  return emit(j.dump(2) + "\n");
}

int run_torus(const GlobalOpts& g, const std::string& word) {
  auto p = s04::torus::torus_presentation(word);
  auto h = s04::torus::torus_homology(p);
  if (!g.json_out) {
    std::string out = s04::pres::to_string(p) + "\n";
    out += "H1: " + s04::torus::to_string(h) + "\n";
    out += "fibered Thurston norm: " +
           std::to_string(s04::torus::fibered_thurston_norm()) + "\n";
    return emit(out);
  }
  json j;
  stamp(j, g);
  j["command"] = "torus";
  j["input"] = word;
  j["presentation"] = s04::pres::to_string(p);
  j["h1"] = s04::torus::to_string(h);
  j["free_rank"] = h.free_rank;
  json tors = json::array();
  for (const auto& t : h.torsion) tors.push_back(t.str());
  j["torsion"] = tors;
  j["thurston_norm"] = s04::torus::fibered_thurston_norm();
  return emit(j.dump(2) + "\n");
}

int run_spectrum(const GlobalOpts& g, const std::string& word) {
  auto p = s04::torus::torus_presentation(word);
  s04::quot::Catalog catalog = load_catalog(g);

  std::string request = "schema=1\ncommand=spectrum\npresentation=" +
                        s04::pres::to_string(p) + "\ncatalog=" + catalog.id +
                        "\njson=" + (g.json_out ? "1" : "0") +
                        "\nstable=" + (g.stable ? "1" : "0") + "\n";
  s04::ResultCache cache = s04::ResultCache::resolve(g.cache_dir);
  std::string key = s04::ResultCache::key_of(request);
  if (auto hit = cache.load(key)) return emit(*hit);

  s04::quot::SearchBudget per_target;
  if (g.budget_secs)
    per_target.deadline =
        std::chrono::steady_clock::now() +
        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(*g.budget_secs));
  s04::quot::QuotientFingerprint fp = s04::quot::fingerprint(p, catalog, per_target);

  bool complete = true;
  std::string out;
  if (!g.json_out) {
    out = "catalog: " + fp.catalog_id + "\n";
    for (const auto& [name, count] : fp.counts) {
      out += name + " " + (count ? std::to_string(*count) : "unknown") + "\n";
      if (!count) complete = false;
    }
  } else {
    json j;
    stamp(j, g);
    j["command"] = "spectrum";
    j["input"] = word;
    j["catalog_id"] = fp.catalog_id;
    json counts;
    for (const auto& [name, count] : fp.counts) {
      if (count) counts[name] = *count;
      else {
        counts[name] = "unknown";
        complete = false;
      }
    }
    j["counts"] = counts;
    out = j.dump(2) + "\n";
  }
  // Only complete fingerprints are cached: a partial one depends on budgets.
  if (complete) cache.store(key, out);
  return emit(out, complete ? 0 : 3);
}

int run_witness(const GlobalOpts& g, const std::string& w1, const std::string& w2) {
  s04::quot::Catalog catalog = load_catalog(g);
  s04::quot::WitnessOutcome out =
      s04::quot::separating_witness(w1, w2, catalog, witness_options(g));
  using Status = s04::quot::WitnessOutcome::Status;
  if (!g.json_out) {
    std::string text;
    switch (out.status) {
      case Status::Rejected:
        text = "status: rejected\nreason: " + out.detail + "\n";
        if (out.conjugacy)
          text += "conjugator: " + s04::mcg::to_string(out.conjugacy->xi) +
                  " (sign " + (out.conjugacy->sign > 0 ? std::string("+1") : "-1") +
                  ")\n";
        break;
      case Status::Found:
        text = "status: found\ncertificate: " + describe(*out.certificate) + "\n";
        break;
      case Status::Exhausted:
        text = "status: exhausted\nnote: " + out.detail + "\n";
        break;
    }
    return emit(text, out.status == Status::Exhausted ? 3 : 0);
  }
  json j;
  stamp(j, g);
  j["command"] = "witness";
  j["inputs"] = {w1, w2};
  switch (out.status) {
    case Status::Rejected: j["status"] = "rejected"; break;
    case Status::Found: j["status"] = "found"; break;
    case Status::Exhausted: j["status"] = "exhausted"; break;
  }
  j["detail"] = out.detail;
  if (out.certificate) j["certificate"] = certificate_json(*out.certificate);
  if (out.conjugacy) j["witness"] = witness_json(*out.conjugacy);
  return emit(j.dump(2) + "\n", out.status == Status::Exhausted ? 3 : 0);
}

int run_distinguish(const GlobalOpts& g, const std::string& w1,
                    const std::string& w2) {
  s04::quot::Catalog catalog = load_catalog(g);
  s04::DistinguishReport rep =
      s04::distinguish(w1, w2, catalog, witness_options(g));
  int code = rep.verdict == s04::Verdict::Inconclusive ? 3 : 0;
  if (!g.json_out) {
    std::string out = std::string("verdict: ") + s04::to_string(rep.verdict) + "\n";
    if (!rep.reason.empty()) out += "reason: " + rep.reason + "\n";
    if (rep.witness)
      out += std::string("sign: ") + (rep.witness->sign > 0 ? "+1" : "-1") +
             "\nconjugator: " + s04::mcg::to_string(rep.witness->xi) + "\n";
    if (rep.certificate) out += "certificate: " + describe(*rep.certificate) + "\n";
    return emit(out, code);
  }
  json j;
  stamp(j, g);
  j["command"] = "distinguish";
  j["inputs"] = {w1, w2};
  j["verdict"] = s04::to_string(rep.verdict);
  j["reason"] = rep.reason;
  if (rep.witness) j["witness"] = witness_json(*rep.witness);
  if (rep.certificate) j["certificate"] = certificate_json(*rep.certificate);
  return emit(j.dump(2) + "\n", code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-group toolkit for four-punctured-sphere bundle monodromies"};
  app.require_subcommand(1);
  app.fallthrough();  // --json / --stable may follow the subcommand

  GlobalOpts g;
  app.add_flag("--json", g.json_out, "emit JSON instead of text");
  app.add_flag("--stable", g.stable, "suppress timestamps for reproducible output");

  std::string word, word2;

  auto* nf = app.add_subcommand("nf", "normal form in the s/r presentation");
  nf->add_option("word", word, "word over s, r, R (e.g. 'srsr')")->required();

  auto* conj = app.add_subcommand("conj", "conjugacy of two mapping classes");
  conj->add_option("word1", word, "monodromy word")->required();
  conj->add_option("word2", word2, "monodromy word")->required();

  auto* pa = app.add_subcommand("pa", "Nielsen-Thurston classification");
  pa->add_option("word", word, "monodromy word over a, b, u, v")->required();

  auto* aut = app.add_subcommand("aut", "induced automorphism of the fiber group");
  aut->add_option("word", word, "monodromy word")->required();

  auto* fixed = app.add_subcommand("fixed", "fixed conjugacy classes");
  fixed->add_option("word", word, "monodromy word")->required();
  fixed->add_option("--len", g.len, "max cyclic length to enumerate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fixed->add_option("--powers", g.powers, "also scan these powers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* torus = app.add_subcommand("torus", "mapping-torus group and homology");
  torus->add_option("word", word, "monodromy word (may be empty)")->required();

  auto* spectrum = app.add_subcommand("spectrum", "quotient fingerprint");
  spectrum->add_option("word", word, "monodromy word")->required();

  auto* witness = app.add_subcommand("witness", "separating finite quotient");
  witness->add_option("word1", word, "monodromy word")->required();
  witness->add_option("word2", word2, "monodromy word")->required();

  auto* distinguish = app.add_subcommand("distinguish", "homeomorphism verdict");
  distinguish->add_option("word1", word, "monodromy word")->required();
  distinguish->add_option("word2", word2, "monodromy word")->required();

  for (CLI::App* sub : {spectrum, witness, distinguish}) {
    sub->add_option("--catalog", g.catalog_path, "catalog file (default: built-in)");
    sub->add_option("--budget-secs", g.budget_secs, "time budget in seconds")
        ->check(CLI::PositiveNumber);
  }
  for (CLI::App* sub : {witness, distinguish})
    sub->add_option("--index", g.index_bound, "congruence index bound")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  spectrum->add_option("--cache", g.cache_dir,
                       "cache directory (default: $S04_CACHE_DIR)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (nf->parsed()) return run_nf(g, word);
    if (conj->parsed()) return run_conj(g, word, word2);
    if (pa->parsed()) return run_pa(g, word);
    if (aut->parsed()) return run_aut(g, word);
    if (fixed->parsed()) return run_fixed(g, word);
    if (torus->parsed()) return run_torus(g, word);
    if (spectrum->parsed()) return run_spectrum(g, word);
    if (witness->parsed()) return run_witness(g, word, word2);
    if (distinguish->parsed()) return run_distinguish(g, word, word2);
  } catch (const s04::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const s04::budget_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const s04::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
