// Verdict layer: decides whether two monodromy words give homeomorphic
// mapping tori. Conjugacy up to inversion (a total decision) yields
// HOMEOMORPHIC with a verifying witness; a separating finite quotient yields
// DISTINCT with a replayable certificate; budget exhaustion yields
// INCONCLUSIVE, never a guess. Words that are not pseudo-Anosov get a
// diagnostic NOT_APPLICABLE verdict: the rigidity decision only covers
// hyperbolic bundles.

#pragma once

#include <optional>
#include <string>

#include "s04/mcg.hpp"
#include "s04/quot.hpp"

namespace s04 {

enum class Verdict { Homeomorphic, Distinct, Inconclusive, NotApplicable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Homeomorphic: return "HOMEOMORPHIC";
    case Verdict::Distinct: return "DISTINCT";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    case Verdict::NotApplicable: return "NOT_APPLICABLE";
  }
  return "?";
}

struct DistinguishReport {
  Verdict verdict;
  std::string reason;
  std::optional<mcg::SignedWitness> witness;               // HOMEOMORPHIC
  std::optional<quot::SeparationCertificate> certificate;  // DISTINCT
};

inline DistinguishReport distinguish(const std::string& w1, const std::string& w2,
                                     const quot::Catalog& catalog,
                                     const quot::WitnessOptions& opt = {}) {
  quot::WitnessOutcome out = quot::separating_witness(w1, w2, catalog, opt);
  switch (out.status) {
    case quot::WitnessOutcome::Status::Rejected:
      if (out.conjugacy)
        return {Verdict::Homeomorphic, out.detail, out.conjugacy, std::nullopt};
      return {Verdict::NotApplicable, out.detail, std::nullopt, std::nullopt};
    case quot::WitnessOutcome::Status::Found:
      return {Verdict::Distinct, out.detail, std::nullopt, out.certificate};
    case quot::WitnessOutcome::Status::Exhausted:
      break;
  }
  return {Verdict::Inconclusive, out.detail, std::nullopt, std::nullopt};
}

}  // namespace s04
