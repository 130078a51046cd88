#pragma once

#include <cstdint>
#include <string>

#include "actplace/serialization.hpp"

namespace actplace {

struct VerifyOptions {
  std::size_t triples = 1000;   // supermodularity samples
  std::uint64_t seed = 1;
  double eps = 0.0;             // 0 selects a scale-aware default
  double c = 1e-4;
  double a0 = 1e-4;
  int r = 2;                    // fact2 budget
  int l = 2;                    // fact2 step count
  double slack = 1e-9;
  Exec exec = Exec::parallel;
};

struct VerifyReport {
  std::string suite;
  bool passed = true;
  std::size_t checks = 0;
  Json failures = Json::array();  // counterexample dumps
  Json details = Json::object();

  Json to_json() const;
};

/// Diminishing returns of tr((W_Delta + eps I)^{-1}) on random
/// (Delta1 subset Delta2, a) triples.
VerifyReport verify_supermodularity(const NodeGramianSet& gramians, const VerifyOptions& options);

/// Greedy and bounded-energy placements against exhaustive search at a
/// ladder of energy bounds: cardinality ratio within F, the (1 + c) E
/// guarantee, both exit conditions, and controllability.
VerifyReport verify_oracle(const NodeGramianSet& gramians, const VerifyOptions& options);

/// Data-dependent greedy certificate
/// l / |Delta*| <= 1 + log[(h(V) - h(empty)) / (h(V) - h(Delta_{l-1}))].
VerifyReport verify_fact1(const NodeGramianSet& gramians, const VerifyOptions& options);

/// The l-step naive greedy against (1 - e^{-l/r}) v* + n e^{-l/r} / eps.
VerifyReport verify_fact2(const NodeGramianSet& gramians, const VerifyOptions& options);

VerifyReport run_verify_suite(const std::string& suite, const NodeGramianSet& gramians, const VerifyOptions& options);

/// Scale-aware eps used when VerifyOptions::eps is 0: 0.05 * tr(W_V) / n.
double default_verify_eps(const NodeGramianSet& gramians);

/// Energy bounds tr(W_V^{-1}) * k for a fixed ladder of k.
std::vector<double> energy_ladder(const NodeGramianSet& gramians);

/// Fact-1 right-hand side for a greedy trace that met E after l steps.
double greedy_certificate(const NodeGramianSet& gramians, const GreedyTrace& trace, double eps);

}  // namespace actplace
