#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hodgekit/complex.hpp"
#include "hodgekit/hodge.hpp"
#include "hodgekit/metric.hpp"

namespace hodgekit {

enum class NormFamily { l2, sobolev, ck };
std::string_view to_string(NormFamily family) noexcept;

struct NormReport {
  NormFamily family = NormFamily::l2;
  int parameter = 0;  // s for Sobolev, k for C^k
  double value = 0.0;
  std::string resolution;  // "<complex id>/<simplex counts>"
};

/// "<id>/<N_0>x<N_1>x..." identifying the mesh a norm was evaluated on.
std::string resolution_tag(const SimplicialComplex& complex);

/// sqrt(<(I + Delta)^s omega, omega>_M). s = 0 is the L2 norm. Error(parameter)
/// for s < 0.
double sobolev_norm(const HodgeSystem& system, const Cochain& omega, int s);

/// Sum over j <= k of max_i |(D^j omega)_i| / vol(simplex i), where D applies d
/// and delta alternately starting with d (with delta when omega has top
/// degree). Error(parameter) for k < 0.
double ck_norm(const MetricStructure& metric, const Cochain& omega, int k);

NormReport sobolev_report(const HodgeSystem& system, const Cochain& omega, int s);
NormReport ck_report(const MetricStructure& metric, const Cochain& omega, int k);

/// ||G omega||_{H^s} / ||omega||_{H^{s-2}}; 0 for omega = 0.
double green_norm_ratio(const HodgeSystem& system, const Cochain& omega, int s);

struct GreenNormEstimate {
  int degree = 0;
  int s = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;              // max over trials
  std::vector<double> ratios;         // per trial
  std::vector<double> running_max;    // estimate after each trial prefix
};

/// Max over seeded standard-normal cochains of green_norm_ratio. Trial i draws
/// from its own generator seeded by (seed, i), so results do not depend on
/// scheduling. Error(parameter) for s < 2 or trials < 1.
GreenNormEstimate estimate_green_operator_norm(const HodgeSystem& system, int degree, int s,
                                               int trials, std::uint64_t seed);

/// Standard-normal cochain from the generator seeded by (seed, stream).
Cochain random_cochain(const SimplicialComplex& complex, int degree, std::uint64_t seed,
                       std::uint64_t stream = 0);

struct NormChain {
  int k = 0;
  int s = 0;
  // ||G w||_{C^k}, ||G w||_{H^s}, ||w||_{H^{s-2}}, ||w||_{C^{s-2}}
  double ck_green = 0.0;
  double hs_green = 0.0;
  double hs2_omega = 0.0;
  double cs2_omega = 0.0;
  // consecutive ratios; empty when the denominator vanishes
  std::optional<double> ratio_ck_hs;
  std::optional<double> ratio_hs_hs2;
  std::optional<double> ratio_hs2_cs2;
};

/// Evaluates the chain ||Gw||_{C^k} <= ||Gw||_{H^s} <= ||w||_{H^{s-2}} <= ||w||_{C^{s-2}}.
/// Error(hypothesis) unless s > k + n/2, and Error(parameter) for s < 2.
NormChain norm_chain_probe(const HodgeSystem& system, const Cochain& omega, int k, int s);

}  // namespace hodgekit
