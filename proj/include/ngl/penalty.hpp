#pragma once

#include "ngl/graph_core.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ngl {

enum class PenaltyKind { L1, Mcp, Scad };

inline constexpr double kDefaultGammaMcp = 1.01;
inline constexpr double kDefaultGammaScad = 2.01;

/// A concave sparsity penalty, identified through its derivative on [0, inf).
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::L1;
  double lambda = 0.0;
  double gamma = 0.0; // unused for l1

  static PenaltySpec l1(double lambda) { return {PenaltyKind::L1, lambda, 0.0}; }
  static PenaltySpec mcp(double lambda, double gamma = kDefaultGammaMcp) {
    return {PenaltyKind::Mcp, lambda, gamma};
  }
  static PenaltySpec scad(double lambda, double gamma = kDefaultGammaScad) {
    return {PenaltyKind::Scad, lambda, gamma};
  }

  /// Throws ArgumentError unless lambda >= 0 and gamma fits the kind.
  void validate() const;
};

PenaltyKind parse_penalty_kind(std::string_view name);
std::string to_string(PenaltyKind kind);
/// Builds a spec from its name; gamma <= 0 selects the kind's default.
PenaltySpec make_penalty(std::string_view name, double lambda, double gamma = 0.0);

/// h'_lambda(x) for x >= 0.
double deriv(const PenaltySpec &spec, double x);

/// h_lambda(x) for x >= 0, with h_lambda(0) = 0. Only used for reporting.
double value(const PenaltySpec &spec, double x);

/// MM weights z_i = h'_lambda(w_i).
Vector mm_weights(const PenaltySpec &spec, const WeightVector &w);

/// Checks the derivative conditions required of a sparsity penalty:
/// h'(0) = lambda, nonincreasing, vanishing beyond some gamma * lambda, and
/// h'(c * lambda) >= lambda / 2. Returns one message per violated condition.
std::vector<std::string> validate_assumption1(const PenaltySpec &spec, double c);

} // namespace ngl
