#include "ngl/penalty.hpp"
#include "ngl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ngl {

void PenaltySpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ArgumentError("penalty: lambda must be finite and >= 0");
  if (kind == PenaltyKind::Mcp && !(gamma > 1.0))
    throw ArgumentError("penalty: MCP requires gamma > 1");
  if (kind == PenaltyKind::Scad && !(gamma > 2.0))
    throw ArgumentError("penalty: SCAD requires gamma > 2");
}

PenaltyKind parse_penalty_kind(std::string_view name) {
  if (name == "l1")
    return PenaltyKind::L1;
  if (name == "mcp")
    return PenaltyKind::Mcp;
  if (name == "scad")
    return PenaltyKind::Scad;
  throw ArgumentError("unknown penalty '" + std::string(name) + "' (expected l1, mcp or scad)");
}

std::string to_string(PenaltyKind kind) {
  switch (kind) {
  case PenaltyKind::L1:
    return "l1";
  case PenaltyKind::Mcp:
    return "mcp";
  case PenaltyKind::Scad:
    return "scad";
  }
  return "?";
}

PenaltySpec make_penalty(std::string_view name, double lambda, double gamma) {
  PenaltySpec spec;
  switch (parse_penalty_kind(name)) {
  case PenaltyKind::L1:
    spec = PenaltySpec::l1(lambda);
    break;
  case PenaltyKind::Mcp:
    spec = PenaltySpec::mcp(lambda, gamma > 0.0 ? gamma : kDefaultGammaMcp);
    break;
  case PenaltyKind::Scad:
    spec = PenaltySpec::scad(lambda, gamma > 0.0 ? gamma : kDefaultGammaScad);
    break;
  }
  spec.validate();
  return spec;
}

double deriv(const PenaltySpec &spec, double x) {
  if (!(x >= 0.0)) {
    std::ostringstream msg;
    msg << "penalty derivative evaluated at negative x = " << x;
    throw ArgumentError(msg.str());
  }
  const double lam = spec.lambda;
  const double g = spec.gamma;
  switch (spec.kind) {
  case PenaltyKind::L1:
    return lam;
  case PenaltyKind::Mcp:
    return x < g * lam ? lam - x / g : 0.0;
  case PenaltyKind::Scad:
    if (x <= lam)
      return lam;
    return x < g * lam ? (g * lam - x) / (g - 1.0) : 0.0;
  }
  return 0.0;
}

double value(const PenaltySpec &spec, double x) {
  if (!(x >= 0.0))
    throw ArgumentError("penalty value evaluated at negative x");
  const double lam = spec.lambda;
  const double g = spec.gamma;
  switch (spec.kind) {
  case PenaltyKind::L1:
    return lam * x;
  case PenaltyKind::Mcp:
    return x < g * lam ? lam * x - x * x / (2.0 * g) : 0.5 * g * lam * lam;
  case PenaltyKind::Scad:
    if (x <= lam)
      return lam * x;
    if (x < g * lam)
      return (2.0 * g * lam * x - x * x - lam * lam) / (2.0 * (g - 1.0));
    return 0.5 * (g + 1.0) * lam * lam;
  }
  return 0.0;
}

Vector mm_weights(const PenaltySpec &spec, const WeightVector &w) {
  Vector z(w.size());
  for (Index k = 0; k < w.size(); ++k)
    z[k] = deriv(spec, w[k]);
  return z;
}

std::vector<std::string> validate_assumption1(const PenaltySpec &spec, double c) {
  std::vector<std::string> violations;
  const double lam = spec.lambda;

  if (deriv(spec, 0.0) != lam)
    violations.emplace_back("h'(0) != lambda");

  // probe well past gamma * lambda (or a unit scale when lambda = 0)
  const double span = 4.0 * std::max({lam, lam * spec.gamma, 1.0});
  constexpr int kGrid = 2000;
  double prev = deriv(spec, 0.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double cur = deriv(spec, span * i / kGrid);
    if (cur > prev) {
      violations.emplace_back("h' is not nonincreasing on [0, inf)");
      break;
    }
    prev = cur;
  }

  if (spec.kind == PenaltyKind::L1) {
    if (lam > 0.0)
      violations.emplace_back("h' never vanishes: no gamma with h'(x) = 0 for x >= gamma * lambda");
  } else {
    const double cutoff = spec.gamma * lam;
    for (int i = 0; i <= 100; ++i) {
      if (deriv(spec, cutoff * (1.0 + i / 25.0)) != 0.0) {
        violations.emplace_back("h'(x) != 0 for some x >= gamma * lambda");
        break;
      }
    }
  }

  if (deriv(spec, c * lam) < 0.5 * lam) {
    std::ostringstream msg;
    msg << "h'(c * lambda) = " << deriv(spec, c * lam) << " < lambda / 2 at c = " << c;
    violations.push_back(msg.str());
  }
  return violations;
}

} // namespace ngl
