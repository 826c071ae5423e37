#pragma once

#include <cmath>
#include <string>

#include "warpgh/core/error.hpp"
#include "warpgh/core/json_io.hpp"

namespace warpgh::model {

/// Inputs of the model builders. delta = 0 selects delta0; r_max = 0 selects a default.
struct ModelParams {
  int n = 3;
  double epsilon = 0.01;
  double alpha = 1e-4;
  double delta = 0.0;
  double kappa = 0.01;
  double r_max = 0.0;
  double neck_exponent = 0.0;  ///< tail exponent used by the local model; 0 means alpha

  double tail_exponent() const { return neck_exponent > 0.0 ? neck_exponent : alpha; }
};

/// Upper end of admissible alpha: half of the threshold that keeps lambda2 of the
/// cone tail (1-e) r positive against the delta r^alpha factor.
inline double alpha0(int n, double epsilon) {
  return (n - 1) * epsilon * (2.0 - epsilon) / (4.0 * (1.0 - epsilon) * (1.0 - epsilon));
}

inline void validate(const ModelParams& p, bool need_kappa) {
  auto bad = [](const std::string& why) { fail(ErrorKind::Validation, "model_forge", "validate", why); };
  if (p.n < 2) bad("n must be >= 2");
  if (!(p.epsilon > 0.0 && p.epsilon <= 0.01)) bad("epsilon must lie in (0, 1/100]");
  if (!(p.alpha > 0.0)) bad("alpha must be positive");
  if (p.alpha > alpha0(p.n, p.epsilon)) bad("alpha exceeds alpha0(n, epsilon) = " + fmt17(alpha0(p.n, p.epsilon)));
  if (p.neck_exponent < 0.0 || p.neck_exponent > alpha0(p.n, p.epsilon)) bad("neck exponent out of range");
  if (!(p.delta >= 0.0) || !std::isfinite(p.delta)) bad("delta must be >= 0 (0 selects delta0)");
  if (need_kappa && !(p.kappa > 0.0 && p.kappa <= 0.01)) bad("kappa must lie in (0, 1/100]");
  if (!(p.r_max >= 0.0) || !std::isfinite(p.r_max)) bad("r_max must be >= 0");
}

struct ModelConstants {
  double c1 = 0.0;
  double R1 = 0.0;
  double log_c2 = 0.0;  ///< log of exp(-R1^2 alpha^-2 c1^-2 eps^-2); the value itself underflows
  double delta0 = 0.0;
  double xi = 0.0;
  double C = 0.0;       ///< tail shift; the finite ramp reaches the cone with C = 0
  double R = 0.0;
  double tau = 0.0;
  double mu = 0.0;
  double alpha0 = 0.0;
  double ramp_end = 0.0;
  int ramp_stages = 0;
  double t_recap = 0.0;  ///< re-cap scale when delta < delta0
  double t_local = 0.0;  ///< rescaling factor of the local model

  json to_json() const {
    json j;
    j["c1"] = c1;
    j["R1"] = R1;
    j["log_c2"] = log_c2;
    j["delta0"] = delta0;
    j["xi"] = xi;
    j["C"] = C;
    j["R"] = R;
    j["tau"] = tau;
    j["mu"] = mu;
    j["alpha0"] = alpha0;
    j["ramp_end"] = ramp_end;
    j["ramp_stages"] = ramp_stages;
    j["t_recap"] = t_recap;
    j["t_local"] = t_local;
    return j;
  }
};

}  // namespace warpgh::model
