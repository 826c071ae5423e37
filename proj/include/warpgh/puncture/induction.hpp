#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "warpgh/core/error.hpp"
#include "warpgh/core/json_io.hpp"
#include "warpgh/puncture/select.hpp"

namespace warpgh::puncture {

struct LedgerEntry {
  int i = 0;
  size_t holes_added = 0;
  size_t holes_total = 0;
  double gh_prev = 0.0;
  double gh_base = 0.0;
  double budget = 0.0;
  double eps_i = 0.0;
  double denseness = 0.0;
  double denseness_target = 0.0;
  size_t components = 0;
  double bilipschitz = 1.0;
  double r_star = 0.0;
  int attempts = 0;
  size_t points = 0;

  bool budget_ok() const { return gh_base <= budget; }

  json to_json() const {
    json j;
    j["i"] = i;
    j["holes_added"] = holes_added;
    j["holes_total"] = holes_total;
    j["gh_prev"] = gh_prev;
    j["gh_base"] = gh_base;
    j["budget"] = budget;
    j["eps_i"] = eps_i;
    j["denseness"] = denseness;
    j["denseness_target"] = denseness_target;
    j["components"] = components;
    j["bilipschitz"] = bilipschitz;
    j["r_star"] = r_star;
    j["attempts"] = attempts;
    j["points"] = points;
    return j;
  }
};

struct PunctureLedger {
  double eps = 0.0;
  double S = 0.0;
  std::vector<LedgerEntry> stages;

  json to_json() const {
    json j;
    j["eps"] = eps;
    j["S"] = S;
    j["stages"] = json::array();
    for (const auto& e : stages) j["stages"].push_back(e.to_json());
    j["census_note"] =
        "Boundary census counts connected components of the attached boundary spheres; each hole contributes one "
        "sphere, the mechanism behind infinitely generated top-dimensional homology of the limit. Homology itself is "
        "not computed.";
    return j;
  }

  /// One row per stage: i, holes, gh_prev, gh_base, budget, budget_check, denseness, components.
  std::string report_csv() const {
    std::ostringstream os;
    os << "i,holes,gh_prev,gh_base,budget,budget_check,denseness,components\n";
    for (const auto& e : stages)
      os << e.i << ',' << e.holes_total << ',' << fmt17(e.gh_prev) << ',' << fmt17(e.gh_base) << ',' << fmt17(e.budget)
         << ',' << (e.budget_ok() ? "PASS" : "FAIL") << ',' << fmt17(e.denseness) << ',' << e.components << '\n';
    return os.str();
  }
};

/// Thrown when a stage fails; carries the ledger up to the failing stage.
class InductionAborted : public Error {
 public:
  InductionAborted(const Error& e, PunctureLedger partial)
      : Error(e.kind(), e.module(), e.operation(), e.detail()), ledger(std::move(partial)) {}
  PunctureLedger ledger;
};

struct InductionParams {
  double eps = 0.2;
  int n_stages = 3;
  double S = 0.0;  ///< 0 selects diam/4
  size_t min_work_points = 20;
  size_t net_points = 12;
  int retries = 4;
  unsigned threads = 1;
  /// Denseness targets are clamped below by this multiple of the largest work radius.
  double resolution_factor = 1.25;
};

struct InductionResult {
  PunctureLedger ledger;
  SampledSpace final_space;
  std::vector<Hole> holes;
  Correspondence to_base;
};

/// Connected components of the boundary, joined by intrinsic sphere edges only.
/// Rewired edges between different spheres run through the ambient space and are not counted.
inline size_t boundary_components(const SampledSpace& s) {
  std::vector<size_t> parent(s.size());
  std::iota(parent.begin(), parent.end(), size_t{0});
  std::function<size_t(size_t)> find = [&](size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  size_t count = 0;
  for (size_t u = 0; u < s.size(); ++u) {
    if (s.is_base(u)) continue;
    ++count;
    for (const auto& [v, w] : s.graph.adj[u]) {
      if (s.is_base(v) || s.hole_of[v] != s.hole_of[u]) continue;
      const size_t a = find(u), b = find(v);
      if (a != b) parent[a] = b, --count;
    }
  }
  return count;
}

/// Max over base points in the ball of the graph distance to the nearest boundary point.
inline double denseness_radius(const SampledSpace& s, size_t p0, double ball_radius) {
  double worst = 0.0;
  for (size_t x = 0; x < s.size(); ++x) {
    if (!s.is_base(x) || s.geom.distance(s.xyz[x], s.xyz[p0]) > ball_radius) continue;
    double best = std::numeric_limits<double>::infinity();
    for (size_t b = 0; b < s.size(); ++b)
      if (!s.is_base(b)) best = std::min(best, s.space(x, b));
    worst = std::max(worst, best);
  }
  return worst;
}

/// Worst relative deviation of a hole's boundary distances from r_star times the round angle.
inline double boundary_distortion(const SampledSpace& s, const Hole& h) {
  double worst = 0.0;
  for (size_t a = 0; a < h.boundary_ids.size(); ++a)
    for (size_t b = a + 1; b < h.boundary_ids.size(); ++b) {
      const auto u = s.geom.log_map(h.center_xyz, s.xyz[h.boundary_ids[a]]);
      const auto v = s.geom.log_map(h.center_xyz, s.xyz[h.boundary_ids[b]]);
      double dot = 0.0, nu = 0.0, nv = 0.0;
      for (size_t c = 0; c < 3; ++c) dot += u[c] * v[c], nu += u[c] * u[c], nv += v[c] * v[c];
      const double ang = std::acos(std::clamp(dot / std::sqrt(nu * nv), -1.0, 1.0));
      const double want = h.r_star * ang;
      worst = std::max(worst, std::fabs(s.space(h.boundary_ids[a], h.boundary_ids[b]) - want) / want);
    }
  return worst;
}

/**
 * @brief Runs n_stages of batched punctures with eps_i = eps 2^{-i-1}.
 *
 * Stage i selects centers in B_{S 2^i}(p0) at covering target
 * max(S 2^{2-i}, resolution_factor * max work radius), punctures them with
 * r_star = min(r0/10, eps_i/4), and checks the budget, denseness, census,
 * boundary spheres and superadditivity. `snapshot` is called after each stage.
 */
inline InductionResult run_induction(const BaseManifoldSample& base, const InductionParams& ip,
                                     const std::function<void(int, const SampledSpace&)>& snapshot = {}) {
  const char* op = "run_induction";
  if (ip.n_stages < 0 || ip.n_stages > 6) fail(ErrorKind::Validation, "puncture_pipeline", op, "n_stages must be in [0, 6]");
  if (!(ip.eps > 0.0)) fail(ErrorKind::Validation, "puncture_pipeline", op, "eps must be positive");
  InductionResult res;
  res.final_space = base.s;
  res.to_base = Correspondence::identity(base.s.size());
  res.ledger.eps = ip.eps;
  res.ledger.S = ip.S > 0.0 ? ip.S : base.s.geom.diameter() / 4.0;
  const double S = res.ledger.S;
  if (ip.n_stages == 0) return res;

  double r0_max = 0.0;
  for (size_t x = 0; x < base.s.size(); ++x) r0_max = std::max(r0_max, work_radius(base.s, x, ip.min_work_points));
  PunctureOptions po{ip.net_points, ip.min_work_points, ip.retries, ip.threads};
  double gh_sum = 0.0;
  try {
    for (int i = 1; i <= ip.n_stages; ++i) {
      LedgerEntry e;
      e.i = i;
      e.eps_i = ip.eps * std::ldexp(1.0, -i - 1);
      e.budget = (1.0 - std::ldexp(1.0, -i)) * ip.eps;
      e.denseness_target = std::max(S * std::ldexp(1.0, 2 - i), ip.resolution_factor * r0_max);
      e.r_star = std::min(r0_max / 10.0, e.eps_i / 4.0);
      const auto& cur = res.final_space;
      const Selection sel = select_centers(cur, base.p0, i, res.holes, {S, e.denseness_target / 1.1, e.r_star, ip.min_work_points});
      if (sel.centers.empty()) fail(ErrorKind::Selection, "puncture_pipeline", op, "stage " + std::to_string(i) + " added no holes");
      std::vector<HoleSpec> specs = sel.centers;
      for (auto& h : specs) h.r_star = std::min(h.r0 / 10.0, e.eps_i / 4.0);
      PunctureOutcome out = puncture_batch(cur, res.holes, specs, e.eps_i, i, po);
      res.to_base = res.to_base.then(out.corr, cur.size());
      e.gh_prev = out.gh;
      e.gh_base = gh::gh_upper(base.s.space, out.space.space, res.to_base);
      e.bilipschitz = out.bilipschitz;
      e.attempts = out.attempts;
      e.r_star = out.holes.back().r_star;
      e.holes_added = specs.size();
      e.holes_total = out.holes.size();
      e.points = out.space.size();
      res.final_space = std::move(out.space);
      res.holes = std::move(out.holes);
      e.components = boundary_components(res.final_space);
      e.denseness = denseness_radius(res.final_space, base.p0, S * std::ldexp(1.0, i));
      gh_sum += e.gh_prev;
      res.ledger.stages.push_back(e);
      if (snapshot) snapshot(i, res.final_space);

      const std::string at = "stage " + std::to_string(i) + ": ";
      if (!e.budget_ok())
        fail(ErrorKind::Budget, "puncture_pipeline", op, at + "gh_base " + fmt6(e.gh_base) + " exceeds budget " + fmt6(e.budget));
      if (e.denseness > e.denseness_target)
        fail(ErrorKind::Budget, "puncture_pipeline", op, at + "denseness " + fmt6(e.denseness) + " above target " + fmt6(e.denseness_target));
      if (e.components != e.holes_total)
        fail(ErrorKind::Contract, "puncture_pipeline", op, at + "boundary census differs from hole count");
      if (gh_sum < e.gh_base * (1.0 - 1e-12))
        fail(ErrorKind::Contract, "puncture_pipeline", op, at + "sum of per-stage bounds below gh_base");
      if (i > 1 && e.denseness > res.ledger.stages[i - 2].denseness)
        fail(ErrorKind::Contract, "puncture_pipeline", op, at + "denseness radius increased");
      for (const auto& h : res.holes)
        if (boundary_distortion(res.final_space, h) > 0.10)
          fail(ErrorKind::Contract, "puncture_pipeline", op, at + "boundary sphere distortion above 10%");
    }
  } catch (const Error& err) {
    throw InductionAborted(err, res.ledger);
  }
  return res;
}

}  // namespace warpgh::puncture
