#pragma once

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "warpgh/core/error.hpp"
#include "warpgh/core/json_io.hpp"
#include "warpgh/curvature/certificate.hpp"
#include "warpgh/gh/bounds.hpp"
#include "warpgh/gh/experiments.hpp"
#include "warpgh/model/full_model.hpp"
#include "warpgh/puncture/induction.hpp"
#include "warpgh/puncture/tangent.hpp"
#include "warpgh/report/config.hpp"
#include "warpgh/report/svg.hpp"

namespace warpgh::report {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitComputation = 3;
inline constexpr int kExitCapacity = 4;
inline constexpr int kExitIo = 5;

inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Capacity: return kExitCapacity;
    case ErrorKind::Io: return kExitIo;
    case ErrorKind::Validation:
    case ErrorKind::Parse:
    case ErrorKind::Domain:
    case ErrorKind::Precondition:
    case ErrorKind::Continuity:
    case ErrorKind::Unsupported:
    case ErrorKind::Resolution: return kExitValidation;
    default: return kExitComputation;
  }
}

/// Stable one-line error record for standard error.
inline std::string error_json(const Error& e) {
  json j;
  j["module"] = e.module();
  j["operation"] = e.operation();
  j["kind"] = to_string(e.kind());
  j["detail"] = e.detail();
  return j.dump();
}

/// Shared invocation context: parsed config, output directory and thread count.
struct RunContext {
  RunConfig cfg;
  std::string out = "out";
  unsigned threads = 1;
  std::ostream* log = &std::cout;

  std::string path(const std::string& name) const { return (std::filesystem::path(out) / name).string(); }

  void prepare_out() const {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) fail(ErrorKind::Io, "cli_reports", "output", "cannot create " + out + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& text) const { write_text_file(path(name), text, "cli_reports", "write"); }
  void write_json(const std::string& name, const json& j) const { write(name, dump17(j) + "\n"); }
};

namespace detail {

inline model::ModelParams model_params(const RunConfig& c, const std::string& prefix) {
  model::ModelParams p;
  p.n = static_cast<int>(c.integer(prefix + "n", 3));
  p.epsilon = c.num(prefix + "epsilon", 0.01);
  p.alpha = c.num(prefix + "alpha", 1e-4);
  const std::string d = c.str(prefix + "delta", "auto");
  if (d != "auto") {
    RunConfig one;
    one.set("delta", d);
    p.delta = one.num("delta", 0.0);
  }
  p.kappa = c.num(prefix + "kappa", 0.01);
  p.neck_exponent = c.num(prefix + "neck_exponent", 0.0);
  return p;
}

inline std::vector<double> grid(double a, double b, size_t m) {
  std::vector<double> r(m + 1);
  for (size_t i = 0; i <= m; ++i) r[i] = i == m ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(m);
  return r;
}

inline curvature::BoundFn bound_from(const RunConfig& c) {
  const std::string k = c.str("bound", "constant");
  if (k == "constant") return curvature::BoundFn::constant(c.num("lambda", 0.0));
  if (k == "inverse-quadratic") return curvature::BoundFn::inverse_quadratic(c.num("tau", 0.0));
  if (k == "inverse-linear") {
    const double kappa = c.num("kappa", 0.01);
    if (!(kappa > 0.0)) fail(ErrorKind::Validation, "cli_reports", "verify", "kappa must be positive");
    return curvature::BoundFn::inverse_linear(c.num("tau", 0.0), kappa);
  }
  fail(ErrorKind::Validation, "cli_reports", "verify", "bound must be constant, inverse-quadratic or inverse-linear");
}

/// Pairs every point with the point of the other space whose eccentricity is closest.
inline gh::Correspondence eccentricity_matching(const gh::FiniteMetricSpace& A, const gh::FiniteMetricSpace& B) {
  const auto ea = A.eccentricities(), eb = B.eccentricities();
  gh::Correspondence c;
  auto nearest = [](double v, const std::vector<double>& e) {
    size_t best = 0;
    for (size_t j = 1; j < e.size(); ++j)
      if (std::fabs(e[j] - v) < std::fabs(e[best] - v)) best = j;
    return best;
  };
  for (size_t i = 0; i < A.size(); ++i) c.pairs.emplace_back(i, nearest(ea[i], eb));
  for (size_t j = 0; j < B.size(); ++j) c.pairs.emplace_back(nearest(eb[j], ea), j);
  std::sort(c.pairs.begin(), c.pairs.end());
  c.pairs.erase(std::unique(c.pairs.begin(), c.pairs.end()), c.pairs.end());
  return c;
}

}  // namespace detail

/// build-model: local model bundle. Returns 3 when the certificate fails.
inline int cmd_build_model(const RunContext& ctx) {
  const auto& c = ctx.cfg;
  const model::ModelParams p = detail::model_params(c, "");
  const double step = c.num("curve.step", 1e-3);
  c.reject_unknown();
  model::validate(p, true);
  if (!(step > 0.0 && step <= 0.5)) fail(ErrorKind::Validation, "cli_reports", "build-model", "curve.step must lie in (0, 0.5]");
  ctx.prepare_out();

  const model::LocalModel lm = model::build_local_model(p, ctx.threads);
  const auto& pr = lm.profile;
  ctx.write_json("profile.json", pr.to_json());
  json cj = lm.constants.to_json();
  cj["neck"] = {{"lo", lm.neck_lo}, {"hi", lm.neck_hi}, {"delta", lm.neck_delta}};
  cj["params"] = {{"n", p.n}, {"epsilon", p.epsilon}, {"alpha", p.alpha}, {"delta", p.delta}, {"kappa", p.kappa},
                  {"neck_exponent", p.neck_exponent}};
  ctx.write_json("constants.json", cj);
  ctx.write_json("certificate.json", lm.certificate.to_json());

  const auto dom = pr.domain();
  const auto curve = curvature::min_eigenvalue_curve(pr, dom.lo, dom.hi, step);
  ctx.write("curve.csv", curvature::curve_csv(curve));

  Series phi{"phi", {}, {}}, rho{"rho", {}, {}};
  for (double r : detail::grid(dom.lo, dom.hi, 1000)) {
    phi.x.push_back(r), phi.y.push_back(pr.phi().eval(r, 0));
    rho.x.push_back(r), rho.y.push_back(pr.rho().eval(r, 0));
  }
  ctx.write("profile.svg", svg_line_plot({phi, rho}, {"warping functions", "r", "value", true}));
  Series lmin{"min eigenvalue", {}, {}}, bnd{"bound", {}, {}};
  for (const auto& cp : curve) {
    lmin.x.push_back(cp.r), lmin.y.push_back(cp.e.min());
    bnd.x.push_back(cp.r), bnd.y.push_back(lm.certificate.bound(cp.r));
  }
  ctx.write("eigencurve.svg", svg_line_plot({lmin, bnd}, {"Ricci lower bound", "r", "eigenvalue", true}));
  *ctx.log << (lm.certificate.passed() ? "PASS" : "FAIL") << " margin=" << fmt6(lm.certificate.margin) << "\n";
  return lm.certificate.passed() ? kExitOk : kExitComputation;
}

/// verify: certify a stored profile against a bound; one summary line on the log stream.
inline int cmd_verify(const RunContext& ctx) {
  const auto& c = ctx.cfg;
  const std::string path = c.str("profile", "");
  const curvature::BoundFn bound = detail::bound_from(c);
  const bool has_a = c.has("a"), has_b = c.has("b");
  double a = c.num("a", 0.0), b = c.num("b", 0.0);
  const auto cells = c.integer("cells", 64);
  c.reject_unknown();
  if (path.empty()) fail(ErrorKind::Validation, "cli_reports", "verify", "profile path is required");
  if (cells < 1) fail(ErrorKind::Validation, "cli_reports", "verify", "cells must be positive");
  const auto pr = profile::DoubleWarpProfile::from_json(parse_json(read_text_file(path, "cli_reports", "verify"), "cli_reports", "verify"));
  if (!has_a) a = pr.domain().lo;
  if (!has_b) b = pr.domain().hi;
  ctx.prepare_out();
  curvature::CertifyOptions opt;
  opt.cells_per_segment = static_cast<size_t>(cells);
  opt.threads = ctx.threads;
  const auto cert = curvature::certify_bound(pr, a, b, bound, opt);
  ctx.write_json("certificate.json", cert.to_json());
  if (cert.passed()) {
    *ctx.log << "PASS margin=" << fmt6(cert.margin) << "\n";
    return kExitOk;
  }
  const auto& w = cert.worst_cells.front();
  *ctx.log << "FAIL worst=" << fmt6(cert.margin) << " at r in [" << fmt6(w.r_lo) << ", " << fmt6(w.r_hi) << "]\n";
  return kExitComputation;
}

/**
 * gh: gh_report.csv for listed pairs of stored spaces, plus optional collapse.csv
 * and cone.csv tables.
 */
inline int cmd_gh(const RunContext& ctx) {
  const auto& c = ctx.cfg;
  const std::vector<std::string> pairs = c.strings("pairs");
  const std::vector<double> deltas = c.numbers("collapse.deltas", {});
  const std::string collapse_profile = c.str("collapse.profile", "");
  const double collapse_r = c.num("collapse.r", -1.0);
  const auto collapse_net = c.integer("collapse.net", 642);
  const bool cone = c.flag("cone", false);
  const model::ModelParams mp = detail::model_params(c, "model.");
  const double ca = c.num("cone.a", 0.5), cb = c.num("cone.b", 1.0);
  const std::vector<double> scales = c.numbers("cone.scales", {1.0, 0.1});
  const auto seed = static_cast<uint64_t>(c.integer("seed", 1));
  c.reject_unknown();
  for (const auto& p : pairs)
    if (std::count(p.begin(), p.end(), ':') != 1) fail(ErrorKind::Validation, "cli_reports", "gh", "pair '" + p + "' must be STEM:STEM");
  if (!deltas.empty() && collapse_profile.empty()) fail(ErrorKind::Validation, "cli_reports", "gh", "collapse.deltas needs collapse.profile");
  if (collapse_net < 1) fail(ErrorKind::Validation, "cli_reports", "gh", "collapse.net must be positive");
  if (cone) {
    model::validate(mp, true);
    if (!(ca >= mp.kappa && ca < cb && cb <= 1.0)) fail(ErrorKind::Validation, "cli_reports", "gh", "need kappa <= cone.a < cone.b <= 1");
    for (double s : scales)
      if (!(s > 0.0 && s <= 1.0)) fail(ErrorKind::Validation, "cli_reports", "gh", "cone.scales must lie in (0, 1]");
  }
  ctx.prepare_out();

  std::ostringstream rep;
  rep << "pair,lower,upper,exact_if_small\n";
  for (const auto& p : pairs) {
    const auto colon = p.find(':');
    const std::string sa = p.substr(0, colon), sb = p.substr(colon + 1);
    const auto A = gh::load_space(sa), B = gh::load_space(sb);
    const double lower = gh::gh_lower(A, B);
    std::string exact;
    double upper;
    if (A.size() <= gh::kExactMaxPoints && B.size() <= gh::kExactMaxPoints) {
      const auto e = gh::gh_exact_small(A, B);
      upper = e.value;
      exact = fmt17(e.value);
    } else {
      upper = gh::gh_upper(A, B, detail::eccentricity_matching(A, B));
    }
    rep << std::filesystem::path(sa).filename().string() << '~' << std::filesystem::path(sb).filename().string() << ','
        << fmt17(lower) << ',' << fmt17(upper) << ',' << exact << '\n';
  }
  ctx.write("gh_report.csv", rep.str());

  if (!deltas.empty()) {
    const auto pr = profile::DoubleWarpProfile::from_json(
        parse_json(read_text_file(collapse_profile, "cli_reports", "gh"), "cli_reports", "gh"));
    const double r = collapse_r < 0.0 ? pr.domain().hi : collapse_r;
    const auto rows = gh::collapse_check(pr, deltas, r, static_cast<size_t>(collapse_net), ctx.threads);
    std::ostringstream os;
    os << "delta,bound,analytic,monotone\n";
    for (size_t i = 0; i < rows.size(); ++i) {
      bool mono = true;
      for (size_t j = 0; j < rows.size(); ++j)
        if (rows[j].delta < rows[i].delta && rows[j].bound > rows[i].bound) mono = false;
      os << fmt17(rows[i].delta) << ',' << fmt17(rows[i].bound) << ',' << fmt17(rows[i].analytic) << ','
         << (mono ? "true" : "false") << '\n';
    }
    ctx.write("collapse.csv", os.str());
  }

  if (cone) {
    const model::LocalModel lm = model::build_local_model(mp, ctx.threads);
    gh::NeckSampling ns;
    ns.seed = seed;
    ns.threads = ctx.threads;
    std::ostringstream os;
    os << "a,b,delta,bound,analytic,points\n";
    for (double s : scales) {
      const auto cc = gh::neck_cone_compare(s * lm.neck_delta, mp.tail_exponent(), mp.epsilon, mp.n, ca, cb, ns);
      os << fmt17(ca) << ',' << fmt17(cb) << ',' << fmt17(s * lm.neck_delta) << ',' << fmt17(cc.bound) << ','
         << fmt17(cc.analytic) << ',' << cc.points << '\n';
    }
    ctx.write("cone.csv", os.str());
  }
  return kExitOk;
}

/// punctures: ledger.json, report.csv and per-stage snapshots; the partial ledger is kept on abort.
inline int cmd_punctures(const RunContext& ctx) {
  const auto& c = ctx.cfg;
  puncture::BaseParams bp;
  bp.kind = puncture::base_kind_from_string(c.str("base", "torus"));
  bp.L = c.num("L", 4.0);
  const auto samples = c.integer("samples", 2000), cap = c.integer("cap", static_cast<int64_t>(gh::kDefaultPointCap));
  bp.seed = static_cast<uint64_t>(c.integer("seed", 1));
  bp.tolerance = c.num("tolerance", 0.03);
  puncture::InductionParams ip;
  ip.eps = c.num("eps", 0.2);
  const auto stages = c.integer("stages", 3);
  ip.S = c.num("S", 0.0);
  const auto mwp = c.integer("min_work_points", 20), net = c.integer("net_points", 12), retries = c.integer("retries", 4);
  const bool snapshots = c.flag("snapshots", true);
  const std::vector<double> radii = c.numbers("tangent.radii", {});
  const auto tpoint = c.integer("tangent.point", 0);
  c.reject_unknown();
  auto bad = [](const std::string& why) { fail(ErrorKind::Validation, "cli_reports", "punctures", why); };
  if (samples < 2) bad("samples must be >= 2");
  if (cap < 1) bad("cap must be positive");
  if (!(bp.L > 0.0)) bad("L must be positive");
  if (!(ip.eps > 0.0)) bad("eps must be positive");
  if (stages < 0 || stages > 6) bad("stages must lie in [0, 6]");
  if (!(ip.S >= 0.0)) bad("S must be >= 0 (0 selects diam/4)");
  if (mwp < 2 || net < 4 || retries < 0) bad("need min_work_points >= 2, net_points >= 4, retries >= 0");
  if (tpoint < 0) bad("tangent.point must be >= 0");
  bp.samples = static_cast<size_t>(samples);
  bp.cap = static_cast<size_t>(cap);
  if (bp.samples > bp.cap)
    fail(ErrorKind::Capacity, "cli_reports", "punctures", "samples " + std::to_string(samples) + " exceed cap " + std::to_string(cap));
  ip.n_stages = static_cast<int>(stages);
  ip.min_work_points = static_cast<size_t>(mwp);
  ip.net_points = static_cast<size_t>(net);
  ip.retries = static_cast<int>(retries);
  ip.threads = ctx.threads;
  ctx.prepare_out();

  const puncture::BaseManifoldSample base = puncture::build_base(bp, ctx.threads);
  const json generator = {{"base", to_string(bp.kind)}, {"L", bp.L}, {"samples", bp.samples}};
  auto snap = [&](int i, const puncture::SampledSpace& s) {
    if (snapshots) gh::save_space(s.space, ctx.path("stage_" + std::to_string(i)), bp.seed, generator);
  };
  if (snapshots) snap(0, base.s);
  auto write_ledger = [&](const puncture::PunctureLedger& l) {
    json j = l.to_json();
    j["calibration"] = base.calibration.to_json();
    ctx.write_json("ledger.json", j);
    ctx.write("report.csv", l.report_csv());
  };
  try {
    const auto res = puncture::run_induction(base, ip, snap);
    write_ledger(res.ledger);
  } catch (const puncture::InductionAborted& e) {
    write_ledger(e.ledger);
    throw;
  }
  if (!radii.empty()) {
    if (static_cast<size_t>(tpoint) >= base.s.size()) bad("tangent.point out of range");
    ctx.write_json("tangent.json", puncture::tangent_spotcheck(base.s, static_cast<size_t>(tpoint), radii).to_json());
  }
  return kExitOk;
}

/// report: human summary (6 significant digits) and plots from an existing output directory.
inline int cmd_report(const RunContext& ctx) {
  const auto& c = ctx.cfg;
  const std::string in = c.str("input", ctx.out);
  c.reject_unknown();
  auto at = [&](const std::string& f) { return (std::filesystem::path(in) / f).string(); };
  auto load = [&](const std::string& f) { return parse_json(read_text_file(at(f), "cli_reports", "report"), "cli_reports", "report"); };
  std::ostringstream sum;
  bool any = false;
  if (std::filesystem::exists(at("certificate.json"))) {
    const json j = load("certificate.json");
    sum << "certificate: " << (j.at("passed").get<bool>() ? "PASS" : "FAIL") << " margin=" << fmt6(j.at("margin").get<double>())
        << " bound=" << j.at("bound").at("kind").get<std::string>() << "\n";
    any = true;
  }
  if (std::filesystem::exists(at("ledger.json"))) {
    const json j = load("ledger.json");
    Series gb{"gh_base", {}, {}}, bu{"budget", {}, {}}, gp{"gh_prev", {}, {}};
    sum << "punctures: eps=" << fmt6(j.at("eps").get<double>()) << " stages=" << j.at("stages").size() << "\n";
    for (const auto& s : j.at("stages")) {
      const double i = s.at("i").get<double>();
      const double g = s.at("gh_base").get<double>(), b = s.at("budget").get<double>();
      sum << "  stage " << s.at("i").get<int>() << ": holes=" << s.at("holes_total").get<size_t>() << " gh_base=" << fmt6(g)
          << " budget=" << fmt6(b) << (g <= b ? " PASS" : " FAIL") << " denseness=" << fmt6(s.at("denseness").get<double>()) << "\n";
      gb.x.push_back(i), gb.y.push_back(g);
      bu.x.push_back(i), bu.y.push_back(b);
      gp.x.push_back(i), gp.y.push_back(s.at("gh_prev").get<double>());
    }
    if (!gb.x.empty()) write_text_file(at("ledger.svg"), svg_line_plot({gb, bu, gp}, {"puncture ledger", "stage", "distance", false}), "cli_reports", "report");
    any = true;
  }
  if (std::filesystem::exists(at("gh_report.csv"))) {
    sum << "gh pairs:\n";
    std::istringstream rows(read_text_file(at("gh_report.csv"), "cli_reports", "report"));
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
      std::vector<std::string> f;
      std::istringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) f.push_back(cell);
      if (f.size() < 3) fail(ErrorKind::Parse, "cli_reports", "report", "malformed gh_report.csv row");
      sum << "  " << f[0] << ": lower=" << fmt6(std::stod(f[1])) << " upper=" << fmt6(std::stod(f[2]));
      if (f.size() > 3 && !f[3].empty()) sum << " exact=" << fmt6(std::stod(f[3]));
      sum << "\n";
    }
    any = true;
  }
  if (!any) fail(ErrorKind::Io, "cli_reports", "report", "no certificate.json, ledger.json or gh_report.csv in " + in);
  write_text_file(at("summary.txt"), sum.str(), "cli_reports", "report");
  *ctx.log << sum.str();
  return kExitOk;
}

}  // namespace warpgh::report
