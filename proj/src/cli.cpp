#include "eulerlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <CLI11.hpp>

#include "eulerlab/errors.hpp"
#include "eulerlab/euler.hpp"
#include "eulerlab/expr.hpp"
#include "eulerlab/field_io.hpp"
#include "eulerlab/flow.hpp"
#include "eulerlab/mask.hpp"
#include "eulerlab/moving_plane.hpp"
#include "eulerlab/nonlinearity.hpp"
#include "eulerlab/parallel.hpp"
#include "eulerlab/singular.hpp"
#include "eulerlab/topology.hpp"

namespace eulerlab::cli {

using nlohmann::json;

namespace {

std::vector<double> parse_numbers(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(x))
      fail(ErrorKind::InvalidArgument, std::string(what) + ": cannot parse '" + item + "'");
    v.push_back(x);
  }
  if (expected != 0 && v.size() != expected)
    fail(ErrorKind::InvalidArgument, std::string(what) + ": expected " + std::to_string(expected) + " numbers");
  return v;
}

Vec2 parse_point(const std::string& text, const char* what) {
  const auto v = parse_numbers(text, 2, what);
  return {v[0], v[1]};
}

json vec_json(Vec2 p) { return json::array({p.x, p.y}); }

json residual_json(const ResidualNorm& r) {
  return {{"max", r.max}, {"l2", r.l2}, {"normalized", r.normalized}};
}


int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::StagnationPoint:
    case ErrorKind::HypothesisViolation:
    case ErrorKind::InteriorCriticalPoint:
    case ErrorKind::UnsupportedTopology:
      return kHypothesisViolation;
    case ErrorKind::InvalidArgument:
      return kUsage;
    default:
      return kToleranceFailure;
  }
}

class Runner {
 public:
  Runner(RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

  json with_config(json j) const {
    j["run_config"] = to_json(cfg_);
    return j;
  }

  void write(const std::string& key, const std::string& path, const json& j) {
    cfg_.outputs[key] = path;
    write_json_atomic(path, with_config(j));
  }

  void write_text(const std::string& key, const std::string& path, const std::string& text) {
    cfg_.outputs[key] = path;
    write_text_atomic(path, text);
  }

  void adopt_grid(const Grid2& g) {
    if (!cfg_.grid) cfg_.grid = g;
  }

  double eps_for(const Grid2& g) {
    if (!cfg_.eps) cfg_.eps = 4.0 * g.h;
    return *cfg_.eps;
  }

  RunConfig& cfg_;
  std::ostream& out_;
};

// ---------------------------------------------------------------- build-example

struct BuildArgs {
  std::string variant = "example";
  std::string center = "0,0";
  double shear = 0.3;
  double h = 1.0 / 64.0;
  std::string grid;
  std::string out = ".";
};

int cmd_build_example(Runner& rn, const BuildArgs& a) {
  const Vec2 center = parse_point(a.center, "--center");
  RunConfig& cfg = rn.cfg_;
  const std::filesystem::path dir(a.out);
  json meta = {{"variant", a.variant}, {"inner_radius", 1.0}, {"outer_radius", 2.0},
               {"phi", "|y|^2 (2 - |y|)^2, y = A (x - center), A = [[1, shear], [0, 1]]"},
               {"f", "4 (4 sqrt(s) + sqrt(1 - sqrt(s)) - 3)"},
               {"velocity_profile", "V(r) = 4 (2 - r)(1 - r)"}};

  if (a.variant == "two-vortex") {
    const Vec2 c1 = center + Vec2{-2.25, 0.0}, c2 = center + Vec2{2.25, 0.0};
    const Grid2 g = a.grid.empty() ? covering_grid(c1.x - 2.5, c2.x + 2.5, center.y - 2.5, center.y + 2.5, a.h)
                                   : parse_grid(a.grid);
    cfg.grid = g;
    const RadialProfile v = example::velocity_profile();
    const VectorField2 u = superpose_disjoint({{v, c1}, {v, c2}}, g);
    const ScalarField phi = sample_scalar(g, [&](Vec2 x) {
      const double r1 = norm(x - c1), r2 = norm(x - c2);
      return (r1 <= 2.0 ? example::phi(r1) : 0.0) + (r2 <= 2.0 ? example::phi(r2) : 0.0);
    });
    // Union of the two supports, slightly enlarged so that the region is connected.
    const ScalarField level =
        sample_scalar(g, [&](Vec2 x) { return std::max(2.3 - norm(x - c1), 2.3 - norm(x - c2)); });
    meta["centers"] = json::array({vec_json(c1), vec_json(c2)});
    meta["mask"] = "union of the disks of radius 2.3 around both centers";
    rn.write("u", (dir / "u.json").string(), to_json(u));
    rn.write("phi", (dir / "phi.json").string(), to_json(phi));
    rn.write("mask", (dir / "mask.json").string(), mask_to_json(mask_from_level(level)));
    rn.write("metadata", (dir / "example.json").string(), meta);
    rn.out_ << "two-vortex example written to " << a.out << "\n";
    return kOk;
  }

  Placement pl;
  pl.center = center;
  if (a.variant == "example") {
  } else if (a.variant == "translated") {
    if (a.center == "0,0") pl.center = {0.3, 0.2};
  } else if (a.variant == "sheared") {
    pl.shear = a.shear;
  } else {
    fail(ErrorKind::InvalidArgument, "unknown variant '" + a.variant + "'");
  }
  const double hx = 2.0 * std::sqrt(1.0 + pl.shear * pl.shear) + 0.2 + a.h;
  const Grid2 g = a.grid.empty() ? covering_grid(pl.center.x - hx, pl.center.x + hx, pl.center.y - 2.2 - a.h,
                                                 pl.center.y + 2.2 + a.h, a.h)
                                 : parse_grid(a.grid);
  cfg.grid = g;
  const ExampleFlow ex = example_flow(g, pl);
  const ScalarField level = sample_scalar(g, [&](Vec2 x) {
    const double r = norm(pl.map(x));
    return std::min(r - 1.0, 2.0 - r);
  });
  meta["center"] = vec_json(pl.center);
  meta["shear"] = pl.shear;
  meta["mask"] = "closed-form support annulus 1 < |A (x - center)| < 2";
  rn.write("u", (dir / "u.json").string(), to_json(ex.u));
  rn.write("phi", (dir / "phi.json").string(), to_json(ex.phi));
  if (pl.shear == 0.0) {
    const ScalarField p = sample_radial(pressure_radial(example::velocity_profile()), pl.center, g);
    rn.write("p", (dir / "p.json").string(), to_json(p));
  }
  rn.write("mask", (dir / "mask.json").string(), mask_to_json(mask_from_level(level)));
  rn.write("metadata", (dir / "example.json").string(), meta);
  rn.out_ << a.variant << " example written to " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- make-mask

int cmd_make_mask(Runner& rn, const std::string& shape, const std::string& out) {
  if (!rn.cfg_.grid) fail(ErrorKind::InvalidArgument, "make-mask needs --grid");
  const Grid2 g = *rn.cfg_.grid;
  const auto colon = shape.find(':');
  const std::string kind = shape.substr(0, colon);
  const std::string params = colon == std::string::npos ? "" : shape.substr(colon + 1);
  ScalarField level;
  if (kind == "disk") {
    const auto v = parse_numbers(params, 3, "disk");
    level = disk_level(g, {v[0], v[1]}, v[2]);
  } else if (kind == "annulus") {
    const auto v = parse_numbers(params, 4, "annulus");
    level = annulus_level(g, {v[0], v[1]}, v[2], v[3]);
  } else if (kind == "box") {
    const auto v = parse_numbers(params, 4, "box");
    level = box_level(g, v[0], v[1], v[2], v[3]);
  } else {
    fail(ErrorKind::InvalidArgument, "unknown shape '" + kind + "'");
  }
  const DomainMask m = mask_from_level(level);
  rn.write("mask", out, mask_to_json(m));
  rn.out_ << "mask with " << m.components.size() << " boundary component(s) written to " << out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- verify-steady

DomainMask mask_or_support(Runner& rn, const std::string& mask_path, const VectorField2& u) {
  if (!mask_path.empty()) {
    rn.cfg_.inputs["mask"] = mask_path;
    DomainMask m = read_mask(mask_path);
    require_same_grid(u.grid, m.grid, "mask");
    return m;
  }
  return support_mask(u, rn.cfg_.support_tol);
}

json steady_json(const SteadyReport& r) {
  json j = {{"divergence", residual_json(r.divergence)}, {"transport", residual_json(r.transport)},
            {"parallel", residual_json(r.parallel)}, {"nodes", r.nodes}};
  j["momentum"] = r.momentum ? residual_json(*r.momentum) : json(nullptr);
  return j;
}

double worst_normalized(const SteadyReport& r) {
  double w = std::max({r.divergence.normalized, r.transport.normalized, r.parallel.normalized});
  if (r.momentum) w = std::max(w, r.momentum->normalized);
  return w;
}

int cmd_verify_steady(Runner& rn, const std::string& u_path, const std::string& p_path, const std::string& mask_path,
                      const std::string& out) {
  rn.cfg_.inputs["u"] = u_path;
  const VectorField2 u = read_vector_field(u_path);
  rn.adopt_grid(u.grid);
  const DomainMask mask = mask_or_support(rn, mask_path, u);
  SteadyReport rep;
  if (!p_path.empty()) {
    rn.cfg_.inputs["p"] = p_path;
    rep = steady_residual(u, read_scalar_field(p_path), mask);
  } else {
    rep = steady_residual(u, mask);
  }
  const double worst = worst_normalized(rep);
  const bool pass = worst < rn.cfg_.tol;
  json j = steady_json(rep);
  j["worst_normalized"] = worst;
  j["pass"] = pass;
  if (!out.empty()) rn.write("report", out, j);
  rn.out_ << "verify-steady: worst normalized residual " << worst << (pass ? " < " : " >= ") << rn.cfg_.tol << "\n";
  return pass ? kOk : kToleranceFailure;
}

// ---------------------------------------------------------------- extract-f

json nonlinearity_json(const SampledNonlinearity& nl) {
  json j = {{"levels", nl.levels}, {"f", nl.f}, {"spread", nl.spread}, {"curve_count", nl.curve_count}};
  if (nl.endpoint_rates)
    j["endpoint_rates"] = {{"rate0", nl.endpoint_rates->rate0}, {"rate1", nl.endpoint_rates->rate1}};
  else
    j["endpoint_rates"] = nullptr;
  return j;
}

std::string nonlinearity_csv(const SampledNonlinearity& nl) {
  std::ostringstream s;
  s.precision(17);
  s << "c,f,spread\n";
  for (std::size_t k = 0; k < nl.levels.size(); ++k) s << nl.levels[k] << ',' << nl.f[k] << ',' << nl.spread[k] << '\n';
  return s.str();
}

double interior_spread(const SampledNonlinearity& nl) {
  double m = 0.0;
  for (std::size_t k = 1; k + 1 < nl.levels.size(); ++k) m = std::max(m, nl.spread[k]);
  return m;
}

int cmd_extract_f(Runner& rn, const std::string& phi_path, const std::string& mask_path, const std::string& out,
                  bool tol_given) {
  rn.cfg_.inputs["phi"] = phi_path;
  rn.cfg_.inputs["mask"] = mask_path;
  const ScalarField phi = read_scalar_field(phi_path);
  rn.adopt_grid(phi.grid);
  const DomainMask mask = read_mask(mask_path);
  const SampledNonlinearity nl = extract_f(phi, mask, rn.cfg_.levels);
  const MeanZero mz = mean_zero_check(nl, phi, mask);
  const double spread = interior_spread(nl);
  const bool pass = !tol_given || spread <= rn.cfg_.tol;
  if (!out.empty()) {
    std::filesystem::path diag(out);
    diag.replace_extension(".json");
    rn.write_text("csv", out, nonlinearity_csv(nl));
    json j = nonlinearity_json(nl);
    j["max_spread"] = spread;
    j["mean_zero"] = {{"value", mz.value}, {"empty_domain", mz.empty_domain}};
    j["pass"] = pass;
    rn.write("diagnostics", diag.string(), j);
  }
  rn.out_ << "extract-f: " << nl.levels.size() << " levels, max spread " << spread << ", mean-zero " << mz.value
          << "\n";
  return pass ? kOk : kToleranceFailure;
}

// ---------------------------------------------------------------- topology

json annularity_json(const AnnularityReport& r) {
  json comps = json::array(), windings = json::array(), taus = json::array();
  for (const ComponentCertificate& c : r.components) {
    comps.push_back({{"area", c.area}, {"vertices", c.vertices}, {"winding", c.winding},
                     {"raw_winding", c.raw_winding}, {"turning", c.turning}, {"min_u_tau", c.min_u_tau},
                     {"tau_threshold", c.tau_threshold}});
    windings.push_back(c.winding);
    taus.push_back(c.min_u_tau);
  }
  return {{"n", r.n}, {"eps", r.eps}, {"tol", r.tol}, {"min_u", r.min_u}, {"windings", windings},
          {"min_u_tau", taus}, {"components", comps}, {"degree", r.degree},
          {"degree_matches_holes", r.degree_matches_holes}, {"degree_zero", r.degree_zero},
          {"verdict", r.annular ? "annular" : "not-annular"}};
}

int cmd_topology(Runner& rn, const std::string& u_path, const std::string& mask_path, const std::string& out) {
  rn.cfg_.inputs["u"] = u_path;
  const VectorField2 u = read_vector_field(u_path);
  rn.adopt_grid(u.grid);
  const DomainMask mask = mask_or_support(rn, mask_path, u);
  const AnnularityReport rep = annularity_verdict(u, mask, rn.cfg_.support_tol, rn.eps_for(u.grid));
  if (!out.empty()) rn.write("report", out, annularity_json(rep));
  rn.out_ << "topology: n = " << rep.n << ", degree " << rep.degree << (rep.annular ? ", annular" : ", not annular")
          << "\n";
  return kOk;
}

// ---------------------------------------------------------------- eigen

Subdomain parse_subdomain(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string params = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "all") return Subdomain::all();
  if (kind == "ball") {
    const auto v = parse_numbers(params, 3, "ball");
    return Subdomain::ball({v[0], v[1]}, v[2]);
  }
  if (kind == "halfball") {
    const auto v = parse_numbers(params, 5, "halfball");
    return Subdomain::half_ball({v[0], v[1]}, v[2], {v[3], v[4]});
  }
  if (kind == "cap") {
    const auto v = parse_numbers(params, 3, "cap");
    return Subdomain::cap({v[0], v[1]}, v[2]);
  }
  fail(ErrorKind::InvalidArgument, "unknown subdomain '" + spec + "'");
}

int cmd_eigen(Runner& rn, const std::string& mask_path, const std::string& c_spec, const std::string& sub_spec,
              const std::string& out, const std::string& export_path) {
  rn.cfg_.inputs["mask"] = mask_path;
  rn.cfg_.inputs["c"] = c_spec;
  rn.cfg_.inputs["subdomain"] = sub_spec;
  const DomainMask mask = read_mask(mask_path);
  rn.adopt_grid(mask.grid);
  SingularPotential c;
  if (std::filesystem::exists(c_spec)) {
    c = make_potential(read_scalar_field(c_spec), mask);
  } else {
    const DistanceExpression e(c_spec);
    c = potential_from_distance(mask, [&e](double d) { return e(d); });
  }
  const DiscreteOperator op = assemble(mask, parse_subdomain(sub_spec), c);
  EigenOptions opt;
  opt.residual_tol = rn.cfg_.eigen_tol;
  const Eigenpair ep = principal_eigenpair(op, opt);
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t k : op.nodes) {
    lo = std::min(lo, ep.phi[k]);
    hi = std::max(hi, ep.phi[k]);
  }
  const bool one_signed = lo > 0.0 || hi < 0.0;
  if (!export_path.empty()) rn.write_text("matrix", export_path, export_coordinate(op.matrix));
  json j = {{"lambda1", ep.lambda}, {"residual", ep.residual}, {"iterations", ep.iterations},
            {"positivity", ep.lambda > 0.0}, {"unknowns", op.size()}, {"potential_bound", c.bound},
            {"eigenfunction_min", lo}, {"eigenfunction_max", hi}, {"one_signed", one_signed}};
  if (!out.empty()) rn.write("report", out, j);
  rn.out_ << "eigen: lambda1 = " << ep.lambda << " (" << op.size() << " unknowns)\n";
  return kOk;
}

// ---------------------------------------------------------------- comparison

int cmd_comparison(Runner& rn, int m, double C, double r, const std::string& out) {
  const ComparisonProfile p = comparison_profile(m, C, r);
  constexpr int kSamples = 10000;
  double rmin = INFINITY, rmax = -INFINITY;
  for (int k = 0; k < kSamples; ++k) {
    const double t = p.r0 + (r - p.r0) * (k + 0.5) / kSamples;
    const double v = p.residual(t);
    rmin = std::min(rmin, v);
    rmax = std::max(rmax, v);
  }
  const double d2_expected = (m - 1) / r + 2.0 * C;
  const double boundary_error =
      std::max({std::abs(p.rho(r)), std::abs(p.drho(r) + 1.0), std::abs(p.d2rho(r) - d2_expected)});
  const bool pass = boundary_error <= 1e-10 && rmax <= 1e-12;
  json j = {{"m", m}, {"C", C}, {"r", r}, {"r0", p.r0}, {"rho_r", p.rho(r)}, {"drho_r", p.drho(r)},
            {"d2rho_r", p.d2rho(r)}, {"d2rho_expected", d2_expected}, {"residual_min", rmin},
            {"residual_max", rmax}, {"samples", kSamples}, {"pass", pass}};
  if (!out.empty()) rn.write("report", out, j);
  rn.out_ << "comparison: r0 = " << p.r0 << ", residual in [" << rmin << ", " << rmax << "]\n";
  return pass ? kOk : kToleranceFailure;
}

// ---------------------------------------------------------------- moving-plane

json sweep_json(const PlaneSweepState& s) {
  return {{"direction", vec_json(s.direction)}, {"lambda_bar", s.lambda_bar}, {"lambda_star", s.lambda_star},
          {"event", to_string(s.event)}, {"tangency", s.tangency}, {"orthogonality", s.orthogonality},
          {"tangency_metric", s.tangency_metric}, {"tol_w", s.tol_w}, {"stopped_by_violation", s.stopped_by_violation},
          {"symmetric_residual", s.symmetric_residual}, {"symmetric_tolerance", s.symmetric_tolerance},
          {"symmetric", s.symmetric}, {"normal_sign_violations", s.normal_sign_violations},
          {"normal_sign_borderline", s.normal_sign_borderline}, {"success", s.success()}};
}

json symmetry_json(const SymmetryReport& r) {
  json sweeps = json::array();
  for (const PlaneSweepState& s : r.sweeps) sweeps.push_back(sweep_json(s));
  return {{"verdict", r.radial ? "radial" : "non-symmetric"}, {"directions", r.directions},
          {"center", vec_json(r.center)}, {"profile_r", r.profile_r}, {"profile_phi", r.profile_phi},
          {"fit_residual", r.fit_residual}, {"fit_tolerance", r.fit_tolerance}, {"decreasing", r.decreasing},
          {"reverified", r.reverified},
          {"violating_direction", r.violating_direction ? vec_json(*r.violating_direction) : json(nullptr)},
          {"sweeps", sweeps}};
}

std::string history_csv(const SymmetryReport& r) {
  std::ostringstream s;
  s.precision(17);
  s << "direction,dx,dy,lambda,w_min\n";
  for (std::size_t k = 0; k < r.sweeps.size(); ++k)
    for (const auto& [lam, w] : r.sweeps[k].w_min_history)
      s << k << ',' << r.sweeps[k].direction.x << ',' << r.sweeps[k].direction.y << ',' << lam << ',' << w << '\n';
  return s.str();
}

int cmd_moving_plane(Runner& rn, const std::string& phi_path, const std::string& mask_path, const std::string& out,
                     const std::string& history) {
  rn.cfg_.inputs["phi"] = phi_path;
  rn.cfg_.inputs["mask"] = mask_path;
  const ScalarField phi = read_scalar_field(phi_path);
  rn.adopt_grid(phi.grid);
  const DomainMask mask = read_mask(mask_path);
  SweepOptions opt;
  opt.tol_multiplier = rn.cfg_.sweep_tol_multiplier;
  const SymmetryReport rep = symmetry_verdict(phi, mask, rn.cfg_.dirs, opt);
  if (!history.empty()) rn.write_text("history", history, history_csv(rep));
  if (!out.empty()) rn.write("report", out, symmetry_json(rep));
  rn.out_ << "moving-plane: " << (rep.radial ? "radial" : "non-symmetric") << ", center (" << rep.center.x << ", "
          << rep.center.y << ")\n";
  return rep.radial ? kOk : kToleranceFailure;
}

// ---------------------------------------------------------------- report

int cmd_report(Runner& rn, const std::string& u_path, const std::string& mask_path, const std::string& out,
               json& doc) {
  const auto t0 = std::chrono::steady_clock::now();
  rn.cfg_.inputs["u"] = u_path;
  const VectorField2 u = read_vector_field(u_path);
  rn.adopt_grid(u.grid);
  const DomainMask mask = mask_or_support(rn, mask_path, u);
  doc["support"] = {{"tol", rn.cfg_.support_tol}, {"inside_nodes", mask.inside_count()},
                    {"components", mask.components.size()}, {"from_mask_file", !mask_path.empty()}};

  const AnnularityReport ann = annularity_verdict(u, mask, rn.cfg_.support_tol, rn.eps_for(u.grid));
  doc["annularity"] = annularity_json(ann);
  if (!ann.annular)
    fail(ErrorKind::UnsupportedTopology, "the support has n = " + std::to_string(ann.n) + " holes, expected 1");

  const StreamFunction sf = stream_function(u, mask);
  doc["stream_function"] = {{"raw_means", sf.raw_means}, {"raw_spread", sf.raw_spread}, {"spread", sf.spread},
                            {"max_divergence", sf.max_divergence}, {"poisson_residual", sf.poisson_residual}};
  doc["steady"] = steady_json(steady_residual(u, mask));

  const SampledNonlinearity nl = extract_f(sf.phi, mask, rn.cfg_.levels);
  const MeanZero mz = mean_zero_check(nl, sf.phi, mask);
  json nj = nonlinearity_json(nl);
  nj["max_spread"] = interior_spread(nl);
  nj["mean_zero"] = {{"value", mz.value}, {"empty_domain", mz.empty_domain}};
  doc["nonlinearity"] = nj;

  SweepOptions opt;
  opt.tol_multiplier = rn.cfg_.sweep_tol_multiplier;
  const SymmetryReport sym = symmetry_verdict(sf.phi, mask, rn.cfg_.dirs, opt);
  doc["moving_plane"] = symmetry_json(sym);
  doc["verdict"] = sym.radial ? "radial" : "non-symmetric";
  doc["status"] = sym.radial ? "ok" : "tolerance-failure";
  doc["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!out.empty()) rn.write("report", out, doc);
  rn.out_ << "report: " << (sym.radial ? "radial" : "non-symmetric") << ", center (" << sym.center.x << ", "
          << sym.center.y << ")\n";
  return sym.radial ? kOk : kToleranceFailure;
}

}  // namespace

json to_json(const RunConfig& c) {
  json j = {{"subcommand", c.subcommand},
            {"tolerances",
             {{"support_tol", c.support_tol}, {"tol", c.tol}, {"sweep_tol_multiplier", c.sweep_tol_multiplier},
              {"eigen_tol", c.eigen_tol}}},
            {"levels", c.levels},
            {"dirs", c.dirs},
            {"threads", c.threads},
            {"inputs", c.inputs},
            {"outputs", c.outputs}};
  j["grid"] = c.grid ? grid_to_json(*c.grid) : json(nullptr);
  j["eps"] = c.eps ? json(*c.eps) : json(nullptr);
  return j;
}

Grid2 parse_grid(const std::string& text) {
  const auto v = parse_numbers(text, 5, "--grid");
  if (v[3] != std::floor(v[3]) || v[4] != std::floor(v[4]))
    fail(ErrorKind::InvalidArgument, "--grid: nx and ny must be integers");
  return make_grid(v[0], v[1], v[2], static_cast<int>(v[3]), static_cast<int>(v[4]));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  init_threads_from_env();
  RunConfig cfg;
  cfg.threads = thread_limit();
  if (const char* env = std::getenv("EULER_LAB_THREADS")) cfg.threads = std::atoi(env);

  CLI::App app{"Numerical verification lab for compactly supported steady planar Euler flows"};
  app.require_subcommand(1);
  std::string grid_text, u_path, p_path, phi_path, mask_path, out_path, history, c_spec, sub_spec = "all",
                                                                                    export_path, shape;
  BuildArgs build;
  int m = 2;
  double C = 1.0, r = 1.0;
  double eps = 0.0;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--grid", grid_text, "Grid as x0,y0,h,nx,ny");
    s->add_option("--out", out_path, "Output path");
    s->add_option("--support-tol", cfg.support_tol, "Threshold on |u| for the support and stagnation tests")
        ->check(CLI::PositiveNumber);
  };

  auto* build_cmd = app.add_subcommand("build-example", "Write the closed-form example flow and its mask");
  build_cmd->add_option("--variant", build.variant, "example | translated | sheared | two-vortex");
  build_cmd->add_option("--center", build.center, "Center as x,y");
  build_cmd->add_option("--shear", build.shear, "Shear of the sheared variant");
  build_cmd->add_option("--spacing", build.h, "Spacing of the default covering grid")->check(CLI::PositiveNumber);
  build_cmd->add_option("--grid", build.grid, "Grid as x0,y0,h,nx,ny");
  build_cmd->add_option("--out", build.out, "Output directory");

  auto* mask_cmd = app.add_subcommand("make-mask", "Write a mask file for a disk, annulus or box");
  add_common(mask_cmd);
  mask_cmd->add_option("--shape", shape, "disk:cx,cy,r | annulus:cx,cy,r1,r2 | box:xmin,xmax,ymin,ymax")
      ->required();

  auto* steady_cmd = app.add_subcommand("verify-steady", "Residuals of the steady Euler equations");
  add_common(steady_cmd);
  steady_cmd->add_option("--u", u_path, "Velocity field file")->required();
  steady_cmd->add_option("--p", p_path, "Pressure field file");
  steady_cmd->add_option("--mask", mask_path, "Mask file (default: support of u)");
  steady_cmd->add_option("--tol", cfg.tol, "Bound on every normalized residual")->check(CLI::PositiveNumber);

  auto* f_cmd = app.add_subcommand("extract-f", "Sample the nonlinearity f with -lap(phi) = f(phi)");
  add_common(f_cmd);
  f_cmd->add_option("--phi", phi_path, "Stream function file")->required();
  f_cmd->add_option("--mask", mask_path, "Mask file")->required();
  f_cmd->add_option("--levels", cfg.levels, "Number of interior levels")->check(CLI::Range(8, 100000));
  auto* f_tol = f_cmd->add_option("--tol", cfg.tol, "Bound on the per-level spread")->check(CLI::PositiveNumber);

  auto* topo_cmd = app.add_subcommand("topology", "Winding numbers and annularity of the support");
  add_common(topo_cmd);
  topo_cmd->add_option("--u", u_path, "Velocity field file")->required();
  topo_cmd->add_option("--mask", mask_path, "Mask file (default: support of u)");
  topo_cmd->add_option("--tol", cfg.support_tol, "Threshold on |u|")->check(CLI::PositiveNumber);
  topo_cmd->add_option("--eps", eps, "Retraction distance (default 4h)")->check(CLI::PositiveNumber);

  auto* eig_cmd = app.add_subcommand("eigen", "Principal eigenvalue of -lap + c");
  add_common(eig_cmd);
  eig_cmd->add_option("--mask", mask_path, "Mask file")->required();
  eig_cmd->add_option("--c", c_spec, "Potential: field file or expression in d")->required();
  eig_cmd->add_option("--subdomain", sub_spec, "all | ball:x,y,r | halfball:x,y,r,ax,ay | cap:dx,dy,lambda");
  eig_cmd->add_option("--tol", cfg.eigen_tol, "Eigen residual tolerance")->check(CLI::PositiveNumber);
  eig_cmd->add_option("--export", export_path, "Matrix export in coordinate text format");

  auto* cmp_cmd = app.add_subcommand("comparison", "Radial comparison profile and its residuals");
  cmp_cmd->add_option("--m", m, "Dimension parameter")->check(CLI::Range(2, 1000));
  cmp_cmd->add_option("--C", C, "Coefficient bound")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--r", r, "Ball radius")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--out", out_path, "Output path");

  auto* mp_cmd = app.add_subcommand("moving-plane", "Moving-plane symmetry verdict");
  add_common(mp_cmd);
  mp_cmd->add_option("--phi", phi_path, "Stream function file")->required();
  mp_cmd->add_option("--mask", mask_path, "Mask file")->required();
  mp_cmd->add_option("--dirs", cfg.dirs, "Number of plane directions in [0, pi)")->check(CLI::Range(4, 4096));
  mp_cmd->add_option("--tol", cfg.sweep_tol_multiplier, "Sweep tolerance multiplier")->check(CLI::PositiveNumber);
  mp_cmd->add_option("--history", history, "CSV of the w_min history per direction");

  auto* rep_cmd = app.add_subcommand("report", "Full pipeline: support, annularity, phi, f, moving plane");
  add_common(rep_cmd);
  rep_cmd->add_option("--u", u_path, "Velocity field file")->required();
  rep_cmd->add_option("--mask", mask_path, "Mask file (default: support of u)");
  rep_cmd->add_option("--tol", cfg.support_tol, "Threshold on |u|")->check(CLI::PositiveNumber);
  rep_cmd->add_option("--eps", eps, "Retraction distance (default 4h)")->check(CLI::PositiveNumber);
  rep_cmd->add_option("--levels", cfg.levels, "Number of interior levels")->check(CLI::Range(8, 100000));
  rep_cmd->add_option("--dirs", cfg.dirs, "Number of plane directions in [0, pi)")->check(CLI::Range(4, 4096));
  rep_cmd->add_option("--sweep-tol", cfg.sweep_tol_multiplier, "Sweep tolerance multiplier")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  cfg.subcommand = chosen->get_name();
  if (eps > 0.0) cfg.eps = eps;
  Runner rn(cfg, out);
  json doc;
  try {
    if (!grid_text.empty()) cfg.grid = parse_grid(grid_text);
    if (chosen == build_cmd) return cmd_build_example(rn, build);
    if (chosen == mask_cmd) return cmd_make_mask(rn, shape, out_path.empty() ? "mask.json" : out_path);
    if (chosen == steady_cmd) return cmd_verify_steady(rn, u_path, p_path, mask_path, out_path);
    if (chosen == f_cmd) return cmd_extract_f(rn, phi_path, mask_path, out_path, f_tol->count() > 0);
    if (chosen == topo_cmd) return cmd_topology(rn, u_path, mask_path, out_path);
    if (chosen == eig_cmd) return cmd_eigen(rn, mask_path, c_spec, sub_spec, out_path, export_path);
    if (chosen == cmp_cmd) return cmd_comparison(rn, m, C, r, out_path);
    if (chosen == mp_cmd) return cmd_moving_plane(rn, phi_path, mask_path, out_path, history);
    if (chosen == rep_cmd) return cmd_report(rn, u_path, mask_path, out_path, doc);
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    const std::string reason(to_string(e.kind()));
    err << cfg.subcommand << ": " << reason << ": " << e.what() << "\n";
    if (!out_path.empty() && chosen != build_cmd) {
      doc["status"] = code == kHypothesisViolation ? "hypothesis-violation" : (code == kUsage ? "usage" : "failure");
      doc["reason"] = reason;
      doc["message"] = e.what();
      doc["exit_code"] = code;
      try {
        rn.write("report", out_path, doc);
      } catch (const std::exception& w) {
        err << "cannot write " << out_path << ": " << w.what() << "\n";
      }
    }
    return code;
  } catch (const std::exception& e) {
    err << cfg.subcommand << ": " << e.what() << "\n";
    return kToleranceFailure;
  }
  return kUsage;
}

}  // namespace eulerlab::cli
