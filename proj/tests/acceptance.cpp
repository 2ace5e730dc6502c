#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "eulerlab/cli.hpp"
#include "eulerlab/euler.hpp"
#include "eulerlab/field_io.hpp"
#include "eulerlab/flow.hpp"
#include "eulerlab/kernels.hpp"
#include "eulerlab/mask.hpp"
#include "eulerlab/moving_plane.hpp"
#include "eulerlab/nonlinearity.hpp"
#include "eulerlab/parallel.hpp"
#include "eulerlab/singular.hpp"
#include "eulerlab/topology.hpp"

using namespace eulerlab;

namespace {

struct Line {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Grid2 example_grid(double h) { return covering_grid(-2.3, 2.3, -2.3, 2.3, h); }

/// The support annulus 1 < |x - c| < 2 from its closed-form level function.
DomainMask example_mask(const Grid2& g, Vec2 c = {}) { return mask_from_level(annulus_level(g, c, 1.0, 2.0)); }

constexpr double kJ01Squared = 5.783185962946784;

// 1. -lap(phi) = f(phi) on the closed-form example, second order.
std::vector<Line> exact_example() {
  double err[2];
  const int ns[2] = {64, 128};
  for (int k = 0; k < 2; ++k) {
    const double h = 1.0 / ns[k];
    const Grid2 g = example_grid(h);
    const ExampleFlow ex = example_flow(g);
    const DomainMask m = example_mask(g);
    const ScalarField lap = laplacian(ex.phi);
    err[k] = 0.0;
    for (std::size_t n : analysis_nodes(m)) err[k] = std::max(err[k], std::abs(-lap[n] - example::f(ex.phi[n])));
  }
  const double order = std::log2(err[0] / err[1]);
  const bool pass = order >= 1.7 && order <= 2.3 && err[0] <= 0.05;
  return {{"1", "exact-example consistency", pass,
           fmt("max|-lap phi - f(phi)| = %.3e (h=1/64), %.3e (h=1/128), order %.3f in [1.7, 2.3], bound 0.05",
               err[0], err[1], order)}};
}

// 2. Extracted f against the closed form at 20 levels.
std::vector<Line> nonlinearity_extraction() {
  const double h = 1.0 / 128;
  const Grid2 g = example_grid(h);
  const ExampleFlow ex = example_flow(g);
  const DomainMask m = example_mask(g);
  std::vector<double> levels;
  for (int k = 0; k < 20; ++k) levels.push_back(0.1 + 0.8 * k / 19.0);
  const SampledNonlinearity nl = extract_f(ex.phi, m, levels);
  double rel = 0.0, spread = 0.0, fmax = 0.0;
  for (std::size_t k = 1; k + 1 < nl.levels.size(); ++k) {
    const double exact = example::f(nl.levels[k]);
    rel = std::max(rel, std::abs(nl.f[k] - exact) / std::abs(exact));
    spread = std::max(spread, nl.spread[k]);
    fmax = std::max(fmax, std::abs(nl.f[k]));
  }
  // "Within O(h) of 0" is pinned as |f| <= 10 h max|f| over the interior levels.
  const double endpoint_tol = 10.0 * h * fmax;
  const bool ends = std::abs(nl.f.front()) <= endpoint_tol && std::abs(nl.f.back()) <= endpoint_tol;
  const bool pass = rel <= 0.01 && spread <= 0.05 && ends;
  return {{"2", "nonlinearity extraction", pass,
           fmt("max rel err %.4f (<= 0.01: %s), max spread %.2e (<= 0.05: %s), f(0) = %.4f, f(1) = %.4f "
               "(|.| <= %.3f: %s; closed form gives f(0) = %.1f, f(1) = %.1f)",
               rel, rel <= 0.01 ? "ok" : "FAIL", spread, spread <= 0.05 ? "ok" : "FAIL", nl.f.front(), nl.f.back(),
               endpoint_tol, ends ? "ok" : "FAIL", example::f(0.0), example::f(1.0))}};
}

// 3. Blow-up rate of |f'| at both ends.
std::vector<Line> endpoint_blowup() {
  const double h = 1.0 / 128;
  const Grid2 g = example_grid(h);
  const ExampleFlow ex = example_flow(g);
  const DomainMask m = example_mask(g);
  const SampledNonlinearity nl = extract_f(ex.phi, m, 199);
  const EndpointRates r = endpoint_regularity(nl);
  const bool pass = std::abs(r.rate0 + 0.5) <= 0.15 && std::abs(r.rate1 + 0.5) <= 0.15;
  return {{"3", "endpoint blow-up", pass,
           fmt("rate near 0: %.3f, rate near 1: %.3f (target -0.5 +- 0.15)", r.rate0, r.rate1)}};
}

// 4. Normalized integral of f(phi).
std::vector<Line> mean_zero() {
  const double h = 1.0 / 64;
  const Grid2 g = example_grid(h);
  const ExampleFlow ex = example_flow(g);
  const DomainMask m = example_mask(g);
  const SampledNonlinearity nl = extract_f(ex.phi, m, 199);
  const MeanZero mz = mean_zero_check(nl, ex.phi, m);
  const bool pass = !mz.empty_domain && std::abs(mz.value) <= 0.02;
  return {{"4", "mean-zero", pass, fmt("normalized integral %.4e (|.| <= 0.02)", mz.value)}};
}

// 5. Windings on the retracted boundary and hole counting.
RadialProfile shifted_profile(double r1) {
  return RadialProfile(r1, r1 + 1.0, [r1](double r) { return 4.0 * (r1 + 1.0 - r) * (r1 - r); });
}

std::vector<Line> topology() {
  const double h = 1.0 / 64;
  const Grid2 g = example_grid(h);
  const ExampleFlow ex = example_flow(g);
  const AnnularityReport rep = annularity_verdict(ex.u, 1e-10, 4.0 * h);
  bool windings = !rep.components.empty();
  std::ostringstream w;
  for (const ComponentCertificate& c : rep.components) {
    windings = windings && c.winding == 1;
    w << c.winding << " ";
  }
  std::ostringstream multi;
  bool nested_ok = true;
  for (int rings : {2, 3}) {
    const double rmax = 2.0 * rings + 0.3;
    const Grid2 gm = covering_grid(-rmax, rmax, -rmax, rmax, h);
    VectorField2 u(gm);
    for (int k = 0; k < rings; ++k) {
      const VectorField2 uk = circular_flow(shifted_profile(1.0 + 2.0 * k), {0.0, 0.0}, gm);
      for (std::size_t n = 0; n < gm.size(); ++n) u[n] = u[n] + uk[n];
    }
    const AnnularityReport mr = annularity_verdict(u, 1e-10, 4.0 * h);
    const int holes = 2 * rings - 1;
    nested_ok = nested_ok && mr.n == holes && mr.degree == 1 - mr.n && mr.degree_matches_holes && !mr.annular;
    multi << rings << " rings: n = " << mr.n << " (expected " << holes << "), degree " << mr.degree << "; ";
  }
  const bool pass = windings && rep.n == 1 && rep.annular && nested_ok;
  return {{"5", "topology", pass,
           fmt("example windings [ %s], n = %d; %s", w.str().c_str(), rep.n, multi.str().c_str())}};
}

// 6. Principal eigenpair of the Dirichlet Laplacian on the unit disk.
std::vector<Line> spectral() {
  const double h = 1.0 / 128;
  const Grid2 g = covering_grid(-1.2, 1.2, -1.2, 1.2, h);
  const DomainMask m = mask_from_level(disk_level(g, {0.0, 0.0}, 1.0));
  const Eigenpair e0 = principal_eigenpair(assemble(m, Subdomain::all(), make_potential(ScalarField(g), m)));
  const double shift = 3.25;
  const Eigenpair e1 = principal_eigenpair(assemble(m, Subdomain::all(), make_potential(ScalarField(g, shift), m)));
  const double rel = std::abs(e0.lambda / kJ01Squared - 1.0);
  const double shift_err = std::abs(e1.lambda - e0.lambda - shift);
  double lo = INFINITY;
  for (std::size_t k : subdomain_nodes(m, Subdomain::all())) lo = std::min(lo, e0.phi[k]);
  const bool pass = rel <= 0.01 && shift_err <= 1e-8 * (e0.lambda + shift) && lo > 0.0;
  return {{"6", "spectral", pass,
           fmt("lambda1 = %.5f (rel err %.3f%%, <= 1%%), shift identity error %.2e, min eigenfunction %.3e > 0",
               e0.lambda, 100.0 * rel, shift_err, lo)}};
}

// 7. Hardy ratio and the positivity implication.
std::vector<Line> hardy_positivity() {
  const double h = 1.0 / 64;
  const Grid2 g = covering_grid(-1.2, 1.2, -1.2, 1.2, h);
  const DomainMask m = mask_from_level(disk_level(g, {0.0, 0.0}, 1.0));
  const HardyResult hr = hardy_ratio(m, Subdomain::all());
  const double hardy_constant = 1.0 / hr.ratio;
  const Vec2 q = m.components[0].vertices.front();
  int covered = 0, held = 0, positive_total = 0;
  double worst = INFINITY;
  for (double kappa : {0.25, 1.0, 4.0, 16.0, 64.0})
    for (double r : {0.1, 0.2, 0.35, 0.5, 0.8}) {
      const SingularPotential c = potential_from_distance(m, [kappa](double d) { return -kappa / d; });
      const Eigenpair e = principal_eigenpair(assemble(m, Subdomain::ball(q, r), c));
      if (e.lambda > 0.0) ++positive_total;
      if (kappa * hardy_constant * r < 1.0) {
        ++covered;
        if (e.lambda > 0.0) ++held;
        worst = std::min(worst, e.lambda);
      }
    }
  const bool ratio_ok = hr.ratio >= 0.2 && hr.ratio <= 0.3;
  const bool implication = covered > 0 && held == covered;
  return {{"7", "hardy/positivity", ratio_ok && implication,
           fmt("disk Hardy ratio %.4f (in [0.2, 0.3]: %s); implication kappa C r < 1 => lambda1 > 0 held in %d/%d "
               "covered cases (min lambda1 %.3f, %s); %d/25 positive overall",
               hr.ratio, ratio_ok ? "ok" : "FAIL", held, covered, worst, implication ? "ok" : "FAIL",
               positive_total)}};
}

// 8. Comparison profiles and the corner identity.
std::vector<Line> comparison() {
  double boundary_err = 0.0, res1 = -INFINITY, res2 = -INFINITY, stated = 0.0, corrected = 0.0, fd = 0.0;
  constexpr int kSamples = 10000;
  constexpr double g1 = 0.7548776662466927, g2 = 0.5698402909980532;  // R2 sequence increments
  for (int m : {2, 3, 4})
    for (double C : {0.5, 1.0, 5.0})
      for (double r : {0.5, 1.0, 2.0}) {
        const ComparisonProfile p = comparison_profile(m, C, r);
        boundary_err = std::max({boundary_err, std::abs(p.rho(r)), std::abs(p.drho(r) + 1.0),
                                 std::abs(p.d2rho(r) - ((m - 1) / r + 2.0 * C))});
        const PsiField psi1(p, 1, m);
        const PsiField psi2(comparison_profile(m + 2, C, r), 2, m);
        const double r0 = std::max(p.r0, psi2.profile().r0);
        std::vector<double> x(static_cast<std::size_t>(m));
        for (int k = 0; k < kSamples; ++k) {
          const double u = std::fmod(0.5 + g1 * k, 1.0), v = std::fmod(0.5 + g2 * k, 1.0);
          const double t = r0 + (r - r0) * u;
          // Point on the sphere of radius t with x_1 >= 0, rotated through the remaining axes.
          const double a = std::numbers::pi * v;
          std::fill(x.begin(), x.end(), 0.0);
          x[0] = t * std::sin(a);
          x[1] = t * std::cos(a);
          if (m > 2 && (k % 2) == 1) std::swap(x[1], x[static_cast<std::size_t>(m - 1)]);
          res1 = std::max(res1, psi1.residual(x));
          res2 = std::max(res2, psi2.residual(x));
        }
        // Corner p = r e_2 with an entering direction eta.
        std::vector<double> pc(static_cast<std::size_t>(m), 0.0), eta(static_cast<std::size_t>(m), 0.0);
        pc[1] = r;
        for (double ang : {0.3, 0.7, 1.1}) {
          eta[0] = std::cos(ang);
          eta[1] = -std::sin(ang);
          const double pe = pc[1] * eta[1];
          const double got = corner_second_derivative(psi2, pc, eta);
          const double want_stated = -pe * eta[0] / r;
          const double want_true = -2.0 * pe * eta[0] / r;
          stated = std::max(stated, std::abs(got - want_stated) / std::abs(want_stated));
          corrected = std::max(corrected, std::abs(got - want_true) / std::abs(want_true));
          // Independent central difference of the extended field along p + s eta.
          const double s = 1e-4 * r;
          std::vector<double> xp = pc, xm = pc;
          for (int k = 0; k < m; ++k) {
            xp[static_cast<std::size_t>(k)] += s * eta[static_cast<std::size_t>(k)];
            xm[static_cast<std::size_t>(k)] -= s * eta[static_cast<std::size_t>(k)];
          }
          const double d2 = (psi2.extended_value(xp) - 2.0 * psi2.extended_value(pc) + psi2.extended_value(xm)) / (s * s);
          fd = std::max(fd, std::abs(d2 - want_true) / std::abs(want_true));
        }
      }
  const bool common = boundary_err <= 1e-10 && res1 <= 1e-12 && res2 <= 1e-12;
  const std::string base = fmt("boundary identities err %.2e (<= 1e-10), max residual psi1 %.3e, psi2 %.3e (<= 1e-12)",
                               boundary_err, res1, res2);
  return {{"8", "comparison functions", common && stated <= 1e-4,
           base + fmt("; corner vs -(p.eta)eta_1/r: rel err %.3e (<= 1e-4)", stated)},
          {"8b", "comparison functions (corner factor 2)", common && corrected <= 1e-4 && fd <= 1e-4,
           base + fmt("; corner vs -2(p.eta)eta_1/r: rel err %.3e, finite-difference cross-check %.3e", corrected,
                      fd)}};
}

// 9. Moving-plane verdicts.
double profile_error(const SymmetryReport& rep) {
  double e = 0.0;
  for (std::size_t k = 0; k < rep.profile_r.size(); ++k) {
    const double r = rep.profile_r[k];
    if (r > 1.0 && r < 2.0) e = std::max(e, std::abs(rep.profile_phi[k] - example::phi(r)));
  }
  return e;
}

std::vector<Line> moving_plane() {
  const double h = 1.0 / 64;
  std::ostringstream s;
  bool pass = true;
  double err64 = 0.0;
  // One grid for all copies, so the translated centers sit off the lattice.
  const Grid2 g = covering_grid(-2.8, 2.8, -2.8, 2.8, h);
  for (Vec2 c : {Vec2{0.0, 0.0}, Vec2{0.3, 0.2}, Vec2{-0.45, 0.6}}) {
    Placement pl;
    pl.center = c;
    const ExampleFlow ex = example_flow(g, pl);
    const DomainMask m = example_mask(g, c);
    const SymmetryReport rep = symmetry_verdict(ex.phi, m, 8, {});
    double lerr = 0.0;
    for (const PlaneSweepState& st : rep.sweeps)
      lerr = std::max(lerr, std::abs(st.lambda_star - dot(c, st.direction)));
    const double cerr = norm(rep.center - c);
    const double perr = profile_error(rep);
    if (c.x == 0.0 && c.y == 0.0) err64 = perr;
    const bool ok = rep.radial && rep.decreasing && cerr <= 2.0 * h && lerr <= h;
    pass = pass && ok;
    s << fmt("center (%.2f,%.2f): %s, center err %.2e (<= 2h), max lambda* err %.2e (<= h), profile err %.2e; ",
             c.x, c.y, rep.radial ? "radial" : "non-symmetric", cerr, lerr, perr);
  }
  {
    const double hc = 1.0 / 32;
    const Grid2 g = example_grid(hc);
    const SymmetryReport rep = symmetry_verdict(example_flow(g).phi, example_mask(g), 8, {});
    const double order = std::log2(profile_error(rep) / err64);
    pass = pass && rep.radial && order >= 1.5;
    s << fmt("profile err order (h=1/32 -> 1/64) %.2f (>= 1.5); ", order);
  }
  {
    Placement pl;
    pl.shear = 0.3;
    const Grid2 g = covering_grid(-2.6, 2.6, -2.3, 2.3, h);
    const ExampleFlow ex = example_flow(g, pl);
    const DomainMask m = mask_from_level(sample_scalar(g, [&](Vec2 x) {
      const double r = norm(pl.map(x));
      return std::min(r - 1.0, 2.0 - r);
    }));
    const SymmetryReport rep = symmetry_verdict(ex.phi, m, 8, {});
    pass = pass && !rep.radial;
    s << "sheared: " << (rep.radial ? "radial" : "non-symmetric");
  }
  return {{"9", "moving plane", pass, s.str()}};
}

// 10. Singular-coefficient budget along the sweeps.
std::vector<Line> coefficient_budget() {
  const double h = 1.0 / 64;
  const Grid2 g = example_grid(h);
  const ExampleFlow ex = example_flow(g);
  const DomainMask m = example_mask(g);
  const SampledNonlinearity nl = extract_f(ex.phi, m, 199);
  const double bound = singular_quotient_bound(nl, ex.phi, m, 200000);
  double worst = 0.0;
  std::size_t nodes = 0;
  for (int k = 0; k < 8; ++k) {
    const double a = std::numbers::pi * k / 4.0;
    const Vec2 dir{std::cos(a), std::sin(a)};
    for (double lambda = 1.9; lambda > 0.0; lambda -= 0.1) {
      const CoefficientBudget b = moving_plane_coefficient(nl, ex.phi, m, dir, lambda);
      worst = std::max(worst, b.max_scaled);
      nodes += b.nodes;
    }
  }
  const bool pass = nodes > 0 && worst <= 1.2 * bound;
  return {{"10", "singular-coefficient budget", pass,
           fmt("max |c| min(d(x), d(pi x)) = %.4f over %zu cap nodes, quotient bound %.4f (+20%% = %.4f)", worst,
               nodes, bound, 1.2 * bound)}};
}

// 11. End-to-end through the command line front end.
std::vector<Line> end_to_end() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "euler_lab_acceptance";
  fs::remove_all(dir);
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  const int b1 = cli::run({"build-example", "--spacing", "0.0078125", "--out", (dir / "example").string()}, out, err);
  const int r1 = cli::run({"report", "--u", (dir / "example" / "u.json").string(), "--out",
                           (dir / "example" / "report.json").string()},
                          out, err);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const int b2 = cli::run({"build-example", "--variant", "two-vortex", "--spacing", "0.015625", "--out",
                           (dir / "two").string()},
                          out, err);
  const int r2 = cli::run({"report", "--u", (dir / "two" / "u.json").string(), "--mask",
                           (dir / "two" / "mask.json").string(), "--out", (dir / "two" / "report.json").string()},
                          out, err);
  std::string reason = "(none)";
  try {
    reason = read_json((dir / "two" / "report.json").string()).at("reason").get<std::string>();
  } catch (const std::exception&) {
  }
  const bool pass = b1 == 0 && r1 == 0 && b2 == 0 && r2 == 3 && reason == "stagnation-point" && seconds <= 120.0;
  fs::remove_all(dir);
  return {{"11", "end-to-end", pass,
           fmt("example report exit %d (0), pipeline %.1f s at h=1/128 (<= 120 s); two-vortex exit %d (3), reason %s",
               r1, seconds, r2, reason.c_str())}};
}

}  // namespace

int main(int argc, char** argv) {
  init_threads_from_env();
  const std::vector<std::function<std::vector<Line>()>> criteria = {
      exact_example, nonlinearity_extraction, endpoint_blowup, mean_zero,          topology,  spectral,
      hardy_positivity, comparison,         moving_plane,    coefficient_budget, end_to_end};
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));
  if (selected.empty())
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) selected.push_back(k);
  int failures = 0;
  for (int k : selected) {
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Line> lines;
    try {
      lines = criteria[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      lines = {{std::to_string(k), "criterion " + std::to_string(k), false, std::string("error: ") + e.what()}};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const Line& l : lines) {
      std::printf("[%s] %-3s %-40s %s (%.1f s)\n", l.pass ? "PASS" : "FAIL", l.id.c_str(), l.name.c_str(),
                  l.detail.c_str(), sec);
      if (!l.pass) ++failures;
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
