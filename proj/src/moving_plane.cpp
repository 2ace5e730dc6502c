#include "eulerlab/moving_plane.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eulerlab/kernels.hpp"
#include "eulerlab/parallel.hpp"

namespace eulerlab {

namespace {

double oscillation(const ScalarField& ext, const DomainMask& mask) {
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t k = 0; k < ext.values.size(); ++k)
    if (mask.in_outer[k]) {
      lo = std::min(lo, ext[k]);
      hi = std::max(hi, ext[k]);
    }
  return hi > lo ? hi - lo : 0.0;
}

Vec2 unit(Vec2 d) {
  const double n = norm(d);
  require(n > 0.0, "direction must be nonzero");
  return (1.0 / n) * d;
}

/// Cap evaluation shared by reflect_compare and the sweep: the closed outer
/// region's nodes sorted by decreasing x . dir, so every cap is a prefix.
struct CapIndex {
  const ScalarField& ext;
  Vec2 dir;
  std::vector<std::size_t> nodes;
  std::vector<double> height;

  CapIndex(const ScalarField& e, const DomainMask& mask, Vec2 d) : ext(e), dir(d) {
    const Grid2& g = e.grid;
    for (std::size_t k = 0; k < g.size(); ++k)
      if (mask.in_outer[k]) nodes.push_back(k);
    std::vector<double> key(g.size());
    for (std::size_t k : nodes) key[k] = dot(g.node(k), dir);
    std::stable_sort(nodes.begin(), nodes.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
    height.reserve(nodes.size());
    for (std::size_t k : nodes) height.push_back(key[k]);
  }

  std::size_t prefix(double lambda) const {
    return static_cast<std::size_t>(
        std::upper_bound(height.begin(), height.end(), lambda, [](double l, double hgt) { return hgt <= l; }) -
        height.begin());
  }

  double reflected_value(std::size_t k, double lambda) const {
    const Grid2& g = ext.grid;
    const Vec2 q = reflect(g.node(k), dir, lambda);
    if (!g.contains(q)) fail(ErrorKind::InvalidArgument, "reflect_compare: reflected cap leaves the grid");
    return ext.sample(q);
  }

  /// Min and max |w| over the cap; stops early once min w < stop_below.
  std::pair<double, double> scan(double lambda, std::size_t& argmin, double stop_below = -INFINITY) const {
    const std::size_t n = prefix(lambda);
    double mn = INFINITY, mx = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t k = nodes[c];
      const double w = reflected_value(k, lambda) - ext[k];
      mx = std::max(mx, std::abs(w));
      if (w < mn) {
        mn = w;
        argmin = k;
        if (mn < stop_below) break;
      }
    }
    return {n == 0 ? 0.0 : mn, mx};
  }
};

double max_gradient(const ScalarField& ext, const DomainMask& mask) {
  const VectorField2 grad = gradient(ext);
  double m = 0.0;
  for (std::size_t k = 0; k < ext.values.size(); ++k)
    if (mask.in_outer[k]) m = std::max(m, norm(grad[k]));
  return m;
}

bool is_axis(Vec2 d) { return (std::abs(d.x) == 1.0 && d.y == 0.0) || (d.x == 0.0 && std::abs(d.y) == 1.0); }

}  // namespace

ReflectResult reflect_compare(const ScalarField& phi, const DomainMask& mask, Vec2 dir, double lambda) {
  require_same_grid(phi.grid, mask.grid, "reflect_compare");
  dir = unit(dir);
  const ScalarField ext = extend_stream_function(phi, mask);
  const CapIndex idx(ext, mask, dir);
  ReflectResult out;
  out.w = ScalarField(phi.grid);
  const std::size_t n = idx.prefix(lambda);
  if (n == 0) fail(ErrorKind::InvalidArgument, "reflect_compare: empty cap");
  out.cap.assign(idx.nodes.begin(), idx.nodes.begin() + static_cast<std::ptrdiff_t>(n));
  out.min_w = INFINITY;
  for (std::size_t k : out.cap) {
    const double w = idx.reflected_value(k, lambda) - ext[k];
    out.w[k] = w;
    if (w < out.min_w) {
      out.min_w = w;
      out.argmin = phi.grid.node(k);
    }
  }
  return out;
}

double singular_quotient_bound(const std::function<double(double)>& f, const ScalarField& phi,
                               const DomainMask& mask, long n_pairs) {
  require_same_grid(phi.grid, mask.grid, "singular_quotient_bound");
  if (n_pairs < 10000) fail(ErrorKind::InvalidArgument, "singular_quotient_bound: need at least 10^4 pairs");
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < phi.values.size(); ++k)
    if (mask.inside[k] && mask.distance[k] > 0.0) nodes.push_back(k);
  if (nodes.size() < 2) fail(ErrorKind::EmptyDomain, "singular_quotient_bound: too few interior nodes");
  std::vector<double> fv(nodes.size());
  for (std::size_t a = 0; a < nodes.size(); ++a) fv[a] = f(phi[nodes[a]]);
  // R2 sequence: the plastic number g gives increments 1/g, 1/g^2.
  constexpr double g = 1.32471795724474602596;
  constexpr double a1 = 1.0 / g, a2 = 1.0 / (g * g);
  const double n = static_cast<double>(nodes.size());
  double best = 0.0;
  for (long k = 0; k < n_pairs; ++k) {
    const double u = std::fmod(0.5 + a1 * static_cast<double>(k), 1.0);
    const double v = std::fmod(0.5 + a2 * static_cast<double>(k), 1.0);
    const auto i = std::min(static_cast<std::size_t>(u * n), nodes.size() - 1);
    const auto j = std::min(static_cast<std::size_t>(v * n), nodes.size() - 1);
    const double dphi = phi[nodes[i]] - phi[nodes[j]];
    if (std::abs(dphi) <= 1e-9) continue;
    const double dmin = std::min(mask.distance[nodes[i]], mask.distance[nodes[j]]);
    best = std::max(best, std::abs(fv[i] - fv[j]) * dmin / std::abs(dphi));
  }
  return best;
}

double singular_quotient_bound(const SampledNonlinearity& f, const ScalarField& phi, const DomainMask& mask,
                               long n_pairs) {
  return singular_quotient_bound([&f](double c) { return f(c); }, phi, mask, n_pairs);
}

double gradient_lower_bound(const ScalarField& phi, const DomainMask& mask, double band_width) {
  require_same_grid(phi.grid, mask.grid, "gradient_lower_bound");
  require(band_width > 0.0, "gradient_lower_bound: band width must be positive");
  const Grid2& g = phi.grid;
  const VectorField2 grad = gradient(phi);
  double best = INFINITY;
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      const std::size_t k = g.index(i, j);
      const double d = mask.distance[k];
      if (!mask.inside[k] || !(d > 0.0) || !(d < band_width)) continue;
      best = std::min(best, norm(grad[k]) / d);
    }
  if (!std::isfinite(best)) fail(ErrorKind::EmptyDomain, "gradient_lower_bound: empty band");
  return best;
}

namespace {

double fprime_value(const SampledNonlinearity& f, const ScalarField& phi, const DomainMask& mask) {
  SampledNonlinearity df = f;
  df.f = f.derivative();
  double best = 0.0;
  for (std::size_t k = 0; k < phi.values.size(); ++k)
    if (mask.inside[k]) best = std::max(best, std::abs(df(phi[k])) * mask.distance[k]);
  return best;
}

}  // namespace

FprimeBound fprime_bound(const SampledNonlinearity& f, const ScalarField& phi, const DomainMask& mask) {
  require_same_grid(phi.grid, mask.grid, "fprime_bound");
  require(f.levels.size() >= 5, "fprime_bound: too few levels");
  SampledNonlinearity coarse;
  const std::size_t n = f.levels.size();
  for (std::size_t k = 0; k < n; ++k)
    if (k % 2 == 0 || k == n - 1) {
      if (k == n - 1 && k % 2 != 0 && !coarse.levels.empty() && coarse.levels.back() == f.levels[k]) continue;
      coarse.levels.push_back(f.levels[k]);
      coarse.f.push_back(f.f[k]);
    }
  FprimeBound out;
  out.value = fprime_value(f, phi, mask);
  out.coarse_value = fprime_value(coarse, phi, mask);
  out.divergent = out.value > 1.75 * out.coarse_value;
  return out;
}

const char* to_string(PlaneEvent e) {
  switch (e) {
    case PlaneEvent::Tangency: return "tangency";
    case PlaneEvent::Orthogonality: return "orthogonality";
    case PlaneEvent::None: return "none";
  }
  return "none";
}

namespace {

struct EventProbe {
  bool tangency = false;
  bool orthogonality = false;
  double metric = INFINITY;
  int sign_violations = 0;
  int sign_borderline = 0;
};

EventProbe probe_events(const DomainMask& mask, const std::vector<SegmentIndex>& curve_index, Vec2 dir,
                        double lambda) {
  const double h = mask.grid.h;
  EventProbe ev;
  for (std::size_t c = 0; c < mask.components.size(); ++c) {
    const auto& v = mask.components[c].vertices;
    const std::size_t n = v.size();
    const double radius = std::sqrt(std::max(mask.areas[c], 0.0) / std::numbers::pi);
    for (std::size_t k = 0; k < n; ++k) {
      const double s = dot(v[k], dir) - lambda;
      if (s > 2.0 * h && radius > 0.0) {
        const double gap = curve_index[c].nearest(reflect(v[k], dir, lambda)).distance;
        const double ratio = gap / s;
        ev.metric = std::min(ev.metric, ratio);
        if (ratio <= 2.0 * h / radius) ev.tangency = true;
      }
      if (std::abs(s) <= 2.0 * h) {
        const Vec2 t = v[(k + 1) % n] - v[(k + n - 1) % n];
        const double tl = norm(t);
        if (tl == 0.0) continue;
        // Curves are counterclockwise, so (t.y, -t.x) points out of the enclosed region.
        const double nu = dot(Vec2{t.y / tl, -t.x / tl}, dir);
        if (std::abs(s) <= h && std::abs(nu) < h) ev.orthogonality = true;
        if (c == 0 && s > 0.0) {
          if (std::abs(nu) <= h) ++ev.sign_borderline;
          else if (nu < 0.0) ++ev.sign_violations;
        }
      }
    }
  }
  return ev;
}

}  // namespace

PlaneSweepState critical_plane(const ScalarField& phi, const DomainMask& mask, Vec2 dir, const SweepOptions& opt) {
  require_same_grid(phi.grid, mask.grid, "critical_plane");
  if (mask.components.size() != 2)
    fail(ErrorKind::UnsupportedTopology, "critical_plane: the mask is not annular");
  dir = unit(dir);
  const Grid2& g = phi.grid;
  const double h = g.h;
  const ScalarField ext = extend_stream_function(phi, mask);
  const CapIndex idx(ext, mask, dir);

  PlaneSweepState st;
  st.direction = dir;
  st.lambda_bar = -INFINITY;
  double lambda_min = INFINITY;
  for (Vec2 p : mask.components[0].vertices) {
    st.lambda_bar = std::max(st.lambda_bar, dot(p, dir));
    lambda_min = std::min(lambda_min, dot(p, dir));
  }
  st.tol_w = opt.tol_multiplier * h * h * oscillation(ext, mask);

  double lambda = st.lambda_bar - h;
  const double step = 0.5 * h;
  if (is_axis(dir)) {
    const double base = dot(Vec2{g.x0, g.y0}, dir);
    lambda = base + std::floor((lambda - base) / step) * step;
  }
  double last_pass = st.lambda_bar;
  std::size_t argmin = 0;
  for (int k = 0; lambda > lambda_min; ++k) {
    const double lam = lambda;
    const auto [mn, mx] = idx.scan(lam, argmin, -st.tol_w);
    (void)mx;
    st.w_min_history.emplace_back(lam, mn);
    if (mn < -st.tol_w) {
      st.stopped_by_violation = true;
      break;
    }
    last_pass = lam;
    lambda = (is_axis(dir) ? lambda - step : st.lambda_bar - h - (k + 1) * step);
  }
  st.lambda_star = last_pass;

  std::vector<SegmentIndex> curve_index;
  for (const Polyline& c : mask.components) curve_index.emplace_back(std::vector<Polyline>{c}, 4.0 * h);
  const EventProbe ev = probe_events(mask, curve_index, dir, st.lambda_star);
  st.tangency = ev.tangency;
  st.orthogonality = ev.orthogonality;
  st.tangency_metric = std::isfinite(ev.metric) ? ev.metric : 0.0;
  st.normal_sign_violations = ev.sign_violations;
  st.normal_sign_borderline = ev.sign_borderline;
  st.event = ev.tangency ? PlaneEvent::Tangency : (ev.orthogonality ? PlaneEvent::Orthogonality : PlaneEvent::None);

  const auto [mn, mx] = idx.scan(st.lambda_star, argmin);
  (void)mn;
  st.symmetric_residual = mx;
  st.symmetric_tolerance = 2.0 * h * max_gradient(ext, mask) + st.tol_w;
  st.symmetric = mx <= st.symmetric_tolerance;
  return st;
}

RadialProfile SymmetryReport::profile() const { return RadialProfile::sampled(profile_r, profile_phi); }

SymmetryReport symmetry_verdict(const ScalarField& phi, const DomainMask& mask, int n_directions,
                                const SweepOptions& opt) {
  require_same_grid(phi.grid, mask.grid, "symmetry_verdict");
  if (n_directions < 4) fail(ErrorKind::InvalidArgument, "symmetry_verdict: need at least 4 directions");
  if (mask.components.size() != 2)
    fail(ErrorKind::UnsupportedTopology, "symmetry_verdict: the mask is not annular");
  const Grid2& g = phi.grid;
  SymmetryReport rep;
  rep.directions = n_directions;
  std::vector<Vec2> dirs;
  for (int k = 0; k < n_directions; ++k) {
    const double a = std::numbers::pi * k / n_directions;
    dirs.push_back({std::cos(a), std::sin(a)});
  }
  for (int k = 0; k < n_directions; ++k) dirs.push_back(-1.0 * dirs[static_cast<std::size_t>(k)]);
  // Exact axis directions keep the reflections on grid nodes.
  for (Vec2& d : dirs) {
    if (std::abs(d.x) < 1e-15) d.x = 0.0;
    if (std::abs(d.y) < 1e-15) d.y = 0.0;
  }
  rep.sweeps.resize(dirs.size());
  const int n = static_cast<int>(dirs.size());
  const int threads = thread_limit();
  std::vector<std::string> errors(dirs.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
  for (int k = 0; k < n; ++k) {
    try {
      rep.sweeps[static_cast<std::size_t>(k)] = critical_plane(phi, mask, dirs[static_cast<std::size_t>(k)], opt);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(k)] = e.what();
    }
  }
  for (int k = 0; k < n; ++k)
    if (!errors[static_cast<std::size_t>(k)].empty())
      critical_plane(phi, mask, dirs[static_cast<std::size_t>(k)], opt);  // rethrows with its own kind

  bool all_ok = true;
  for (const PlaneSweepState& s : rep.sweeps)
    if (!s.success()) {
      all_ok = false;
      if (!rep.violating_direction) rep.violating_direction = s.direction;
    }

  // Least-squares intersection of the planes x . d_k = lambda_k.
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  for (const PlaneSweepState& s : rep.sweeps) {
    const Vec2 d = s.direction;
    a11 += d.x * d.x;
    a12 += d.x * d.y;
    a22 += d.y * d.y;
    b1 += d.x * s.lambda_star;
    b2 += d.y * s.lambda_star;
  }
  const double det = a11 * a22 - a12 * a12;
  rep.center = {(a22 * b1 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det};

  const ScalarField ext = extend_stream_function(phi, mask);
  const double h = g.h;
  double rmax = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (mask.in_outer[k]) rmax = std::max(rmax, norm(g.node(k) - rep.center));
  const std::size_t bins = static_cast<std::size_t>(std::ceil(rmax / h)) + 1;
  std::vector<double> sr(bins, 0.0), sp(bins, 0.0), cnt(bins, 0.0);
  std::vector<std::uint8_t> pure(bins, 1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!mask.in_outer[k]) continue;
    const double r = norm(g.node(k) - rep.center);
    const std::size_t b = std::min(bins - 1, static_cast<std::size_t>(r / h));
    sr[b] += r;
    sp[b] += ext[k];
    cnt[b] += 1.0;
    if (!mask.inside[k]) pure[b] = 0;
  }
  std::vector<std::uint8_t> pure_kept;
  for (std::size_t b = 0; b < bins; ++b)
    if (cnt[b] > 0.0) {
      const double rb = sr[b] / cnt[b];
      if (!rep.profile_r.empty() && rb <= rep.profile_r.back()) continue;
      rep.profile_r.push_back(rb);
      rep.profile_phi.push_back(sp[b] / cnt[b]);
      pure_kept.push_back(pure[b]);
    }
  rep.fit_residual = 0.0;
  if (rep.profile_r.size() >= 2) {
    const RadialProfile prof = rep.profile();
    for (std::size_t k = 0; k < g.size(); ++k)
      if (mask.in_outer[k]) rep.fit_residual = std::max(rep.fit_residual, std::abs(ext[k] - prof(norm(g.node(k) - rep.center))));
  }
  rep.fit_tolerance = 10.0 * h * oscillation(ext, mask);
  rep.decreasing = true;
  int pure_bins = 0;
  for (std::size_t b = 0; b < rep.profile_r.size(); ++b) {
    if (!pure_kept[b]) continue;
    ++pure_bins;
    if (b + 1 < rep.profile_r.size() && pure_kept[b + 1] && !(rep.profile_phi[b + 1] < rep.profile_phi[b]))
      rep.decreasing = false;
  }
  if (pure_bins < 2) rep.decreasing = false;
  rep.radial = all_ok && rep.fit_residual <= rep.fit_tolerance && rep.decreasing;

  if (rep.radial && n_directions < 16) {
    SymmetryReport fine = symmetry_verdict(phi, mask, 16, opt);
    fine.reverified = true;
    return fine;
  }
  return rep;
}

CoefficientBudget moving_plane_coefficient(const SampledNonlinearity& f, const ScalarField& phi,
                                           const DomainMask& mask, Vec2 dir, double lambda) {
  require_same_grid(phi.grid, mask.grid, "moving_plane_coefficient");
  dir = unit(dir);
  const Grid2& g = phi.grid;
  const ScalarField ext = extend_stream_function(phi, mask);
  CoefficientBudget out;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!mask.inside[k]) continue;
    const Vec2 x = g.node(k);
    if (!(dot(x, dir) > lambda)) continue;
    const Vec2 q = reflect(x, dir, lambda);
    if (!g.contains(q)) fail(ErrorKind::InvalidArgument, "moving_plane_coefficient: reflected cap leaves the grid");
    const double pq = ext.sample(q), px = ext[k];
    if (std::abs(pq - px) <= 1e-9) continue;
    ++out.nodes;
    const double c = -(f(pq) - f(px)) / (pq - px);
    const double scaled = std::abs(c) * std::min(mask.distance[k], mask.distance_at(q));
    if (scaled > out.max_scaled) {
      out.max_scaled = scaled;
      out.worst = x;
    }
  }
  return out;
}

}  // namespace eulerlab
