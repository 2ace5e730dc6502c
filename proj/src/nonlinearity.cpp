#include "eulerlab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eulerlab/kernels.hpp"
#include "eulerlab/parallel.hpp"

namespace eulerlab {

double SampledNonlinearity::operator()(double c) const {
  require(levels.size() >= 2 && levels.size() == f.size(), "nonlinearity: malformed sample");
  c = std::clamp(c, levels.front(), levels.back());
  auto it = std::upper_bound(levels.begin(), levels.end(), c);
  if (it == levels.end()) return f.back();
  const std::size_t k = static_cast<std::size_t>(it - levels.begin()) - 1;
  const double t = (c - levels[k]) / (levels[k + 1] - levels[k]);
  return (1.0 - t) * f[k] + t * f[k + 1];
}

std::vector<double> SampledNonlinearity::derivative() const {
  const std::size_t n = levels.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d[0] = (f[1] - f[0]) / (levels[1] - levels[0]);
  d[n - 1] = (f[n - 1] - f[n - 2]) / (levels[n - 1] - levels[n - 2]);
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (f[k + 1] - f[k - 1]) / (levels[k + 1] - levels[k - 1]);
  return d;
}

ScalarField extend_stream_function(const ScalarField& phi, const DomainMask& mask) {
  require_same_grid(phi.grid, mask.grid, "extend_stream_function");
  ScalarField out(phi.grid);
  for (std::size_t k = 0; k < out.values.size(); ++k)
    out[k] = mask.inside[k] ? phi[k] : (mask.in_outer[k] ? 1.0 : 0.0);
  return out;
}

LevelSet level_set(const ScalarField& phi, const DomainMask& mask, double c) {
  if (!(c > 0.0 && c < 1.0)) fail(ErrorKind::InvalidArgument, "level_set: c must lie in (0, 1)");
  const ScalarField ext = extend_stream_function(phi, mask);
  LevelSet ls;
  ls.c = c;
  ls.polylines = contour_lines(ext.grid, ext.values, c);
  if (ls.polylines.empty())
    fail(ErrorKind::LevelNotAttained, "level_set: level " + std::to_string(c) + " not attained");
  ls.connected = ls.polylines.size() == 1;
  return ls;
}

std::vector<std::pair<double, int>> connectedness_scan(const ScalarField& phi, const DomainMask& mask,
                                                       const std::vector<double>& levels) {
  for (double c : levels) require(c > 0.0 && c < 1.0, "connectedness_scan: levels must lie in (0, 1)");
  const ScalarField ext = extend_stream_function(phi, mask);
  std::vector<std::pair<double, int>> out(levels.size());
  const int n = static_cast<int>(levels.size());
  const int threads = thread_limit();
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
  for (int k = 0; k < n; ++k)
    out[k] = {levels[k], static_cast<int>(contour_lines(ext.grid, ext.values, levels[k]).size())};
  return out;
}

std::vector<double> uniform_levels(int n) {
  require(n >= 1, "uniform_levels: need at least one level");
  std::vector<double> c(n);
  for (int k = 0; k < n; ++k) c[k] = static_cast<double>(k + 1) / (n + 1);
  return c;
}

void check_no_critical_points(const ScalarField& phi, const DomainMask& mask) {
  const Grid2& g = phi.grid;
  const VectorField2 grad = gradient(phi);
  auto deep = [&](int i, int j) {
    if (!g.interior(i, j)) return false;
    const std::size_t k = g.index(i, j);
    return mask.inside[k] && mask.distance[k] > 2.0 * g.h;
  };
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i)
      if (deep(i, j) && norm(grad(i, j)) == 0.0)
        fail(ErrorKind::InteriorCriticalPoint,
             "grad(phi) vanishes at (" + std::to_string(g.x(i)) + ", " + std::to_string(g.y(j)) + ")");
  for (int j = 1; j < g.ny - 2; ++j)
    for (int i = 1; i < g.nx - 2; ++i) {
      if (!(deep(i, j) && deep(i + 1, j) && deep(i + 1, j + 1) && deep(i, j + 1))) continue;
      const Vec2 v[4] = {grad(i, j), grad(i + 1, j), grad(i + 1, j + 1), grad(i, j + 1)};
      double turn = 0.0;
      for (int c = 0; c < 4; ++c) turn += std::atan2(cross(v[c], v[(c + 1) % 4]), dot(v[c], v[(c + 1) % 4]));
      if (std::abs(turn) > std::numbers::pi)
        fail(ErrorKind::InteriorCriticalPoint, "grad(phi) winds around the cell at (" +
                                                   std::to_string(g.x(i)) + ", " + std::to_string(g.y(j)) + ")");
    }
}

namespace {

struct WeightedStats {
  double mean = 0.0;
  double sd = 0.0;
};

WeightedStats curve_stats(const ScalarField& q, const std::vector<Polyline>& curves) {
  double sw = 0.0, s1 = 0.0, s2 = 0.0;
  for (const Polyline& c : curves) {
    const auto& v = c.vertices;
    const std::size_t n = v.size();
    for (std::size_t k = 0; k < n; ++k) {
      const double w = 0.5 * (norm(v[(k + 1) % n] - v[k]) + norm(v[k] - v[(k + n - 1) % n]));
      const double x = q.sample(v[k]);
      sw += w;
      s1 += w * x;
      s2 += w * x * x;
    }
  }
  WeightedStats st;
  if (sw <= 0.0) return st;
  st.mean = s1 / sw;
  st.sd = std::sqrt(std::max(0.0, s2 / sw - st.mean * st.mean));
  return st;
}

WeightedStats endpoint_stats(const ScalarField& neg_lap, const DomainMask& mask, bool outer) {
  const Grid2& g = mask.grid;
  double n = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!mask.inside[k]) continue;
    const double d = mask.distance[k];
    if (!(d > g.h && d <= 2.0 * g.h)) continue;
    if ((mask.nearest_component[k] == 0) != outer) continue;
    n += 1.0;
    s1 += neg_lap[k];
    s2 += neg_lap[k] * neg_lap[k];
  }
  if (n == 0.0) fail(ErrorKind::EmptyDomain, "extract_f: no nodes next to a boundary curve");
  WeightedStats st;
  st.mean = s1 / n;
  st.sd = std::sqrt(std::max(0.0, s2 / n - st.mean * st.mean));
  return st;
}

}  // namespace

SampledNonlinearity extract_f(const ScalarField& phi, const DomainMask& mask, int n_levels) {
  if (n_levels < 8) fail(ErrorKind::InvalidArgument, "extract_f: need at least 8 levels");
  return extract_f(phi, mask, uniform_levels(n_levels));
}

SampledNonlinearity extract_f(const ScalarField& phi, const DomainMask& mask, const std::vector<double>& levels) {
  require_same_grid(phi.grid, mask.grid, "extract_f");
  if (levels.size() < 8) fail(ErrorKind::InvalidArgument, "extract_f: need at least 8 levels");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    require(levels[k] > 0.0 && levels[k] < 1.0, "extract_f: levels must lie in (0, 1)");
    require(k == 0 || levels[k] > levels[k - 1], "extract_f: levels must increase");
  }
  if (mask.components.size() < 2)
    fail(ErrorKind::UnsupportedTopology, "extract_f: the mask has no hole");
  check_no_critical_points(phi, mask);

  ScalarField neg_lap = laplacian(phi);
  for (double& v : neg_lap.values) v = -v;
  const ScalarField ext = extend_stream_function(phi, mask);

  const int n = static_cast<int>(levels.size());
  std::vector<WeightedStats> stats(levels.size());
  std::vector<int> counts(levels.size(), 0);
  const int threads = thread_limit();
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
  for (int k = 0; k < n; ++k) {
    const auto curves = contour_lines(ext.grid, ext.values, levels[k]);
    counts[k] = static_cast<int>(curves.size());
    if (!curves.empty()) stats[k] = curve_stats(neg_lap, curves);
  }
  for (int k = 0; k < n; ++k)
    if (counts[k] == 0)
      fail(ErrorKind::LevelNotAttained, "extract_f: level " + std::to_string(levels[k]) + " not attained");

  SampledNonlinearity nl;
  const WeightedStats f0 = endpoint_stats(neg_lap, mask, true);
  const WeightedStats f1 = endpoint_stats(neg_lap, mask, false);
  nl.levels.push_back(0.0);
  nl.f.push_back(f0.mean);
  nl.spread.push_back(f0.sd);
  nl.curve_count.push_back(0);
  for (int k = 0; k < n; ++k) {
    nl.levels.push_back(levels[k]);
    nl.f.push_back(stats[k].mean);
    nl.spread.push_back(stats[k].sd);
    nl.curve_count.push_back(counts[k]);
  }
  nl.levels.push_back(1.0);
  nl.f.push_back(f1.mean);
  nl.spread.push_back(f1.sd);
  nl.curve_count.push_back(0);
  try {
    nl.endpoint_rates = endpoint_regularity(nl);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidArgument) throw;
  }
  return nl;
}

namespace {

struct Sample {
  double delta;
  double slope;
};

double fit_exponent(std::vector<Sample> s) {
  std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.delta < b.delta; });
  const std::size_t drop = s.size() / 10;
  s = std::vector<Sample>(s.begin() + static_cast<std::ptrdiff_t>(drop), s.end() - static_cast<std::ptrdiff_t>(drop));
  const double n = static_cast<double>(s.size());
  double mean = 0.0, scale = 0.0;
  for (const Sample& x : s) {
    mean += x.slope / n;
    scale = std::max(scale, std::abs(x.slope));
  }
  double var = 0.0;
  for (const Sample& x : s) var += (x.slope - mean) * (x.slope - mean);
  if (scale == 0.0 || std::sqrt(var / n) <= 1e-8 * scale) return 0.0;

  double best_p = 0.0, best_ssr = INFINITY;
  for (int step = -2000; step <= 2000; ++step) {
    if (step == 0) continue;
    const double p = step * 1e-3;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const Sample& x : s) {
      const double t = std::pow(x.delta, p);
      sx += t;
      sy += x.slope;
      sxx += t * t;
      sxy += t * x.slope;
    }
    const double det = n * sxx - sx * sx;
    if (!(std::abs(det) > 1e-300)) continue;
    const double b = (n * sxy - sx * sy) / det;
    const double a = (sy - b * sx) / n;
    double ssr = 0.0;
    for (const Sample& x : s) {
      const double r = x.slope - a - b * std::pow(x.delta, p);
      ssr += r * r;
    }
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best_p = p;
    }
  }
  return best_p;
}

}  // namespace

EndpointRates endpoint_regularity(const SampledNonlinearity& nl) {
  const std::size_t n = nl.levels.size();
  require(n == nl.f.size(), "endpoint_regularity: malformed sample");
  std::vector<Sample> near0, near1;
  int count0 = 0, count1 = 0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (nl.levels[k] <= 0.1) ++count0;
    if (1.0 - nl.levels[k] <= 0.1) ++count1;
  }
  if (count0 < 16 || count1 < 16)
    fail(ErrorKind::InvalidArgument, "endpoint_regularity: need 16 levels within 0.1 of each endpoint");
  for (std::size_t k = 1; k + 2 < n; ++k) {
    const double c = 0.5 * (nl.levels[k] + nl.levels[k + 1]);
    const double slope = (nl.f[k + 1] - nl.f[k]) / (nl.levels[k + 1] - nl.levels[k]);
    if (c <= 0.1) near0.push_back({c, slope});
    if (1.0 - c <= 0.1) near1.push_back({1.0 - c, slope});
  }
  return {fit_exponent(near0), fit_exponent(near1)};
}

MeanZero mean_zero_check(const std::function<double(double)>& f, const ScalarField& phi, const DomainMask& mask) {
  require_same_grid(phi.grid, mask.grid, "mean_zero_check");
  std::vector<double> vals, mags;
  for (std::size_t k = 0; k < phi.values.size(); ++k)
    if (mask.inside[k]) {
      const double v = f(phi[k]);
      vals.push_back(v);
      mags.push_back(std::abs(v));
    }
  MeanZero out;
  const double total = deterministic_sum(mags);
  if (vals.empty() || total == 0.0) {
    out.empty_domain = vals.empty();
    return out;
  }
  out.value = deterministic_sum(vals) / total;
  return out;
}

MeanZero mean_zero_check(const SampledNonlinearity& nl, const ScalarField& phi, const DomainMask& mask) {
  return mean_zero_check([&nl](double c) { return nl(c); }, phi, mask);
}

}  // namespace eulerlab
