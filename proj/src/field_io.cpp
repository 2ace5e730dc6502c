#include "eulerlab/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace eulerlab {

using nlohmann::json;

json grid_to_json(const Grid2& g) {
  return {{"x0", g.x0}, {"y0", g.y0}, {"h", g.h}, {"nx", g.nx}, {"ny", g.ny}};
}

Grid2 grid_from_json(const json& j) {
  try {
    return make_grid(j.at("x0").get<double>(), j.at("y0").get<double>(), j.at("h").get<double>(),
                     j.at("nx").get<int>(), j.at("ny").get<int>());
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed grid: ") + e.what());
  }
}

json to_json(const ScalarField& f) {
  return {{"grid", grid_to_json(f.grid)}, {"kind", "scalar"}, {"data", f.values}};
}

json to_json(const VectorField2& u) {
  std::vector<double> data;
  data.reserve(2 * u.values.size());
  for (const Vec2& v : u.values) {
    data.push_back(v.x);
    data.push_back(v.y);
  }
  return {{"grid", grid_to_json(u.grid)}, {"kind", "vector"}, {"data", std::move(data)}};
}

namespace {

std::vector<double> finite_data(const json& j, std::size_t expected) {
  std::vector<double> data;
  try {
    data = j.at("data").get<std::vector<double>>();
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed field data: ") + e.what());
  }
  require(data.size() == expected, "field data length does not match grid");
  for (double v : data) require(std::isfinite(v), "field data contains non-finite values");
  return data;
}

void expect_kind(const json& j, const char* kind) {
  require(j.contains("kind") && j["kind"] == kind, std::string("expected a field of kind ") + kind);
}

}  // namespace

ScalarField scalar_from_json(const json& j) {
  expect_kind(j, "scalar");
  const Grid2 g = grid_from_json(j.at("grid"));
  return ScalarField(g, finite_data(j, g.size()));
}

VectorField2 vector_from_json(const json& j) {
  expect_kind(j, "vector");
  const Grid2 g = grid_from_json(j.at("grid"));
  const auto data = finite_data(j, 2 * g.size());
  std::vector<Vec2> v(g.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = {data[2 * k], data[2 * k + 1]};
  return VectorField2(g, std::move(v));
}

json mask_to_json(const DomainMask& m) {
  json j = to_json(m.level);
  j["role"] = "mask";
  if (m.support_tol) j["support_tol"] = *m.support_tol;
  return j;
}

DomainMask mask_from_json(const json& j) {
  DomainMask m = mask_from_level(scalar_from_json(j));
  if (j.contains("support_tol")) m.support_tol = j["support_tol"].get<double>();
  return m;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, path + ": " + e.what());
  }
}

void write_text_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
    out << text;
    if (!out) fail(ErrorKind::InvalidArgument, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

void write_json_atomic(const std::string& path, const json& j) { write_text_atomic(path, j.dump(1) + "\n"); }

}  // namespace eulerlab
