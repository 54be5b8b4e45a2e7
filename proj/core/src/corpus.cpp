#include "hodgekit/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "hodgekit/errors.hpp"

namespace hodgekit::corpus {

ComplexPtr circle(int n) {
  if (n < 3) throw Error(ErrorCode::parameter, "circle needs at least 3 vertices");
  Eigen::MatrixXd v(n, 2);
  std::vector<Simplex> edges;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    v(i, 0) = std::cos(a);
    v(i, 1) = std::sin(a);
    edges.push_back({i, (i + 1) % n});
  }
  return build_complex(std::move(v), edges);
}

ComplexPtr flat_torus(int n) {
  if (n < 3) throw Error(ErrorCode::parameter, "torus grid needs n >= 3");
  const double two_pi = 2.0 * std::numbers::pi;
  const double h = two_pi / n;
  Eigen::MatrixXd v(n * n, 3);
  auto id = [n](int i, int j) { return ((j % n + n) % n) * n + ((i % n + n) % n); };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v.row(id(i, j)) << i * h, j * h, 0.0;
  std::vector<Simplex> tris;
  tris.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  Eigen::VectorXd period(3);
  period << two_pi, two_pi, 0.0;
  return build_complex(std::move(v), tris, std::move(period));
}

ComplexPtr sphere(int levels) {
  if (levels < 0) throw Error(ErrorCode::parameter, "sphere refinement level must be >= 0");
  std::vector<Eigen::Vector3d> pts = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                      {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::vector<std::array<Index, 3>> tris = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                            {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  for (int level = 0; level < levels; ++level) {
    std::map<std::pair<Index, Index>, Index> midpoint;
    auto mid = [&](Index a, Index b) {
      const auto key = std::minmax(a, b);
      const auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      pts.push_back((pts[a] + pts[b]).normalized());
      const auto m = static_cast<Index>(pts.size() - 1);
      midpoint.emplace(key, m);
      return m;
    };
    std::vector<std::array<Index, 3>> refined;
    refined.reserve(tris.size() * 4);
    for (const auto& [a, b, c] : tris) {
      const Index ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      refined.push_back({a, ab, ca});
      refined.push_back({ab, b, bc});
      refined.push_back({ca, bc, c});
      refined.push_back({ab, bc, ca});
    }
    tris = std::move(refined);
  }
  Eigen::MatrixXd v(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) v.row(static_cast<Eigen::Index>(i)) = pts[i];
  std::vector<Simplex> top;
  top.reserve(tris.size());
  for (const auto& t : tris) top.push_back({t[0], t[1], t[2]});
  return build_complex(std::move(v), top);
}

ComplexPtr by_name(const std::string& name) {
  auto suffix = [&](const std::string& prefix) -> int {
    if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return -1;
    for (std::size_t i = prefix.size(); i < name.size(); ++i)
      if (name[i] < '0' || name[i] > '9') return -1;
    return std::stoi(name.substr(prefix.size()));
  };
  if (const int n = suffix("circle"); n >= 3) return circle(n);
  if (const int n = suffix("torus"); n >= 3) return flat_torus(n);
  if (const int l = suffix("sphere"); l >= 0 && l <= 4) return sphere(l);
  throw Error(ErrorCode::unknown_registry, "unknown corpus mesh '" + name + "'");
}

std::vector<std::string> names() {
  return {"circle4", "circle64", "torus8", "torus16", "torus32", "sphere0", "sphere1", "sphere2"};
}

std::vector<int> expected_betti(const std::string& name) {
  if (name.rfind("circle", 0) == 0) return {1, 1};
  if (name.rfind("torus", 0) == 0) return {1, 2, 1};
  if (name.rfind("sphere", 0) == 0) return {1, 0, 1};
  throw Error(ErrorCode::unknown_registry, "unknown corpus mesh '" + name + "'");
}

}  // namespace hodgekit::corpus
