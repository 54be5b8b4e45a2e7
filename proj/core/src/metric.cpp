#include "hodgekit/metric.hpp"

#include <cmath>
#include <sstream>

#include "hodgekit/errors.hpp"
#include "hodgekit/geometry.hpp"

namespace hodgekit {

std::string_view to_string(MetricScheme scheme) noexcept {
  return scheme == MetricScheme::whitney ? "whitney" : "lumped";
}

MetricScheme parse_scheme(std::string_view name) {
  if (name == "whitney") return MetricScheme::whitney;
  if (name == "lumped") return MetricScheme::lumped;
  throw Error(ErrorCode::parameter, "unknown metric scheme '" + std::string(name) + "'");
}

namespace {

std::string format_simplex(const Simplex& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

void local_faces(const Simplex& top, int p, std::size_t start, Simplex& cur,
                 std::vector<Simplex>& out) {
  if (static_cast<int>(cur.size()) == p + 1) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < top.size(); ++i) {
    cur.push_back(top[i]);
    local_faces(top, p, i + 1, cur, out);
    cur.pop_back();
  }
}

std::vector<SparseMatrix> assemble_whitney(const SimplicialComplex& c) {
  const int n = c.dimension();
  std::vector<std::vector<Eigen::Triplet<double>>> entries(n + 1);
  const auto& tops = c.simplices(n);
  for (std::size_t t = 0; t < tops.size(); ++t) {
    const auto geom = geometry::simplex_geometry(c.simplex_coordinates(n, t));
    for (int p = 0; p <= n; ++p) {
      std::vector<Simplex> faces;
      Simplex cur;
      local_faces(tops[t], p, 0, cur, faces);
      std::vector<Index> global(faces.size());
      for (std::size_t f = 0; f < faces.size(); ++f)
        global[f] = p == n ? static_cast<Index>(t) : c.find(faces[f]);
      const Eigen::MatrixXd local = geometry::whitney_local_mass(geom, p);
      for (std::size_t a = 0; a < faces.size(); ++a)
        for (std::size_t b = 0; b < faces.size(); ++b)
          entries[p].emplace_back(global[a], global[b], local(a, b));
    }
  }
  std::vector<SparseMatrix> mass(n + 1);
  for (int p = 0; p <= n; ++p) {
    const auto size = static_cast<Eigen::Index>(c.count(p));
    mass[p].resize(size, size);
    mass[p].setFromTriplets(entries[p].begin(), entries[p].end());
    mass[p].makeCompressed();
  }
  return mass;
}

}  // namespace

Eigen::VectorXd dual_vertex_lengths(Eigen::Index vertex_count, const std::vector<Simplex>& edges,
                                    const std::vector<double>& lengths) {
  if (edges.size() != lengths.size())
    throw Error(ErrorCode::shape, "one length per edge required");
  Eigen::VectorXd star = Eigen::VectorXd::Zero(vertex_count);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].size() != 2) throw Error(ErrorCode::shape, "edges need two vertices");
    for (Index v : edges[e]) {
      if (v < 0 || v >= vertex_count) throw Error(ErrorCode::shape, "edge vertex out of range");
      star[v] += 0.5 * lengths[e];
    }
  }
  return star;
}

namespace {

std::vector<Eigen::VectorXd> assemble_lumped(const SimplicialComplex& c) {
  const int n = c.dimension();
  std::vector<Eigen::VectorXd> star(n + 1);
  for (int p = 0; p <= n; ++p) star[p] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.count(p)));
  const auto& tops = c.simplices(n);
  if (n == 1) {
    std::vector<double> lengths(tops.size());
    for (std::size_t e = 0; e < tops.size(); ++e) {
      lengths[e] = geometry::simplex_geometry(c.simplex_coordinates(1, e)).volume;
      star[1][static_cast<Eigen::Index>(e)] = 1.0 / lengths[e];
    }
    star[0] = dual_vertex_lengths(static_cast<Eigen::Index>(c.count(0)), tops, lengths);
    return star;
  }
  if (n != 2)
    throw Error(ErrorCode::scheme, "lumped scheme is implemented for dimensions 1 and 2 only");
  for (std::size_t t = 0; t < tops.size(); ++t) {
    const Eigen::MatrixXd x = c.simplex_coordinates(2, t);
    const double area = geometry::simplex_geometry(x).volume;
    const Eigen::Vector3d cot = geometry::triangle_cotangents(x);
    if (cot.minCoeff() <= 1e-10)
      throw Error(ErrorCode::scheme, "lumped scheme needs a well-centered mesh; triangle " +
                                         format_simplex(tops[t]) +
                                         " has a non-acute angle");
    for (int k = 0; k < 3; ++k) {
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      // Edge (i, j) is opposite vertex k.
      Simplex edge = {tops[t][i], tops[t][j]};
      if (edge[0] > edge[1]) std::swap(edge[0], edge[1]);
      star[1][c.find(edge)] += 0.5 * cot[k];
      const double len2 = (x.row(i) - x.row(j)).squaredNorm();
      // The half-edge kite next to edge (i, j) contributes to both endpoints.
      star[0][tops[t][i]] += len2 * cot[k] / 8.0;
      star[0][tops[t][j]] += len2 * cot[k] / 8.0;
    }
    star[2][static_cast<Eigen::Index>(t)] = 1.0 / area;
  }
  return star;
}

}  // namespace

std::shared_ptr<const MetricStructure> MetricStructure::build(ComplexPtr complex,
                                                              MetricScheme scheme) {
  if (!complex) throw Error(ErrorCode::shape, "metric needs a complex");
  auto result = std::shared_ptr<MetricStructure>(new MetricStructure());
  MetricStructure& m = *result;
  m.complex_ = std::move(complex);
  m.scheme_ = scheme;
  const SimplicialComplex& c = *m.complex_;
  const int n = c.dimension();

  m.volumes_.resize(n + 1);
  for (int p = 0; p <= n; ++p) {
    m.volumes_[p].resize(static_cast<Eigen::Index>(c.count(p)));
    for (std::size_t i = 0; i < c.count(p); ++i) {
      const double v = geometry::simplex_volume(c.simplex_coordinates(p, i));
      if (!(v > 0.0))
        throw Error(ErrorCode::geometry, "degenerate " + std::to_string(p) + "-simplex " +
                                             format_simplex(c.simplices(p)[i]));
      m.volumes_[p][static_cast<Eigen::Index>(i)] = v;
    }
  }

  if (scheme == MetricScheme::whitney) {
    m.mass_ = assemble_whitney(c);
  } else {
    const auto star = assemble_lumped(c);
    m.mass_.resize(n + 1);
    for (int p = 0; p <= n; ++p) {
      const auto size = star[p].size();
      m.mass_[p].resize(size, size);
      m.mass_[p].reserve(Eigen::VectorXi::Ones(size));
      for (Eigen::Index i = 0; i < size; ++i) m.mass_[p].insert(i, i) = star[p][i];
      m.mass_[p].makeCompressed();
    }
  }

  m.factor_.resize(n + 1);
  for (int p = 0; p <= n; ++p) {
    auto llt = std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>(m.mass_[p]);
    if (llt->info() != Eigen::Success)
      throw Error(ErrorCode::numerical,
                  "mass matrix of degree " + std::to_string(p) + " is not positive definite");
    m.factor_[p] = std::move(llt);
  }

  m.d_.resize(n);
  for (int p = 0; p < n; ++p) m.d_[p] = c.coboundary(p).cast<double>();
  return result;
}

const SparseMatrix& MetricStructure::mass(int p) const {
  if (p < 0 || p > dimension())
    throw Error(ErrorCode::degree, "mass matrix degree " + std::to_string(p) + " out of range");
  return mass_[p];
}

Eigen::VectorXd MetricStructure::solve_mass(int p, const Eigen::VectorXd& rhs) const {
  if (p < 0 || p > dimension())
    throw Error(ErrorCode::degree, "mass solve degree " + std::to_string(p) + " out of range");
  return factor_[p]->solve(rhs);
}

Eigen::VectorXd MetricStructure::diagonal_star(int p) const {
  if (scheme_ != MetricScheme::lumped)
    throw Error(ErrorCode::scheme, "diagonal Hodge stars exist only for the lumped scheme");
  return mass(p).diagonal();
}

const Eigen::VectorXd& MetricStructure::volumes(int p) const {
  if (p < 0 || p > dimension())
    throw Error(ErrorCode::degree, "volume degree " + std::to_string(p) + " out of range");
  return volumes_[p];
}

const SparseMatrix& MetricStructure::d(int p) const {
  if (p < 0 || p >= dimension())
    throw Error(ErrorCode::degree, "coboundary degree " + std::to_string(p) + " out of range");
  return d_[p];
}

MetricPtr build_metric(ComplexPtr complex, MetricScheme scheme) {
  return MetricStructure::build(std::move(complex), scheme);
}

namespace {

void check_owned(const MetricStructure& metric, const Cochain& x) {
  if (x.complex_id() != metric.complex().id() ||
      x.size() != static_cast<Eigen::Index>(metric.complex().count(x.degree())))
    throw Error(ErrorCode::shape, "cochain does not belong to the metric's complex");
}

}  // namespace

double inner(const MetricStructure& metric, const Cochain& x, const Cochain& y) {
  if (x.degree() != y.degree())
    throw Error(ErrorCode::shape, "inner product of cochains of degrees " +
                                      std::to_string(x.degree()) + " and " +
                                      std::to_string(y.degree()));
  check_owned(metric, x);
  check_owned(metric, y);
  return x.values().dot(metric.mass(x.degree()) * y.values());
}

double l2_norm(const MetricStructure& metric, const Cochain& x) {
  return std::sqrt(std::max(inner(metric, x, x), 0.0));
}

Eigen::VectorXd apply_d(const MetricStructure& metric, int p, const Eigen::VectorXd& x) {
  if (p == metric.dimension()) return Eigen::VectorXd();
  return metric.d(p) * x;
}

Eigen::VectorXd apply_delta(const MetricStructure& metric, int p, const Eigen::VectorXd& x) {
  if (p == 0) return Eigen::VectorXd();
  if (p < 0 || p > metric.dimension())
    throw Error(ErrorCode::degree, "codifferential degree " + std::to_string(p) + " out of range");
  const Eigen::VectorXd rhs = metric.d(p - 1).transpose() * (metric.mass(p) * x);
  return metric.solve_mass(p - 1, rhs);
}

Codifferential::Codifferential(MetricPtr metric, int p) : metric_(std::move(metric)), p_(p) {
  if (p < 0 || p > metric_->dimension())
    throw Error(ErrorCode::degree, "codifferential degree " + std::to_string(p) + " out of range");
}

Eigen::VectorXd Codifferential::apply(const Eigen::VectorXd& x) const {
  return apply_delta(*metric_, p_, x);
}

Cochain Codifferential::operator()(const Cochain& x) const {
  if (x.degree() != p_)
    throw Error(ErrorCode::shape, "codifferential of degree " + std::to_string(p_) +
                                      " applied to a degree-" + std::to_string(x.degree()) +
                                      " cochain");
  check_owned(*metric_, x);
  return Cochain(p_ - 1, apply(x.values()), x.complex_id());
}

Eigen::MatrixXd Codifferential::dense() const {
  const auto cols = static_cast<Eigen::Index>(metric_->complex().count(p_));
  const auto rows = static_cast<Eigen::Index>(p_ == 0 ? 0 : metric_->complex().count(p_ - 1));
  Eigen::MatrixXd out(rows, cols);
  if (rows == 0) return out;
  const Eigen::MatrixXd rhs =
      Eigen::MatrixXd(metric_->d(p_ - 1).transpose() * metric_->mass(p_));
  for (Eigen::Index j = 0; j < cols; ++j) out.col(j) = metric_->solve_mass(p_ - 1, rhs.col(j));
  return out;
}

Codifferential codifferential(MetricPtr metric, int p) {
  return Codifferential(std::move(metric), p);
}

Laplacian::Laplacian(MetricPtr metric, int p) : metric_(std::move(metric)), p_(p) {
  const int n = metric_->dimension();
  if (p < 0 || p > n)
    throw Error(ErrorCode::degree, "Laplacian degree " + std::to_string(p) + " out of range");
  const auto size = static_cast<Eigen::Index>(metric_->complex().count(p));
  if (p < n) {
    curl_ = metric_->d(p).transpose() * metric_->mass(p + 1) * metric_->d(p);
  } else {
    curl_.resize(size, size);
  }
  if (p > 0) {
    coupling_ = metric_->mass(p) * metric_->d(p - 1);
  } else {
    coupling_.resize(size, 0);
  }
}

Eigen::VectorXd Laplacian::apply(const Eigen::VectorXd& x) const {
  const int n = metric_->dimension();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  if (p_ < n) out += apply_delta(*metric_, p_ + 1, metric_->d(p_) * x);
  if (p_ > 0) out += metric_->d(p_ - 1) * apply_delta(*metric_, p_, x);
  return out;
}

Cochain Laplacian::operator()(const Cochain& x) const {
  if (x.degree() != p_)
    throw Error(ErrorCode::shape, "Laplacian of degree " + std::to_string(p_) +
                                      " applied to a degree-" + std::to_string(x.degree()) +
                                      " cochain");
  check_owned(*metric_, x);
  return Cochain(p_, apply(x.values()), x.complex_id());
}

Eigen::MatrixXd Laplacian::dense() const {
  const auto size = static_cast<Eigen::Index>(metric_->complex().count(p_));
  Eigen::MatrixXd out(size, size);
  for (Eigen::Index j = 0; j < size; ++j) out.col(j) = apply(Eigen::VectorXd::Unit(size, j));
  return out;
}

Laplacian laplacian(MetricPtr metric, int p) { return Laplacian(std::move(metric), p); }

}  // namespace hodgekit
