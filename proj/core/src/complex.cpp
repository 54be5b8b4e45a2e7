#include "hodgekit/complex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <set>
#include <sstream>

#include "hodgekit/errors.hpp"

namespace hodgekit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::degree: return "degree_error";
    case ErrorCode::shape: return "shape_error";
    case ErrorCode::topology: return "topology_error";
    case ErrorCode::geometry: return "geometry_error";
    case ErrorCode::scheme: return "scheme_error";
    case ErrorCode::numerical: return "numerical_error";
    case ErrorCode::not_exact: return "not_exact";
    case ErrorCode::parameter: return "parameter_error";
    case ErrorCode::hypothesis: return "hypothesis_violation";
    case ErrorCode::grid: return "grid_error";
    case ErrorCode::capability: return "capability_error";
    case ErrorCode::domain: return "domain_error";
    case ErrorCode::mesh_unreadable: return "mesh_unreadable";
    case ErrorCode::cochain_malformed: return "cochain_malformed";
    case ErrorCode::unknown_registry: return "unknown_registry";
  }
  return "unknown";
}

namespace {

std::string format_simplex(const Simplex& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

// Sign of the permutation that sorts `s`.
int sort_with_parity(Simplex& s) {
  int sign = 1;
  for (std::size_t i = 1; i < s.size(); ++i) {
    for (std::size_t j = i; j > 0 && s[j - 1] > s[j]; --j) {
      std::swap(s[j - 1], s[j]);
      sign = -sign;
    }
  }
  return sign;
}

Simplex drop(const Simplex& s, std::size_t i) {
  Simplex face;
  face.reserve(s.size() - 1);
  for (std::size_t j = 0; j < s.size(); ++j)
    if (j != i) face.push_back(s[j]);
  return face;
}

void faces_of_size(const Simplex& s, std::size_t k, std::size_t start, Simplex& current,
                   std::set<Simplex>& out) {
  if (current.size() == k) {
    out.insert(current);
    return;
  }
  for (std::size_t i = start; i < s.size(); ++i) {
    current.push_back(s[i]);
    faces_of_size(s, k, i + 1, current, out);
    current.pop_back();
  }
}

struct Fnv1a {
  std::uint64_t h = 1469598103934665603ull;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 1099511628211ull;
    }
  }
  template <class T>
  void value(const T& v) {
    bytes(&v, sizeof(T));
  }
};

double min_image(double delta, double period) {
  if (period <= 0.0) return delta;
  return delta - period * std::round(delta / period);
}

}  // namespace

std::shared_ptr<const SimplicialComplex> SimplicialComplex::build(
    Eigen::MatrixXd vertices, const std::vector<Simplex>& top_simplices, Eigen::VectorXd period) {
  if (top_simplices.empty()) throw Error(ErrorCode::shape, "complex has no top simplices");
  const std::size_t width = top_simplices.front().size();
  if (width < 2) throw Error(ErrorCode::shape, "top simplices must have at least 2 vertices");
  const int n = static_cast<int>(width) - 1;
  const auto nv = static_cast<Index>(vertices.rows());
  if (period.size() != 0 && period.size() != vertices.cols())
    throw Error(ErrorCode::shape, "period length must equal the ambient dimension");

  std::vector<Simplex> top;
  std::vector<int> input_sign;
  top.reserve(top_simplices.size());
  for (const auto& raw : top_simplices) {
    if (raw.size() != width)
      throw Error(ErrorCode::shape, "top simplex " + format_simplex(raw) + " has the wrong size");
    for (Index v : raw)
      if (v < 0 || v >= nv)
        throw Error(ErrorCode::shape, "top simplex " + format_simplex(raw) +
                                          " references an invalid vertex index");
    Simplex s = raw;
    input_sign.push_back(sort_with_parity(s));
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw Error(ErrorCode::shape, "top simplex " + format_simplex(raw) + " repeats a vertex");
    top.push_back(std::move(s));
  }

  auto result = std::shared_ptr<SimplicialComplex>(new SimplicialComplex());
  SimplicialComplex& c = *result;
  c.dimension_ = n;
  c.vertices_ = std::move(vertices);
  c.period_ = std::move(period);
  c.simplices_.resize(n + 1);
  c.lookup_.resize(n + 1);

  {
    std::set<Simplex> unique_top(top.begin(), top.end());
    if (unique_top.size() != top.size()) {
      std::set<Simplex> seen;
      for (const auto& s : top)
        if (!seen.insert(s).second)
          throw Error(ErrorCode::topology, "duplicate top simplex " + format_simplex(s));
    }
  }

  for (int p = 0; p < n; ++p) {
    std::set<Simplex> faces;
    Simplex scratch;
    for (const auto& s : top) faces_of_size(s, static_cast<std::size_t>(p) + 1, 0, scratch, faces);
    c.simplices_[p].assign(faces.begin(), faces.end());
  }
  if (c.simplices_[0].size() != static_cast<std::size_t>(nv)) {
    std::vector<bool> used(nv, false);
    for (const auto& s : top)
      for (Index v : s) used[v] = true;
    for (Index v = 0; v < nv; ++v)
      if (!used[v])
        throw Error(ErrorCode::topology,
                    "vertex " + std::to_string(v) + " is not used by any top simplex");
  }
  // Top simplices keep the input order; lower degrees are lexicographic.
  c.simplices_[n] = top;
  for (int p = 0; p <= n; ++p)
    for (std::size_t i = 0; i < c.simplices_[p].size(); ++i)
      c.lookup_[p].emplace(c.simplices_[p][i], static_cast<Index>(i));

  // Closedness: every (n-1)-face has exactly two cofaces.
  const std::size_t nfaces = c.simplices_[n - 1].size();
  std::vector<std::vector<std::pair<std::size_t, int>>> cofaces(nfaces);
  for (std::size_t t = 0; t < top.size(); ++t)
    for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i) {
      const Index f = c.lookup_[n - 1].at(drop(top[t], i));
      cofaces[f].emplace_back(t, (i % 2 == 0) ? 1 : -1);
    }
  for (std::size_t f = 0; f < nfaces; ++f)
    if (cofaces[f].size() != 2)
      throw Error(ErrorCode::topology,
                  "complex is not closed: (n-1)-simplex " + format_simplex(c.simplices_[n - 1][f]) +
                      " has " + std::to_string(cofaces[f].size()) + " cofaces (expected 2)");

  // Propagate a coherent orientation across shared faces.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> faces_of(top.size());
  for (std::size_t f = 0; f < nfaces; ++f)
    for (const auto& [t, sign] : cofaces[f]) faces_of[t].emplace_back(f, 0);
  c.orientation_.assign(top.size(), 0);
  for (std::size_t seed = 0; seed < top.size(); ++seed) {
    if (c.orientation_[seed] != 0) continue;
    c.orientation_[seed] = input_sign[seed];
    std::deque<std::size_t> queue{seed};
    while (!queue.empty()) {
      const std::size_t t = queue.front();
      queue.pop_front();
      for (const auto& [f, unused] : faces_of[t]) {
        const auto& cf = cofaces[f];
        const auto& self = cf[0].first == t ? cf[0] : cf[1];
        const auto& other = cf[0].first == t ? cf[1] : cf[0];
        // Induced orientations must cancel: s_t * e_t + s_o * e_o = 0.
        const int wanted = -c.orientation_[t] * self.second * other.second;
        if (c.orientation_[other.first] == 0) {
          c.orientation_[other.first] = wanted;
          queue.push_back(other.first);
        } else if (c.orientation_[other.first] != wanted) {
          throw Error(ErrorCode::topology, "complex is not orientable: orientation conflict across "
                                           "(n-1)-simplex " +
                                               format_simplex(c.simplices_[n - 1][f]));
        }
      }
    }
  }

  c.boundary_.resize(n + 1);
  for (int p = 1; p <= n; ++p) {
    std::vector<Eigen::Triplet<int>> entries;
    const auto& cols = c.simplices_[p];
    entries.reserve(cols.size() * (p + 1));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const int orient = (p == n) ? c.orientation_[j] : 1;
      for (std::size_t i = 0; i <= static_cast<std::size_t>(p); ++i) {
        const Index row = c.lookup_[p - 1].at(drop(cols[j], i));
        entries.emplace_back(row, static_cast<int>(j), ((i % 2 == 0) ? 1 : -1) * orient);
      }
    }
    IntMatrix b(static_cast<Eigen::Index>(c.simplices_[p - 1].size()),
                static_cast<Eigen::Index>(cols.size()));
    b.setFromTriplets(entries.begin(), entries.end());
    b.makeCompressed();
    c.boundary_[p] = std::move(b);
  }

  c.boundary_rank_.assign(n + 2, 0);
  for (int p = 1; p <= n; ++p) c.boundary_rank_[p] = integer_rank(c.boundary_[p]);

  Fnv1a hash;
  hash.value(n);
  hash.bytes(c.vertices_.data(), sizeof(double) * c.vertices_.size());
  hash.bytes(c.period_.data(), sizeof(double) * c.period_.size());
  for (std::size_t t = 0; t < top.size(); ++t) {
    hash.bytes(top[t].data(), sizeof(Index) * top[t].size());
    hash.value(c.orientation_[t]);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "cx-%016llx", static_cast<unsigned long long>(hash.h));
  c.id_ = buf;
  return result;
}

std::size_t SimplicialComplex::count(int p) const {
  if (p < 0 || p > dimension_) return 0;
  return simplices_[p].size();
}

const std::vector<Simplex>& SimplicialComplex::simplices(int p) const {
  if (p < 0 || p > dimension_)
    throw Error(ErrorCode::degree, "degree " + std::to_string(p) + " outside 0.." +
                                       std::to_string(dimension_));
  return simplices_[p];
}

const IntMatrix& SimplicialComplex::boundary(int p) const {
  if (p < 1 || p > dimension_)
    throw Error(ErrorCode::degree, "boundary degree " + std::to_string(p) + " outside 1.." +
                                       std::to_string(dimension_));
  return boundary_[p];
}

IntMatrix SimplicialComplex::coboundary(int p) const {
  if (p < 0 || p >= dimension_)
    throw Error(ErrorCode::degree, "coboundary degree " + std::to_string(p) + " outside 0.." +
                                       std::to_string(dimension_ - 1));
  return IntMatrix(boundary_[p + 1].transpose());
}

int SimplicialComplex::boundary_rank(int p) const {
  if (p < 1 || p > dimension_) return 0;
  return boundary_rank_[p];
}

std::vector<int> SimplicialComplex::betti_numbers() const {
  std::vector<int> b(dimension_ + 1);
  for (int p = 0; p <= dimension_; ++p)
    b[p] = static_cast<int>(count(p)) - boundary_rank(p) - boundary_rank(p + 1);
  return b;
}

Index SimplicialComplex::find(const Simplex& s) const {
  const int p = static_cast<int>(s.size()) - 1;
  if (p < 0 || p > dimension_) return -1;
  const auto it = lookup_[p].find(s);
  return it == lookup_[p].end() ? -1 : it->second;
}

Eigen::MatrixXd SimplicialComplex::simplex_coordinates(int p, std::size_t i) const {
  const Simplex& s = simplices(p).at(i);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(s.size()), vertices_.cols());
  x.row(0) = vertices_.row(s[0]);
  for (std::size_t j = 1; j < s.size(); ++j)
    for (Eigen::Index a = 0; a < vertices_.cols(); ++a) {
      const double per = periodic() ? period_[a] : 0.0;
      x(static_cast<Eigen::Index>(j), a) =
          x(0, a) + min_image(vertices_(s[j], a) - vertices_(s[0], a), per);
    }
  return x;
}

ComplexPtr build_complex(Eigen::MatrixXd vertices, const std::vector<Simplex>& top_simplices,
                         Eigen::VectorXd period) {
  return SimplicialComplex::build(std::move(vertices), top_simplices, std::move(period));
}

IntMatrix coboundary(const SimplicialComplex& complex, int p) { return complex.coboundary(p); }

Cochain::Cochain(int degree, Eigen::VectorXd values, std::string complex_id)
    : degree_(degree), values_(std::move(values)), complex_id_(std::move(complex_id)) {
  if (!values_.allFinite())
    throw Error(ErrorCode::shape, "cochain of degree " + std::to_string(degree_) +
                                      " contains non-finite values");
}

Cochain cochain_zero(const SimplicialComplex& complex, int p) {
  return Cochain(p, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(complex.simplices(p).size())),
                 complex.id());
}

Cochain make_cochain(const SimplicialComplex& complex, int p, Eigen::VectorXd values) {
  const auto expected = static_cast<Eigen::Index>(complex.simplices(p).size());
  if (values.size() != expected)
    throw Error(ErrorCode::shape, "degree-" + std::to_string(p) + " cochain needs " +
                                      std::to_string(expected) + " values, got " +
                                      std::to_string(values.size()));
  return Cochain(p, std::move(values), complex.id());
}

Cochain cochain_axpy(double a, const Cochain& x, const Cochain& y) {
  if (x.degree() != y.degree())
    throw Error(ErrorCode::shape, "cochain degree mismatch: " + std::to_string(x.degree()) +
                                      " vs " + std::to_string(y.degree()));
  if (x.complex_id() != y.complex_id() || x.size() != y.size())
    throw Error(ErrorCode::shape, "cochains belong to different complexes");
  return Cochain(x.degree(), a * x.values() + y.values(), x.complex_id());
}

Cochain operator+(const Cochain& x, const Cochain& y) { return cochain_axpy(1.0, x, y); }
Cochain operator-(const Cochain& x, const Cochain& y) { return cochain_axpy(-1.0, y, x); }
Cochain operator*(double a, const Cochain& x) {
  return Cochain(x.degree(), a * x.values(), x.complex_id());
}

Cochain apply_d(const SimplicialComplex& complex, const Cochain& x) {
  if (x.complex_id() != complex.id() ||
      x.size() != static_cast<Eigen::Index>(complex.count(x.degree())))
    throw Error(ErrorCode::shape, "cochain does not belong to this complex");
  const IntMatrix d = complex.coboundary(x.degree());
  Eigen::VectorXd out = d.cast<double>() * x.values();
  return Cochain(x.degree() + 1, std::move(out), complex.id());
}

}  // namespace hodgekit
