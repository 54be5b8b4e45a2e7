#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace hodgekit {

using Index = std::int32_t;
/// Strictly increasing vertex indices.
using Simplex = std::vector<Index>;
/// Integer incidence matrix; entries in {-1, 0, +1}.
using IntMatrix = Eigen::SparseMatrix<int, Eigen::ColMajor>;

/// Oriented, closed simplicial complex.
///
/// Simplices of every degree are stored as sorted vertex tuples. Simplices of
/// degree p < n carry the orientation of their sorted tuple; top simplices
/// additionally carry a sign so that the induced orientations on shared
/// (n-1)-faces cancel. Vertex coordinates give the embedding used by the
/// metric; when a period is set, coordinate differences are taken modulo the
/// period (flat tori).
class SimplicialComplex {
 public:
  /// Builds a closed oriented complex from its top simplices. Orientation is
  /// propagated from the first top simplex of each connected component; the
  /// orientation implied by the order of the input tuples is otherwise not
  /// used. Throws Error(topology) on non-closed, non-orientable or duplicate
  /// input and Error(shape) on invalid vertex indices.
  static std::shared_ptr<const SimplicialComplex> build(
      Eigen::MatrixXd vertices, const std::vector<Simplex>& top_simplices,
      Eigen::VectorXd period = {});

  int dimension() const noexcept { return dimension_; }
  std::size_t count(int p) const;
  const std::vector<Simplex>& simplices(int p) const;

  /// Sign (+1/-1) of top simplex i relative to its sorted tuple.
  int orientation(std::size_t top_index) const { return orientation_.at(top_index); }
  std::span<const int> orientations() const noexcept { return orientation_; }

  /// Boundary matrix from p-chains to (p-1)-chains, 1 <= p <= n.
  const IntMatrix& boundary(int p) const;
  /// Coboundary d_p = transpose of boundary(p + 1), 0 <= p < n.
  IntMatrix coboundary(int p) const;

  /// Exact rank of boundary(p) over the rationals; 0 for p = 0 or p > n.
  int boundary_rank(int p) const;
  /// b_p = dim ker boundary(p) - rank boundary(p + 1), p = 0..n.
  std::vector<int> betti_numbers() const;

  /// Position of a sorted simplex in the degree-p list, or -1.
  Index find(const Simplex& s) const;

  const Eigen::MatrixXd& vertices() const noexcept { return vertices_; }
  int ambient_dimension() const noexcept { return static_cast<int>(vertices_.cols()); }
  const Eigen::VectorXd& period() const noexcept { return period_; }
  bool periodic() const noexcept { return period_.size() > 0; }

  /// Vertex coordinates of simplex (p, i) as rows, unwrapped so that every
  /// vertex is the minimum image relative to the first one.
  Eigen::MatrixXd simplex_coordinates(int p, std::size_t i) const;

  /// Deterministic content fingerprint, used to tag cochains.
  const std::string& id() const noexcept { return id_; }

 private:
  SimplicialComplex() = default;

  int dimension_ = 0;
  Eigen::MatrixXd vertices_;
  Eigen::VectorXd period_;
  std::vector<std::vector<Simplex>> simplices_;
  std::vector<std::map<Simplex, Index>> lookup_;
  std::vector<int> orientation_;
  std::vector<IntMatrix> boundary_;  // boundary_[p] for p = 1..n; [0] unused
  std::vector<int> boundary_rank_;
  std::string id_;
};

using ComplexPtr = std::shared_ptr<const SimplicialComplex>;

/// Convenience wrapper around SimplicialComplex::build.
ComplexPtr build_complex(Eigen::MatrixXd vertices, const std::vector<Simplex>& top_simplices,
                         Eigen::VectorXd period = {});

/// Coboundary d_p of the complex; Error(degree) unless 0 <= p < n.
IntMatrix coboundary(const SimplicialComplex& complex, int p);

/// Exact rank of an integer matrix over Q (fraction-free sparse elimination).
int integer_rank(const IntMatrix& m);

/// A real-valued p-cochain on a specific complex.
class Cochain {
 public:
  Cochain() = default;
  /// Error(shape) if any value is not finite.
  Cochain(int degree, Eigen::VectorXd values, std::string complex_id);

  int degree() const noexcept { return degree_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  const std::string& complex_id() const noexcept { return complex_id_; }
  Eigen::Index size() const noexcept { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_[i]; }

 private:
  int degree_ = 0;
  Eigen::VectorXd values_;
  std::string complex_id_;
};

/// All-zero p-cochain on the complex. Error(degree) if p is out of range.
Cochain cochain_zero(const SimplicialComplex& complex, int p);
/// Wraps raw values as a p-cochain, checking the length. Error(shape) on mismatch.
Cochain make_cochain(const SimplicialComplex& complex, int p, Eigen::VectorXd values);
/// a * x + y. Error(shape) on degree or complex mismatch.
Cochain cochain_axpy(double a, const Cochain& x, const Cochain& y);

Cochain operator+(const Cochain& x, const Cochain& y);
Cochain operator-(const Cochain& x, const Cochain& y);
Cochain operator*(double a, const Cochain& x);

/// Applies the integer coboundary d_p to a p-cochain.
Cochain apply_d(const SimplicialComplex& complex, const Cochain& x);

}  // namespace hodgekit
