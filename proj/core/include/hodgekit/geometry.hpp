#pragma once

#include <Eigen/Core>

namespace hodgekit::geometry {

/// Intrinsic data of one simplex, from its vertex coordinates (rows).
struct SimplexGeometry {
  int dimension = 0;
  double volume = 0.0;
  /// (n+1) x (n+1) matrix of barycentric gradient dot products grad(l_a).grad(l_b).
  Eigen::MatrixXd gradient_gram;
};

/// Throws Error(geometry) when the simplex is degenerate.
SimplexGeometry simplex_geometry(const Eigen::MatrixXd& coords);

/// p-volume of the simplex spanned by the rows of `coords` (1 for a point).
double simplex_volume(const Eigen::MatrixXd& coords);

/// Local Galerkin mass matrix of Whitney p-forms on an n-simplex. Rows and
/// columns follow the p-faces of the local vertex set in lexicographic order,
/// each face oriented by increasing local index.
Eigen::MatrixXd whitney_local_mass(const SimplexGeometry& g, int p);

/// Circumcentric dual quantities of a triangle with vertex rows x0, x1, x2:
/// cotangents of the three interior angles (cot[k] is the angle at vertex k).
Eigen::Vector3d triangle_cotangents(const Eigen::MatrixXd& coords);

}  // namespace hodgekit::geometry
