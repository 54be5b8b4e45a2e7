#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hodgekit/complex.hpp"
#include "hodgekit/metric.hpp"

namespace hodgekit::oracle {

enum class FlatManifold { circle, torus };

using Frequency = std::array<int, 2>;  // second entry unused on the circle
using Coefficients = Eigen::VectorXcd;  // one entry per form component

/// Trigonometric-polynomial differential form on the flat circle (coordinate
/// theta) or the flat torus [0, 2pi)^2 (coordinates x, y).
///
/// Components: 0-forms and top forms have one; torus 1-forms have (dx, dy).
/// Each mode contributes coefficient * exp(i k . x).
class SpectralForm {
 public:
  SpectralForm(FlatManifold manifold, int degree);

  FlatManifold manifold() const noexcept { return manifold_; }
  int degree() const noexcept { return degree_; }
  int components() const noexcept;
  int dimension() const noexcept { return manifold_ == FlatManifold::circle ? 1 : 2; }
  const std::map<Frequency, Coefficients>& modes() const noexcept { return modes_; }

  /// Adds c * exp(i k . x) to one component.
  SpectralForm& add(Frequency k, int component, std::complex<double> c);
  /// Adds amplitude * cos(k . x) or amplitude * sin(k . x) to one component.
  SpectralForm& add_cos(Frequency k, int component, double amplitude);
  SpectralForm& add_sin(Frequency k, int component, double amplitude);

  /// Conjugate symmetry c(-k) = conj(c(k)) within tol.
  bool is_real(double tol = 1e-14) const;
  double max_abs_coefficient() const;

  SpectralForm scaled(std::complex<double> a) const;
  friend SpectralForm operator+(const SpectralForm& a, const SpectralForm& b);

 private:
  FlatManifold manifold_;
  int degree_;
  std::map<Frequency, Coefficients> modes_;
};

SpectralForm spectral_d(const SpectralForm& form);
/// Flat-metric codifferential: on the torus
///   delta(u dx + v dy) = -(u_x + v_y),  delta(w dx^dy) = w_y dx - w_x dy.
SpectralForm spectral_delta(const SpectralForm& form);
SpectralForm spectral_laplacian(const SpectralForm& form);
/// Divides every nonzero mode by |k|^2 and drops the k = 0 (harmonic) modes.
SpectralForm spectral_green(const SpectralForm& form);
/// delta G form; Error(domain) unless the form is closed with no k = 0 part.
SpectralForm spectral_primitive(const SpectralForm& form);
/// Projection onto the harmonic (k = 0) modes.
SpectralForm spectral_harmonic(const SpectralForm& form);

/// L2 inner product by Parseval, (2pi)^dim * sum conj(a) b (real part).
double spectral_inner(const SpectralForm& a, const SpectralForm& b);
/// sqrt(sum (1 + |k|^2)^s |c_k|^2 (2pi)^dim).
double spectral_sobolev_norm(const SpectralForm& form, int s);

/// True for the circle and flat-torus corpus geometry this oracle can sample.
bool is_flat_mesh(const SimplicialComplex& complex, FlatManifold manifold);

/// de Rham map: exact integrals of the form over every p-simplex (closed-form
/// integrals of exponentials over simplices). Error(domain) when the complex
/// is not a flat circle/torus mesh or the degrees disagree.
Cochain sample_to_cochain(const SpectralForm& form, const SimplicialComplex& complex);

/// Divided difference exp[z_0, ..., z_m] for m <= 2; equals the integral of
/// exp(sum z_j l_j) over the standard m-simplex.
std::complex<double> exp_divided_difference(const std::vector<std::complex<double>>& z);

/// Named oracle forms used by the CLI: "sin_x_dy", "cos_x_dxdy", "sin_x",
/// "constant0", "mix1" (torus) and "circle_cos" (circle).
SpectralForm registry_form(const std::string& name);
std::vector<std::string> registry_form_names();

struct SweepEntry {
  int resolution = 0;
  double mesh_size = 0.0;
  double error = 0.0;  // relative M-norm error against the sampled oracle
};

struct SweepSeries {
  std::string quantity;  // "green", "primitive", "laplacian", "eigenvalue"
  std::vector<SweepEntry> entries;
  double rate = 0.0;
  double fit_residual = 0.0;
  bool rate_valid = false;
};

struct ConvergenceReport {
  std::string form_name;
  FlatManifold manifold = FlatManifold::torus;
  MetricScheme scheme = MetricScheme::whitney;
  std::vector<SweepSeries> series;
};

/// DEC-vs-oracle errors on corpus meshes of the given resolutions. For the
/// torus: Laplacian, Green and (when the form is exact) primitive. For the
/// circle additionally the first nonzero eigenvalue of Delta_0 against 1.
/// Error(parameter) for fewer than 3 resolutions.
ConvergenceReport convergence_sweep(const SpectralForm& form, const std::string& form_name,
                                    const std::vector<int>& resolutions,
                                    MetricScheme scheme = MetricScheme::whitney);

}  // namespace hodgekit::oracle
