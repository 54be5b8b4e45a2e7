#include "hodgekit/torus_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hodgekit/corpus.hpp"
#include "hodgekit/errors.hpp"
#include "hodgekit/hodge.hpp"
#include "hodgekit/rate_fit.hpp"
#include "hodgekit/spectrum.hpp"

namespace hodgekit::oracle {

namespace {

using cplx = std::complex<double>;
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr cplx I{0.0, 1.0};

int component_count(FlatManifold m, int degree) {
  if (m == FlatManifold::circle) return 1;
  return degree == 1 ? 2 : 1;
}

double k2(const Frequency& k) { return static_cast<double>(k[0] * k[0] + k[1] * k[1]); }

SpectralForm drop_zeros(const SpectralForm& f) {
  SpectralForm out(f.manifold(), f.degree());
  for (const auto& [k, c] : f.modes())
    for (int comp = 0; comp < c.size(); ++comp)
      if (c[comp] != cplx(0.0)) out.add(k, comp, c[comp]);
  return out;
}

// (e^d - 1) / d, accurate near d = 0.
cplx phi1(cplx d) {
  if (std::abs(d) < 0.5) {
    cplx term = 1.0, sum = 1.0;
    for (int m = 1; m < 40; ++m) {
      term *= d / static_cast<double>(m + 1);
      sum += term;
      if (std::abs(term) < 1e-18) break;
    }
    return sum;
  }
  return (std::exp(d) - 1.0) / d;
}

cplx dd2(cplx a, cplx b) { return std::exp(a) * phi1(b - a); }

}  // namespace

SpectralForm::SpectralForm(FlatManifold manifold, int degree)
    : manifold_(manifold), degree_(degree) {
  const int n = manifold == FlatManifold::circle ? 1 : 2;
  if (degree < 0 || degree > n)
    throw Error(ErrorCode::degree, "spectral form degree " + std::to_string(degree) +
                                       " outside 0.." + std::to_string(n));
}

int SpectralForm::components() const noexcept { return component_count(manifold_, degree_); }

SpectralForm& SpectralForm::add(Frequency k, int component, cplx c) {
  if (component < 0 || component >= components())
    throw Error(ErrorCode::shape, "spectral component " + std::to_string(component) +
                                      " out of range");
  if (manifold_ == FlatManifold::circle) k[1] = 0;
  auto it = modes_.find(k);
  if (it == modes_.end()) it = modes_.emplace(k, Coefficients::Zero(components())).first;
  it->second[component] += c;
  return *this;
}

SpectralForm& SpectralForm::add_cos(Frequency k, int component, double amplitude) {
  if (k == Frequency{0, 0}) return add(k, component, amplitude);
  add(k, component, 0.5 * amplitude);
  return add({-k[0], -k[1]}, component, 0.5 * amplitude);
}

SpectralForm& SpectralForm::add_sin(Frequency k, int component, double amplitude) {
  if (k == Frequency{0, 0}) return *this;
  // sin t = (e^{it} - e^{-it}) / 2i
  add(k, component, -0.5 * I * amplitude);
  return add({-k[0], -k[1]}, component, 0.5 * I * amplitude);
}

bool SpectralForm::is_real(double tol) const {
  for (const auto& [k, c] : modes_) {
    const auto it = modes_.find({-k[0], -k[1]});
    const Coefficients partner =
        it == modes_.end() ? Coefficients::Zero(c.size()) : Coefficients(it->second);
    if ((c - partner.conjugate()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

double SpectralForm::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [k, c] : modes_)
    if (c.size()) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

SpectralForm SpectralForm::scaled(cplx a) const {
  SpectralForm out(manifold_, degree_);
  for (const auto& [k, c] : modes_)
    for (int comp = 0; comp < c.size(); ++comp) out.add(k, comp, a * c[comp]);
  return out;
}

SpectralForm operator+(const SpectralForm& a, const SpectralForm& b) {
  if (a.manifold() != b.manifold() || a.degree() != b.degree())
    throw Error(ErrorCode::shape, "adding spectral forms of different type");
  SpectralForm out = a;
  for (const auto& [k, c] : b.modes())
    for (int comp = 0; comp < c.size(); ++comp) out.add(k, comp, c[comp]);
  return out;
}

SpectralForm spectral_d(const SpectralForm& f) {
  const int n = f.dimension();
  if (f.degree() == n) return SpectralForm(f.manifold(), n);  // zero; top forms are closed
  SpectralForm out(f.manifold(), f.degree() + 1);
  for (const auto& [k, c] : f.modes()) {
    const cplx ik0 = I * static_cast<double>(k[0]);
    const cplx ik1 = I * static_cast<double>(k[1]);
    if (f.manifold() == FlatManifold::circle) {
      out.add(k, 0, ik0 * c[0]);
    } else if (f.degree() == 0) {
      out.add(k, 0, ik0 * c[0]);
      out.add(k, 1, ik1 * c[0]);
    } else {
      out.add(k, 0, ik0 * c[1] - ik1 * c[0]);
    }
  }
  return drop_zeros(out);
}

SpectralForm spectral_delta(const SpectralForm& f) {
  if (f.degree() == 0) return SpectralForm(f.manifold(), 0);  // placeholder zero map
  SpectralForm out(f.manifold(), f.degree() - 1);
  for (const auto& [k, c] : f.modes()) {
    const cplx ik0 = I * static_cast<double>(k[0]);
    const cplx ik1 = I * static_cast<double>(k[1]);
    if (f.manifold() == FlatManifold::circle) {
      out.add(k, 0, -ik0 * c[0]);
    } else if (f.degree() == 1) {
      out.add(k, 0, -(ik0 * c[0] + ik1 * c[1]));
    } else {
      out.add(k, 0, ik1 * c[0]);
      out.add(k, 1, -ik0 * c[0]);
    }
  }
  return drop_zeros(out);
}

SpectralForm spectral_laplacian(const SpectralForm& f) {
  SpectralForm out(f.manifold(), f.degree());
  for (const auto& [k, c] : f.modes())
    for (int comp = 0; comp < c.size(); ++comp) out.add(k, comp, k2(k) * c[comp]);
  return drop_zeros(out);
}

SpectralForm spectral_green(const SpectralForm& f) {
  SpectralForm out(f.manifold(), f.degree());
  for (const auto& [k, c] : f.modes()) {
    if (k2(k) == 0.0) continue;
    for (int comp = 0; comp < c.size(); ++comp) out.add(k, comp, c[comp] / k2(k));
  }
  return drop_zeros(out);
}

SpectralForm spectral_harmonic(const SpectralForm& f) {
  SpectralForm out(f.manifold(), f.degree());
  const auto it = f.modes().find({0, 0});
  if (it != f.modes().end())
    for (int comp = 0; comp < it->second.size(); ++comp) out.add({0, 0}, comp, it->second[comp]);
  return drop_zeros(out);
}

SpectralForm spectral_primitive(const SpectralForm& f) {
  if (f.degree() == 0) throw Error(ErrorCode::degree, "primitive needs degree >= 1");
  const double scale = std::max(f.max_abs_coefficient(), 1.0);
  if (spectral_d(f).max_abs_coefficient() > 1e-12 * scale)
    throw Error(ErrorCode::domain, "spectral form is not closed");
  if (spectral_harmonic(f).max_abs_coefficient() > 1e-12 * scale)
    throw Error(ErrorCode::domain, "spectral form has a harmonic (k = 0) component");
  return spectral_delta(spectral_green(f));
}

double spectral_inner(const SpectralForm& a, const SpectralForm& b) {
  if (a.manifold() != b.manifold() || a.degree() != b.degree())
    throw Error(ErrorCode::shape, "inner product of spectral forms of different type");
  cplx sum = 0.0;
  for (const auto& [k, c] : a.modes()) {
    const auto it = b.modes().find(k);
    if (it == b.modes().end()) continue;
    sum += c.dot(it->second);  // conj(a) . b
  }
  return std::pow(two_pi, a.dimension()) * sum.real();
}

double spectral_sobolev_norm(const SpectralForm& f, int s) {
  if (s < 0) throw Error(ErrorCode::parameter, "Sobolev order must be >= 0");
  double sum = 0.0;
  for (const auto& [k, c] : f.modes()) sum += std::pow(1.0 + k2(k), s) * c.squaredNorm();
  return std::sqrt(std::pow(two_pi, f.dimension()) * sum);
}

cplx exp_divided_difference(const std::vector<cplx>& z) {
  switch (z.size()) {
    case 1:
      return std::exp(z[0]);
    case 2:
      return dd2(z[0], z[1]);
    case 3: {
      // Put the most distant pair at the ends so the final division is benign.
      std::array<cplx, 3> p = {z[0], z[1], z[2]};
      double best = -1.0;
      std::array<int, 3> order = {0, 1, 2};
      for (const auto& o : std::array<std::array<int, 3>, 3>{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}}}) {
        const double dist = std::abs(p[o[2]] - p[o[0]]);
        if (dist > best) {
          best = dist;
          order = o;
        }
      }
      const cplx a = p[order[0]], b = p[order[1]], c = p[order[2]];
      if (best >= 0.5) return (dd2(b, c) - dd2(a, b)) / (c - a);
      // All three points close: sum_m h_m(w) / (m + 2)! about the centroid.
      const cplx center = (a + b + c) / 3.0;
      const cplx wa = a - center, wb = b - center, wc = c - center;
      cplx sum = 0.0;
      double fact = 2.0;  // (m + 2)!
      for (int m = 0; m < 30; ++m) {
        if (m > 0) fact *= static_cast<double>(m + 2);
        cplx h = 0.0;
        for (int i = 0; i <= m; ++i)
          for (int j = 0; i + j <= m; ++j)
            h += std::pow(wa, i) * std::pow(wb, j) * std::pow(wc, m - i - j);
        const cplx term = h / fact;
        sum += term;
        if (m > 3 && std::abs(term) < 1e-18) break;
      }
      return std::exp(center) * sum;
    }
    default:
      throw Error(ErrorCode::parameter, "exp divided differences implemented for up to 3 points");
  }
}

bool is_flat_mesh(const SimplicialComplex& c, FlatManifold manifold) {
  if (manifold == FlatManifold::torus) {
    if (c.dimension() != 2 || !c.periodic() || c.ambient_dimension() < 2) return false;
    if (std::abs(c.period()[0] - two_pi) > 1e-12 || std::abs(c.period()[1] - two_pi) > 1e-12)
      return false;
    for (Eigen::Index a = 2; a < c.ambient_dimension(); ++a)
      if (c.vertices().col(a).cwiseAbs().maxCoeff() > 1e-12) return false;
    return true;
  }
  if (c.dimension() != 1) return false;
  if (c.periodic())
    return c.ambient_dimension() == 1 && std::abs(c.period()[0] - two_pi) <= 1e-12;
  if (c.ambient_dimension() != 2) return false;
  for (Eigen::Index i = 0; i < c.vertices().rows(); ++i)
    if (std::abs(c.vertices().row(i).norm() - 1.0) > 1e-12) return false;
  return true;
}

namespace {

// Flat coordinates (theta or (x, y)) of simplex (p, i), unwrapped.
Eigen::MatrixXd flat_coordinates(const SimplicialComplex& c, FlatManifold m, int p,
                                 std::size_t i) {
  if (m == FlatManifold::torus) return c.simplex_coordinates(p, i).leftCols(2);
  const Simplex& s = c.simplices(p)[i];
  Eigen::MatrixXd theta(static_cast<Eigen::Index>(s.size()), 1);
  auto angle = [&](Index v) {
    return c.periodic() ? c.vertices()(v, 0) : std::atan2(c.vertices()(v, 1), c.vertices()(v, 0));
  };
  theta(0, 0) = angle(s[0]);
  for (std::size_t j = 1; j < s.size(); ++j) {
    double delta = angle(s[j]) - theta(0, 0);
    delta -= two_pi * std::round(delta / two_pi);
    theta(static_cast<Eigen::Index>(j), 0) = theta(0, 0) + delta;
  }
  return theta;
}

}  // namespace

Cochain sample_to_cochain(const SpectralForm& form, const SimplicialComplex& complex) {
  if (!is_flat_mesh(complex, form.manifold()))
    throw Error(ErrorCode::domain, "mesh is not a flat " +
                                       std::string(form.manifold() == FlatManifold::torus
                                                       ? "torus"
                                                       : "circle") +
                                       " corpus mesh");
  const int p = form.degree();
  const int n = complex.dimension();
  const auto count = complex.count(p);
  Eigen::VectorXd values(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const Eigen::MatrixXd x = flat_coordinates(complex, form.manifold(), p, i);
    cplx total = 0.0;
    for (const auto& [k, c] : form.modes()) {
      std::vector<cplx> z(static_cast<std::size_t>(p) + 1);
      for (int j = 0; j <= p; ++j) {
        double phase = k[0] * x(j, 0);
        if (x.cols() > 1) phase += k[1] * x(j, 1);
        z[static_cast<std::size_t>(j)] = I * phase;
      }
      const cplx integral = exp_divided_difference(z);
      cplx weight;
      if (p == 0) {
        weight = c[0];
      } else if (p == 1) {
        if (x.cols() == 1) {
          weight = c[0] * (x(1, 0) - x(0, 0));
        } else {
          weight = c[0] * (x(1, 0) - x(0, 0)) + c[1] * (x(1, 1) - x(0, 1));
        }
      } else {
        const double det = (x(1, 0) - x(0, 0)) * (x(2, 1) - x(0, 1)) -
                           (x(1, 1) - x(0, 1)) * (x(2, 0) - x(0, 0));
        weight = c[0] * det;
      }
      total += weight * integral;
    }
    double v = total.real();
    if (p == n) v *= complex.orientation(i);
    values[static_cast<Eigen::Index>(i)] = v;
  }
  return Cochain(p, std::move(values), complex.id());
}

SpectralForm registry_form(const std::string& name) {
  using M = FlatManifold;
  if (name == "sin_x_dy") return SpectralForm(M::torus, 1).add_sin({1, 0}, 1, 1.0);
  if (name == "sin_x_dx") return SpectralForm(M::torus, 1).add_sin({1, 0}, 0, 1.0);
  if (name == "cos_x_dxdy") return SpectralForm(M::torus, 2).add_cos({1, 0}, 0, 1.0);
  if (name == "sin_x") return SpectralForm(M::torus, 0).add_sin({1, 0}, 0, 1.0);
  if (name == "constant0") return SpectralForm(M::torus, 0).add_cos({0, 0}, 0, 1.0);
  if (name == "mix1") {
    SpectralForm f(M::torus, 1);
    f.add_cos({1, 2}, 0, 1.0).add_sin({2, -1}, 1, 0.5).add_cos({0, 1}, 1, 0.25);
    f.add_cos({0, 0}, 0, 0.3);
    return f;
  }
  if (name == "mix2") {
    SpectralForm f(M::torus, 2);
    f.add_cos({1, 1}, 0, 1.0).add_sin({2, -1}, 0, 0.5);
    return f;
  }
  if (name == "circle_cos") return SpectralForm(M::circle, 0).add_cos({1, 0}, 0, 1.0);
  if (name == "circle_sin2_dtheta") return SpectralForm(M::circle, 1).add_sin({2, 0}, 0, 1.0);
  throw Error(ErrorCode::unknown_registry, "unknown oracle form '" + name + "'");
}

std::vector<std::string> registry_form_names() {
  return {"sin_x_dy", "sin_x_dx", "cos_x_dxdy", "sin_x", "constant0",
          "mix1",     "mix2",     "circle_cos", "circle_sin2_dtheta"};
}

namespace {

double relative_error(const MetricStructure& m, const Cochain& approx, const Cochain& exact) {
  const double ref = l2_norm(m, exact);
  const double err = l2_norm(m, approx - exact);
  return ref > 0.0 ? err / ref : err;
}

void finish(SweepSeries& s) {
  std::vector<double> h, e;
  for (const auto& entry : s.entries) {
    h.push_back(entry.mesh_size);
    e.push_back(entry.error);
  }
  const RateFit fit = fit_rate(h, e);
  s.rate = fit.rate;
  s.fit_residual = fit.residual;
  s.rate_valid = fit.valid;
  // Errors at rounding level carry no rate.
  if (*std::max_element(e.begin(), e.end()) < 1e-12) {
    s.rate = 0.0;
    s.rate_valid = false;
  }
}

}  // namespace

ConvergenceReport convergence_sweep(const SpectralForm& form, const std::string& form_name,
                                    const std::vector<int>& resolutions, MetricScheme scheme) {
  if (resolutions.size() < 3)
    throw Error(ErrorCode::parameter, "convergence sweep needs at least 3 resolutions");
  ConvergenceReport report;
  report.form_name = form_name;
  report.manifold = form.manifold();
  report.scheme = scheme;

  const int p = form.degree();
  const bool circle = form.manifold() == FlatManifold::circle;
  bool exact = p > 0;
  if (exact) {
    const double scale = std::max(form.max_abs_coefficient(), 1.0);
    exact = spectral_d(form).max_abs_coefficient() <= 1e-12 * scale &&
            spectral_harmonic(form).max_abs_coefficient() <= 1e-12 * scale;
  }

  SweepSeries lap{"laplacian", {}, 0, 0, false};
  SweepSeries grn{"green", {}, 0, 0, false};
  SweepSeries prim{"primitive", {}, 0, 0, false};
  SweepSeries eig{"eigenvalue", {}, 0, 0, false};

  for (int res : resolutions) {
    const ComplexPtr mesh = circle ? corpus::circle(res) : corpus::flat_torus(res);
    const MetricPtr metric = build_metric(mesh, scheme);
    const HodgePtr system = build_hodge_system(metric);
    const double h = two_pi / res;

    const Cochain sampled = sample_to_cochain(form, *mesh);
    const Cochain lap_exact = sample_to_cochain(spectral_laplacian(form), *mesh);
    lap.entries.push_back(
        {res, h, relative_error(*metric, system->laplacian(p)(sampled), lap_exact)});

    const Cochain green_exact = sample_to_cochain(spectral_green(form), *mesh);
    grn.entries.push_back({res, h, relative_error(*metric, green(*system, sampled), green_exact)});

    if (exact) {
      const Cochain prim_exact = sample_to_cochain(spectral_primitive(form), *mesh);
      // The sampled cochain is exact up to rounding (the de Rham map commutes with d).
      const auto sol = system->solve_green(p, sampled.values());
      const Cochain prim_dec(p - 1, sol.sigma, mesh->id());
      prim.entries.push_back({res, h, relative_error(*metric, prim_dec, prim_exact)});
    }
    if (circle) {
      const SpectrumEstimate spec = lowest_eigenpairs(system->laplacian(0), 2, 2, 7);
      eig.entries.push_back({res, h, std::abs(spec.values[1] - 1.0)});
    }
  }
  for (SweepSeries* s : {&lap, &grn, &prim, &eig}) {
    if (s->entries.empty()) continue;
    finish(*s);
    report.series.push_back(std::move(*s));
  }
  return report;
}

}  // namespace hodgekit::oracle
