#include "hodgekit/family.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "hodgekit/errors.hpp"
#include "hodgekit/norms.hpp"
#include "hodgekit/parallel.hpp"

namespace hodgekit {

namespace {

struct RegistryEntry {
  const char* name;
  int parameters;
};

constexpr RegistryEntry kFamilies[] = {
    {"constant", 1}, {"linear", 1},      {"quadratic", 1},   {"sin", 1},
    {"torus-mix", 1}, {"product2", 2},  {"sin-sampled", 1},
};

// derivative of order r of the factor kind at t
double factor(int kind, double t, int r) {
  switch (kind) {
    case 0: return r == 0 ? 1.0 : 0.0;
    case 1: return r == 0 ? t : (r == 1 ? 1.0 : 0.0);
    case 2: return r == 0 ? t * t : (r == 1 ? 2.0 * t : (r == 2 ? 2.0 : 0.0));
    case 3: {
      const double v[4] = {std::sin(t), std::cos(t), -std::sin(t), -std::cos(t)};
      return v[r % 4];
    }
    case 4: {
      const double v[4] = {std::cos(t), -std::sin(t), -std::cos(t), std::sin(t)};
      return v[r % 4];
    }
  }
  return 0.0;
}

double factor_sup(int kind, double tmax, int r) {
  switch (kind) {
    case 0: return r == 0 ? 1.0 : 0.0;
    case 1: return r == 0 ? tmax : (r == 1 ? 1.0 : 0.0);
    case 2: return r == 0 ? tmax * tmax : (r == 1 ? 2.0 * tmax : (r == 2 ? 2.0 : 0.0));
    default: return 1.0;
  }
}

double m_norm(const MetricStructure& m, int p, const Eigen::VectorXd& x) {
  return std::sqrt(std::max(x.dot(m.mass(p) * x), 0.0));
}

int binomial(int n, int k) {
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::string_view to_string(FdScheme scheme) noexcept {
  return scheme == FdScheme::forward ? "forward" : "centered";
}

FdScheme parse_fd_scheme(std::string_view name) {
  if (name == "forward") return FdScheme::forward;
  if (name == "centered") return FdScheme::centered;
  throw Error(ErrorCode::parameter, "unknown difference scheme '" + std::string(name) +
                                        "' (expected forward or centered)");
}

double GridAxis::step() const { return (stop - start) / (points - 1); }

double GridAxis::at(int i) const {
  if (i == points - 1) return stop;
  return start + i * step();
}

std::vector<std::string> family_names() {
  std::vector<std::string> out;
  for (const auto& e : kFamilies) out.emplace_back(e.name);
  return out;
}

int family_parameter_dimension(const std::string& name) {
  for (const auto& e : kFamilies)
    if (name == e.name) return e.parameters;
  throw Error(ErrorCode::unknown_registry, "unknown family '" + name + "'");
}

std::shared_ptr<const Family> Family::create(const FamilySpec& spec, HodgePtr system) {
  const int l = family_parameter_dimension(spec.generator);
  if (static_cast<int>(spec.axes.size()) != l)
    throw Error(ErrorCode::parameter, "family '" + spec.generator + "' has " +
                                          std::to_string(l) + " parameter(s) but " +
                                          std::to_string(spec.axes.size()) + " grid axes given");
  for (const GridAxis& a : spec.axes)
    if (a.points < 2 || !(a.stop > a.start) || !std::isfinite(a.start) || !std::isfinite(a.stop))
      throw Error(ErrorCode::parameter, "grid axis needs start < stop and at least 2 points");
  const int n = system->dimension();
  if (spec.degree < 1 || spec.degree > n)
    throw Error(ErrorCode::degree, "family degree must lie in 1.." + std::to_string(n));

  auto f = std::shared_ptr<Family>(new Family());
  f->spec_ = spec;
  f->system_ = std::move(system);
  const MetricStructure& m = f->system_->metric();
  const SimplicialComplex& c = f->system_->complex();
  const int p = spec.degree;

  // Coexact base: omega = d delta beta, normalized.
  auto coexact_base = [&](std::uint64_t stream) {
    const Cochain beta = random_cochain(c, p, spec.seed, stream);
    Eigen::VectorXd w = m.d(p - 1) * apply_delta(m, p, beta.values());
    return Eigen::VectorXd(w / m_norm(m, p, w));
  };
  auto exact_base = [&](std::uint64_t stream) {
    const Cochain a = random_cochain(c, p - 1, spec.seed, stream);
    Eigen::VectorXd w = m.d(p - 1) * a.values();
    return Eigen::VectorXd(w / m_norm(m, p, w));
  };

  const std::string& g = spec.generator;
  if (g == "torus-mix") {
    f->bases_ = {exact_base(1), exact_base(2)};
    f->terms_ = {{0, {3, 0}, 1.0}, {1, {2, 0}, 1.0}};
  } else if (g == "product2") {
    f->bases_ = {coexact_base(1), coexact_base(2)};
    f->terms_ = {{0, {3, 4}, 1.0}, {1, {1, 1}, 0.5}};
  } else {
    f->bases_ = {coexact_base(1)};
    int kind = 0;
    if (g == "linear") kind = 1;
    else if (g == "quadratic") kind = 2;
    else if (g == "sin" || g == "sin-sampled") kind = 3;
    f->terms_ = {{0, {kind, 0}, 1.0}};
    f->analytic_ = g != "sin-sampled";
  }
  return f;
}

Parameter Family::point(GridIndex index) const {
  Parameter t{0.0, 0.0};
  for (std::size_t i = 0; i < spec_.axes.size(); ++i) {
    if (index[i] < 0 || index[i] >= spec_.axes[i].points)
      throw Error(ErrorCode::grid, "grid index out of range");
    t[i] = spec_.axes[i].at(index[i]);
  }
  return t;
}

double Family::coefficient(const Term& term, const Parameter& t, Order order) const {
  double v = term.scale;
  for (int i = 0; i < 2; ++i) v *= factor(term.factor[i], t[i], order[i]);
  return v;
}

Cochain Family::combine(const Parameter& t, Order order) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(bases_.front().size());
  for (const Term& term : terms_) {
    const double c = coefficient(term, t, order);
    if (c != 0.0) out += c * bases_[term.base];
  }
  return Cochain(spec_.degree, std::move(out), system_->complex().id());
}

Cochain Family::value(const Parameter& t) const { return combine(t, {0, 0}); }

Cochain Family::derivative(const Parameter& t, Order order) const {
  if (!analytic_)
    throw Error(ErrorCode::capability,
                "family '" + spec_.generator + "' provides no analytic t-derivative");
  if (order[0] < 0 || order[1] < 0 || (parameter_dimension() == 1 && order[1] != 0))
    throw Error(ErrorCode::parameter, "invalid derivative order");
  return combine(t, order);
}

double Family::second_derivative_bound(int direction) const {
  if (direction < 0 || direction >= parameter_dimension())
    throw Error(ErrorCode::parameter, "direction out of range");
  double bound = 0.0;
  for (const Term& term : terms_) {
    double b = std::abs(term.scale);
    for (int i = 0; i < parameter_dimension(); ++i) {
      const GridAxis& a = spec_.axes[i];
      const double tmax = std::max(std::abs(a.start), std::abs(a.stop));
      b *= factor_sup(term.factor[i], tmax, i == direction ? 2 : 0);
    }
    bound += b;  // bases have unit norm
  }
  return bound;
}

std::vector<FamilySample> sample_family(const Family& family) {
  const FamilySpec& spec = family.spec();
  const int n0 = spec.axes[0].points;
  const int n1 = family.parameter_dimension() > 1 ? spec.axes[1].points : 1;
  std::vector<FamilySample> out(static_cast<std::size_t>(n0) * n1);
  const double tol = 1e-8;
  parallel_for(out.size(), [&](std::size_t k) {
    FamilySample& s = out[k];
    s.index = {static_cast<int>(k) / n1, static_cast<int>(k) % n1};
    s.t = family.point(s.index);
    s.omega = family.value(s.t);
    s.exactness = is_exact(family.system(), s.omega, tol);
  });
  for (const FamilySample& s : out)
    if (!s.exactness.exact) {
      std::ostringstream os;
      os << "family '" << spec.generator << "' is not exact at t = (" << s.t[0];
      if (family.parameter_dimension() > 1) os << ", " << s.t[1];
      os << "): closedness residual " << s.exactness.closedness_residual
         << ", harmonic residual " << s.exactness.harmonic_residual;
      throw Error(ErrorCode::not_exact, os.str());
    }
  return out;
}

namespace {

int stride_for(const GridAxis& axis, double h) {
  const double ratio = h / axis.step();
  const double r = std::round(ratio);
  if (!(h > 0.0) || r < 1.0 || std::abs(ratio - r) > 1e-9 * std::max(1.0, r))
    throw Error(ErrorCode::grid, "step h must be a positive multiple of the grid step " +
                                     std::to_string(axis.step()));
  return static_cast<int>(r);
}

}  // namespace

std::vector<DerivativeSample> fd_derivative(const Family& family,
                                            const std::vector<FamilySample>& samples,
                                            int direction, FdScheme scheme, double h) {
  if (direction < 0 || direction >= family.parameter_dimension())
    throw Error(ErrorCode::parameter, "direction out of range");
  const FamilySpec& spec = family.spec();
  const int s = stride_for(spec.axes[direction], h);
  const double hh = s * spec.axes[direction].step();
  std::map<GridIndex, const FamilySample*> by_index;
  for (const FamilySample& x : samples) by_index[x.index] = &x;
  auto neighbour = [&](GridIndex i, int offset) -> const FamilySample* {
    i[direction] += offset;
    const auto it = by_index.find(i);
    return it == by_index.end() ? nullptr : it->second;
  };
  std::vector<DerivativeSample> out;
  for (const FamilySample& x : samples) {
    const FamilySample* plus = neighbour(x.index, s);
    const FamilySample* minus = scheme == FdScheme::centered ? neighbour(x.index, -s) : &x;
    if (!plus || !minus) continue;
    const double denom = scheme == FdScheme::centered ? 2.0 * hh : hh;
    out.push_back({x.index, x.t, (1.0 / denom) * (plus->omega - minus->omega)});
  }
  if (out.empty())
    throw Error(ErrorCode::grid, "no grid point has the neighbours required by the " +
                                     std::string(to_string(scheme)) + " scheme at h = " +
                                     std::to_string(h));
  return out;
}

namespace {

// Values of a quantity along the axis line through the probe.
struct Line {
  int direction = 0;
  GridIndex probe{0, 0};
  std::vector<Parameter> t;
  std::vector<Cochain> omega, green, prim;
};

GridIndex probe_index(const Family& f) {
  GridIndex g{0, 0};
  for (int i = 0; i < f.parameter_dimension(); ++i) g[i] = (f.spec().axes[i].points - 1) / 2;
  return g;
}

Line make_line(const Family& f, int direction, bool need_green) {
  Line line;
  line.direction = direction;
  line.probe = probe_index(f);
  const int count = f.spec().axes[direction].points;
  line.t.resize(count);
  line.omega.resize(count);
  line.green.resize(count);
  line.prim.resize(count);
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t j) {
    GridIndex g = line.probe;
    g[direction] = static_cast<int>(j);
    line.t[j] = f.point(g);
    line.omega[j] = f.value(line.t[j]);
    line.prim[j] = primitive(f.system(), line.omega[j]);
    if (need_green) line.green[j] = green(f.system(), line.omega[j]);
  });
  return line;
}

// First-order quotient of values[j] with stride s; nullopt if the stencil leaves the line.
std::optional<Cochain> quotient(const std::vector<Cochain>& v, int j, int s, double h,
                                FdScheme scheme) {
  const int n = static_cast<int>(v.size());
  if (j + s >= n) return std::nullopt;
  if (scheme == FdScheme::forward) return (1.0 / h) * (v[j + s] - v[j]);
  if (j - s < 0) return std::nullopt;
  return (1.0 / (2.0 * h)) * (v[j + s] - v[j - s]);
}

// r-th centered quotient sum_j C(r,j) (-1)^j v(t + (r-2j)h) / (2h)^r.
Cochain centered_quotient(const std::vector<Cochain>& v, int j, int s, double h, int r) {
  Cochain out(v[j].degree(), Eigen::VectorXd::Zero(v[j].size()), v[j].complex_id());
  const double scale = 1.0 / std::pow(2.0 * h, r);
  for (int i = 0; i <= r; ++i) {
    const double c = binomial(r, i) * ((i % 2) ? -1.0 : 1.0) * scale;
    out = cochain_axpy(c, v[j + (r - 2 * i) * s], out);
  }
  return out;
}

void fit_all(SmoothnessReport& r) {
  for (RateSeries& s : r.series) s.fit = fit_rate(s.steps, s.errors);
}

}  // namespace

std::vector<SmoothnessReport> verify_commutation(const Family& family,
                                                 const CommutationOptions& options) {
  if (!family.has_derivatives())
    throw Error(ErrorCode::capability, "family '" + family.spec().generator +
                                           "' provides no analytic t-derivative");
  if (options.k_max < 0) throw Error(ErrorCode::parameter, "k_max must be >= 0");
  if (options.strides.empty()) throw Error(ErrorCode::parameter, "no strides given");
  const HodgeSystem& sys = family.system();
  const MetricStructure& m = sys.metric();
  const int p = family.spec().degree;
  std::vector<SmoothnessReport> reports;

  for (int dir = 0; dir < family.parameter_dimension(); ++dir) {
    const GridAxis& axis = family.spec().axes[dir];
    const GridIndex probe = probe_index(family);
    const int pj = probe[dir];
    const int smax = *std::max_element(options.strides.begin(), options.strides.end());
    const bool fits = options.scheme == FdScheme::centered
                          ? pj - smax >= 0 && pj + smax < axis.points
                          : pj + smax < axis.points;
    if (!fits)
      throw Error(ErrorCode::grid, "stride " + std::to_string(smax) +
                                       " does not fit around the probe point; use more grid points");

    const Line line = make_line(family, dir, true);
    SmoothnessReport rep;
    rep.family = family.spec().generator;
    rep.scheme = options.scheme;
    rep.direction = dir;
    rep.probe = family.point(probe);
    rep.seed = family.spec().seed;

    // (a) linearity and d-commutation on every admissible (point, stride).
    struct Job {
      int j, s;
    };
    std::vector<Job> jobs;
    for (int s : options.strides)
      for (int j = 0; j < axis.points; ++j)
        if (quotient(line.omega, j, s, s * axis.step(), options.scheme)) jobs.push_back({j, s});
    std::vector<LinearityCheck> checks(jobs.size());
    std::vector<double> dres(jobs.size(), 0.0);
    parallel_for(jobs.size(), [&](std::size_t q) {
      const auto [j, s] = jobs[q];
      const double h = s * axis.step();
      const Cochain dw = *quotient(line.omega, j, s, h, options.scheme);
      const Cochain g_of_dw = green(sys, dw);
      const Cochain dg = *quotient(line.green, j, s, h, options.scheme);
      const double scale = std::max(l2_norm(m, g_of_dw), l2_norm(m, dg));
      const double diff = l2_norm(m, g_of_dw - dg);
      checks[q] = {line.t[j], h, scale > 0.0 ? diff / scale : diff};

      const Cochain dp = *quotient(line.prim, j, s, h, options.scheme);
      const Eigen::VectorXd back = m.d(p - 1) * dp.values();
      const double wn = l2_norm(m, dw);
      const double bd = m_norm(m, p, back - dw.values());
      dres[q] = wn > 0.0 ? bd / wn : bd;
    });
    rep.linearity = std::move(checks);
    for (const auto& c : rep.linearity)
      rep.max_linearity_residual = std::max(rep.max_linearity_residual, c.residual);
    for (double d : dres) rep.max_d_commutation_residual = std::max(rep.max_d_commutation_residual, d);

    // (b) convergence to d^-1 of the analytic derivative at the probe.
    Order e{0, 0};
    e[dir] = 1;
    const Cochain target = primitive(sys, family.derivative(line.t[pj], e));
    for (int k = 0; k <= options.k_max; ++k) {
      RateSeries series;
      series.quantity = "derivative-error";
      series.order = 1;
      series.k = k;
      for (int s : options.strides) {
        const double h = s * axis.step();
        const Cochain q = *quotient(line.prim, pj, s, h, options.scheme);
        series.steps.push_back(h);
        series.errors.push_back(ck_norm(m, q - target, k));
      }
      rep.series.push_back(std::move(series));
    }
    fit_all(rep);
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::vector<SmoothnessReport> smoothness_report(const Family& family, int k_max, int r_max,
                                                const std::vector<int>& strides) {
  if (k_max < 0 || r_max < 1) throw Error(ErrorCode::parameter, "need k_max >= 0 and r_max >= 1");
  const HodgeSystem& sys = family.system();
  const MetricStructure& m = sys.metric();
  std::vector<SmoothnessReport> reports;
  for (int dir = 0; dir < family.parameter_dimension(); ++dir) {
    const GridAxis& axis = family.spec().axes[dir];
    const GridIndex probe = probe_index(family);
    const int pj = probe[dir];
    const int room = std::min(pj, axis.points - 1 - pj);
    for (int r = 1; r <= r_max; ++r) {
      int fitting = 0;
      for (int s : strides) fitting += (s > 0 && r * s <= room) ? 1 : 0;
      if (fitting < 3)
        throw Error(ErrorCode::grid, "grid too coarse for order-" + std::to_string(r) +
                                         " differences: only " + std::to_string(fitting) +
                                         " step sizes fit around the probe (need 3)");
    }
    const Line line = make_line(family, dir, false);
    SmoothnessReport rep;
    rep.family = family.spec().generator;
    rep.scheme = FdScheme::centered;
    rep.direction = dir;
    rep.probe = family.point(probe);
    rep.seed = family.spec().seed;

    for (int r = 1; r <= r_max; ++r) {
      std::vector<int> used;
      for (int s : strides)
        if (s > 0 && r * s <= room) used.push_back(s);
      std::sort(used.begin(), used.end(), std::greater<>());  // coarse to fine
      std::vector<Cochain> q;
      for (int s : used) q.push_back(centered_quotient(line.prim, pj, s, s * axis.step(), r));
      std::optional<Cochain> target;
      if (family.has_derivatives()) {
        Order o{0, 0};
        o[dir] = r;
        target = primitive(sys, family.derivative(line.t[pj], o));
      }
      for (int k = 0; k <= k_max; ++k) {
        if (target) {
          RateSeries err{"derivative-error", r, k, {}, {}, {}};
          for (std::size_t i = 0; i < used.size(); ++i) {
            err.steps.push_back(used[i] * axis.step());
            err.errors.push_back(ck_norm(m, q[i] - *target, k));
          }
          rep.series.push_back(std::move(err));
        }
        RateSeries cauchy{"cauchy", r, k, {}, {}, {}};
        for (std::size_t i = 0; i + 1 < used.size(); ++i) {
          cauchy.steps.push_back(used[i] * axis.step());
          cauchy.errors.push_back(ck_norm(m, q[i] - q[i + 1], k));
        }
        rep.series.push_back(std::move(cauchy));
      }
    }
    fit_all(rep);
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace hodgekit
