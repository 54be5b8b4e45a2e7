#include "hodgekit/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hodgekit/errors.hpp"
#include "hodgekit/parallel.hpp"

namespace hodgekit {

namespace {

double m_dot(const MetricStructure& m, int p, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() == 0) return 0.0;
  return x.dot(m.mass(p) * y);
}

void check_cochain(const SimplicialComplex& c, const Cochain& x) {
  if (x.degree() < 0 || x.degree() > c.dimension())
    throw Error(ErrorCode::degree, "cochain degree " + std::to_string(x.degree()) +
                                       " outside 0.." + std::to_string(c.dimension()));
  if (x.complex_id() != c.id() || x.size() != static_cast<Eigen::Index>(c.count(x.degree())))
    throw Error(ErrorCode::shape, "cochain does not belong to this complex");
}

double sup_normalized(const MetricStructure& m, int p, const Eigen::VectorXd& x) {
  if (x.size() == 0) return 0.0;
  return (x.array().abs() / m.volumes(p).array()).maxCoeff();
}

}  // namespace

std::string_view to_string(NormFamily family) noexcept {
  switch (family) {
    case NormFamily::l2: return "L2";
    case NormFamily::sobolev: return "Hs";
    case NormFamily::ck: return "Ck";
  }
  return "?";
}

std::string resolution_tag(const SimplicialComplex& complex) {
  std::ostringstream os;
  os << complex.id() << '/';
  for (int p = 0; p <= complex.dimension(); ++p) os << (p ? "x" : "") << complex.count(p);
  return os.str();
}

double sobolev_norm(const HodgeSystem& system, const Cochain& omega, int s) {
  if (s < 0) throw Error(ErrorCode::parameter, "Sobolev order s must be >= 0, got " + std::to_string(s));
  check_cochain(system.complex(), omega);
  const MetricStructure& m = system.metric();
  const int p = omega.degree();
  const Laplacian& lap = system.laplacian(p);
  // Half the powers on x, then the symmetric form; keeps the result >= 0.
  Eigen::VectorXd x = omega.values();
  for (int i = 0; i < s / 2; ++i) x += lap.apply(x);
  double q = m_dot(m, p, x, x);
  if (s % 2 == 1) {
    if (p < m.dimension()) {
      const Eigen::VectorXd dx = m.d(p) * x;
      q += m_dot(m, p + 1, dx, dx);
    }
    if (p > 0) {
      const Eigen::VectorXd dl = apply_delta(m, p, x);
      q += m_dot(m, p - 1, dl, dl);
    }
  }
  return std::sqrt(std::max(q, 0.0));
}

double ck_norm(const MetricStructure& metric, const Cochain& omega, int k) {
  if (k < 0) throw Error(ErrorCode::parameter, "C^k order k must be >= 0, got " + std::to_string(k));
  check_cochain(metric.complex(), omega);
  const int n = metric.dimension();
  int p = omega.degree();
  Eigen::VectorXd x = omega.values();
  bool use_d = p < n;
  double total = sup_normalized(metric, p, x);
  for (int j = 1; j <= k; ++j) {
    if (use_d) {
      x = metric.d(p) * x;
      ++p;
    } else {
      x = apply_delta(metric, p, x);
      --p;
    }
    use_d = !use_d;
    total += sup_normalized(metric, p, x);
  }
  return total;
}

NormReport sobolev_report(const HodgeSystem& system, const Cochain& omega, int s) {
  const double v = sobolev_norm(system, omega, s);
  return {s == 0 ? NormFamily::l2 : NormFamily::sobolev, s, v, resolution_tag(system.complex())};
}

NormReport ck_report(const MetricStructure& metric, const Cochain& omega, int k) {
  return {NormFamily::ck, k, ck_norm(metric, omega, k), resolution_tag(metric.complex())};
}

double green_norm_ratio(const HodgeSystem& system, const Cochain& omega, int s) {
  if (s < 2) throw Error(ErrorCode::parameter, "green norm needs s >= 2, got " + std::to_string(s));
  const double den = sobolev_norm(system, omega, s - 2);
  if (den == 0.0) return 0.0;
  return sobolev_norm(system, green(system, omega), s) / den;
}

Cochain random_cochain(const SimplicialComplex& complex, int degree, std::uint64_t seed,
                       std::uint64_t stream) {
  if (degree < 0 || degree > complex.dimension())
    throw Error(ErrorCode::degree, "random cochain degree out of range");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 gen(seq);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(static_cast<Eigen::Index>(complex.count(degree)));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(gen);
  return Cochain(degree, std::move(v), complex.id());
}

GreenNormEstimate estimate_green_operator_norm(const HodgeSystem& system, int degree, int s,
                                               int trials, std::uint64_t seed) {
  if (s < 2) throw Error(ErrorCode::parameter, "green norm needs s >= 2, got " + std::to_string(s));
  if (trials < 1)
    throw Error(ErrorCode::parameter, "green norm needs at least one trial, got " +
                                          std::to_string(trials));
  if (degree < 0 || degree > system.dimension())
    throw Error(ErrorCode::degree, "degree " + std::to_string(degree) + " out of range");
  GreenNormEstimate out;
  out.degree = degree;
  out.s = s;
  out.trials = trials;
  out.seed = seed;
  out.ratios.assign(static_cast<std::size_t>(trials), 0.0);
  parallel_for(out.ratios.size(), [&](std::size_t i) {
    const Cochain w = random_cochain(system.complex(), degree, seed, i);
    out.ratios[i] = green_norm_ratio(system, w, s);
  });
  double best = 0.0;
  for (double r : out.ratios) {
    best = std::max(best, r);
    out.running_max.push_back(best);
  }
  out.estimate = best;
  return out;
}

NormChain norm_chain_probe(const HodgeSystem& system, const Cochain& omega, int k, int s) {
  const int n = system.dimension();
  if (k < 0) throw Error(ErrorCode::parameter, "k must be >= 0");
  if (!(2 * s > 2 * k + n)) {
    std::ostringstream os;
    os << "norm chain requires s > k + n/2; got s = " << s << ", k = " << k << ", n = " << n;
    throw Error(ErrorCode::hypothesis, os.str());
  }
  if (s < 2) throw Error(ErrorCode::parameter, "norm chain needs s >= 2");
  NormChain c;
  c.k = k;
  c.s = s;
  const Cochain g = green(system, omega);
  c.ck_green = ck_norm(system.metric(), g, k);
  c.hs_green = sobolev_norm(system, g, s);
  c.hs2_omega = sobolev_norm(system, omega, s - 2);
  c.cs2_omega = ck_norm(system.metric(), omega, s - 2);
  auto ratio = [](double a, double b) -> std::optional<double> {
    if (b == 0.0) return std::nullopt;
    return a / b;
  };
  c.ratio_ck_hs = ratio(c.ck_green, c.hs_green);
  c.ratio_hs_hs2 = ratio(c.hs_green, c.hs2_omega);
  c.ratio_hs2_cs2 = ratio(c.hs2_omega, c.cs2_omega);
  return c;
}

}  // namespace hodgekit
