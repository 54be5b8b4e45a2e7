#include "acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include "hodgekit/corpus.hpp"
#include "hodgekit/errors.hpp"
#include "hodgekit/family.hpp"
#include "hodgekit/hodge.hpp"
#include "hodgekit/norms.hpp"
#include "hodgekit/parallel.hpp"
#include "hodgekit/torus_oracle.hpp"

namespace hodgekit::acceptance {

namespace {

struct Mesh {
  std::string name;
  ComplexPtr complex;
  HodgePtr system;       // null when the build failed
  std::string build_error;
};

std::vector<Mesh> load_corpus() {
  std::vector<Mesh> out;
  for (const std::string& name : corpus::names()) out.push_back({name, corpus::by_name(name), {}, {}});
  parallel_for(out.size(), [&](std::size_t i) {
    try {
      out[i].system = build_hodge_system(build_metric(out[i].complex, MetricScheme::whitney));
    } catch (const std::exception& e) {
      out[i].build_error = e.what();
    }
  });
  return out;
}

std::uint64_t stream_id(int criterion, std::size_t mesh, int degree, std::size_t item) {
  return ((static_cast<std::uint64_t>(criterion) * 64 + mesh) * 8 + static_cast<std::uint64_t>(degree)) *
             (1u << 20) +
         item;
}

double norm_m(const MetricStructure& m, int p, const Eigen::VectorXd& x) {
  return std::sqrt(std::max(x.dot(m.mass(p) * x), 0.0));
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

Check at_most(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value <= threshold};
}

Check at_least(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value >= threshold};
}

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

// Runs body; converts exceptions into a failed criterion.
template <class Body>
CriterionResult criterion(int id, std::string title, Body body) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  try {
    r.summary = body(r.checks);
    r.pass = !r.checks.empty() && all_pass(r.checks);
  } catch (const Error& e) {
    r.error = std::string(to_string(e.code())) + ": " + e.what();
    r.summary = "aborted: " + r.error;
    r.pass = false;
  } catch (const std::exception& e) {
    r.error = e.what();
    r.summary = "aborted: " + r.error;
    r.pass = false;
  }
  return r;
}

const HodgeSystem& system_of(const Mesh& m) {
  if (!m.system) throw Error(ErrorCode::numerical, m.name + ": " + m.build_error);
  return *m.system;
}

CriterionResult structural(const std::vector<Mesh>& meshes) {
  return criterion(1, "structural-exactness", [&](std::vector<Check>& checks) {
    double worst_bb = 0.0, worst_dd = 0.0;
    for (const Mesh& m : meshes) {
      const SimplicialComplex& c = *m.complex;
      double bb = 0.0, dd = 0.0;
      for (int p = 1; p < c.dimension(); ++p) {
        const IntMatrix prod = c.boundary(p) * c.boundary(p + 1);
        for (int k = 0; k < prod.outerSize(); ++k)
          for (IntMatrix::InnerIterator it(prod, k); it; ++it)
            bb = std::max(bb, std::abs(static_cast<double>(it.value())));
        const IntMatrix dprod = c.coboundary(p) * c.coboundary(p - 1);
        for (int k = 0; k < dprod.outerSize(); ++k)
          for (IntMatrix::InnerIterator it(dprod, k); it; ++it)
            dd = std::max(dd, std::abs(static_cast<double>(it.value())));
      }
      checks.push_back(at_most(m.name + " max|bd bd|", bb, 0.0));
      checks.push_back(at_most(m.name + " max|d d|", dd, 0.0));
      worst_bb = std::max(worst_bb, bb);
      worst_dd = std::max(worst_dd, dd);
    }
    return "max |bd bd| = " + fmt(worst_bb) + ", max |d d| = " + fmt(worst_dd) + " over " +
           std::to_string(meshes.size()) + " meshes (exact integers)";
  });
}

CriterionResult adjointness(const std::vector<Mesh>& meshes, std::uint64_t seed) {
  return criterion(2, "adjointness", [&](std::vector<Check>& checks) {
    double worst = 0.0;
    for (std::size_t mi = 0; mi < meshes.size(); ++mi) {
      const HodgeSystem& sys = system_of(meshes[mi]);
      const MetricStructure& m = sys.metric();
      for (int p = 1; p <= sys.dimension(); ++p) {
        std::vector<double> rel(100, 0.0);
        parallel_for(rel.size(), [&](std::size_t i) {
          const Cochain a = random_cochain(sys.complex(), p - 1, seed, stream_id(2, mi, p, 2 * i));
          const Cochain b = random_cochain(sys.complex(), p, seed, stream_id(2, mi, p, 2 * i + 1));
          const Eigen::VectorXd da = m.d(p - 1) * a.values();
          const Eigen::VectorXd db = apply_delta(m, p, b.values());
          const double lhs = da.dot(m.mass(p) * b.values());
          const double rhs = a.values().dot(m.mass(p - 1) * db);
          rel[i] = std::abs(lhs - rhs) / (norm_m(m, p - 1, a.values()) * norm_m(m, p, b.values()));
        });
        const double mx = *std::max_element(rel.begin(), rel.end());
        checks.push_back(at_most(meshes[mi].name + " p=" + std::to_string(p), mx, 1e-10));
        worst = std::max(worst, mx);
      }
    }
    return "max |<d a,b> - <a,delta b>| / (|a||b|) = " + fmt(worst) +
           " over 100 pairs per degree per mesh (<= 1e-10)";
  });
}

CriterionResult harmonic_dimensions(const std::vector<Mesh>& meshes) {
  return criterion(3, "harmonic-dimensions", [&](std::vector<Check>& checks) {
    std::ostringstream os;
    int mismatches = 0;
    for (const Mesh& m : meshes) {
      const HodgeSystem& sys = system_of(m);
      const std::vector<int> expect = corpus::expected_betti(m.name);
      os << (os.tellp() > 0 ? ", " : "") << m.name << " (";
      for (int p = 0; p <= sys.dimension(); ++p) {
        const auto dim = static_cast<double>(sys.harmonic_matrix(p).cols());
        const double diff = std::abs(dim - expect[static_cast<std::size_t>(p)]);
        checks.push_back(at_most(m.name + " dim H^" + std::to_string(p) + " - b_" + std::to_string(p),
                                 diff, 0.0));
        mismatches += diff != 0.0;
        os << (p ? "," : "") << dim;
      }
      os << ")";
    }
    return "dim H^p: " + os.str() + "; " + std::to_string(mismatches) + " mismatches";
  });
}

CriterionResult decomposition(const std::vector<Mesh>& meshes, std::uint64_t seed) {
  return criterion(4, "hodge-decomposition", [&](std::vector<Check>& checks) {
    double worst_res = 0.0, worst_orth = 0.0;
    constexpr std::size_t samples = 10;
    for (std::size_t mi = 0; mi < meshes.size(); ++mi) {
      const HodgeSystem& sys = system_of(meshes[mi]);
      for (int p = 0; p <= sys.dimension(); ++p) {
        std::vector<double> res(samples), orth(samples);
        parallel_for(samples, [&](std::size_t i) {
          const Decomposition d =
              decompose(sys, random_cochain(sys.complex(), p, seed, stream_id(4, mi, p, i)));
          res[i] = d.residual;
          orth[i] = d.orthogonality;
        });
        const double r = *std::max_element(res.begin(), res.end());
        const double o = *std::max_element(orth.begin(), orth.end());
        const std::string tag = meshes[mi].name + " p=" + std::to_string(p);
        checks.push_back(at_most(tag + " reconstruction", r, 1e-8));
        checks.push_back(at_most(tag + " orthogonality", o, 1e-8));
        worst_res = std::max(worst_res, r);
        worst_orth = std::max(worst_orth, o);
      }
    }
    return "max reconstruction residual " + fmt(worst_res) + ", max orthogonality " +
           fmt(worst_orth) + " (both <= 1e-8)";
  });
}

CriterionResult primitive_contract(const std::vector<Mesh>& meshes, std::uint64_t seed) {
  return criterion(5, "primitive-contract", [&](std::vector<Check>& checks) {
    double worst_d = 0.0, worst_k = 0.0;
    constexpr std::size_t samples = 50;
    for (std::size_t mi = 0; mi < meshes.size(); ++mi) {
      const HodgeSystem& sys = system_of(meshes[mi]);
      const MetricStructure& m = sys.metric();
      for (int p = 1; p <= sys.dimension(); ++p) {
        std::vector<double> rd(samples), rk(samples);
        parallel_for(samples, [&](std::size_t i) {
          const Cochain a = random_cochain(sys.complex(), p - 1, seed, stream_id(5, mi, p, i));
          const Cochain w(p, m.d(p - 1) * a.values(), sys.complex().id());
          const Cochain prim = primitive(sys, w);
          rd[i] = norm_m(m, p, m.d(p - 1) * prim.values() - w.values()) / l2_norm(m, w);
          rk[i] = l2_norm(m, project_kernel_d(sys, prim)) / l2_norm(m, prim);
        });
        const double d = *std::max_element(rd.begin(), rd.end());
        const double k = *std::max_element(rk.begin(), rk.end());
        const std::string tag = meshes[mi].name + " p=" + std::to_string(p);
        checks.push_back(at_most(tag + " |d prim - w|/|w|", d, 1e-8));
        checks.push_back(at_most(tag + " |P_ker d prim|/|prim|", k, 1e-8));
        worst_d = std::max(worst_d, d);
        worst_k = std::max(worst_k, k);
      }
    }
    return "50 exact forms per degree per mesh: max |d(d^-1 w) - w|/|w| = " + fmt(worst_d) +
           ", max |P_ker d(d^-1 w)|/|d^-1 w| = " + fmt(worst_k) + " (both <= 1e-8)";
  });
}

const oracle::SweepSeries& series_named(const oracle::ConvergenceReport& r, const std::string& q) {
  for (const auto& s : r.series)
    if (s.quantity == q) return s;
  throw Error(ErrorCode::numerical, "sweep has no '" + q + "' series");
}

CriterionResult oracle_agreement() {
  return criterion(6, "oracle-agreement", [&](std::vector<Check>& checks) {
    const auto torus = oracle::convergence_sweep(oracle::registry_form("cos_x_dxdy"), "cos_x_dxdy",
                                                 {8, 16, 32});
    const auto& prim = series_named(torus, "primitive");
    const auto circle =
        oracle::convergence_sweep(oracle::registry_form("circle_cos"), "circle_cos", {16, 32, 64});
    const auto& eig = series_named(circle, "eigenvalue");
    checks.push_back(at_least("torus primitive rate", prim.rate_valid ? prim.rate : 0.0, 1.8));
    checks.push_back(at_least("circle eigenvalue rate", eig.rate_valid ? eig.rate : 0.0, 1.8));
    std::ostringstream os;
    os << "primitive(cos x dx^dy) vs sin x dy, torus 8/16/32: errors";
    for (const auto& e : prim.entries) os << ' ' << fmt(e.error);
    os << ", rate " << fmt(prim.rate) << " (>= 1.8); circle 16/32/64 |lambda_1 - 1|";
    for (const auto& e : eig.entries) os << ' ' << fmt(e.error);
    os << ", rate " << fmt(eig.rate) << " (>= 1.8)";
    return os.str();
  });
}

CriterionResult family_harness(const std::vector<Mesh>& meshes, std::uint64_t seed) {
  return criterion(7, "family-commutation", [&](std::vector<Check>& checks) {
    const auto mesh = std::find_if(meshes.begin(), meshes.end(),
                                   [](const Mesh& m) { return m.name == "torus16"; });
    const HodgePtr sys = mesh->system;
    if (!sys) throw Error(ErrorCode::numerical, "torus16: " + mesh->build_error);
    double worst_lin = 0.0, min_rate = 1e300, max_rate = -1e300, worst_exact = 0.0;
    int rated = 0;
    for (const std::string& name : family_names()) {
      FamilySpec spec;
      spec.generator = name;
      spec.degree = 1;
      spec.seed = seed;
      spec.axes.assign(static_cast<std::size_t>(family_parameter_dimension(name)), GridAxis{0.0, 1.0, 41});
      const FamilyPtr fam = Family::create(spec, sys);
      if (!fam->has_derivatives()) continue;
      for (const SmoothnessReport& rep : verify_commutation(*fam)) {
        const std::string tag = name + " dir " + std::to_string(rep.direction);
        checks.push_back(at_most(tag + " linearity", rep.max_linearity_residual, 1e-10));
        worst_lin = std::max(worst_lin, rep.max_linearity_residual);
        Order third{0, 0};
        third[rep.direction] = 3;
        const bool curved = l2_norm(sys->metric(), fam->derivative(rep.probe, third)) > 0.0;
        for (const RateSeries& s : rep.series) {
          const std::string st = tag + " C" + std::to_string(s.k);
          if (curved) {
            checks.push_back(at_least(st + " rate >= 1.8", s.fit.valid ? s.fit.rate : 0.0, 1.8));
            checks.push_back(at_most(st + " rate <= 2.2", s.fit.valid ? s.fit.rate : 1e300, 2.2));
            min_rate = std::min(min_rate, s.fit.rate);
            max_rate = std::max(max_rate, s.fit.rate);
            ++rated;
          } else {
            // quotient is exact for polynomials of degree <= 2: errors are rounding
            const double e = *std::max_element(s.errors.begin(), s.errors.end());
            checks.push_back(at_most(st + " exact-quotient error", e, 1e-8));
            worst_exact = std::max(worst_exact, e);
          }
        }
      }
    }
    return "max linearity residual " + fmt(worst_lin) + " (<= 1e-10); centered rates in [" +
           fmt(min_rate) + ", " + fmt(max_rate) + "] over " + std::to_string(rated) +
           " (family, direction, C^k) series (need [1.8, 2.2]); polynomial families error <= " +
           fmt(worst_exact);
  });
}

CriterionResult mixed_partials() {
  return criterion(8, "mixed-partials", [&](std::vector<Check>& checks) {
    double worst_comm = 0.0, worst_ratio = 0.0, gap = 0.0;
    for (const std::string& name : tx_function_names()) {
      if (name == "sampled_bump") continue;  // no analytic t-derivative
      MixedPartialsSpec spec;
      spec.function = name;
      const MixedPartialsReport r = verify_mixed_partials(spec);
      checks.push_back(at_most(name + " commutation", r.max_commutation, 1e-12));
      checks.push_back(at_most(name + " Taylor ratio", r.max_taylor_ratio, 1.1));
      checks.push_back(at_most(name + " continuity shrinks (0 = yes)", r.continuity_shrinks ? 0.0 : 1.0, 0.0));
      if (r.exact_remainder_gap) {
        checks.push_back(at_most(name + " remainder - h^2 sup|g|", *r.exact_remainder_gap, 1e-12));
        gap = std::max(gap, *r.exact_remainder_gap);
      }
      worst_comm = std::max(worst_comm, r.max_commutation);
      worst_ratio = std::max(worst_ratio, r.max_taylor_ratio);
    }
    return "max mixed-difference disagreement " + fmt(worst_comm) + " (<= 1e-12), max Taylor ratio " +
           fmt(worst_ratio) + " (<= 1.1), t^2 g remainder gap " + fmt(gap) + " (<= 1e-12)";
  });
}

CriterionResult norm_chain(const std::vector<Mesh>& meshes) {
  return criterion(9, "norm-chain", [&](std::vector<Check>& checks) {
    std::array<std::vector<double>, 3> ratios;
    std::ostringstream os;
    for (const char* name : {"torus8", "torus16", "torus32"}) {
      const auto mesh = std::find_if(meshes.begin(), meshes.end(),
                                     [&](const Mesh& m) { return m.name == name; });
      const HodgeSystem& sys = system_of(*mesh);
      const Cochain w = oracle::sample_to_cochain(oracle::registry_form("sin_x_dy"), sys.complex());
      const NormChain c = norm_chain_probe(sys, w, 0, 2);
      for (double q : {c.ck_green, c.hs_green, c.hs2_omega, c.cs2_omega})
        checks.push_back({std::string(name) + " chain quantity finite and positive", q, 0.0,
                          std::isfinite(q) && q > 0.0});
      const std::optional<double> r[3] = {c.ratio_ck_hs, c.ratio_hs_hs2, c.ratio_hs2_cs2};
      for (int i = 0; i < 3; ++i) ratios[i].push_back(r[i].value_or(std::nan("")));
      os << (os.tellp() > 0 ? "; " : "") << name << " ratios " << fmt(r[0].value_or(NAN)) << ' '
         << fmt(r[1].value_or(NAN)) << ' ' << fmt(r[2].value_or(NAN));
    }
    const char* label[3] = {"Ck/Hs", "Hs/Hs-2", "Hs-2/Cs-2"};
    for (int i = 0; i < 3; ++i) {
      const auto [lo, hi] = std::minmax_element(ratios[i].begin(), ratios[i].end());
      const double spread = *hi / *lo;
      checks.push_back(at_most(std::string(label[i]) + " spread across resolutions",
                               std::isfinite(spread) ? spread : 1e300, 4.0));
    }
    return os.str() + " (spread < 4 required)";
  });
}

std::vector<CriterionResult> run_once(const SuiteConfig& config) {
  const std::vector<Mesh> meshes = load_corpus();
  std::vector<CriterionResult> out;
  out.push_back(structural(meshes));
  out.push_back(adjointness(meshes, config.seed));
  out.push_back(harmonic_dimensions(meshes));
  out.push_back(decomposition(meshes, config.seed));
  out.push_back(primitive_contract(meshes, config.seed));
  out.push_back(oracle_agreement());
  out.push_back(family_harness(meshes, config.seed));
  out.push_back(mixed_partials());
  out.push_back(norm_chain(meshes));
  return out;
}

Json criteria_json(const std::vector<CriterionResult>& criteria) {
  Json arr = Json::array();
  for (const auto& c : criteria) arr.push_back(to_json(c));
  return arr;
}

}  // namespace

SuiteResult run_suite(const SuiteConfig& config) {
  SuiteResult result;
  result.config = config;
  result.criteria = run_once(config);
  if (config.check_determinism) {
    const std::string first = criteria_json(result.criteria).dump();
    const std::string second = criteria_json(run_once(config)).dump();
    CriterionResult det;
    det.id = 10;
    det.title = "determinism";
    const bool same = first == second;
    det.checks.push_back({"criteria JSON differs between runs (0 = identical)", same ? 0.0 : 1.0, 0.0, same});
    det.pass = same;
    det.summary = same ? "two in-process runs with seed " + std::to_string(config.seed) +
                             " produced byte-identical JSON (" + std::to_string(first.size()) + " bytes)"
                       : "two in-process runs with the same seed produced different JSON";
    result.criteria.push_back(std::move(det));
  }
  result.pass = std::all_of(result.criteria.begin(), result.criteria.end(),
                            [](const CriterionResult& c) { return c.pass; });
  return result;
}

Json to_json(const CriterionResult& r) {
  Json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["pass"] = r.pass;
  j["summary"] = r.summary;
  if (!r.error.empty()) j["error"] = r.error;
  Json checks = Json::array();
  for (const Check& c : r.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  j["checks"] = std::move(checks);
  return j;
}

Json to_json(const SuiteResult& r) {
  Json j;
  j["seed"] = r.config.seed;
  j["pass"] = r.pass;
  j["criteria"] = criteria_json(r.criteria);
  return j;
}

std::string summary_line(const CriterionResult& r) {
  return std::string(r.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(r.id) + " (" +
         r.title + "): " + r.summary;
}

}  // namespace hodgekit::acceptance
