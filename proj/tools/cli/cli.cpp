#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance.hpp"
#include "hodgekit/corpus.hpp"
#include "hodgekit/errors.hpp"
#include "hodgekit/family.hpp"
#include "hodgekit/hodge.hpp"
#include "hodgekit/mesh_io.hpp"
#include "hodgekit/norms.hpp"
#include "hodgekit/torus_oracle.hpp"

#ifndef HODGEKIT_VERSION
#define HODGEKIT_VERSION "0.0.0"
#endif

namespace hodgekit::cli {

namespace {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  std::string mesh;
  std::string cochain;
  std::string metric = "whitney";
  int degree = -1;
  double solver_tolerance = 1e-12;
  double rank_cutoff = 1e-9;
  double exactness_tolerance = 1e-8;
  std::uint64_t seed = 7;
  std::string output;

  // command specific
  int s = 2;
  int k = 0;
  int trials = 100;
  std::string family;
  double t0 = 0.0, t1 = 1.0;
  int steps = 41;
  std::string scheme = "centered";
  int kmax = 2;
  int rmax = 2;
  std::string manifold = "t2";
  std::vector<int> resolutions = {8, 16, 32};
  std::string form;
  std::string kind = "random";
  int index = 0;
  std::string path;
  bool skip_determinism = false;
};

Json config_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  if (!c.mesh.empty()) j["mesh"] = c.mesh;
  if (!c.cochain.empty()) j["cochain"] = c.cochain;
  j["metric"] = c.metric;
  if (c.degree >= 0) j["degree"] = c.degree;
  j["tolerances"] = {{"solver", c.solver_tolerance},
                     {"rank_cutoff", c.rank_cutoff},
                     {"exactness", c.exactness_tolerance}};
  j["seed"] = c.seed;
  if (c.command == "norms") j["s"] = c.s, j["k"] = c.k;
  if (c.command == "green-norm") j["s"] = c.s, j["trials"] = c.trials;
  if (c.command == "family-verify") {
    j["family"] = c.family;
    j["t0"] = c.t0;
    j["t1"] = c.t1;
    j["steps"] = c.steps;
    j["scheme"] = c.scheme;
    j["kmax"] = c.kmax;
    j["rmax"] = c.rmax;
  }
  if (c.command == "spectral-compare") {
    j["manifold"] = c.manifold;
    j["resolutions"] = c.resolutions;
    j["form"] = c.form;
  }
  if (c.command == "make-cochain") j["kind"] = c.kind, j["form"] = c.form, j["index"] = c.index;
  if (c.command == "mesh-export") j["path"] = c.path;
  if (c.command == "corpus-test") j["determinism"] = !c.skip_determinism;
  return j;
}

Json envelope(const RunConfig& c) {
  Json j;
  j["schema"] = "hodgekit/1";
  j["tool"] = "hodgekit";
  j["version"] = HODGEKIT_VERSION;
  j["config"] = config_json(c);
  return j;
}

Json check(const std::string& name, double value, double threshold, bool upper = true) {
  const bool pass = std::isfinite(value) && (upper ? value <= threshold : value >= threshold);
  return {{"name", name}, {"value", value}, {"threshold", threshold},
          {"kind", upper ? "max" : "min"}, {"pass", pass}};
}

Json cochain_json(const Cochain& c) { return Json::parse(io::cochain_to_json(c)); }

ComplexPtr load_mesh(const std::string& spec) {
  constexpr std::string_view prefix = "corpus:";
  if (spec.rfind(prefix, 0) == 0) return corpus::by_name(spec.substr(prefix.size()));
  return io::read_mesh(spec);
}

HodgePtr load_system(const RunConfig& c, ComplexPtr complex) {
  HodgeOptions o;
  o.solver_tolerance = c.solver_tolerance;
  o.rank_cutoff = c.rank_cutoff;
  o.exactness_tolerance = c.exactness_tolerance;
  return build_hodge_system(build_metric(std::move(complex), parse_scheme(c.metric)), o);
}

Json harmonic_json(const HodgeSystem& sys) {
  Json dims = Json::array(), betti = Json::array();
  for (int p = 0; p <= sys.dimension(); ++p) {
    dims.push_back(sys.harmonic_matrix(p).cols());
    betti.push_back(sys.diagnostics(p).betti);
  }
  return {{"harmonic_dimensions", dims}, {"betti_numbers", betti}};
}

bool checks_pass(const Json& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Json& c) { return c["pass"].get<bool>(); });
}

void finish_checks(Json& report, Json checks) {
  report["all_pass"] = checks_pass(checks);
  report["checks"] = std::move(checks);
}

// ---------------------------------------------------------------------------

int cmd_decompose(const RunConfig& c, Json& report) {
  const HodgePtr sys = load_system(c, load_mesh(c.mesh));
  const Cochain w = io::read_cochain(c.cochain, sys->complex());
  if (c.degree >= 0 && c.degree != w.degree())
    throw Error(ErrorCode::degree, "--degree " + std::to_string(c.degree) +
                                       " does not match the cochain degree " +
                                       std::to_string(w.degree()));
  const Decomposition d = decompose(*sys, w);
  report["diagnostics"] = harmonic_json(*sys);
  report["residuals"] = {{"reconstruction", d.residual},
                         {"orthogonality", d.orthogonality},
                         {"solver", d.solver_residual}};
  finish_checks(report, Json::array({check("reconstruction", d.residual, 1e-8),
                                     check("orthogonality", d.orthogonality, 1e-8)}));
  Json parts;
  parts["exact"] = cochain_json(d.exact);
  parts["coexact"] = cochain_json(d.coexact);
  parts["harmonic"] = cochain_json(d.harmonic);
  if (d.alpha.degree() >= 0) parts["alpha"] = cochain_json(d.alpha);
  if (d.beta.degree() <= sys->dimension()) parts["beta"] = cochain_json(d.beta);
  report["result"] = std::move(parts);
  return ok;
}

int cmd_primitive(const RunConfig& c, Json& report) {
  const HodgePtr sys = load_system(c, load_mesh(c.mesh));
  const Cochain w = io::read_cochain(c.cochain, sys->complex());
  const MetricStructure& m = sys->metric();
  const ExactnessReport ex = is_exact(*sys, w, c.exactness_tolerance);
  const Cochain a = primitive(*sys, w);
  const double wn = l2_norm(m, w);
  const double an = l2_norm(m, a);
  const Cochain back(w.degree(), m.d(w.degree() - 1) * a.values(), w.complex_id());
  const double dres = wn > 0.0 ? l2_norm(m, back - w) / wn : l2_norm(m, back - w);
  const double kres = an > 0.0 ? l2_norm(m, project_kernel_d(*sys, a)) / an : 0.0;
  report["diagnostics"] = harmonic_json(*sys);
  report["exactness"] = {{"closedness_residual", ex.closedness_residual},
                         {"harmonic_residual", ex.harmonic_residual},
                         {"tolerance", ex.tolerance}};
  report["residuals"] = {{"d_residual", dres}, {"kernel_component", kres}};
  finish_checks(report, Json::array({check("d_residual", dres, 1e-8),
                                     check("kernel_component", kres, 1e-8)}));
  report["result"] = {{"primitive", cochain_json(a)}};
  return ok;
}

int cmd_norms(const RunConfig& c, Json& report) {
  const HodgePtr sys = load_system(c, load_mesh(c.mesh));
  const Cochain w = io::read_cochain(c.cochain, sys->complex());
  if (c.s < 0 || c.k < 0) throw Error(ErrorCode::parameter, "--s and --k must be >= 0");
  Json norms = Json::array();
  auto put = [&](const NormReport& r) {
    norms.push_back({{"family", std::string(to_string(r.family))},
                     {"parameter", r.parameter},
                     {"value", r.value},
                     {"resolution", r.resolution}});
  };
  std::vector<double> hs;
  for (int s = 0; s <= c.s; ++s) {
    const NormReport r = sobolev_report(*sys, w, s);
    hs.push_back(r.value);
    put(r);
  }
  for (int k = 0; k <= c.k; ++k) put(ck_report(sys->metric(), w, k));
  Json checks = Json::array();
  for (std::size_t i = 1; i < hs.size(); ++i) {
    const double slack = hs[i - 1] - hs[i];  // must be <= tiny
    checks.push_back(check("H^" + std::to_string(i - 1) + " <= H^" + std::to_string(i),
                           slack, 1e-10 * std::max(hs[i], 1.0)));
  }
  report["result"] = {{"norms", norms}};
  finish_checks(report, std::move(checks));
  return ok;
}

int cmd_green_norm(const RunConfig& c, Json& report) {
  const HodgePtr sys = load_system(c, load_mesh(c.mesh));
  const int degree = c.degree < 0 ? 0 : c.degree;
  const GreenNormEstimate e = estimate_green_operator_norm(*sys, degree, c.s, c.trials, c.seed);
  report["result"] = {{"degree", e.degree},    {"s", e.s},
                      {"trials", e.trials},    {"seed", e.seed},
                      {"estimate", e.estimate}, {"ratios", e.ratios},
                      {"running_max", e.running_max}};
  bool monotone = std::is_sorted(e.running_max.begin(), e.running_max.end());
  finish_checks(report, Json::array({check("running max nondecreasing (0 = yes)", monotone ? 0.0 : 1.0, 0.0)}));
  return ok;
}

Json series_json(const RateSeries& s) {
  return {{"quantity", s.quantity}, {"order", s.order},     {"k", s.k},
          {"steps", s.steps},       {"errors", s.errors},   {"rate", s.fit.rate},
          {"fit_residual", s.fit.residual}, {"rate_valid", s.fit.valid}};
}

Json smoothness_json(const SmoothnessReport& r) {
  Json lin = Json::array();
  for (const auto& l : r.linearity) lin.push_back({{"t", l.t}, {"h", l.h}, {"residual", l.residual}});
  Json series = Json::array();
  for (const auto& s : r.series) series.push_back(series_json(s));
  return {{"family", r.family},
          {"scheme", std::string(to_string(r.scheme))},
          {"direction", r.direction},
          {"probe", r.probe},
          {"norm", r.norm},
          {"seed", r.seed},
          {"max_linearity_residual", r.max_linearity_residual},
          {"max_d_commutation_residual", r.max_d_commutation_residual},
          {"linearity", lin},
          {"series", series}};
}

int cmd_family_verify(const RunConfig& c, Json& report) {
  const HodgePtr sys = load_system(c, load_mesh(c.mesh));
  FamilySpec spec;
  spec.generator = c.family;
  spec.degree = c.degree < 0 ? 1 : c.degree;
  spec.seed = c.seed;
  spec.axes.assign(static_cast<std::size_t>(family_parameter_dimension(c.family)),
                   GridAxis{c.t0, c.t1, c.steps});
  const FamilyPtr fam = Family::create(spec, sys);
  const auto samples = sample_family(*fam);
  double worst_exact = 0.0;
  for (const auto& s : samples)
    worst_exact = std::max({worst_exact, s.exactness.closedness_residual, s.exactness.harmonic_residual});

  CommutationOptions opt;
  opt.scheme = parse_fd_scheme(c.scheme);
  opt.k_max = c.kmax;
  const auto commutation = verify_commutation(*fam, opt);
  const auto smooth = smoothness_report(*fam, c.kmax, c.rmax);

  Json checks = Json::array();
  checks.push_back(check("exactness along family", worst_exact, 1e-8));
  Json comm = Json::array();
  for (const auto& r : commutation) {
    const std::string tag = "dir " + std::to_string(r.direction);
    checks.push_back(check(tag + " linearity", r.max_linearity_residual, 1e-10));
    checks.push_back(check(tag + " d-commutation", r.max_d_commutation_residual, 1e-8));
    Order third{0, 0};
    third[r.direction] = opt.scheme == FdScheme::centered ? 3 : 2;
    const bool curved = l2_norm(sys->metric(), fam->derivative(r.probe, third)) > 0.0;
    for (const auto& s : r.series) {
      const std::string st = tag + " C" + std::to_string(s.k);
      if (curved && opt.scheme == FdScheme::centered) {
        checks.push_back(check(st + " rate", s.fit.rate, 1.8, false));
        checks.push_back(check(st + " rate", s.fit.rate, 2.2, true));
      } else if (curved) {
        checks.push_back(check(st + " rate", s.fit.rate, 0.9, false));
      } else {
        checks.push_back(check(st + " exact-quotient error",
                               *std::max_element(s.errors.begin(), s.errors.end()), 1e-8));
      }
    }
    comm.push_back(smoothness_json(r));
  }
  Json sm = Json::array();
  for (const auto& r : smooth) sm.push_back(smoothness_json(r));
  report["result"] = {{"samples", samples.size()},
                      {"max_exactness_residual", worst_exact},
                      {"commutation", comm},
                      {"smoothness", sm}};
  finish_checks(report, std::move(checks));
  return ok;
}

int cmd_spectral_compare(const RunConfig& c, Json& report) {
  oracle::FlatManifold manifold;
  if (c.manifold == "t1") manifold = oracle::FlatManifold::circle;
  else if (c.manifold == "t2") manifold = oracle::FlatManifold::torus;
  else throw Error(ErrorCode::parameter, "--manifold must be t1 or t2");
  const oracle::SpectralForm form = oracle::registry_form(c.form);
  if (form.manifold() != manifold)
    throw Error(ErrorCode::parameter, "form '" + c.form + "' does not live on " + c.manifold);
  const auto r = oracle::convergence_sweep(form, c.form, c.resolutions, parse_scheme(c.metric));
  Json series = Json::array();
  for (const auto& s : r.series) {
    Json entries = Json::array();
    for (const auto& e : s.entries)
      entries.push_back({{"resolution", e.resolution}, {"mesh_size", e.mesh_size}, {"error", e.error}});
    series.push_back({{"quantity", s.quantity}, {"entries", entries}, {"rate", s.rate},
                      {"fit_residual", s.fit_residual}, {"rate_valid", s.rate_valid}});
  }
  report["result"] = {{"form", r.form_name}, {"series", series}};
  Json checks = Json::array();
  for (const auto& s : r.series)
    if (s.rate_valid) checks.push_back(check(s.quantity + " rate", s.rate, 0.9, false));
  finish_checks(report, std::move(checks));
  return ok;
}

int cmd_make_cochain(const RunConfig& c, Json& report) {
  const ComplexPtr complex = load_mesh(c.mesh);
  Cochain out;
  if (c.kind == "oracle") {
    const oracle::SpectralForm form = oracle::registry_form(c.form);
    out = oracle::sample_to_cochain(form, *complex);
  } else {
    const int p = c.degree < 0 ? 0 : c.degree;
    if (c.kind == "random") {
      out = random_cochain(*complex, p, c.seed);
    } else {
      const HodgePtr sys = load_system(c, complex);
      const MetricStructure& m = sys->metric();
      if (c.kind == "exact" || c.kind == "coexact") {
        if (p < 1 && c.kind == "exact") throw Error(ErrorCode::degree, "exact cochains need degree >= 1");
        if (p >= sys->dimension() && c.kind == "coexact")
          throw Error(ErrorCode::degree, "coexact cochains need degree < n");
        if (c.kind == "exact")
          out = Cochain(p, m.d(p - 1) * random_cochain(*complex, p - 1, c.seed).values(), complex->id());
        else
          out = Cochain(p, apply_delta(m, p + 1, random_cochain(*complex, p + 1, c.seed).values()),
                        complex->id());
      } else if (c.kind == "harmonic") {
        const auto basis = harmonic_basis(*sys, p);
        if (c.index < 0 || c.index >= static_cast<int>(basis.size()))
          throw Error(ErrorCode::parameter, "harmonic index " + std::to_string(c.index) +
                                                " out of range (dimension " +
                                                std::to_string(basis.size()) + ")");
        out = basis[static_cast<std::size_t>(c.index)];
      } else {
        throw Error(ErrorCode::parameter, "--kind must be random, exact, coexact, harmonic or oracle");
      }
    }
  }
  report = cochain_json(out);  // plain exchange format
  return ok;
}

int cmd_mesh_export(const RunConfig& c, Json& report) {
  const ComplexPtr complex = load_mesh(c.mesh);
  io::write_mesh(c.path, *complex);
  report["result"] = {{"path", c.path}, {"complex_id", complex->id()}, {"dimension", complex->dimension()}};
  return ok;
}

int cmd_corpus_test(const RunConfig& c, Json& report) {
  acceptance::SuiteConfig sc;
  sc.seed = c.seed;
  sc.check_determinism = !c.skip_determinism;
  const auto result = acceptance::run_suite(sc);
  Json checks = Json::array();
  for (const auto& cr : result.criteria)
    checks.push_back({{"name", "criterion " + std::to_string(cr.id) + " " + cr.title}, {"pass", cr.pass}});
  report["all_pass"] = result.pass;
  report["checks"] = std::move(checks);
  report["result"] = acceptance::to_json(result);
  return result.pass ? ok : domain_failure;
}

void emit(const RunConfig& c, const Json& report, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (c.output.empty() || c.output == "-") {
    out << text;
    return;
  }
  std::ofstream f(c.output, std::ios::binary);
  if (!f) throw Error(ErrorCode::parameter, "cannot write output file '" + c.output + "'");
  f << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Discrete Hodge decomposition, Green operator and primitive d^-1 on simplicial meshes",
               "hodgekit"};
  app.set_version_flag("--version", HODGEKIT_VERSION);
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--metric", c.metric, "whitney or lumped")->check(CLI::IsMember({"whitney", "lumped"}));
    sub->add_option("--solver-tol", c.solver_tolerance, "relative residual target of the mixed solves")
        ->check(CLI::PositiveNumber);
    sub->add_option("--rank-cutoff", c.rank_cutoff, "harmonic eigenvalue cutoff relative to lambda_max")
        ->check(CLI::PositiveNumber);
    sub->add_option("--exactness-tol", c.exactness_tolerance, "tolerance of the exactness test")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("-o,--output", c.output, "write the JSON report here instead of stdout");
  };
  const char* mesh_help = "mesh file (.off or line graph) or corpus:<name>";

  std::map<CLI::App*, std::function<int(const RunConfig&, Json&)>> handlers;

  auto* dec = app.add_subcommand("decompose", "Hodge decomposition of a cochain");
  dec->add_option("mesh", c.mesh, mesh_help)->required();
  dec->add_option("cochain", c.cochain, "cochain JSON")->required();
  dec->add_option("--degree", c.degree, "expected cochain degree")->check(CLI::NonNegativeNumber);
  common(dec);
  handlers[dec] = cmd_decompose;

  auto* prim = app.add_subcommand("primitive", "coexact primitive d^-1 w = delta G w of an exact cochain");
  prim->add_option("mesh", c.mesh, mesh_help)->required();
  prim->add_option("cochain", c.cochain, "cochain JSON")->required();
  common(prim);
  handlers[prim] = cmd_primitive;

  auto* nrm = app.add_subcommand("norms", "discrete Sobolev and C^k norms of a cochain");
  nrm->add_option("mesh", c.mesh, mesh_help)->required();
  nrm->add_option("cochain", c.cochain, "cochain JSON")->required();
  nrm->add_option("--s", c.s, "Sobolev order");
  nrm->add_option("--k", c.k, "C^k order");
  common(nrm);
  handlers[nrm] = cmd_norms;

  auto* gn = app.add_subcommand("green-norm", "randomized estimate of ||G||: H^{s-2} -> H^s");
  gn->add_option("mesh", c.mesh, mesh_help)->required();
  gn->add_option("--degree", c.degree, "form degree")->check(CLI::NonNegativeNumber);
  gn->add_option("--s", c.s, "Sobolev order (>= 2)");
  gn->add_option("--trials", c.trials, "number of random cochains");
  common(gn);
  handlers[gn] = cmd_green_norm;

  auto* fv = app.add_subcommand("family-verify", "difference-quotient checks for d^-1 of a family");
  fv->add_option("mesh", c.mesh, mesh_help)->required();
  fv->add_option("--family", c.family, "registry family")->required();
  fv->add_option("--t0", c.t0, "grid start");
  fv->add_option("--t1", c.t1, "grid end");
  fv->add_option("--steps", c.steps, "grid points per direction");
  fv->add_option("--scheme", c.scheme, "forward or centered")->check(CLI::IsMember({"forward", "centered"}));
  fv->add_option("--kmax", c.kmax, "largest C^k proxy order");
  fv->add_option("--rmax", c.rmax, "largest t-derivative order in the smoothness report");
  fv->add_option("--degree", c.degree, "form degree (default 1)");
  common(fv);
  handlers[fv] = cmd_family_verify;

  auto* sc = app.add_subcommand("spectral-compare", "DEC against the Fourier oracle on T1/T2");
  sc->add_option("--manifold", c.manifold, "t1 or t2")->check(CLI::IsMember({"t1", "t2"}));
  sc->add_option("--resolutions", c.resolutions, "comma separated mesh resolutions")->delimiter(',');
  sc->add_option("--form", c.form, "oracle registry form")->required();
  common(sc);
  handlers[sc] = cmd_spectral_compare;

  auto* ct = app.add_subcommand("corpus-test", "run the acceptance suite on the corpus");
  ct->add_flag("--skip-determinism", c.skip_determinism, "do not re-run the suite to compare output");
  common(ct);
  handlers[ct] = cmd_corpus_test;

  auto* mk = app.add_subcommand("make-cochain", "write a cochain in the JSON exchange format");
  mk->add_option("mesh", c.mesh, mesh_help)->required();
  mk->add_option("--kind", c.kind, "random, exact, coexact, harmonic or oracle");
  mk->add_option("--degree", c.degree, "degree");
  mk->add_option("--form", c.form, "oracle registry form (kind oracle)");
  mk->add_option("--index", c.index, "harmonic basis index (kind harmonic)");
  common(mk);
  handlers[mk] = cmd_make_cochain;

  auto* me = app.add_subcommand("mesh-export", "write a mesh (e.g. a corpus mesh) to a file");
  me->add_option("mesh", c.mesh, mesh_help)->required();
  me->add_option("path", c.path, "output path (.off or line graph)")->required();
  common(me);
  handlers[me] = cmd_mesh_export;

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return usage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  c.command = chosen->get_name();
  Json report = envelope(c);
  int code = ok;
  try {
    code = handlers.at(chosen)(c, report);
  } catch (const Error& e) {
    report = envelope(c);
    report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    code = domain_failure;
  } catch (const std::exception& e) {
    report = envelope(c);
    report["error"] = {{"code", "internal_error"}, {"message", e.what()}};
    code = domain_failure;
  }
  try {
    emit(c, report, out);
  } catch (const Error& e) {
    err << "hodgekit: " << e.what() << "\n";
    return domain_failure;
  }
  return code;
}

}  // namespace hodgekit::cli
