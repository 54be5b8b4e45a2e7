#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Core>

#include "hodgekit/errors.hpp"
#include "hodgekit/family.hpp"

namespace hodgekit {

namespace {

double bump(double x) {
  const double u = (x - 0.5) / 0.4;
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double g(double x) { return 4.0 * (x - 0.4) * bump(x); }

struct TxFunction {
  std::function<double(double, double)> f;
  std::function<double(double, double)> ft;  // empty when not available
  // sup |f_tt| over t for fixed x, as a multiple of a spatial profile
  std::function<double(double)> ftt_profile;
  bool quadratic_in_t = false;
};

TxFunction lookup(const std::string& name) {
  if (name == "t_g")
    return {[](double t, double x) { return t * g(x); }, [](double, double x) { return g(x); },
            [](double) { return 0.0; }, false};
  if (name == "t2_g")
    return {[](double t, double x) { return t * t * g(x); },
            [](double t, double x) { return 2.0 * t * g(x); },
            [](double x) { return 2.0 * std::abs(g(x)); }, true};
  if (name == "sin_bump")
    return {[](double t, double x) { return std::sin(t) * bump(x); },
            [](double t, double x) { return std::cos(t) * bump(x); },
            [](double x) { return bump(x); }, false};
  if (name == "sampled_bump")
    return {[](double t, double x) { return std::exp(-t) * bump(x); }, {}, {}, false};
  throw Error(ErrorCode::unknown_registry, "unknown (t, x) function '" + name + "'");
}

// Forward difference of order a along rows (t) or columns (x), divided by step^a.
Eigen::MatrixXd forward_difference(const Eigen::MatrixXd& f, int order, bool along_t, double h) {
  Eigen::MatrixXd v = f;
  for (int i = 0; i < order; ++i) {
    if (along_t)
      v = (v.bottomRows(v.rows() - 1) - v.topRows(v.rows() - 1)) / h;
    else
      v = (v.rightCols(v.cols() - 1) - v.leftCols(v.cols() - 1)) / h;
  }
  return v;
}

}  // namespace

std::vector<std::string> tx_function_names() { return {"t_g", "t2_g", "sin_bump", "sampled_bump"}; }

MixedPartialsReport verify_mixed_partials(const MixedPartialsSpec& spec) {
  const TxFunction fn = lookup(spec.function);
  if (!fn.ft)
    throw Error(ErrorCode::capability,
                "function '" + spec.function + "' provides no analytic t-derivative");
  for (const GridAxis* a : {&spec.t, &spec.x})
    if (a->points < 2 || !(a->stop > a->start))
      throw Error(ErrorCode::grid, "grid axes need start < stop and at least 2 points");
  const int nt = spec.t.points, nx = spec.x.points;
  const double ht = spec.t.step(), hx = spec.x.step();

  Eigen::MatrixXd f(nt, nx), ft(nt, nx);
  Eigen::VectorXd profile(nx);
  for (int j = 0; j < nx; ++j) profile[j] = fn.ftt_profile(spec.x.at(j));
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nx; ++j) {
      f(i, j) = fn.f(spec.t.at(i), spec.x.at(j));
      ft(i, j) = fn.ft(spec.t.at(i), spec.x.at(j));
    }
  const double fmax = f.cwiseAbs().maxCoeff();

  MixedPartialsReport rep;
  rep.function = spec.function;

  for (const Order& o : spec.orders) {
    if (o[0] < 0 || o[1] < 0 || o[0] >= nt || o[1] >= nx)
      throw Error(ErrorCode::grid, "difference order does not fit the grid");
    const Eigen::MatrixXd tx =
        forward_difference(forward_difference(f, o[0], true, ht), o[1], false, hx);
    const Eigen::MatrixXd xt =
        forward_difference(forward_difference(f, o[1], false, hx), o[0], true, ht);
    // Rounding scale of the stencil: sum of |weights| times sup |f|.
    const double scale = std::pow(2.0 / ht, o[0]) * std::pow(2.0 / hx, o[1]) * fmax;
    const double diff = (tx - xt).cwiseAbs().maxCoeff();
    MixedOrderCheck c{o, scale > 0.0 ? diff / scale : diff};
    rep.max_commutation = std::max(rep.max_commutation, c.relative_difference);
    rep.commutation.push_back(c);
  }

  const double c2 = profile.maxCoeff();
  double gap = 0.0;
  for (int s : spec.strides) {
    if (s < 1 || s >= nt) throw Error(ErrorCode::grid, "stride does not fit the t grid");
    const double h = s * ht;
    const Eigen::MatrixXd rem =
        f.bottomRows(nt - s) - f.topRows(nt - s) - h * ft.topRows(nt - s);
    TaylorCheck tc;
    tc.h = h;
    tc.measured = rem.cwiseAbs().maxCoeff();
    tc.predicted = 0.5 * h * h * c2;
    if (tc.predicted > 0.0) {
      tc.ratio = tc.measured / tc.predicted;
      rep.max_taylor_ratio = std::max(rep.max_taylor_ratio, *tc.ratio);
    }
    if (fn.quadratic_in_t) gap = std::max(gap, std::abs(tc.measured - h * h * 0.5 * c2));
    rep.taylor.push_back(tc);

    ContinuityCheck cc;
    cc.h = h;
    cc.sup_difference = (f.bottomRows(nt - s) - f.topRows(nt - s)).cwiseAbs().maxCoeff();
    rep.continuity.push_back(cc);
  }
  if (fn.quadratic_in_t) rep.exact_remainder_gap = gap;

  std::sort(rep.continuity.begin(), rep.continuity.end(),
            [](const ContinuityCheck& a, const ContinuityCheck& b) { return a.h > b.h; });
  rep.continuity_shrinks = true;
  for (std::size_t i = 1; i < rep.continuity.size(); ++i) {
    const double prev = rep.continuity[i - 1].sup_difference;
    const double cur = rep.continuity[i].sup_difference;
    if (!(cur < prev || (cur == 0.0 && prev == 0.0))) rep.continuity_shrinks = false;
  }
  return rep;
}

}  // namespace hodgekit
