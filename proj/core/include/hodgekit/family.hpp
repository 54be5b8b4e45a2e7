#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hodgekit/complex.hpp"
#include "hodgekit/hodge.hpp"
#include "hodgekit/rate_fit.hpp"

namespace hodgekit {

using Parameter = std::array<double, 2>;  // second entry unused when l = 1
using Order = std::array<int, 2>;         // derivative order per direction
using GridIndex = std::array<int, 2>;

enum class FdScheme { forward, centered };
std::string_view to_string(FdScheme scheme) noexcept;
/// "forward" or "centered"; Error(parameter) otherwise.
FdScheme parse_fd_scheme(std::string_view name);

/// Uniform grid start, start + step, ..., stop with `points` points.
struct GridAxis {
  double start = 0.0;
  double stop = 1.0;
  int points = 41;

  double step() const;
  double at(int i) const;
};

struct FamilySpec {
  std::string generator;       // registry name
  int degree = 1;              // degree of omega(t), >= 1
  std::vector<GridAxis> axes;  // one per parameter direction (l = 1 or 2)
  std::uint64_t seed = 7;      // seeds the random base cochains
};

/// Registry names. Every entry produces exact cochains; all but
/// "sin-sampled" also supply analytic t-derivatives.
std::vector<std::string> family_names();
/// Parameter dimension of a registry entry; Error(unknown_registry).
int family_parameter_dimension(const std::string& name);

/// omega(t) = sum_j c_j(t) omega_j with closed-form coefficients c_j and exact
/// base cochains omega_j = d alpha_j (unit M-norm).
class Family {
 public:
  /// Error(unknown_registry), Error(parameter) for axis/parameter-dimension
  /// mismatch or bad grids, Error(degree) unless 1 <= degree <= n.
  static std::shared_ptr<const Family> create(const FamilySpec& spec, HodgePtr system);

  const FamilySpec& spec() const noexcept { return spec_; }
  const HodgeSystem& system() const noexcept { return *system_; }
  int parameter_dimension() const noexcept { return static_cast<int>(spec_.axes.size()); }
  bool has_derivatives() const noexcept { return analytic_; }

  Parameter point(GridIndex index) const;
  Cochain value(const Parameter& t) const;
  /// Analytic partial derivative; Error(capability) for families without them.
  Cochain derivative(const Parameter& t, Order order) const;
  /// Upper bound on ||d^2 omega / dt_i^2||_M over all t.
  double second_derivative_bound(int direction) const;

 private:
  struct Term {
    int base = 0;
    // factor kind per direction: 0 one, 1 t, 2 t^2, 3 sin t, 4 cos t
    std::array<int, 2> factor{0, 0};
    double scale = 1.0;
  };
  double coefficient(const Term& term, const Parameter& t, Order order) const;
  Cochain combine(const Parameter& t, Order order) const;

  FamilySpec spec_;
  HodgePtr system_;
  bool analytic_ = true;
  std::vector<Eigen::VectorXd> bases_;
  std::vector<Term> terms_;
};

using FamilyPtr = std::shared_ptr<const Family>;

struct FamilySample {
  GridIndex index{0, 0};
  Parameter t{0.0, 0.0};
  Cochain omega;
  ExactnessReport exactness;
};

/// omega at every grid point, each checked with is_exact at tolerance 1e-8.
/// Error(not_exact) naming t and both residuals if any sample fails.
std::vector<FamilySample> sample_family(const Family& family);

struct DerivativeSample {
  GridIndex index{0, 0};
  Parameter t{0.0, 0.0};
  Cochain value;
};

/// Difference quotients of sampled values in one direction with step h (a
/// multiple of the grid step), at every grid point where the stencil fits.
/// Error(grid) when h is not a positive multiple of the step or no point has
/// the neighbours the scheme needs.
std::vector<DerivativeSample> fd_derivative(const Family& family,
                                            const std::vector<FamilySample>& samples,
                                            int direction, FdScheme scheme, double h);

struct RateSeries {
  std::string quantity;  // e.g. "derivative-error", "cauchy"
  int order = 1;         // t-derivative order r
  int k = 0;             // C^k proxy order
  std::vector<double> steps;
  std::vector<double> errors;
  RateFit fit;
};

struct LinearityCheck {
  Parameter t{0.0, 0.0};
  double h = 0.0;
  double residual = 0.0;  // relative
};

struct SmoothnessReport {
  std::string family;
  FdScheme scheme = FdScheme::centered;
  int direction = 0;
  Parameter probe{0.0, 0.0};
  std::string norm = "Ck-proxy";
  std::uint64_t seed = 0;
  std::vector<LinearityCheck> linearity;
  double max_linearity_residual = 0.0;
  double max_d_commutation_residual = 0.0;  // ||d D_h(d^-1 w) - D_h w|| / ||D_h w||
  std::vector<RateSeries> series;
};

struct CommutationOptions {
  FdScheme scheme = FdScheme::centered;
  int k_max = 2;
  std::vector<int> strides = {1, 2, 4, 8};
};

/// One report per parameter direction. (a) linearity residual
/// ||G(D_h w) - D_h(G w)|| / max(both norms) at every grid point of the axis
/// line through the probe (grid midpoint) and every stride; (b) C^k-proxy
/// error of D_h(d^-1 w) against d^-1(dw/dt) at the probe, k <= k_max, with
/// fitted rates. Error(capability) without analytic derivatives, Error(grid)
/// if the largest stride does not fit around the probe.
std::vector<SmoothnessReport> verify_commutation(const Family& family,
                                                 const CommutationOptions& options = {});

/// r-th centered difference quotients of d^-1 w(t) at the probe for
/// r = 1..r_max, compared with d^-1 of the analytic r-th derivative (when
/// available) and between successive steps (Cauchy deltas), in C^k proxies
/// for k <= k_max. Error(grid) when fewer than 3 steps fit for some r.
std::vector<SmoothnessReport> smoothness_report(const Family& family, int k_max, int r_max,
                                                const std::vector<int>& strides = {1, 2, 4, 8});

// ---------------------------------------------------------------------------
// Scalar functions f(t, x) on a product grid.

/// Registry: "t_g" (t g(x)), "t2_g" (t^2 g(x)), "sin_bump" (sin t bump(x)),
/// and "sampled_bump" (no analytic t-derivative). g and bump are smooth and
/// supported in (0.1, 0.9).
std::vector<std::string> tx_function_names();

struct MixedPartialsSpec {
  std::string function = "sin_bump";
  GridAxis t{0.0, 1.0, 41};
  GridAxis x{0.0, 1.0, 41};
  std::vector<Order> orders = {{1, 1}, {2, 1}, {1, 2}};  // (a, b) = (t order, x order)
  std::vector<int> strides = {1, 2, 4, 8};
};

struct MixedOrderCheck {
  Order order{1, 1};
  double relative_difference = 0.0;  // t-then-x versus x-then-t
};

struct TaylorCheck {
  double h = 0.0;
  double measured = 0.0;   // sup_{t,x} |f(t+h,x) - f(t,x) - h f_t(t,x)|
  double predicted = 0.0;  // 0.5 h^2 sup|f_tt|
  std::optional<double> ratio;
};

struct ContinuityCheck {
  double h = 0.0;
  double sup_difference = 0.0;  // sup_{t,x} |f(t+h,x) - f(t,x)|
};

struct MixedPartialsReport {
  std::string function;
  std::vector<MixedOrderCheck> commutation;
  double max_commutation = 0.0;
  std::vector<TaylorCheck> taylor;
  double max_taylor_ratio = 0.0;
  /// For t^2 g only: max over h of |measured - h^2 sup|g||.
  std::optional<double> exact_remainder_gap;
  std::vector<ContinuityCheck> continuity;
  bool continuity_shrinks = false;
};

/// Error(unknown_registry), Error(capability) without analytic f_t,
/// Error(grid) when an order or stride does not fit the grid.
MixedPartialsReport verify_mixed_partials(const MixedPartialsSpec& spec);

}  // namespace hodgekit
