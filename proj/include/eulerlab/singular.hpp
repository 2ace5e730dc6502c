#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eulerlab/grid.hpp"
#include "eulerlab/mask.hpp"

namespace eulerlab {

enum class SubdomainKind { All, Ball, HalfBall, Cap };

/// Region intersected with Omega to form the domain of a discrete operator.
struct Subdomain {
  SubdomainKind kind = SubdomainKind::All;
  Vec2 center{};
  double radius = 0.0;
  Vec2 direction{1.0, 0.0};  ///< half-ball axis or cap normal (unit)
  double offset = 0.0;       ///< cap: x . direction > offset

  static Subdomain all() { return {}; }
  static Subdomain ball(Vec2 c, double r) { return {SubdomainKind::Ball, c, r, {1.0, 0.0}, 0.0}; }
  /// B(c, r) intersected with {(x - c) . axis > 0}.
  static Subdomain half_ball(Vec2 c, double r, Vec2 axis);
  static Subdomain cap(Vec2 dir, double lambda);
  bool contains(Vec2 p) const;
};

/// Unknowns of the discrete problem: inside nodes with d >= h/2 that lie in the
/// subdomain. Nodes closer than h/2 to the boundary carry the Dirichlet condition.
std::vector<std::size_t> subdomain_nodes(const DomainMask& mask, const Subdomain& sub);

struct SingularPotential {
  ScalarField c;
  double bound = 0.0;  ///< max |c| d over the inside nodes
};

SingularPotential make_potential(ScalarField c, const DomainMask& mask);
/// c(x) = fn(d(x)) on inside nodes, 0 elsewhere.
SingularPotential potential_from_distance(const DomainMask& mask, const std::function<double(double)>& fn);

using SparseMatrix = Eigen::SparseMatrix<double>;

/// -lap_h + c on a node set, Dirichlet (eliminated) outside it.
struct DiscreteOperator {
  Grid2 grid;
  std::vector<std::size_t> nodes;  ///< unknown -> grid node
  std::vector<int> unknown;        ///< grid node -> unknown, -1 outside
  std::vector<double> c;           ///< potential per unknown
  SparseMatrix matrix;

  std::size_t size() const { return nodes.size(); }
  ScalarField to_field(const Eigen::VectorXd& x) const;
  Eigen::VectorXd from_field(const ScalarField& f) const;
};

/// Throws SingularNode for a node that is not inside Omega, has d = 0, or has a
/// non-finite potential; InvalidArgument for mismatched grids or an empty set.
DiscreteOperator assemble(const DomainMask& mask, const std::vector<std::size_t>& nodes, const SingularPotential& c);
DiscreteOperator assemble(const DomainMask& mask, const Subdomain& sub, const SingularPotential& c);

struct EigenOptions {
  double residual_tol = 1e-8;  ///< ||A x - lambda x|| / (||A||_inf ||x||)
  int max_iter = 500;
};

struct SymmetricEigenpair {
  double lambda = 0.0;
  Eigen::VectorXd x;  ///< unit Euclidean norm, positive sum
  double residual = 0.0;
  int iterations = 0;
  int factorizations = 0;
};

/// Smallest eigenpair of a symmetric matrix by shifted inverse iteration. The
/// shift starts below the Gershgorin floor and moves up to the Rayleigh quotient
/// minus twice the residual whenever an LDL^T inertia count certifies it is
/// still below the wanted eigenvalue. With `deflate`, iterates orthogonally to it
/// (and the certificate allows one eigenvalue below the shift).
SymmetricEigenpair smallest_eigenpair(const SparseMatrix& a, const EigenOptions& opt = {},
                                      const Eigen::VectorXd* deflate = nullptr);

struct Eigenpair {
  double lambda = 0.0;
  ScalarField phi;  ///< unit discrete L2 norm (h^2 sum phi^2 = 1), positive mean
  double residual = 0.0;
  int iterations = 0;
};

Eigenpair principal_eigenpair(const DiscreteOperator& op, const EigenOptions& opt = {});
/// Second eigenvalue by deflation against the principal eigenvector.
Eigenpair second_eigenpair(const DiscreteOperator& op, const Eigenpair& first, const EigenOptions& opt = {});
/// Q(psi) / ||psi||^2 with the discrete form.
double rayleigh_quotient(const DiscreteOperator& op, const ScalarField& psi);

struct HardyResult {
  double ratio = 0.0;
  std::size_t nodes = 0;
  double residual = 0.0;
};

/// min over grid functions on the subdomain of sum |grad psi|^2 / sum psi^2 / d^2,
/// the smallest eigenvalue of diag(d) (-lap_h) diag(d).
HardyResult hardy_ratio(const DomainMask& mask, const Subdomain& sub);

struct PositivityResult {
  double radius = 0.0;
  double lambda1 = 0.0;     ///< certificate: lambda_1 at the returned radius
  bool positive = true;     ///< false when lambda_1 <= 0 already at r = 4h
  int evaluations = 0;
};

/// Largest r in [4h, r_max] (bisection to h/2) with lambda_1(B(q, r) cap Omega) > 0.
PositivityResult positivity_radius(const DomainMask& mask, const SingularPotential& c, Vec2 q,
                                   std::optional<double> r_max = std::nullopt);

enum class MaxPrincipleKind { HypothesesHold, HypothesesFail };

struct MaxPrincipleVerdict {
  MaxPrincipleKind kind = MaxPrincipleKind::HypothesesFail;
  double lambda1 = 0.0;
  double min_L_omega = 0.0;     ///< min over unknowns of (L omega) / scale
  double min_boundary = 0.0;    ///< min of omega on the Dirichlet neighbours
  double min_omega = 0.0;       ///< min of omega over the unknowns
  double scale = 0.0;           ///< (1 + max |c|) max |omega|
  Vec2 violation{};
  std::string reason;
};

/// Checks lambda_1 > 0, (L omega)(x) >= -tol scale on the unknowns and
/// omega >= -tol max|omega| on the Dirichlet neighbours, using the actual values
/// of omega at those neighbours in the stencil.
MaxPrincipleVerdict weak_max_principle_check(const DiscreteOperator& op, const ScalarField& omega, double tol,
                                             std::optional<double> lambda1 = std::nullopt);

/// Solves op x = rhs (sparse LDL^T); used to build discrete supersolutions.
ScalarField solve(const DiscreteOperator& op, const ScalarField& rhs);

/// Radial comparison function for boundary-point estimates:
/// rho(t) = (r - t) + a(t) (r - t)^2 / 2, a(t) = (m - 1)/t + 2C.
struct ComparisonProfile {
  int m = 2;
  double C = 1.0;
  double r = 1.0;
  double r0 = 0.0;

  double a(double t) const { return (m - 1) / t + 2.0 * C; }
  double rho(double t) const;
  double drho(double t) const;
  double d2rho(double t) const;
  /// rho(t) / (r - t) = 1 + a(t)(r - t)/2, exact at t = r.
  double rho_over_gap(double t) const;
  /// Induced coefficient (rho'' + (m-1) rho'/t) / (rho / (r - t)).
  double induced_c(double t) const;
  /// -rho'' - (m-1) rho'/t + C rho/(r - t).
  double residual(double t) const;
};

/// Builds the profile and finds r0 by a 10^4-point scan down from r followed by
/// bisection. Throws InvalidArgument for bad parameters, ProfileFailure if the
/// induced coefficient is not above C right next to r.
ComparisonProfile comparison_profile(int m, double C, double r);

/// psi_1(x) = rho(|x|) or psi_2(x) = x_1 rho(|x|) in R^N with closed-form derivatives.
class PsiField {
 public:
  /// which = 1 needs profile.m == N, which = 2 needs profile.m == N + 2.
  PsiField(const ComparisonProfile& profile, int which, int dimension);

  int which() const { return which_; }
  int dimension() const { return n_; }
  const ComparisonProfile& profile() const { return p_; }

  /// Checked evaluators; throw DomainError outside r0 <= |x| <= r (and x_1 >= 0 for psi_2).
  double value(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;
  double laplacian(std::span<const double> x) const;
  Eigen::MatrixXd hessian(std::span<const double> x) const;
  /// -lap psi + (C / (r - |x|)) psi, from closed forms (finite at |x| = r).
  double residual(std::span<const double> x) const;
  /// Closed-form value without the domain check (for finite-difference probes).
  double extended_value(std::span<const double> x) const;

  double value(Vec2 x) const { return value(std::span<const double>(&x.x, 2)); }

 private:
  void check_domain(std::span<const double> x) const;
  ComparisonProfile p_;
  int which_;
  int n_;
};

/// d^2 psi_2 / d eta^2 at a corner point p (p_1 = 0, |p| = r) from the Hessian.
double corner_second_derivative(const PsiField& psi2, std::span<const double> p, std::span<const double> eta);

enum class CheckVerdict { StrictlyNegative, StrictlyPositive, IdenticallyZero, Inconclusive, HypothesesFail };

std::string to_string(CheckVerdict v);

struct BoundaryCheck {
  CheckVerdict verdict = CheckVerdict::Inconclusive;
  double derivative = 0.0;  ///< normal derivative (Hopf) or second derivative along eta (corner)
  double max_abs = 0.0;     ///< max |omega| over the ball nodes
  double value_at_p = 0.0;
  double gradient_norm = 0.0;
  std::string reason;
};

struct CheckTolerances {
  double value = 1e-10;       ///< |omega| below this counts as zero
  double derivative = -1.0;   ///< derivative threshold; <= 0 selects 10 h max|omega|
};

/// Hopf check at p for the ball B(center, r) tangent to the boundary at p:
/// 3-point one-sided derivative along the inward radius.
BoundaryCheck hopf_check(const ScalarField& omega, const DomainMask& mask, Vec2 center, double r, Vec2 p,
                         CheckTolerances tol = {});

/// Corner check for the half ball B(center, r) cap {(x - center) . axis > 0}
/// at p with (p - center) . axis = 0, |p - center| = r. The second derivative
/// along eta comes from a least-squares cubic fit of omega on the grid
/// nodes of the half ball within 6h of p. Throws InvalidArgument unless
/// eta . axis > 0 and (p - center) . eta < 0.
BoundaryCheck corner_check(const ScalarField& omega, const DomainMask& mask, Vec2 center, double r, Vec2 axis,
                           Vec2 p, Vec2 eta, CheckTolerances tol = {});

/// Writes the matrix as "row col value" lines (0-based, all stored entries).
std::string export_coordinate(const SparseMatrix& a);

}  // namespace eulerlab
