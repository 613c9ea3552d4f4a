#pragma once

// Quantum operators on discretized charts and the commutator identities built
// from geometric momentum, the Hamiltonian with geometric potential and the
// dummy factors e^{+-q}.
//
// Every chart axis is a uniform box [lo, hi) differentiated spectrally. Axes
// that are not a full natural period (graph curves, torus theta bands, sphere
// patches, lines) are only exact for test functions that vanish smoothly at
// the box edges, so bases on those charts carry bump windows.
//
// Sign convention: the chart stores the shape-operator mean curvature M of the
// surface module (grad f orientation). Geometric momentum uses -M, which makes
// p_i symmetric under the chart measure; on the unit circle with outward n
// this is the familiar M = -1/2.

#include "gcfl/q_factor.hpp"
#include "gcfl/surface.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gcfl {

using Complex = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

enum class ChartKind { closed_curve, line, graph_curve, torus, sphere_patch };
std::string_view to_string(ChartKind kind);

struct ChartAxis {
  std::string name;
  int n = 0;
  double lo = 0.0, hi = 0.0;
  bool full_period = false;  // the box covers a natural period of the coordinate

  double length() const { return hi - lo; }
  double step() const { return length() / n; }
  double node(int k) const { return lo + k * step(); }
};

// Node k of a 2-axis chart is (i0, i1) with k = i0 * n1 + i1.
struct GridChart {
  ChartKind kind = ChartKind::closed_curve;
  std::vector<ChartAxis> axes;
  SurfaceSpec surface;
  double hbar = 1.0, mu = 1.0;

  Eigen::MatrixXd coords;                      // N x dims
  Eigen::MatrixX3d position;                   // N x 3
  std::array<Eigen::MatrixX3d, 2> tangent;     // X_a = dx/du^a
  std::array<RVec, 3> inverse_metric;          // g^{00}, g^{01}, g^{11}
  RVec sqrt_g;
  RVec weight;                                 // sqrt(g) du dv
  Eigen::MatrixX3d normal;
  RVec mean_curvature;                         // shape-operator M
  RVec gaussian_curvature;
  bool has_curvature = false;
  bool has_metric = false;

  int dims() const { return static_cast<int>(axes.size()); }
  Eigen::Index size() const { return coords.rows(); }
  std::string describe() const;
  std::vector<int> grid_sizes() const;

  RVec coordinate(int axis) const { return coords.col(axis); }
  RVec position_component(Axis i) const { return position.col(static_cast<int>(i)); }
  RVec normal_component(Axis i) const { return normal.col(static_cast<int>(i)); }
  // n_i / R on cross-section charts: the curvature vector dt/ds = -2 M n.
  RVec curvature_vector(Axis i) const;
};
using ChartPtr = std::shared_ptr<const GridChart>;

// Unit-speed closed curve x^2 + y^2 = R^2, coordinate s in [0, 2 pi R).
ChartPtr circle_chart(double R, int n, double hbar = 1.0, double mu = 1.0);
// Straight line y = slope * x through the origin, arc length s in [-L, L).
ChartPtr line_chart(double slope, double half_length, int n, double hbar = 1.0, double mu = 1.0);
// Cross-section y = u(x) of a cylinder spec, coordinate x in [lo, hi); hbar, mu from the spec.
ChartPtr graph_chart(const SurfaceSpec& cylinder, double lo, double hi, int n);
// Torus (theta, phi); theta covers [0, 2 pi) unless a band is given.
ChartPtr torus_chart(double a, double b, int n_theta, int n_phi,
                     std::optional<std::array<double, 2>> theta_band = std::nullopt, double hbar = 1.0,
                     double mu = 1.0);
// Sphere of radius R in polar/azimuthal angles restricted to a patch.
ChartPtr sphere_patch_chart(double R, std::array<double, 2> theta, std::array<double, 2> phi, int n_theta,
                            int n_phi, double hbar = 1.0, double mu = 1.0);

struct GridWavefunction {
  ChartPtr chart;
  CVec values;
};

Complex inner(const GridWavefunction& phi, const GridWavefunction& psi);  // sum w conj(phi) psi
double norm(const GridWavefunction& psi);
double sup_norm(const CVec& v);

// d/du^axis by FFT; the Nyquist mode is dropped.
CVec spectral_derivative(const GridChart& chart, const CVec& values, int axis);

class GridOperator {
 public:
  static GridOperator identity(ChartPtr chart);
  static GridOperator multiply(ChartPtr chart, RVec field);
  static GridOperator derivative(ChartPtr chart, int axis);

  CVec apply(const CVec& values) const;
  GridWavefunction operator()(const GridWavefunction& psi) const;
  const ChartPtr& chart() const { return chart_; }

  friend GridOperator operator+(const GridOperator& a, const GridOperator& b);
  friend GridOperator operator-(const GridOperator& a, const GridOperator& b);
  friend GridOperator operator*(const GridOperator& a, const GridOperator& b);  // composition a(b(.))
  friend GridOperator operator*(Complex c, const GridOperator& a);
  friend GridOperator operator-(const GridOperator& a);

 private:
  struct Node;
  GridOperator(ChartPtr chart, std::shared_ptr<const Node> node);
  static GridOperator combine(int kind, const GridOperator& a, const GridOperator& b);

  ChartPtr chart_;
  std::shared_ptr<const Node> node_;
};

// e^{s q} as a multiplication operator.
GridOperator exp_factor(const ChartPtr& chart, const RVec& q, double s);

// -i hbar (grad_Sigma_i - M n_i)
GridOperator geometric_momentum_op(const ChartPtr& chart, Axis i);
// -(hbar^2 / 2 mu) (Laplace-Beltrami + M^2 - K)
GridOperator hamiltonian_op(const ChartPtr& chart);
GridOperator position_op(const ChartPtr& chart, Axis i);
// x p_y - y p_x
GridOperator angular_momentum_z_op(const ChartPtr& chart);

// A(B psi) - B(A psi); ValidationError on chart mismatch.
GridWavefunction commutator(const GridOperator& a, const GridOperator& b, const GridWavefunction& psi);

struct Window {
  int axis = 0;
  double lo = 0.0, hi = 0.0;
  std::string describe(const GridChart& chart) const;
};
// exp(1 - 1/(1 - t^2)) for t in (-1, 1) mapped onto [lo, hi], zero outside.
RVec window_field(const GridChart& chart, const Window& window);

struct TestFunction {
  std::string label;
  GridWavefunction psi;
};
struct Basis {
  std::string description;
  std::vector<Window> windows;
  std::vector<TestFunction> functions;
};
// e^{i k u0} (times e^{i m u1} on 2-axis charts) for |k| <= kmax, |m| <= mmax,
// wavenumbers in units of 2 pi / box length, multiplied by the windows.
Basis fourier_basis(const ChartPtr& chart, int kmax, int mmax = 0, std::vector<Window> windows = {});

struct BasisResidual {
  std::string label;
  double lhs_sup = 0.0;
  double rhs_sup = 0.0;
  double residual_sup = 0.0;
  double relative = 0.0;  // residual_sup / lhs_sup, or residual_sup when lhs_sup == 0
};

struct ConvergenceRow {
  std::vector<int> grid;
  double max_relative = 0.0;
  double max_residual = 0.0;
};

struct CommutatorReport {
  std::string identity;
  std::string component;
  std::string chart;
  std::vector<int> grid;
  std::string windows;
  std::string basis;
  std::vector<BasisResidual> residuals;
  double normalization = 0.0;  // max over the basis of sup |[p_i, H] psi|
  double max_relative = 0.0;
  double max_residual = 0.0;
  std::vector<ConvergenceRow> convergence;
};

// Compares LHS psi and RHS psi over a basis.
CommutatorReport compare_operators(std::string identity, Axis component, const GridOperator& lhs,
                                   const GridOperator& rhs, const Basis& basis);

// Repeats `run(level)` for level = 0..levels-1 (typically doubling the grid)
// and returns the finest report with the convergence table filled in.
CommutatorReport with_convergence(const std::function<CommutatorReport(int level)>& run, int levels);

enum class CylinderVariant { sandwich, three_part };
std::string_view to_string(CylinderVariant v);

// i hbar (e^{-q} C H e^{q} + e^{q} H C e^{-q}), C = n_i / R
// or i hbar (part1 + part2 + part3) / 3 with the sqrt(2)-scaled and primed-Hamiltonian parts.
GridOperator cylinder_rhs_op(const ChartPtr& chart, Axis i, const RVec& q, CylinderVariant variant);
CommutatorReport verify_cylinder_identity(const ChartPtr& chart, Axis i, const RVec& q, CylinderVariant variant,
                                          const Basis& basis);

// i hbar (-(A L_z^2 + L_z^2 A) / 2 + (pt1 + pt2 + pt3) / 3), A = n_i b^3 K^3 / (mu sin^2 theta).
GridOperator torus_rhs_op(const ChartPtr& chart, Axis i, const RVec& q);
CommutatorReport verify_torus_identity(const ChartPtr& chart, Axis i, const RVec& q, const Basis& basis);

// -i hbar sum_j (e^{-q_j} Q_ji p_j^2 e^{q_j} + e^{q_j} p_j^2 Q_ji e^{-q_j}) / 2,
// Q_ji = n_i {bracket_j} / (mu |grad f|).
GridOperator general_symmetrized_rhs_op(const ChartPtr& chart, Axis i, const std::array<RVec, 3>& q);
CommutatorReport verify_general_symmetrized(const ChartPtr& chart, Axis i, const std::array<RVec, 3>& q,
                                            const Basis& basis);

// max over basis pairs of |<phi, A psi> - <A phi, psi>| / (|phi| |psi| |A|_basis).
double hermiticity_defect(const GridOperator& op, const Basis& basis);

// q solved on the chart nodes of `axis` (request domain defaults to the axis box) and broadcast.
RVec q_on_chart(const ChartPtr& chart, int axis, QFactorRequest request);
// Samples a function of the node coordinates.
RVec field_on_chart(const GridChart& chart, const std::function<double(const Eigen::VectorXd&)>& f);

}  // namespace gcfl
