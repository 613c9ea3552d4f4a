#include "gcfl/operator_lab.hpp"

#include "gcfl/classical.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gcfl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI(0.0, 1.0);

Eigen::Vector3d row3(const Eigen::MatrixX3d& m, Eigen::Index k) { return m.row(k).transpose(); }

// Builds metric, measure and curvature columns from position and tangents.
void finish_chart(GridChart& c) {
  const Eigen::Index N = c.size();
  const int d = c.dims();
  for (auto& v : c.inverse_metric) v = RVec::Zero(N);
  c.sqrt_g.resize(N);
  c.weight.resize(N);
  c.normal.resize(N, 3);
  c.mean_curvature.resize(N);
  c.gaussian_curvature.resize(N);
  double cell = 1.0;
  for (const auto& ax : c.axes) cell *= ax.step();
  for (Eigen::Index k = 0; k < N; ++k) {
    if (d == 1) {
      const double g = c.tangent[0].row(k).squaredNorm();
      c.inverse_metric[0](k) = 1.0 / g;
      c.sqrt_g(k) = std::sqrt(g);
    } else {
      const Eigen::Vector3d X0 = row3(c.tangent[0], k), X1 = row3(c.tangent[1], k);
      const double g00 = X0.dot(X0), g01 = X0.dot(X1), g11 = X1.dot(X1);
      const double det = g00 * g11 - g01 * g01;
      if (!(det > 0.0)) throw SingularityError("degenerate chart metric", static_cast<double>(k));
      c.inverse_metric[0](k) = g11 / det;
      c.inverse_metric[1](k) = -g01 / det;
      c.inverse_metric[2](k) = g00 / det;
      c.sqrt_g(k) = std::sqrt(det);
    }
    c.weight(k) = c.sqrt_g(k) * cell;
    const auto cb = curvatures(c.surface, row3(c.position, k));
    c.normal.row(k) = cb.n.transpose();
    c.mean_curvature(k) = cb.M;
    c.gaussian_curvature(k) = cb.K;
  }
  if (!(c.weight.minCoeff() > 0.0)) throw ValidationError("chart measure weights must be positive");
  c.has_metric = true;
  c.has_curvature = true;
}

ChartAxis make_axis(std::string name, int n, double lo, double hi, bool full_period) {
  if (n < 4) throw ValidationError("chart axis '" + name + "' needs at least 4 nodes");
  if (!(hi > lo)) throw ValidationError("chart axis '" + name + "' must have hi > lo");
  return {std::move(name), n, lo, hi, full_period};
}

void fill_coords(GridChart& c) {
  if (c.dims() == 1) {
    const auto& a = c.axes[0];
    c.coords.resize(a.n, 1);
    for (int k = 0; k < a.n; ++k) c.coords(k, 0) = a.node(k);
  } else {
    const auto &a = c.axes[0], &b = c.axes[1];
    c.coords.resize(static_cast<Eigen::Index>(a.n) * b.n, 2);
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < b.n; ++j) {
        c.coords(i * b.n + j, 0) = a.node(i);
        c.coords(i * b.n + j, 1) = b.node(j);
      }
  }
  const Eigen::Index N = c.size();
  c.position.resize(N, 3);
  c.tangent[0] = Eigen::MatrixX3d::Zero(N, 3);
  c.tangent[1] = Eigen::MatrixX3d::Zero(N, 3);
}

void check_physics(double hbar, double mu) {
  if (!(hbar > 0.0) || !(mu > 0.0)) throw ValidationError("hbar and mu must be positive");
}

std::string fmt(double v) { return format_number(v); }

}  // namespace

std::string_view to_string(ChartKind kind) {
  switch (kind) {
    case ChartKind::closed_curve: return "closed-curve";
    case ChartKind::line: return "line";
    case ChartKind::graph_curve: return "graph-curve";
    case ChartKind::torus: return "torus";
    case ChartKind::sphere_patch: return "sphere-patch";
  }
  return "unknown";
}

std::string GridChart::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (!surface.expression_text.empty()) os << " f=" << surface.expression_text;
  if (surface.torus) os << " a=" << fmt(surface.torus->a) << " b=" << fmt(surface.torus->b);
  for (const auto& a : axes) os << ' ' << a.name << '[' << fmt(a.lo) << ',' << fmt(a.hi) << ")x" << a.n;
  return os.str();
}

std::vector<int> GridChart::grid_sizes() const {
  std::vector<int> out;
  for (const auto& a : axes) out.push_back(a.n);
  return out;
}

RVec GridChart::curvature_vector(Axis i) const {
  if (!has_curvature) throw ValidationError("chart carries no curvature data");
  return -2.0 * mean_curvature.cwiseProduct(normal_component(i));
}

ChartPtr circle_chart(double R, int n, double hbar, double mu) {
  if (!(R > 0.0)) throw ValidationError("circle radius must be positive");
  check_physics(hbar, mu);
  auto c = std::make_shared<GridChart>();
  c->kind = ChartKind::closed_curve;
  c->axes = {make_axis("s", n, 0.0, kTwoPi * R, true)};
  c->surface = make_implicit("x^2+y^2-" + fmt(R * R));
  c->surface.hbar = hbar;
  c->surface.mu = mu;
  c->hbar = hbar;
  c->mu = mu;
  fill_coords(*c);
  for (int k = 0; k < n; ++k) {
    const double t = c->coords(k, 0) / R;
    c->position.row(k) << R * std::cos(t), R * std::sin(t), 0.0;
    c->tangent[0].row(k) << -std::sin(t), std::cos(t), 0.0;
    if (std::abs(c->tangent[0].row(k).norm() - 1.0) > 1e-10)
      throw ValidationError("closed-curve chart is not arc-length parameterized");
  }
  finish_chart(*c);
  return c;
}

ChartPtr line_chart(double slope, double half_length, int n, double hbar, double mu) {
  if (!(half_length > 0.0)) throw ValidationError("line half length must be positive");
  check_physics(hbar, mu);
  auto c = std::make_shared<GridChart>();
  c->kind = ChartKind::line;
  c->axes = {make_axis("s", n, -half_length, half_length, false)};
  c->surface = make_implicit("y-(" + fmt(slope) + ")*x");
  c->surface.hbar = hbar;
  c->surface.mu = mu;
  c->hbar = hbar;
  c->mu = mu;
  fill_coords(*c);
  const Eigen::Vector3d d = Eigen::Vector3d(1.0, slope, 0.0).normalized();
  for (int k = 0; k < n; ++k) {
    c->position.row(k) = c->coords(k, 0) * d.transpose();
    c->tangent[0].row(k) = d.transpose();
  }
  finish_chart(*c);
  return c;
}

ChartPtr graph_chart(const SurfaceSpec& cylinder, double lo, double hi, int n) {
  if (cylinder.kind != SurfaceKind::plane_curve_cylinder || !cylinder.curve)
    throw ValidationError("graph chart needs a plane-curve cylinder");
  const PlaneCurve& curve = *cylinder.curve;
  if (!(curve.contains(lo) && curve.contains(hi))) throw DomainError("graph chart leaves the curve domain");
  check_physics(cylinder.hbar, cylinder.mu);
  auto c = std::make_shared<GridChart>();
  c->kind = ChartKind::graph_curve;
  c->axes = {make_axis("x", n, lo, hi, false)};
  c->surface = cylinder;
  c->hbar = cylinder.hbar;
  c->mu = cylinder.mu;
  fill_coords(*c);
  for (int k = 0; k < n; ++k) {
    const double x = c->coords(k, 0);
    const auto d = curve.derivatives(x);
    c->position.row(k) << x, d[0], 0.0;
    c->tangent[0].row(k) << 1.0, d[1], 0.0;
  }
  finish_chart(*c);
  return c;
}

ChartPtr torus_chart(double a, double b, int n_theta, int n_phi, std::optional<std::array<double, 2>> band,
                     double hbar, double mu) {
  check_physics(hbar, mu);
  auto c = std::make_shared<GridChart>();
  c->kind = ChartKind::torus;
  c->surface = make_torus(a, b);
  c->surface.hbar = hbar;
  c->surface.mu = mu;
  c->hbar = hbar;
  c->mu = mu;
  const auto th = band.value_or(std::array<double, 2>{0.0, kTwoPi});
  c->axes = {make_axis("theta", n_theta, th[0], th[1], !band.has_value()),
             make_axis("phi", n_phi, 0.0, kTwoPi, true)};
  fill_coords(*c);
  for (Eigen::Index k = 0; k < c->size(); ++k) {
    const double t = c->coords(k, 0), p = c->coords(k, 1);
    const double rho = a + b * std::sin(t);
    c->position.row(k) = torus_point(a, b, t, p).transpose();
    c->tangent[0].row(k) << b * std::cos(t) * std::cos(p), b * std::cos(t) * std::sin(p), -b * std::sin(t);
    c->tangent[1].row(k) << -rho * std::sin(p), rho * std::cos(p), 0.0;
  }
  finish_chart(*c);
  return c;
}

ChartPtr sphere_patch_chart(double R, std::array<double, 2> theta, std::array<double, 2> phi, int n_theta,
                            int n_phi, double hbar, double mu) {
  if (!(R > 0.0)) throw ValidationError("sphere radius must be positive");
  if (!(theta[0] > 0.0 && theta[1] < std::numbers::pi))
    throw SingularityError("sphere patch must avoid the poles", theta[0] <= 0.0 ? 0.0 : std::numbers::pi);
  check_physics(hbar, mu);
  auto c = std::make_shared<GridChart>();
  c->kind = ChartKind::sphere_patch;
  c->surface = make_implicit("x^2+y^2+z^2-" + fmt(R * R));
  c->surface.hbar = hbar;
  c->surface.mu = mu;
  c->hbar = hbar;
  c->mu = mu;
  c->axes = {make_axis("theta", n_theta, theta[0], theta[1], false),
             make_axis("phi", n_phi, phi[0], phi[1], false)};
  fill_coords(*c);
  for (Eigen::Index k = 0; k < c->size(); ++k) {
    const double t = c->coords(k, 0), p = c->coords(k, 1);
    c->position.row(k) << R * std::sin(t) * std::cos(p), R * std::sin(t) * std::sin(p), R * std::cos(t);
    c->tangent[0].row(k) << R * std::cos(t) * std::cos(p), R * std::cos(t) * std::sin(p), -R * std::sin(t);
    c->tangent[1].row(k) << -R * std::sin(t) * std::sin(p), R * std::sin(t) * std::cos(p), 0.0;
  }
  finish_chart(*c);
  return c;
}

Complex inner(const GridWavefunction& phi, const GridWavefunction& psi) {
  if (phi.chart != psi.chart) throw ValidationError("inner product of wavefunctions on different charts");
  return (phi.chart->weight.array().cast<Complex>() * phi.values.array().conjugate() * psi.values.array()).sum();
}

double norm(const GridWavefunction& psi) { return std::sqrt(std::abs(inner(psi, psi))); }

double sup_norm(const CVec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

CVec spectral_derivative(const GridChart& chart, const CVec& values, int axis) {
  if (axis < 0 || axis >= chart.dims()) throw ValidationError("derivative axis out of range");
  if (values.size() != chart.size()) throw ValidationError("wavefunction size does not match the chart");
  thread_local Eigen::FFT<double> fft;
  const ChartAxis& ax = chart.axes[static_cast<std::size_t>(axis)];
  const int n = ax.n;
  const int lines = static_cast<int>(chart.size() / n);
  const int stride = (chart.dims() == 2 && axis == 0) ? chart.axes[1].n : 1;
  const int line_step = (chart.dims() == 2 && axis == 1) ? chart.axes[1].n : 1;
  const double k0 = kTwoPi / ax.length();

  std::vector<Complex> in(static_cast<std::size_t>(n)), spec, out;
  CVec result(values.size());
  for (int l = 0; l < lines; ++l) {
    const int base = l * line_step;
    for (int j = 0; j < n; ++j) in[static_cast<std::size_t>(j)] = values(base + j * stride);
    fft.fwd(spec, in);
    for (int j = 0; j < n; ++j) {
      double k = j < (n + 1) / 2 ? j : j - n;
      if (n % 2 == 0 && j == n / 2) k = 0.0;
      spec[static_cast<std::size_t>(j)] *= Complex(0.0, k0 * k);
    }
    fft.inv(out, spec);
    for (int j = 0; j < n; ++j) result(base + j * stride) = out[static_cast<std::size_t>(j)];
  }
  return result;
}

// ---- operator tree ----

struct GridOperator::Node {
  enum Kind { identity, multiply, derivative, scale, sum, product } kind = identity;
  RVec field;
  int axis = 0;
  Complex factor{1.0, 0.0};
  std::shared_ptr<const Node> a, b;
};

GridOperator::GridOperator(ChartPtr chart, std::shared_ptr<const Node> node)
    : chart_(std::move(chart)), node_(std::move(node)) {}

GridOperator GridOperator::identity(ChartPtr chart) {
  if (!chart) throw ValidationError("operator needs a chart");
  return {std::move(chart), std::make_shared<Node>()};
}

GridOperator GridOperator::multiply(ChartPtr chart, RVec field) {
  if (!chart) throw ValidationError("operator needs a chart");
  if (field.size() != chart->size()) throw ValidationError("multiplier size does not match the chart");
  if (!field.allFinite()) throw DomainError("multiplier has non-finite values");
  auto n = std::make_shared<Node>();
  n->kind = Node::multiply;
  n->field = std::move(field);
  return {std::move(chart), n};
}

GridOperator GridOperator::derivative(ChartPtr chart, int axis) {
  if (!chart) throw ValidationError("operator needs a chart");
  if (axis < 0 || axis >= chart->dims()) throw ValidationError("derivative axis out of range");
  auto n = std::make_shared<Node>();
  n->kind = Node::derivative;
  n->axis = axis;
  return {std::move(chart), n};
}

CVec GridOperator::apply(const CVec& values) const {
  if (values.size() != chart_->size()) throw ValidationError("wavefunction size does not match the operator chart");
  struct Walker {
    const GridChart& chart;
    CVec run(const Node& n, const CVec& v) const {
      switch (n.kind) {
        case Node::identity: return v;
        case Node::multiply: return n.field.cast<Complex>().cwiseProduct(v);
        case Node::derivative: return spectral_derivative(chart, v, n.axis);
        case Node::scale: return n.factor * run(*n.a, v);
        case Node::sum: return run(*n.a, v) + run(*n.b, v);
        case Node::product: return run(*n.a, run(*n.b, v));
      }
      throw Error("corrupt operator node");
    }
  };
  return Walker{*chart_}.run(*node_, values);
}

GridWavefunction GridOperator::operator()(const GridWavefunction& psi) const {
  if (psi.chart != chart_) throw ValidationError("wavefunction and operator live on different charts");
  return {chart_, apply(psi.values)};
}

GridOperator GridOperator::combine(int kind, const GridOperator& a, const GridOperator& b) {
  if (a.chart_ != b.chart_) throw ValidationError("operators live on different charts");
  auto n = std::make_shared<Node>();
  n->kind = static_cast<Node::Kind>(kind);
  n->a = a.node_;
  n->b = b.node_;
  return {a.chart_, n};
}

GridOperator operator+(const GridOperator& a, const GridOperator& b) {
  return GridOperator::combine(GridOperator::Node::sum, a, b);
}

GridOperator operator-(const GridOperator& a) { return Complex(-1.0, 0.0) * a; }

GridOperator operator-(const GridOperator& a, const GridOperator& b) { return a + (-b); }

GridOperator operator*(const GridOperator& a, const GridOperator& b) {
  return GridOperator::combine(GridOperator::Node::product, a, b);
}

GridOperator operator*(Complex c, const GridOperator& a) {
  auto n = std::make_shared<GridOperator::Node>();
  n->kind = GridOperator::Node::scale;
  n->factor = c;
  n->a = a.node_;
  return {a.chart_, n};
}

GridOperator exp_factor(const ChartPtr& chart, const RVec& q, double s) {
  if (q.size() != chart->size()) throw ValidationError("q profile size does not match the chart");
  if (!q.allFinite()) throw DomainError("q is undefined on part of the grid");
  return GridOperator::multiply(chart, (s * q).array().exp().matrix());
}

GridOperator geometric_momentum_op(const ChartPtr& chart, Axis i) {
  if (!chart->has_curvature) throw ValidationError("geometric momentum needs curvature data on the chart");
  const int c = static_cast<int>(i);
  const Eigen::Index N = chart->size();
  // grad_Sigma_i = sum_b (sum_a g^{ab} X_{a,i}) d_b
  std::array<RVec, 2> G = {RVec::Zero(N), RVec::Zero(N)};
  if (chart->dims() == 1) {
    G[0] = chart->inverse_metric[0].cwiseProduct(chart->tangent[0].col(c));
  } else {
    const RVec X0 = chart->tangent[0].col(c), X1 = chart->tangent[1].col(c);
    G[0] = chart->inverse_metric[0].cwiseProduct(X0) + chart->inverse_metric[1].cwiseProduct(X1);
    G[1] = chart->inverse_metric[1].cwiseProduct(X0) + chart->inverse_metric[2].cwiseProduct(X1);
  }
  GridOperator op = GridOperator::multiply(chart, -chart->mean_curvature.cwiseProduct(chart->normal_component(i)));
  for (int b = 0; b < chart->dims(); ++b)
    op = op + GridOperator::multiply(chart, G[static_cast<std::size_t>(b)]) * GridOperator::derivative(chart, b);
  return Complex(0.0, -chart->hbar) * op;
}

GridOperator hamiltonian_op(const ChartPtr& chart) {
  if (!chart->has_metric) throw ValidationError("Hamiltonian needs the chart metric");
  if (!chart->has_curvature) throw ValidationError("Hamiltonian needs curvature data on the chart");
  const RVec inv_sqrt = chart->sqrt_g.cwiseInverse();
  auto gi = [&](int a, int b) -> const RVec& { return chart->inverse_metric[static_cast<std::size_t>(a + b)]; };
  const RVec V = chart->mean_curvature.cwiseAbs2() - chart->gaussian_curvature;
  GridOperator op = GridOperator::multiply(chart, V);
  for (int a = 0; a < chart->dims(); ++a)
    for (int b = 0; b < chart->dims(); ++b) {
      const RVec coef = chart->sqrt_g.cwiseProduct(gi(a, b));
      if (coef.cwiseAbs().maxCoeff() == 0.0) continue;
      op = op + GridOperator::multiply(chart, inv_sqrt) * GridOperator::derivative(chart, a) *
                    GridOperator::multiply(chart, coef) * GridOperator::derivative(chart, b);
    }
  return Complex(-chart->hbar * chart->hbar / (2.0 * chart->mu), 0.0) * op;
}

GridOperator position_op(const ChartPtr& chart, Axis i) {
  return GridOperator::multiply(chart, chart->position_component(i));
}

GridOperator angular_momentum_z_op(const ChartPtr& chart) {
  return position_op(chart, Axis::x) * geometric_momentum_op(chart, Axis::y) -
         position_op(chart, Axis::y) * geometric_momentum_op(chart, Axis::x);
}

GridWavefunction commutator(const GridOperator& a, const GridOperator& b, const GridWavefunction& psi) {
  if (a.chart() != b.chart() || a.chart() != psi.chart)
    throw ValidationError("commutator operands live on different charts");
  return {psi.chart, a.apply(b.apply(psi.values)) - b.apply(a.apply(psi.values))};
}

// ---- bases and reports ----

std::string Window::describe(const GridChart& chart) const {
  const std::string name = axis < chart.dims() ? chart.axes[static_cast<std::size_t>(axis)].name : "?";
  return "bump(" + name + " in [" + fmt(lo) + ", " + fmt(hi) + "])";
}

RVec window_field(const GridChart& chart, const Window& w) {
  if (w.axis < 0 || w.axis >= chart.dims()) throw ValidationError("window axis out of range");
  if (!(w.hi > w.lo)) throw ValidationError("window must have hi > lo");
  RVec out(chart.size());
  for (Eigen::Index k = 0; k < chart.size(); ++k) {
    const double t = (2.0 * chart.coords(k, w.axis) - w.lo - w.hi) / (w.hi - w.lo);
    out(k) = std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
  }
  return out;
}

Basis fourier_basis(const ChartPtr& chart, int kmax, int mmax, std::vector<Window> windows) {
  if (kmax < 0 || mmax < 0) throw ValidationError("basis ranges must be nonnegative");
  Basis basis;
  basis.windows = std::move(windows);
  RVec win = RVec::Ones(chart->size());
  for (const auto& w : basis.windows) win = win.cwiseProduct(window_field(*chart, w));
  const int dims = chart->dims();
  if (dims == 1) mmax = 0;
  std::ostringstream desc;
  desc << "fourier |k|<=" << kmax;
  if (dims == 2) desc << " |m|<=" << mmax;
  for (const auto& w : basis.windows) desc << " x " << w.describe(*chart);
  basis.description = desc.str();

  for (int k = -kmax; k <= kmax; ++k)
    for (int m = -mmax; m <= mmax; ++m) {
      CVec v(chart->size());
      for (Eigen::Index j = 0; j < chart->size(); ++j) {
        double phase = kTwoPi * k * (chart->coords(j, 0) - chart->axes[0].lo) / chart->axes[0].length();
        if (dims == 2) phase += kTwoPi * m * (chart->coords(j, 1) - chart->axes[1].lo) / chart->axes[1].length();
        v(j) = win(j) * std::exp(kI * phase);
      }
      std::string label = "k=" + std::to_string(k);
      if (dims == 2) label += ",m=" + std::to_string(m);
      basis.functions.push_back({label, {chart, std::move(v)}});
    }
  return basis;
}

CommutatorReport compare_operators(std::string identity, Axis component, const GridOperator& lhs,
                                   const GridOperator& rhs, const Basis& basis) {
  if (lhs.chart() != rhs.chart()) throw ValidationError("identity sides live on different charts");
  const GridChart& chart = *lhs.chart();
  CommutatorReport r;
  r.identity = std::move(identity);
  r.component = std::string(to_string(component));
  r.chart = chart.describe();
  r.grid = chart.grid_sizes();
  for (std::size_t k = 0; k < basis.windows.size(); ++k)
    r.windows += (k ? " x " : "") + basis.windows[k].describe(chart);
  if (r.windows.empty()) r.windows = "none";
  r.basis = basis.description;
  for (const auto& f : basis.functions) {
    const CVec l = lhs.apply(f.psi.values), rr = rhs.apply(f.psi.values);
    BasisResidual b;
    b.label = f.label;
    b.lhs_sup = sup_norm(l);
    b.rhs_sup = sup_norm(rr);
    b.residual_sup = sup_norm(l - rr);
    b.relative = b.lhs_sup > 0.0 ? b.residual_sup / b.lhs_sup : b.residual_sup;
    r.normalization = std::max(r.normalization, b.lhs_sup);
    r.max_residual = std::max(r.max_residual, b.residual_sup);
    r.residuals.push_back(b);
  }
  r.max_relative = r.normalization > 0.0 ? r.max_residual / r.normalization : r.max_residual;
  return r;
}

CommutatorReport with_convergence(const std::function<CommutatorReport(int)>& run, int levels) {
  if (levels < 1) throw ValidationError("convergence study needs at least one level");
  CommutatorReport last;
  std::vector<ConvergenceRow> rows;
  for (int l = 0; l < levels; ++l) {
    last = run(l);
    rows.push_back({last.grid, last.max_relative, last.max_residual});
  }
  last.convergence = std::move(rows);
  return last;
}

std::string_view to_string(CylinderVariant v) {
  switch (v) {
    case CylinderVariant::sandwich: return "sandwich";
    case CylinderVariant::three_part: return "three-part";
  }
  return "unknown";
}

namespace {

GridOperator commutator_op(const GridOperator& a, const GridOperator& b) { return a * b - b * a; }

void require_cross_section(const GridChart& chart, Axis i) {
  if (chart.dims() != 1) throw ValidationError("cylinder identity needs a cross-section chart");
  if (i == Axis::z) throw ValidationError("cylinder identity exists for x and y only");
}

RVec sin_theta(const GridChart& chart) {
  if (chart.kind != ChartKind::torus || !chart.surface.torus) throw ValidationError("torus identity needs a torus chart");
  RVec s = chart.coordinate(0).array().sin().matrix();
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (std::abs(s(k)) < 1e-8)
      throw SingularityError("torus identity is singular at sin(theta) = 0 inside the chart", chart.coords(k, 0));
  return s;
}

}  // namespace

GridOperator cylinder_rhs_op(const ChartPtr& chart, Axis i, const RVec& q, CylinderVariant variant) {
  require_cross_section(*chart, i);
  const GridOperator C = GridOperator::multiply(chart, chart->curvature_vector(i));
  const GridOperator H = hamiltonian_op(chart);
  auto E = [&](double s) { return exp_factor(chart, q, s); };
  const Complex ih(0.0, chart->hbar);
  if (variant == CylinderVariant::sandwich) return ih * (E(-1) * C * H * E(1) + E(1) * H * C * E(-1));

  const double r2 = std::numbers::sqrt2;
  const GridOperator px = geometric_momentum_op(chart, Axis::x), py = geometric_momentum_op(chart, Axis::y);
  const GridOperator part1 = E(-r2) * C * H * E(r2) + E(r2) * H * C * E(-r2);
  const GridOperator Hp = Complex(1.0 / (2.0 * chart->mu), 0.0) *
                          (E(-1) * px * E(2) * px * E(-1) + E(-1) * py * E(2) * py * E(-1));
  const GridOperator part2 = C * Hp + Hp * C;
  const GridOperator part3 = Complex(1.0 / chart->mu, 0.0) *
                             (E(1) * px * C * E(-2) * px * E(1) + E(1) * py * C * E(-2) * py * E(1));
  return (ih / 3.0) * (part1 + part2 + part3);
}

CommutatorReport verify_cylinder_identity(const ChartPtr& chart, Axis i, const RVec& q, CylinderVariant variant,
                                          const Basis& basis) {
  const GridOperator lhs = commutator_op(geometric_momentum_op(chart, i), hamiltonian_op(chart));
  return compare_operators("cylinder-" + std::string(to_string(variant)), i, lhs,
                           cylinder_rhs_op(chart, i, q, variant), basis);
}

GridOperator torus_rhs_op(const ChartPtr& chart, Axis i, const RVec& q) {
  const RVec s = sin_theta(*chart);
  const double b = chart->surface.torus->b, mu = chart->mu;
  const RVec s2 = s.cwiseAbs2();
  const RVec n = chart->normal_component(i);
  const RVec K = chart->gaussian_curvature;
  const RVec Af = (b * b * b / mu) * n.cwiseProduct(K.cwiseProduct(K).cwiseProduct(K)).cwiseQuotient(s2);
  const GridOperator A = GridOperator::multiply(chart, Af);
  const GridOperator S = GridOperator::multiply(chart, n.cwiseQuotient(s2));
  const GridOperator B = GridOperator::multiply(chart, n.cwiseQuotient(s2) / (mu * b));
  const GridOperator Lz = angular_momentum_z_op(chart);
  const GridOperator pz = geometric_momentum_op(chart, Axis::z);
  const GridOperator pz2 = Complex(1.0 / (mu * b), 0.0) * (pz * pz);
  auto E = [&](double x) { return exp_factor(chart, q, x); };
  const double r2 = std::numbers::sqrt2;
  const Complex half(-0.5, 0.0);

  const GridOperator pt1 = half * (E(-r2) * S * pz2 * E(r2) + E(r2) * pz2 * E(-r2) * S);
  const GridOperator pzp = E(-1) * pz * E(2) * pz * E(-1);
  const GridOperator pt2 = half * (B * pzp + pzp * B);
  const GridOperator pt3 = -(E(1) * pz * B * E(-2) * pz * E(1));
  const GridOperator lz_part = half * (A * Lz * Lz + Lz * Lz * A);
  return Complex(0.0, chart->hbar) * (lz_part + Complex(1.0 / 3.0, 0.0) * (pt1 + pt2 + pt3));
}

CommutatorReport verify_torus_identity(const ChartPtr& chart, Axis i, const RVec& q, const Basis& basis) {
  const GridOperator lhs = commutator_op(geometric_momentum_op(chart, i), hamiltonian_op(chart));
  return compare_operators("torus-dummy-factor", i, lhs, torus_rhs_op(chart, i, q), basis);
}

GridOperator general_symmetrized_rhs_op(const ChartPtr& chart, Axis i, const std::array<RVec, 3>& q) {
  const Eigen::Index N = chart->size();
  std::array<RVec, 3> Q = {RVec(N), RVec(N), RVec(N)};
  const RVec n = chart->normal_component(i);
  for (Eigen::Index k = 0; k < N; ++k) {
    const auto d = implicit_derivatives(chart->surface, row3(chart->position, k));
    const Vec3 br = general_brackets(d.gradient, d.hessian);
    const double scale = n(k) / (chart->mu * d.gradient.norm());
    for (int j = 0; j < 3; ++j) Q[static_cast<std::size_t>(j)](k) = scale * br(j);
  }
  std::optional<GridOperator> sum;
  for (int j = 0; j < 3; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const GridOperator pj = geometric_momentum_op(chart, static_cast<Axis>(j));
    const GridOperator p2 = pj * pj;
    const GridOperator Qj = GridOperator::multiply(chart, Q[ju]);
    const GridOperator term = exp_factor(chart, q[ju], -1) * Qj * p2 * exp_factor(chart, q[ju], 1) +
                              exp_factor(chart, q[ju], 1) * p2 * Qj * exp_factor(chart, q[ju], -1);
    sum = sum ? *sum + term : term;
  }
  return Complex(0.0, -0.5 * chart->hbar) * *sum;
}

CommutatorReport verify_general_symmetrized(const ChartPtr& chart, Axis i, const std::array<RVec, 3>& q,
                                            const Basis& basis) {
  const GridOperator lhs = commutator_op(geometric_momentum_op(chart, i), hamiltonian_op(chart));
  return compare_operators("general-symmetrized", i, lhs, general_symmetrized_rhs_op(chart, i, q), basis);
}

double hermiticity_defect(const GridOperator& op, const Basis& basis) {
  std::vector<GridWavefunction> images;
  double op_norm = 0.0;
  for (const auto& f : basis.functions) {
    images.push_back(op(f.psi));
    const double nf = norm(f.psi);
    if (nf > 0.0) op_norm = std::max(op_norm, norm(images.back()) / nf);
  }
  if (op_norm == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t a = 0; a < basis.functions.size(); ++a)
    for (std::size_t b = 0; b < basis.functions.size(); ++b) {
      const auto& phi = basis.functions[a].psi;
      const auto& psi = basis.functions[b].psi;
      const double scale = norm(phi) * norm(psi) * op_norm;
      if (scale == 0.0) continue;
      worst = std::max(worst, std::abs(inner(phi, images[b]) - inner(images[a], psi)) / scale);
    }
  return worst;
}

RVec q_on_chart(const ChartPtr& chart, int axis, QFactorRequest request) {
  if (axis < 0 || axis >= chart->dims()) throw ValidationError("q axis out of range");
  const ChartAxis& ax = chart->axes[static_cast<std::size_t>(axis)];
  request.points.clear();
  for (int k = 0; k < ax.n; ++k) request.points.push_back(ax.node(k));
  if (!request.domain) request.domain = std::array<double, 2>{request.points.front(), request.points.back()};
  const QFactorProfile prof = solve_q(request);
  RVec out(chart->size());
  for (Eigen::Index k = 0; k < chart->size(); ++k) {
    const double u = chart->coords(k, axis);
    const auto it = std::lower_bound(prof.grid.begin(), prof.grid.end(), u);
    if (it == prof.grid.end() || *it != u) throw Error("q profile lost a chart node");
    out(k) = prof.values[static_cast<std::size_t>(it - prof.grid.begin())];
  }
  return out;
}

RVec field_on_chart(const GridChart& chart, const std::function<double(const Eigen::VectorXd&)>& f) {
  RVec out(chart.size());
  for (Eigen::Index k = 0; k < chart.size(); ++k) out(k) = f(chart.coords.row(k).transpose());
  return out;
}

}  // namespace gcfl
