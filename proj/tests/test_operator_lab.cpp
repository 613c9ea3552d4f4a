#include "doctest.h"

#include "gcfl/operator_lab.hpp"

#include <cmath>
#include <numbers>

using namespace gcfl;
using std::numbers::pi;

namespace {

GridWavefunction plane_wave(const ChartPtr& c, int k, int m = 0) {
  CVec v(c->size());
  for (Eigen::Index j = 0; j < c->size(); ++j) {
    double phase = k * c->coords(j, 0);
    if (c->dims() == 2) phase += m * c->coords(j, 1);
    v(j) = std::exp(Complex(0.0, phase));
  }
  return {c, v};
}

RVec zeros(const ChartPtr& c) { return RVec::Zero(c->size()); }

}  // namespace

TEST_CASE("spectral derivative of resolvable plane waves") {
  const auto c = circle_chart(1.0, 64);
  for (int k = -20; k <= 20; ++k) {
    const auto psi = plane_wave(c, k);
    const CVec d = spectral_derivative(*c, psi.values, 0);
    CHECK(sup_norm(d - Complex(0.0, k) * psi.values) < 1e-12 * std::max(1, std::abs(k)));
  }
  const auto t = torus_chart(3, 1, 32, 24);
  const auto psi = plane_wave(t, 3, -5);
  CHECK(sup_norm(spectral_derivative(*t, psi.values, 0) - Complex(0, 3) * psi.values) < 1e-12);
  CHECK(sup_norm(spectral_derivative(*t, psi.values, 1) - Complex(0, -5) * psi.values) < 1e-12);
}

TEST_CASE("chart invariants") {
  const auto c = circle_chart(2.0, 48);
  CHECK(c->weight.sum() == doctest::Approx(4 * pi).epsilon(1e-13));
  CHECK((c->mean_curvature.array() - 0.25).abs().maxCoeff() < 1e-13);
  CHECK(c->gaussian_curvature.cwiseAbs().maxCoeff() < 1e-13);

  const auto t = torus_chart(3, 1, 32, 32);
  CHECK(t->weight.sum() == doctest::Approx(4 * pi * pi * 3).epsilon(1e-12));

  const auto s = sphere_patch_chart(1.5, {0.4, 1.2}, {0.3, 1.3}, 16, 16);
  const RVec v = s->mean_curvature.cwiseAbs2() - s->gaussian_curvature;
  CHECK(v.cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(sphere_patch_chart(1, {0.0, 1.0}, {0, 1}, 8, 8), SingularityError);
  CHECK_THROWS_AS(circle_chart(-1, 16), ValidationError);
  CHECK_THROWS_AS(circle_chart(1, 2), ValidationError);
}

TEST_CASE("geometric momentum on the line and circle") {
  const auto line = line_chart(0.0, 10.0, 1024);
  const GridWavefunction w{line, window_field(*line, {0, -8, 8}).cast<Complex>()};
  const auto comm = commutator(position_op(line, Axis::x), geometric_momentum_op(line, Axis::x), w);
  CHECK(sup_norm(comm.values - Complex(0, 1) * w.values) < 1e-10);

  const auto c = circle_chart(1.0, 64);
  const auto one = plane_wave(c, 0);
  const CVec px = geometric_momentum_op(c, Axis::x).apply(one.values);
  const RVec cos_t = c->coordinate(0).array().cos().matrix();
  CHECK(sup_norm(px - Complex(0, 0.5) * cos_t.cast<Complex>()) < 1e-13);

  auto bare = std::make_shared<GridChart>(*c);
  bare->has_curvature = false;
  CHECK_THROWS_AS(geometric_momentum_op(bare, Axis::x), ValidationError);
  CHECK_THROWS_AS(hamiltonian_op(bare), ValidationError);
}

TEST_CASE("Hamiltonian spectrum on the unit circle") {
  const auto c = circle_chart(1.0, 64, 0.7, 1.3);
  const auto H = hamiltonian_op(c);
  for (int k = 0; k <= 10; ++k) {
    const auto psi = plane_wave(c, k);
    const Complex e = 0.7 * 0.7 / (2 * 1.3) * (k * k - 0.25);
    CHECK(sup_norm(H.apply(psi.values) - e * psi.values) < 1e-11);
  }
  const auto psi = plane_wave(c, 3);
  CHECK(sup_norm(commutator(H, H, psi).values) < 1e-12);
}

TEST_CASE("plane has no geometric potential") {
  const auto line = line_chart(0.5, 5.0, 64);
  const GridWavefunction w{line, window_field(*line, {0, -4, 4}).cast<Complex>()};
  const RVec V = line->mean_curvature.cwiseAbs2() - line->gaussian_curvature;
  CHECK(V.cwiseAbs().maxCoeff() == 0.0);
  const CVec lap = spectral_derivative(*line, spectral_derivative(*line, w.values, 0), 0);
  CHECK(sup_norm(hamiltonian_op(line).apply(w.values) + 0.5 * lap) < 1e-12);
}

TEST_CASE("momentum commutator on the circle is nonzero and resolution independent") {
  CVec r[2];
  const int sizes[2] = {64, 128};
  for (int l = 0; l < 2; ++l) {
    const auto c = circle_chart(1.0, sizes[l]);
    const auto psi = plane_wave(c, 2);
    const CVec v = commutator(geometric_momentum_op(c, Axis::x), geometric_momentum_op(c, Axis::y), psi).values;
    r[l] = v.cwiseQuotient(psi.values);
    CHECK(sup_norm(r[l]) > 0.1);
    // only a constant multiple of psi
    CHECK(sup_norm(r[l] - CVec::Constant(r[l].size(), r[l](0))) < 1e-11);
  }
  CHECK(std::abs(r[0](0) - r[1](0)) < 1e-11);
}

TEST_CASE("hermiticity under the chart measure") {
  const auto c = circle_chart(1.0, 128);
  const auto basis = fourier_basis(c, 6);
  for (Axis i : {Axis::x, Axis::y}) CHECK(hermiticity_defect(geometric_momentum_op(c, i), basis) < 1e-10);
  CHECK(hermiticity_defect(hamiltonian_op(c), basis) < 1e-10);

  const auto t = torus_chart(3, 1, 48, 48);
  const auto tb = fourier_basis(t, 2, 2);
  for (Axis i : {Axis::x, Axis::y, Axis::z}) CHECK(hermiticity_defect(geometric_momentum_op(t, i), tb) < 1e-10);
  CHECK(hermiticity_defect(hamiltonian_op(t), tb) < 1e-10);
  CHECK(hermiticity_defect(angular_momentum_z_op(t), tb) < 1e-10);
}

TEST_CASE("angular momentum on the torus is -i hbar d/dphi") {
  const auto t = torus_chart(3, 1, 32, 32, std::nullopt, 0.5);
  const auto psi = plane_wave(t, 1, 4);
  CHECK(sup_norm(angular_momentum_z_op(t).apply(psi.values) - Complex(2.0, 0) * psi.values) < 1e-11);
}

TEST_CASE("circle identity with vanishing dummy factors") {
  for (int n : {256, 512}) {
    const auto c = circle_chart(1.0, n);
    const auto basis = fourier_basis(c, 8);
    for (Axis i : {Axis::x, Axis::y}) {
      const auto r = verify_cylinder_identity(c, i, zeros(c), CylinderVariant::sandwich, basis);
      CHECK(r.normalization > 1.0);
      CHECK(r.max_relative < 1e-10);
      CHECK(r.residuals.size() == 17);
    }
  }
  // other radius, hbar and mass
  const auto c = circle_chart(2.5, 256, 0.3, 1.7);
  const auto r = verify_cylinder_identity(c, Axis::x, zeros(c), CylinderVariant::sandwich, fourier_basis(c, 5));
  CHECK(r.max_relative < 1e-10);
}

TEST_CASE("three-part construction on the circle") {
  const auto c = circle_chart(1.0, 256);
  const auto r = verify_cylinder_identity(c, Axis::x, zeros(c), CylinderVariant::three_part, fourier_basis(c, 4));
  CHECK(r.identity == "cylinder-three-part");
  CHECK(std::isfinite(r.max_relative));
  MESSAGE("three-part circle residual " << r.max_relative);
}

TEST_CASE("straight line: both sides vanish") {
  const auto line = line_chart(0.3, 6.0, 128);
  const auto basis = fourier_basis(line, 3, 0, {{0, -5, 5}});
  for (auto v : {CylinderVariant::sandwich, CylinderVariant::three_part}) {
    const auto r = verify_cylinder_identity(line, Axis::y, zeros(line), v, basis);
    CHECK(r.normalization < 1e-12);
    CHECK(r.max_residual < 1e-12);
  }
}

TEST_CASE("parabola with solved dummy factors converges in resolution") {
  const auto spec = make_cylinder("x^2", 0.2, 2.0);
  QFactorRequest req;
  req.surface = spec;
  req.component = Axis::y;
  req.domain = std::array<double, 2>{0.3, 1.7};
  auto run = [&](int level) {
    const int n = 512 << level;
    const auto c = graph_chart(spec, 0.3, 1.7, n);
    const RVec q = q_on_chart(c, 0, req);
    return verify_cylinder_identity(c, Axis::y, q, CylinderVariant::three_part,
                                    fourier_basis(c, 3, 0, {{0, 0.35, 1.65}}));
  };
  const auto r = with_convergence(run, 2);
  REQUIRE(r.convergence.size() == 2);
  CHECK(r.grid == std::vector<int>{1024});
  CHECK(std::isfinite(r.max_relative));
  CHECK(r.max_relative > 1e-3);
  CHECK(std::abs(r.convergence[0].max_relative - r.convergence[1].max_relative) < 1e-5 * r.max_relative);
  MESSAGE("parabola three-part residual " << r.max_relative);
}

TEST_CASE("q on chart matches the profile solver") {
  const auto spec = make_cylinder("x^2", 0.2, 2.0);
  const auto c = graph_chart(spec, 0.3, 1.7, 32);
  QFactorRequest req;
  req.surface = spec;
  req.component = Axis::y;
  req.domain = std::array<double, 2>{0.3, 1.7};
  req.anchor = 0.3;
  const RVec q = q_on_chart(c, 0, req);
  const double shift = -closed_form_q("parabola", Axis::y, 0.3);
  for (int k = 0; k < 32; ++k)
    CHECK(q(k) == doctest::Approx(closed_form_q("parabola", Axis::y, c->coords(k, 0)) + shift).epsilon(1e-8));
}

TEST_CASE("torus identity on a theta band") {
  const double a = 3, b = 1;
  const std::array<double, 2> band{0.3, 1.2};
  QFactorRequest req;
  req.surface = make_torus(a, b);
  req.domain = band;
  auto build = [&](int nt, int np) {
    const auto t = torus_chart(a, b, nt, np, band);
    return t;
  };
  const auto t = build(64, 32);
  req.component = Axis::x;
  const RVec qx = q_on_chart(t, 0, req);
  const auto basis = fourier_basis(t, 2, 2, {{0, 0.3, 1.2}});
  const auto r = verify_torus_identity(t, Axis::x, qx, basis);
  CHECK(std::isfinite(r.max_relative));
  CHECK(r.normalization > 0.0);
  MESSAGE("torus identity residual " << r.max_relative);

  SUBCASE("gauge cancellation") {
    const auto shifted_r = verify_torus_identity(t, Axis::x, (qx.array() + 1.7).matrix(), basis);
    for (std::size_t k = 0; k < r.residuals.size(); ++k)
      CHECK(shifted_r.residuals[k].residual_sup ==
            doctest::Approx(r.residuals[k].residual_sup).epsilon(1e-9).scale(r.normalization));
  }
  SUBCASE("axisymmetry") {
    req.component = Axis::z;
    const RVec qz = q_on_chart(t, 0, req);
    const auto rhs = torus_rhs_op(t, Axis::z, qz);
    const auto lhs = geometric_momentum_op(t, Axis::z) * hamiltonian_op(t) -
                     hamiltonian_op(t) * geometric_momentum_op(t, Axis::z);
    const RVec win = window_field(*t, {0, 0.3, 1.2});
    auto psi_at = [&](int shift) {
      CVec v(t->size());
      for (Eigen::Index j = 0; j < t->size(); ++j) {
        const double th = t->coords(j, 0), ph = t->coords(j, 1) + 2 * pi * shift / 32;
        v(j) = win(j) * std::exp(Complex(std::cos(ph), 2 * th));
      }
      return v;
    };
    const double r0 = sup_norm(lhs.apply(psi_at(0)) - rhs.apply(psi_at(0)));
    const double r5 = sup_norm(lhs.apply(psi_at(5)) - rhs.apply(psi_at(5)));
    CHECK(r5 == doctest::Approx(r0).epsilon(1e-10));
  }
  SUBCASE("singular band is rejected") {
    const auto full = torus_chart(a, b, 16, 16);
    CHECK_THROWS_AS(torus_rhs_op(full, Axis::x, zeros(full)), SingularityError);
  }
}

TEST_CASE("general symmetrized identity on a sphere patch") {
  auto run = [&](int level) {
    const int n = 256 << level;
    const auto s = sphere_patch_chart(1.0, {0.2, 1.4}, {0.1, 1.5}, n, n);
    const std::array<RVec, 3> q{zeros(s), zeros(s), zeros(s)};
    return verify_general_symmetrized(s, Axis::x, q, fourier_basis(s, 1, 0, {{0, 0.2, 1.4}, {1, 0.1, 1.5}}));
  };
  const auto r = with_convergence(run, 2);
  CHECK(r.max_relative > 1e-3);  // q = 0 does not satisfy it
  CHECK(r.convergence[1].max_relative == doctest::Approx(r.convergence[0].max_relative).epsilon(0.05));
  MESSAGE("sphere patch residual " << r.max_relative);

  const auto s = sphere_patch_chart(1.0, {0.4, 1.2}, {0.3, 1.3}, 24, 24);
  const auto basis = fourier_basis(s, 1, 1, {{0, 0.4, 1.2}, {1, 0.3, 1.3}});
  const std::array<RVec, 3> q0{zeros(s), zeros(s), zeros(s)};
  const RVec c = RVec::Constant(s->size(), 1.7);
  const auto a = verify_general_symmetrized(s, Axis::y, q0, basis);
  const auto b = verify_general_symmetrized(s, Axis::y, {c, c, c}, basis);
  CHECK(b.max_residual == doctest::Approx(a.max_residual).epsilon(1e-10));

  // an equator point has f_z = 0
  const auto eq = sphere_patch_chart(1.0, {pi / 2 - 0.5, pi / 2 + 0.5}, {0.3, 1.3}, 8, 8);
  CHECK_THROWS_AS(general_symmetrized_rhs_op(eq, Axis::x, {zeros(eq), zeros(eq), zeros(eq)}), SingularityError);
}

TEST_CASE("semiclassical limit of the momentum commutator") {
  // psi = e^{i p0 s / hbar} on the unit circle; [p_x, H] psi / (i hbar psi) at s = 0
  // tends to the classical force component -p0^2 cos(0) / mu.
  const double p0 = 1.0, mu = 1.0;
  double prev = 1e9;
  for (int k : {10, 20, 40}) {
    const double hbar = p0 / k;
    const auto c = circle_chart(1.0, 512, hbar, mu);
    const auto psi = plane_wave(c, k);
    const CVec v = commutator(geometric_momentum_op(c, Axis::x), hamiltonian_op(c), psi).values;
    const Complex ratio = v(0) / (Complex(0, hbar) * psi.values(0));
    const double err = std::abs(ratio - (-p0 * p0 / mu));
    CHECK(err < 2.0 * hbar);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("operator algebra validation") {
  const auto c1 = circle_chart(1.0, 16), c2 = circle_chart(1.0, 16);
  const auto psi = plane_wave(c1, 1);
  CHECK_THROWS_AS(commutator(hamiltonian_op(c1), hamiltonian_op(c2), psi), ValidationError);
  CHECK_THROWS_AS(hamiltonian_op(c1) + hamiltonian_op(c2), ValidationError);
  RVec bad = zeros(c1);
  bad(3) = std::nan("");
  CHECK_THROWS_AS(exp_factor(c1, bad, 1.0), DomainError);
  const auto A = Complex(2, 1) * position_op(c1, Axis::x) + GridOperator::identity(c1);
  const auto psi2 = plane_wave(c1, 3);
  const CVec lin = A.apply(2.0 * psi.values + psi2.values);
  CHECK(sup_norm(lin - 2.0 * A.apply(psi.values) - A.apply(psi2.values)) < 1e-13);
}
