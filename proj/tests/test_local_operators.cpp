#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hho2d/local_operators.hpp"
#include "hho2d/mesh_factory.hpp"

using namespace hho2d;

namespace {

struct Shape {
  const char* name;
  std::vector<Eigen::Vector2d> loop;
};

const std::vector<Shape> kShapes = {
    {"unit square", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}},
    {"right triangle", {{0, 0}, {1, 0}, {0, 1}}},
    {"L hexagon", {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}},
    {"distorted quad", {{0, 0}, {1.3, 0.2}, {1.1, 1.4}, {-0.2, 0.9}}},
};

struct SingleElement {
  PolyMesh mesh;
  MeshMetrics metrics;
};

SingleElement make_single(const std::vector<Eigen::Vector2d>& loop) {
  std::vector<int> ids(loop.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  PolyMesh mesh = build_mesh(loop, {ids});
  MeshMetrics metrics = compute_metrics(mesh);
  return {std::move(mesh), std::move(metrics)};
}

LocalOperators make_ops(const std::vector<Eigen::Vector2d>& loop, int k, int l,
                        StabilizationVariant variant = StabilizationVariant::Main,
                        FaceBasisMode mode = FaceBasisMode::Orthonormal) {
  SingleElement s = make_single(loop);
  return build_local_operators(s.mesh, s.metrics, 0, make_local_space(k, l), variant,
                               nullptr, mode);
}

std::mt19937 rng(20240817);

Eigen::VectorXd random_vector(int n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

// Callable polynomial from coefficients in the pack's degree-(k+1) basis.
ScalarField poly_field(const LocalOperators& ops, const Eigen::VectorXd& coeffs) {
  return [&ops, coeffs](const Eigen::Vector2d& p) {
    Eigen::MatrixXd vals = ops.basis_hi.values({p});
    return (vals * coeffs)(0, 0);
  };
}

std::vector<std::pair<int, int>> admissible_spaces(int k) {
  std::vector<std::pair<int, int>> out;
  for (int l : {k - 1, k, k + 1})
    if (l >= 0) out.emplace_back(k, l);
  return out;
}

std::vector<StabilizationVariant> admissible_variants(int k, int l) {
  std::vector<StabilizationVariant> out = {StabilizationVariant::Main,
                                           StabilizationVariant::Boundary,
                                           StabilizationVariant::Gradient};
  if (l == k - 1) out.push_back(StabilizationVariant::KMinusOne);
  if (l == k + 1) out.push_back(StabilizationVariant::Hdg);
  return out;
}

}  // namespace

TEST_CASE("space and variant admissibility") {
  CHECK_THROWS_AS(make_local_space(-1, 0), ConfigError);
  CHECK_THROWS_AS(make_local_space(1, -1), ConfigError);
  CHECK_THROWS_AS(make_local_space(2, 0), ConfigError);
  CHECK_THROWS_AS(make_local_space(0, 2), ConfigError);
  CHECK_THROWS_AS(check_admissible(make_local_space(2, 2), StabilizationVariant::KMinusOne),
                  ConfigError);
  CHECK_THROWS_AS(check_admissible(make_local_space(2, 2), StabilizationVariant::Hdg),
                  ConfigError);
  CHECK_NOTHROW(check_admissible(make_local_space(2, 1), StabilizationVariant::KMinusOne));
  CHECK_NOTHROW(check_admissible(make_local_space(2, 3), StabilizationVariant::Hdg));
}

TEST_CASE("reconstruction reproduces degree k+1 polynomials") {
  for (const Shape& shape : kShapes) {
    for (int k = 0; k <= 3; ++k) {
      for (auto [kk, l] : admissible_spaces(k)) {
        LocalOperators ops = make_ops(shape.loop, kk, l);
        for (int trial = 0; trial < 20; ++trial) {
          Eigen::VectorXd w = random_vector(ops.basis_hi.dimension());
          Eigen::VectorXd dofs = interpolate(ops, poly_field(ops, w));
          Eigen::VectorXd p = ops.reconstruction * dofs;
          // Orthonormal basis: coefficient norm is the L2 norm.
          CHECK((p - w).norm() <= 1e-9 * w.norm());
          CHECK((ops.diff_T * dofs).norm() <= 1e-9 * w.norm());
          for (int i = 0; i < ops.n_faces(); ++i)
            CHECK((ops.diff_F[i] * dofs).norm() <= 1e-9 * w.norm());
        }
      }
    }
  }
}

TEST_CASE("reconstruction satisfies the variational identity (quadrature oracle)") {
  for (const Shape& shape : kShapes) {
    const int k = 2, l = 2;
    SingleElement s = make_single(shape.loop);
    LocalOperators ops = build_local_operators(s.mesh, s.metrics, 0,
                                               make_local_space(k, l),
                                               StabilizationVariant::Main);
    const int n_hi = ops.basis_hi.dimension();

    Eigen::MatrixXd dxx, dxy, dyy;
    ops.basis_hi.second_derivatives(ops.quad_T.points, dxx, dxy, dyy);
    Eigen::MatrixXd lap = dxx + dyy;

    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd v = random_vector(ops.n_local);
      Eigen::VectorXd p = ops.reconstruction * v;
      double vnorm = v.norm();

      for (int i = 1; i < n_hi; ++i) {
        // (grad p, grad phi_i)_T + (v_T, lap phi_i)_T - (v_dT, grad phi_i . n)_dT
        double lhs = 0.0;
        for (int q = 0; q < ops.quad_T.size(); ++q) {
          double px = ops.dphi_x.row(q) * p;
          double py = ops.dphi_y.row(q) * p;
          double vT = ops.phi_T.row(q).head(ops.n_elem) * v.head(ops.n_elem);
          lhs += ops.quad_T.weights(q) *
                 (px * ops.dphi_x(q, i) + py * ops.dphi_y(q, i) + vT * lap(q, i));
        }
        for (int f = 0; f < ops.n_faces(); ++f) {
          Eigen::Vector2d n = s.mesh.outward_normal(s.mesh.element_faces[0][f], 0);
          Eigen::MatrixXd fx, fy;
          ops.basis_hi.gradients(ops.quad_F[f].points, fx, fy);
          Eigen::VectorXd vF = v.segment(ops.face_offset(f), ops.space.face_dim());
          for (int q = 0; q < ops.quad_F[f].size(); ++q) {
            double vFq = ops.psi_F[f].row(q) * vF;
            lhs -= ops.quad_F[f].weights(q) * vFq * (n.x() * fx(q, i) + n.y() * fy(q, i));
          }
        }
        CHECK(std::abs(lhs) <= 1e-9 * std::max(1.0, vnorm));
      }
      // Mean-value closure (v_T - p, 1)_T = 0.
      double closure = 0.0;
      for (int q = 0; q < ops.quad_T.size(); ++q) {
        double vT = ops.phi_T.row(q).head(ops.n_elem) * v.head(ops.n_elem);
        double pq = ops.phi_T.row(q) * p;
        closure += ops.quad_T.weights(q) * (vT - pq);
      }
      CHECK(std::abs(closure) <= 1e-10 * std::max(1.0, vnorm));
    }
  }
}

TEST_CASE("reconstruction of constants and zero") {
  LocalOperators ops = make_ops(kShapes[3].loop, 1, 1);
  Eigen::VectorXd dofs = interpolate(ops, [](const Eigen::Vector2d&) { return 2.5; });
  Eigen::VectorXd p = ops.reconstruction * dofs;
  // p must be the constant 2.5: only the constant mode survives.
  CHECK((p.tail(p.size() - 1)).norm() <= 1e-10);
  CHECK(p(0) * ops.basis_hi.coeff(0, 0) == doctest::Approx(2.5).epsilon(1e-10));
  CHECK((ops.reconstruction * Eigen::VectorXd::Zero(ops.n_local)).norm() == 0.0);
}

TEST_CASE("stabilization consistency for every admissible variant") {
  for (const Shape& shape : kShapes) {
    for (int k = 0; k <= 3; ++k) {
      for (auto [kk, l] : admissible_spaces(k)) {
        LocalOperators ops = make_ops(shape.loop, kk, l);
        for (StabilizationVariant variant : admissible_variants(kk, l)) {
          Eigen::MatrixXd S = stabilization_matrix(ops, variant);
          CHECK((S - S.transpose()).cwiseAbs().maxCoeff() <=
                1e-12 * std::max(1.0, S.cwiseAbs().maxCoeff()));
          for (int trial = 0; trial < 5; ++trial) {
            Eigen::VectorXd v = random_vector(ops.n_local);
            CHECK(v.dot(S * v) >= -1e-11 * v.squaredNorm() * S.cwiseAbs().maxCoeff());
            Eigen::VectorXd w = random_vector(ops.basis_hi.dimension());
            Eigen::VectorXd dofs = interpolate(ops, poly_field(ops, w));
            CHECK((S * dofs).norm() <= 1e-9 * std::max(1.0, w.norm()));
          }
          // Interpolates of constants are stabilization-free.
          Eigen::VectorXd one =
              interpolate(ops, [](const Eigen::Vector2d&) { return 1.0; });
          CHECK(one.dot(S * one) <= 1e-11);
        }
      }
    }
  }
}

TEST_CASE("unit square k=l=0: pinned stabilization and seminorm values") {
  LocalOperators ops = make_ops(kShapes[0].loop, 0, 0);
  REQUIRE(ops.n_local == 5);
  Eigen::VectorXd v(5);
  v << 0, 1, 1, 1, 1;
  // For v = (0; 1,1,1,1): grad p = 0 (closed-polygon normals cancel) and the
  // closure forces p = 0, so s(v,v) = h^-1 * perimeter = 4/sqrt(2).
  double expected = 4.0 / std::sqrt(2.0);
  CHECK(v.dot(ops.stab * v) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(v.dot(ops.bilinear * v) == doctest::Approx(expected).epsilon(1e-12));
  double seminorm = local_seminorm(ops, v);
  CHECK(seminorm == doctest::Approx(std::sqrt(expected)).epsilon(1e-12));
}

TEST_CASE("local bilinear form: kernel, PSD, norm equivalence recorded") {
  for (const Shape& shape : kShapes) {
    for (int k = 0; k <= 2; ++k) {
      LocalOperators ops = make_ops(shape.loop, k, k);
      Eigen::VectorXd one = interpolate(ops, [](const Eigen::Vector2d&) { return 1.0; });
      double scale = ops.bilinear.cwiseAbs().maxCoeff();
      CHECK((ops.bilinear * one).norm() <= 1e-10 * scale * one.norm());

      double cmin = 1e300, cmax = 0.0;
      for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd v = random_vector(ops.n_local);
        double energy = v.dot(ops.bilinear * v);
        CHECK(energy >= -1e-11 * scale * v.squaredNorm());
        double semi = local_seminorm(ops, v);
        if (semi > 1e-10) {
          double ratio = energy / (semi * semi);
          cmin = std::min(cmin, ratio);
          cmax = std::max(cmax, ratio);
        }
      }
      INFO(shape.name, " k=", k, " norm-equivalence ratios [", cmin, ", ", cmax, "]");
      CHECK(cmin > 0.0);
      CHECK(std::isfinite(cmax));
    }
  }
}

TEST_CASE("assumption lower bound: main variant constant is at most 1") {
  for (const Shape& shape : kShapes) {
    for (int k = 0; k <= 3; ++k) {
      LocalOperators ops = make_ops(shape.loop, k, k);
      for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd v = random_vector(ops.n_local);
        Eigen::VectorXd p = ops.reconstruction * v;
        double grad2 = p.dot(ops.stiffness * p);
        double face2 = 0.0;
        for (int i = 0; i < ops.n_faces(); ++i) {
          Eigen::VectorXd d = ops.psi_F[i] * (ops.diff_F[i] * v);
          face2 += d.dot(ops.quad_F[i].weights.asDiagonal() * d);
        }
        double lhs = grad2 + face2 / ops.h_T;
        double energy = v.dot(ops.bilinear * v);
        CHECK(lhs <= (1.0 + 1e-10) * energy + 1e-13);
      }
    }
  }
}

TEST_CASE("assumption face upper bound does not trend upward in k") {
  for (const Shape& shape : {kShapes[0], kShapes[2]}) {
    std::vector<double> constant;
    for (int k = 0; k <= 6; ++k) {
      LocalOperators ops = make_ops(shape.loop, k, k);
      double worst = 0.0;
      for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(ops.n_local);
        v.tail(ops.n_face_dofs()) = random_vector(ops.n_face_dofs());
        Eigen::VectorXd p = ops.reconstruction * v;
        double grad2 = p.dot(ops.stiffness * p);
        double face2 = 0.0;
        for (int i = 0; i < ops.n_faces(); ++i) {
          Eigen::VectorXd d = ops.psi_F[i] * (ops.diff_F[i] * v);
          face2 += d.dot(ops.quad_F[i].weights.asDiagonal() * d);
        }
        double rhs = grad2 + face2 / ops.h_T;
        double energy = v.dot(ops.bilinear * v);
        if (rhs > 1e-13) worst = std::max(worst, energy / rhs);
      }
      constant.push_back(worst);
    }
    double early = std::max({constant[0], constant[1], constant[2]});
    for (std::size_t k = 3; k < constant.size(); ++k) {
      INFO(shape.name, " face upper-bound constant at k=", k, ": ", constant[k]);
      CHECK(constant[k] <= 1.10 * early);
    }
  }
}

TEST_CASE("discrete trace and Poincare-Wirtinger diagnostics are scale stable") {
  auto scaled_square = [](double h) {
    return std::vector<Eigen::Vector2d>{{0, 0}, {h, 0}, {h, h}, {0, h}};
  };
  for (int deg = 1; deg <= 4; ++deg) {
    std::vector<double> trace_c, pw_c;
    for (double h : {1.0, 0.25}) {
      SingleElement s = make_single(scaled_square(h));
      QuadratureRule rule = polygon_quadrature(scaled_square(h), 2 * deg + 2);
      PolynomialBasis basis =
          element_basis({h / 2, h / 2}, s.metrics.element_diameter[0], deg, rule);
      double h_T = s.metrics.element_diameter[0];
      double worst_tr = 0.0, worst_pw = 0.0;
      for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd q = random_vector(basis.dimension());
        Eigen::MatrixXd V = basis.values(rule.points);
        Eigen::MatrixXd dx, dy;
        basis.gradients(rule.points, dx, dy);
        Eigen::VectorXd vq = V * q;
        double l2 = vq.dot(rule.weights.asDiagonal() * vq);
        Eigen::VectorXd gx = dx * q, gy = dy * q;
        double grad2 = gx.dot(rule.weights.asDiagonal() * gx) +
                       gy.dot(rule.weights.asDiagonal() * gy);
        double bnd2 = 0.0;
        for (int f = 0; f < s.mesh.n_faces(); ++f) {
          QuadratureRule fr = segment_quadrature(s.mesh.face_point(f, 0),
                                                 s.mesh.face_point(f, 1), 2 * deg + 2);
          Eigen::VectorXd fv = basis.values(fr.points) * q;
          bnd2 += fv.dot(fr.weights.asDiagonal() * fv);
        }
        if (l2 > 1e-14)
          worst_tr = std::max(worst_tr, bnd2 * h_T / ((deg + 1) * (deg + 2) * l2));
        double mean = 0.0;
        for (int qq = 0; qq < rule.size(); ++qq) mean += rule.weights(qq) * vq(qq);
        mean /= rule.total_weight();
        double var = 0.0;
        for (int qq = 0; qq < rule.size(); ++qq)
          var += rule.weights(qq) * (vq(qq) - mean) * (vq(qq) - mean);
        if (grad2 > 1e-14) worst_pw = std::max(worst_pw, var / (h_T * h_T * grad2));
      }
      trace_c.push_back(worst_tr);
      pw_c.push_back(worst_pw);
    }
    // The constants are dimensionless, so refinement leaves them unchanged.
    CHECK(trace_c[1] == doctest::Approx(trace_c[0]).epsilon(0.5));
    CHECK(pw_c[1] == doctest::Approx(pw_c[0]).epsilon(0.5));
    CHECK(trace_c[0] < 50.0);
    CHECK(pw_c[0] < 10.0);
  }
}

TEST_CASE("local condensation") {
  SingleElement s = make_single(kShapes[2].loop);
  auto source = [](const Eigen::Vector2d& p) { return std::cos(p.x()) + p.y(); };
  LocalOperators ops = build_local_operators(s.mesh, s.metrics, 0, make_local_space(1, 1),
                                             StabilizationVariant::Main, source);
  const int n_T = ops.n_elem;
  const int n_F = ops.n_face_dofs();

  SUBCASE("dense block-elimination oracle") {
    Eigen::MatrixXd A_TT = ops.bilinear.topLeftCorner(n_T, n_T);
    Eigen::MatrixXd A_TF = ops.bilinear.topRightCorner(n_T, n_F);
    Eigen::MatrixXd A_FF = ops.bilinear.bottomRightCorner(n_F, n_F);
    Eigen::MatrixXd oracle = A_FF - A_TF.transpose() * A_TT.inverse() * A_TF;
    CHECK((ops.schur - oracle).cwiseAbs().maxCoeff() <=
          1e-11 * oracle.cwiseAbs().maxCoeff());
    Eigen::VectorXd g_oracle = A_TT.inverse() * ops.elem_load;
    CHECK((ops.g_T - g_oracle).norm() <= 1e-11 * std::max(1.0, g_oracle.norm()));
  }
  SUBCASE("homogeneous lift when f = 0") {
    LocalOperators zero =
        build_local_operators(s.mesh, s.metrics, 0, make_local_space(1, 1),
                              StabilizationVariant::Main, nullptr);
    CHECK(zero.g_T.norm() == 0.0);
    Eigen::VectorXd u_F = random_vector(n_F);
    Eigen::VectorXd u_T = zero.lift * u_F;
    // Element test equations: A_TT u_T + A_TF u_F = 0.
    Eigen::VectorXd res = zero.bilinear.topLeftCorner(n_T, n_T) * u_T +
                          zero.bilinear.topRightCorner(n_T, n_F) * u_F;
    CHECK(res.norm() <= 1e-10 * u_F.norm() * zero.bilinear.cwiseAbs().maxCoeff());
  }
  SUBCASE("single-element Schur has a one-dimensional constant kernel") {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ops.schur);
    CHECK(es.eigenvalues()(0) <= 1e-11 * es.eigenvalues()(n_F - 1));
    CHECK(es.eigenvalues()(1) > 1e-8 * es.eigenvalues()(n_F - 1));
  }
}

TEST_CASE("seminorm matches an independent quadrature evaluation") {
  for (const Shape& shape : kShapes) {
    SingleElement s = make_single(shape.loop);
    LocalOperators ops = build_local_operators(s.mesh, s.metrics, 0, make_local_space(2, 2),
                                               StabilizationVariant::Main);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd v = random_vector(ops.n_local);
      QuadratureRule rt = polygon_quadrature(shape.loop, 2 * ops.space.l + 4);
      PolynomialBasis elem = basis_prefix(ops.basis_hi, ops.space.l);
      Eigen::MatrixXd dx, dy;
      elem.gradients(rt.points, dx, dy);
      Eigen::VectorXd gx = dx * v.head(ops.n_elem), gy = dy * v.head(ops.n_elem);
      double grad2 =
          gx.dot(rt.weights.asDiagonal() * gx) + gy.dot(rt.weights.asDiagonal() * gy);
      double bnd2 = 0.0;
      for (int f = 0; f < ops.n_faces(); ++f) {
        QuadratureRule fr =
            segment_quadrature(s.mesh.face_point(s.mesh.element_faces[0][f], 0),
                               s.mesh.face_point(s.mesh.element_faces[0][f], 1),
                               2 * ops.space.k + 6);
        Eigen::VectorXd face_v = ops.basis_F[f].values(fr.points) *
                                 v.segment(ops.face_offset(f), ops.space.face_dim());
        Eigen::VectorXd elem_v = elem.values(fr.points) * v.head(ops.n_elem);
        Eigen::VectorXd d = face_v - elem_v;
        bnd2 += d.dot(fr.weights.asDiagonal() * d);
      }
      double expected = std::sqrt(grad2 + bnd2 / ops.h_T);
      CHECK(local_seminorm(ops, v) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("interpolator examples") {
  SUBCASE("constants interpolate to constant blocks") {
    LocalOperators ops = make_ops(kShapes[0].loop, 1, 1);
    Eigen::VectorXd dofs = interpolate(ops, [](const Eigen::Vector2d&) { return 1.0; });
    CHECK(std::abs(dofs(0)) == doctest::Approx(1.0).epsilon(1e-12));  // sqrt(|T|)
    CHECK(std::abs(dofs(1)) <= 1e-12);
    CHECK(std::abs(dofs(2)) <= 1e-12);
    for (int f = 0; f < 4; ++f) {
      CHECK(std::abs(dofs(ops.face_offset(f))) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(dofs(ops.face_offset(f) + 1)) <= 1e-12);
    }
  }
  SUBCASE("element block reproduces P^l exactly") {
    LocalOperators ops = make_ops(kShapes[3].loop, 2, 2);
    auto f = [](const Eigen::Vector2d& p) { return 3.0 * p.x() * p.y() - p.y() + 0.5; };
    Eigen::VectorXd dofs = interpolate(ops, f);
    PolynomialBasis elem = basis_prefix(ops.basis_hi, 2);
    for (const Eigen::Vector2d& p :
         {Eigen::Vector2d(0.3, 0.4), Eigen::Vector2d(0.9, 0.8)}) {
      double v = (elem.values({p}) * dofs.head(ops.n_elem))(0, 0);
      CHECK(v == doctest::Approx(f(p)).epsilon(1e-11));
    }
  }
  SUBCASE("face blocks of x^2 are the per-face linear fits (closed form)") {
    // On the bottom face of the unit square, pi^1(x^2)(s) = s - 1/6.
    SingleElement s = make_single(kShapes[0].loop);
    LocalOperators ops = build_local_operators(s.mesh, s.metrics, 0, make_local_space(1, 1),
                                               StabilizationVariant::Main);
    Eigen::VectorXd dofs =
        interpolate(ops, [](const Eigen::Vector2d& p) { return p.x() * p.x(); });
    for (int i = 0; i < 4; ++i) {
      int f = s.mesh.element_faces[0][i];
      Eigen::Vector2d a = s.mesh.face_point(f, 0);
      Eigen::Vector2d b = s.mesh.face_point(f, 1);
      if (std::abs(a.y()) > 1e-14 || std::abs(b.y()) > 1e-14) continue;  // bottom only
      for (double t : {0.1, 0.5, 0.9}) {
        Eigen::Vector2d p = a + t * (b - a);
        double v =
            (ops.basis_F[i].values({p}) * dofs.segment(ops.face_offset(i), 2))(0, 0);
        CHECK(v == doctest::Approx(p.x() - 1.0 / 6.0).epsilon(1e-11));
      }
    }
  }
}
