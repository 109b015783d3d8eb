#include "hho2d/basis.hpp"

#include <cmath>

namespace hho2d {

namespace {

// Monomial values M(q, j) at the given points, in the basis' local frame.
Eigen::MatrixXd monomial_values(const PolynomialBasis& b,
                                const std::vector<Eigen::Vector2d>& points) {
  const int n = b.dimension();
  const int nq = static_cast<int>(points.size());
  Eigen::MatrixXd M(nq, n);
  for (int q = 0; q < nq; ++q) {
    double X = 0.0, Y = 0.0;
    if (b.on_face) {
      X = (points[q] - b.center).dot(b.tangent) / b.scale;
    } else {
      X = (points[q].x() - b.center.x()) / b.scale;
      Y = (points[q].y() - b.center.y()) / b.scale;
    }
    for (int j = 0; j < n; ++j) {
      double v = 1.0;
      for (int p = 0; p < b.exponents[j][0]; ++p) v *= X;
      for (int p = 0; p < b.exponents[j][1]; ++p) v *= Y;
      M(q, j) = v;
    }
  }
  return M;
}

double int_pow(double x, int p) {
  double v = 1.0;
  for (int i = 0; i < p; ++i) v *= x;
  return v;
}

void orthonormalize_in_place(PolynomialBasis& b, const QuadratureRule& rule) {
  const int n = b.dimension();
  Eigen::MatrixXd M = monomial_values(b, rule.points);
  Eigen::MatrixXd G = M.transpose() * rule.weights.asDiagonal() * M;  // monomial Gram
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(n);
    c(i) = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < i; ++j) c -= (c * G * C.row(j).transpose()) * C.row(j);
    double nrm = std::sqrt(c * G * c.transpose());
    if (!(nrm > 1e-13 * std::sqrt(G(i, i))))
      throw NumericalError("orthonormalize: numerically dependent family (degenerate domain)");
    C.row(i) = c / nrm;
  }
  b.coeff = C;
  b.orthonormal = true;
}

}  // namespace

Eigen::MatrixXd PolynomialBasis::values(const std::vector<Eigen::Vector2d>& points) const {
  return monomial_values(*this, points) * coeff.transpose();
}

void PolynomialBasis::gradients(const std::vector<Eigen::Vector2d>& points,
                                Eigen::MatrixXd& dx, Eigen::MatrixXd& dy) const {
  const int n = dimension();
  const int nq = static_cast<int>(points.size());
  Eigen::MatrixXd Mx(nq, n), My(nq, n);
  for (int q = 0; q < nq; ++q) {
    double X = (points[q].x() - center.x()) / scale;
    double Y = (points[q].y() - center.y()) / scale;
    for (int j = 0; j < n; ++j) {
      int ax = exponents[j][0], ay = exponents[j][1];
      Mx(q, j) = ax == 0 ? 0.0 : ax / scale * int_pow(X, ax - 1) * int_pow(Y, ay);
      My(q, j) = ay == 0 ? 0.0 : ay / scale * int_pow(X, ax) * int_pow(Y, ay - 1);
    }
  }
  dx = Mx * coeff.transpose();
  dy = My * coeff.transpose();
}

void PolynomialBasis::second_derivatives(const std::vector<Eigen::Vector2d>& points,
                                         Eigen::MatrixXd& dxx, Eigen::MatrixXd& dxy,
                                         Eigen::MatrixXd& dyy) const {
  const int n = dimension();
  const int nq = static_cast<int>(points.size());
  Eigen::MatrixXd Mxx(nq, n), Mxy(nq, n), Myy(nq, n);
  const double s2 = scale * scale;
  for (int q = 0; q < nq; ++q) {
    double X = (points[q].x() - center.x()) / scale;
    double Y = (points[q].y() - center.y()) / scale;
    for (int j = 0; j < n; ++j) {
      int ax = exponents[j][0], ay = exponents[j][1];
      Mxx(q, j) = ax < 2 ? 0.0 : ax * (ax - 1) / s2 * int_pow(X, ax - 2) * int_pow(Y, ay);
      Mxy(q, j) =
          (ax < 1 || ay < 1) ? 0.0 : ax * ay / s2 * int_pow(X, ax - 1) * int_pow(Y, ay - 1);
      Myy(q, j) = ay < 2 ? 0.0 : ay * (ay - 1) / s2 * int_pow(X, ax) * int_pow(Y, ay - 2);
    }
  }
  dxx = Mxx * coeff.transpose();
  dxy = Mxy * coeff.transpose();
  dyy = Myy * coeff.transpose();
}

PolynomialBasis element_basis(const Eigen::Vector2d& center, double h, int degree,
                              const QuadratureRule& rule, bool orthonormalize) {
  if (degree < 0) throw ConfigError("element_basis: negative degree");
  if (!(h > 0.0)) throw MeshError("element_basis: non-positive scale");
  PolynomialBasis b;
  b.degree = degree;
  b.on_face = false;
  b.center = center;
  b.scale = h;
  for (int d = 0; d <= degree; ++d)
    for (int ax = d; ax >= 0; --ax) b.exponents.push_back({ax, d - ax});
  b.coeff = Eigen::MatrixXd::Identity(b.dimension(), b.dimension());
  b.orthonormal = false;
  if (orthonormalize) orthonormalize_in_place(b, rule);
  return b;
}

PolynomialBasis face_basis(const Eigen::Vector2d& a, const Eigen::Vector2d& b, int degree,
                           const QuadratureRule& rule, bool orthonormalize) {
  if (degree < 0) throw ConfigError("face_basis: negative degree");
  double len = (b - a).norm();
  if (len <= 0.0) throw MeshError("face_basis: zero-length face");
  PolynomialBasis fb;
  fb.degree = degree;
  fb.on_face = true;
  fb.center = 0.5 * (a + b);
  fb.scale = 0.5 * len;
  fb.tangent = (b - a) / len;
  for (int d = 0; d <= degree; ++d) fb.exponents.push_back({d, 0});
  fb.coeff = Eigen::MatrixXd::Identity(fb.dimension(), fb.dimension());
  fb.orthonormal = false;
  if (orthonormalize) orthonormalize_in_place(fb, rule);
  return fb;
}

Eigen::MatrixXd gram_matrix(const PolynomialBasis& basis, const QuadratureRule& rule) {
  Eigen::MatrixXd V = basis.values(rule.points);
  return V.transpose() * rule.weights.asDiagonal() * V;
}

std::pair<double, double> frame_bounds(const PolynomialBasis& basis,
                                       const QuadratureRule& rule) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_matrix(basis, rule));
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

Eigen::VectorXd l2_project(const std::function<double(const Eigen::Vector2d&)>& f,
                           const PolynomialBasis& basis, const QuadratureRule& rule) {
  Eigen::MatrixXd V = basis.values(rule.points);
  Eigen::VectorXd fw(rule.size());
  for (int q = 0; q < rule.size(); ++q) fw(q) = rule.weights(q) * f(rule.points[q]);
  Eigen::VectorXd rhs = V.transpose() * fw;
  if (basis.orthonormal) return rhs;
  Eigen::MatrixXd G = V.transpose() * rule.weights.asDiagonal() * V;
  return G.ldlt().solve(rhs);
}

}  // namespace hho2d
