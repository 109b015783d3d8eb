#include "hho2d/quadrature.hpp"

#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace hho2d {

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw ConfigError("gauss_legendre: need at least one node");
  if (n == 1) {
    nodes = Eigen::VectorXd::Zero(1);
    weights = Eigen::VectorXd::Constant(1, 2.0);
    return;
  }
  // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int j = 1; j < n; ++j) {
    double b = j / std::sqrt(4.0 * j * j - 1.0);
    J(j, j - 1) = b;
    J(j - 1, j) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes = es.eigenvalues();
  weights.resize(n);
  for (int j = 0; j < n; ++j) {
    double v0 = es.eigenvectors()(0, j);
    weights(j) = 2.0 * v0 * v0;
  }
}

QuadratureRule segment_quadrature(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                  int order) {
  if (order < 0) throw ConfigError("segment_quadrature: negative order");
  double len = (b - a).norm();
  if (len <= 0.0) throw MeshError("segment_quadrature: zero-length face");
  int n = (order + 2) / 2;  // ceil((order+1)/2)
  Eigen::VectorXd t, w;
  gauss_legendre(n, t, w);
  QuadratureRule rule;
  rule.exactness_degree = order;
  rule.points.resize(n);
  rule.weights.resize(n);
  Eigen::Vector2d mid = 0.5 * (a + b);
  Eigen::Vector2d half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = mid + t(i) * half;
    rule.weights(i) = 0.5 * len * w(i);
  }
  return rule;
}

QuadratureRule triangle_quadrature(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                   const Eigen::Vector2d& c, int order) {
  if (order < 0) throw ConfigError("triangle_quadrature: negative order");
  // Collapsed map P(u,v) = a + u (b - a) + u v (c - b) on [0,1]^2 with
  // Jacobian 2 |T| u; a total-degree-p integrand needs degrees (p+1, p).
  int nu = (order + 3) / 2;  // ceil((order+2)/2)
  int nv = (order + 2) / 2;  // ceil((order+1)/2)
  Eigen::VectorXd tu, wu, tv, wv;
  gauss_legendre(nu, tu, wu);
  gauss_legendre(nv, tv, wv);
  double area2 = cross2(b - a, c - a);  // signed, 2|T|
  QuadratureRule rule;
  rule.exactness_degree = order;
  rule.points.resize(nu * nv);
  rule.weights.resize(nu * nv);
  int q = 0;
  for (int i = 0; i < nu; ++i) {
    double u = 0.5 * (tu(i) + 1.0);
    for (int j = 0; j < nv; ++j, ++q) {
      double v = 0.5 * (tv(j) + 1.0);
      rule.points[q] = a + u * (b - a) + u * v * (c - b);
      rule.weights(q) = 0.25 * wu(i) * wv(j) * area2 * u;
    }
  }
  return rule;
}

std::vector<std::array<int, 3>> ear_clip(const std::vector<Eigen::Vector2d>& loop) {
  const int m = static_cast<int>(loop.size());
  if (m < 3) throw MeshError("ear_clip: fewer than 3 vertices");
  double diam = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) diam = std::max(diam, (loop[i] - loop[j]).norm());
  const double tol = 1e-14 * diam * diam;

  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  std::vector<std::array<int, 3>> tris;

  // Inclusive test: a vertex on the candidate's boundary also blocks the ear,
  // otherwise collinear grid vertices let a clipped triangle leave the polygon.
  auto blocks_ear = [&](const Eigen::Vector2d& p, const Eigen::Vector2d& ta,
                        const Eigen::Vector2d& tb, const Eigen::Vector2d& tc) {
    return cross2(tb - ta, p - ta) >= -tol && cross2(tc - tb, p - tb) >= -tol &&
           cross2(ta - tc, p - tc) >= -tol;
  };

  while (idx.size() > 3) {
    bool clipped = false;
    const int n = static_cast<int>(idx.size());
    for (int i = 0; i < n; ++i) {
      int ip = idx[(i + n - 1) % n];
      int ic = idx[i];
      int in = idx[(i + 1) % n];
      Eigen::Vector2d e1 = loop[ic] - loop[ip];
      Eigen::Vector2d e2 = loop[in] - loop[ic];
      double cr = cross2(e1, e2);
      if (cr < -tol) continue;  // reflex
      if (cr <= tol) {
        // Collinear vertex: drop it without emitting a triangle, unless the
        // boundary folds back on itself (spike).
        if (e1.dot(e2) < 0.0) continue;
        idx.erase(idx.begin() + i);
        clipped = true;
        break;
      }
      bool ear = true;
      for (int j : idx) {
        if (j == ip || j == ic || j == in) continue;
        if (blocks_ear(loop[j], loop[ip], loop[ic], loop[in])) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      tris.push_back({ip, ic, in});
      idx.erase(idx.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped) throw MeshError("ear_clip: no ear found (polygon not simple?)");
  }
  if (cross2(loop[idx[1]] - loop[idx[0]], loop[idx[2]] - loop[idx[0]]) > tol)
    tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

QuadratureRule polygon_quadrature(const std::vector<Eigen::Vector2d>& loop, int order) {
  const int m = static_cast<int>(loop.size());
  if (m < 3) throw MeshError("polygon_quadrature: fewer than 3 vertices");
  double diam = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) diam = std::max(diam, (loop[i] - loop[j]).norm());
  const double tol = 1e-14 * diam * diam;

  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  for (const auto& p : loop) center += p;
  center /= m;

  // The fan covers the polygon exactly iff every fan triangle is positive.
  bool fan_ok = true;
  for (int i = 0; i < m; ++i) {
    if (cross2(loop[i] - center, loop[(i + 1) % m] - center) <= tol) {
      fan_ok = false;
      break;
    }
  }

  QuadratureRule rule;
  rule.exactness_degree = order;
  auto append = [&rule](const QuadratureRule& part) {
    int base = rule.size();
    rule.points.insert(rule.points.end(), part.points.begin(), part.points.end());
    rule.weights.conservativeResize(base + part.size());
    rule.weights.tail(part.size()) = part.weights;
  };
  rule.weights.resize(0);

  if (fan_ok) {
    for (int i = 0; i < m; ++i)
      append(triangle_quadrature(center, loop[i], loop[(i + 1) % m], order));
  } else {
    for (const auto& t : ear_clip(loop))
      append(triangle_quadrature(loop[t[0]], loop[t[1]], loop[t[2]], order));
  }
  return rule;
}

}  // namespace hho2d
