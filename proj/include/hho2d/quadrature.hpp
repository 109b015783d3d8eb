// Quadrature on segments, triangles and simple polygons.

#ifndef HHO2D_QUADRATURE_HPP
#define HHO2D_QUADRATURE_HPP

#include <vector>

#include <Eigen/Dense>

#include "hho2d/common.hpp"

namespace hho2d {

struct QuadratureRule {
  std::vector<Eigen::Vector2d> points;
  Eigen::VectorXd weights;
  int exactness_degree = 0;

  int size() const { return static_cast<int>(points.size()); }
  double total_weight() const { return weights.sum(); }
};

/// Gauss-Legendre nodes/weights on [-1, 1], exact for degree 2n-1.
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Gauss rule on the segment [a, b], exact for polynomials of degree <= order.
QuadratureRule segment_quadrature(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                  int order);

/// Rule on the triangle (a, b, c), exact for total degree <= order. Built from
/// a tensor Gauss rule on the collapsed square.
QuadratureRule triangle_quadrature(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                   const Eigen::Vector2d& c, int order);

/// Rule on a simple CCW polygon, exact for total degree <= order. Triangulates
/// by a fan from the vertex-average point when the polygon is star-shaped with
/// respect to it, otherwise falls back to ear clipping.
QuadratureRule polygon_quadrature(const std::vector<Eigen::Vector2d>& loop, int order);

/// Ear-clipping triangulation of a simple CCW polygon; collinear vertices are
/// consumed as zero-area ears. Returns index triples into the loop.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Eigen::Vector2d>& loop);

}  // namespace hho2d

#endif
