// Scaled monomial bases on elements and faces, L2-orthonormalisation and
// L2 projection. Monomials are ordered by total degree, so the leading
// (l+1)(l+2)/2 functions of a degree-m element basis span P^l for any l <= m;
// the same holds on faces. Element monomials are ((x-x_T)/h_T)^a, face
// monomials are powers of the affine pullback to [-1,1].

#ifndef HHO2D_BASIS_HPP
#define HHO2D_BASIS_HPP

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hho2d/quadrature.hpp"

namespace hho2d {

struct PolynomialBasis {
  int degree = 0;
  bool on_face = false;
  bool orthonormal = true;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();  ///< x_T, or face midpoint
  double scale = 1.0;                                ///< h_T, or half the face length
  Eigen::Vector2d tangent = Eigen::Vector2d::UnitX();  ///< face only
  /// Exponents of the monomial family; faces use the first component only.
  std::vector<std::array<int, 2>> exponents;
  /// Change of basis: function i = sum_j coeff(i,j) * monomial j. Identity in
  /// raw-monomial mode, lower-triangular after Gram-Schmidt.
  Eigen::MatrixXd coeff;

  int dimension() const { return static_cast<int>(exponents.size()); }

  /// Values matrix V with V(q, i) = phi_i(points[q]).
  Eigen::MatrixXd values(const std::vector<Eigen::Vector2d>& points) const;
  /// Cartesian gradient components; elements only.
  void gradients(const std::vector<Eigen::Vector2d>& points, Eigen::MatrixXd& dx,
                 Eigen::MatrixXd& dy) const;
  /// Second derivatives; elements only (used by test oracles).
  void second_derivatives(const std::vector<Eigen::Vector2d>& points, Eigen::MatrixXd& dxx,
                          Eigen::MatrixXd& dxy, Eigen::MatrixXd& dyy) const;
};

/// Basis of P^degree(T) from monomials centered at `center` with scale `h`.
/// With orthonormalize set, runs classical Gram-Schmidt with one
/// re-orthogonalisation pass under the quadrature inner product; the rule must
/// be exact for degree 2*degree. Throws NumericalError when the family is
/// numerically dependent (degenerate domain).
PolynomialBasis element_basis(const Eigen::Vector2d& center, double h, int degree,
                              const QuadratureRule& rule, bool orthonormalize = true);

/// Basis of P^degree(F) on the segment [a, b]; same orthonormalisation
/// contract as element_basis. Raw mode keeps plain pullback monomials.
PolynomialBasis face_basis(const Eigen::Vector2d& a, const Eigen::Vector2d& b, int degree,
                           const QuadratureRule& rule, bool orthonormalize = true);

/// Gram matrix of the basis under the rule.
Eigen::MatrixXd gram_matrix(const PolynomialBasis& basis, const QuadratureRule& rule);

/// Frame bounds (c, C): extreme eigenvalues of the Gram matrix. Both equal 1
/// for an orthonormal basis.
std::pair<double, double> frame_bounds(const PolynomialBasis& basis,
                                       const QuadratureRule& rule);

/// Coefficients of the L2 projection of f onto the basis span. No linear
/// solve is needed in the orthonormal case.
Eigen::VectorXd l2_project(const std::function<double(const Eigen::Vector2d&)>& f,
                           const PolynomialBasis& basis, const QuadratureRule& rule);

}  // namespace hho2d

#endif
