// Element-local HHO machinery: interpolator, degree-(k+1) potential
// reconstruction with mean-value closure, difference operators, the
// stabilisation variants, the local bilinear form and its static
// condensation. Local dof layout is [element block | face blocks in
// element_faces order].

#ifndef HHO2D_LOCAL_OPERATORS_HPP
#define HHO2D_LOCAL_OPERATORS_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hho2d/basis.hpp"
#include "hho2d/mesh.hpp"
#include "hho2d/quadrature.hpp"

namespace hho2d {

using ScalarField = std::function<double(const Eigen::Vector2d&)>;

enum class StabilizationVariant {
  Main,       ///< h_T^-2 volumetric + h_T^-1 boundary difference terms
  KMinusOne,  ///< boundary difference term only; admissible for l = k-1
  Boundary,   ///< original HHO: h_T^-1 boundary term on (delta_dT - delta_T)
  Gradient,   ///< gradient of the volumetric difference + boundary term
  Hdg,        ///< h_T^-1 face projection of v_dT - v_T; admissible for l = k+1
};

enum class FaceBasisMode { Orthonormal, RawMonomial };

const char* to_string(StabilizationVariant v);
StabilizationVariant stabilization_from_string(const std::string& name);

/// Polynomial degree pair (k on faces, l on elements), l in {k-1, k, k+1}.
struct LocalSpace {
  int k = 0;
  int l = 0;

  int element_dim() const { return (l + 1) * (l + 2) / 2; }
  int face_dim() const { return k + 1; }
  int reconstruction_dim() const { return (k + 2) * (k + 3) / 2; }
};

/// Validates k >= 0, l >= 0 and l in {k-1, k, k+1}.
LocalSpace make_local_space(int k, int l);

/// Throws ConfigError naming the violated constraint when the variant is not
/// admissible for the space.
void check_admissible(const LocalSpace& space, StabilizationVariant variant);

/// All per-element matrices of the scheme on one element.
struct LocalOperators {
  LocalSpace space;
  int element = -1;
  double h_T = 0.0;
  double area = 0.0;
  int n_elem = 0;   ///< element block size
  int n_local = 0;  ///< element + all face blocks

  QuadratureRule quad_T;
  PolynomialBasis basis_hi;  ///< orthonormal degree k+1 element basis
  std::vector<QuadratureRule> quad_F;
  std::vector<PolynomialBasis> basis_F;

  // Value caches at quadrature points (rows = points).
  Eigen::MatrixXd phi_T, dphi_x, dphi_y;  ///< degree k+1 basis on quad_T
  std::vector<Eigen::MatrixXd> psi_F;     ///< face basis on quad_F
  std::vector<Eigen::MatrixXd> phi_TF;    ///< element basis traces on quad_F

  Eigen::MatrixXd stiffness;       ///< degree k+1 stiffness matrix
  Eigen::MatrixXd reconstruction;  ///< P: local dofs -> degree k+1 coefficients
  Eigen::MatrixXd diff_T;          ///< delta_T^l as a matrix on local dofs
  std::vector<Eigen::MatrixXd> diff_F;  ///< delta_dT^k per face
  Eigen::MatrixXd stab;            ///< stabilisation for the requested variant
  Eigen::MatrixXd bilinear;        ///< A_T = P^T K P + stab

  Eigen::MatrixXd schur;      ///< condensed face-face block
  Eigen::MatrixXd lift;       ///< v_dT -> element coefficients of S_T v_dT
  Eigen::VectorXd g_T;        ///< element coefficients of the load lift
  Eigen::VectorXd elem_load;  ///< (f, phi_i)_T
  Eigen::VectorXd face_load;  ///< condensed right-hand side block

  int n_faces() const { return static_cast<int>(basis_F.size()); }
  /// Column offset of local face i within the local dof vector.
  int face_offset(int i) const { return n_elem + i * space.face_dim(); }
  int n_face_dofs() const { return n_local - n_elem; }
};

/// Builds the full operator pack for one element. `source` may be empty, in
/// which case the load pieces are zero.
LocalOperators build_local_operators(const PolyMesh& mesh, const MeshMetrics& metrics,
                                     int element, const LocalSpace& space,
                                     StabilizationVariant variant,
                                     const ScalarField& source = nullptr,
                                     FaceBasisMode face_mode = FaceBasisMode::Orthonormal);

/// Stabilisation matrix for any admissible variant, reusing the pack's
/// reconstruction and difference operators.
Eigen::MatrixXd stabilization_matrix(const LocalOperators& ops, StabilizationVariant variant);

/// I_T v: element block is the L2 projection on P^l(T), each face block the
/// L2 projection on P^k(F).
Eigen::VectorXd interpolate(const LocalOperators& ops, const ScalarField& v);

/// Discrete energy-like seminorm (|grad v_T|_T^2 + h_T^-1 |v_dT - v_T|_dT^2)^(1/2).
double local_seminorm(const LocalOperators& ops, const Eigen::VectorXd& v);

/// Degree-l prefix view of an orthonormal graded basis.
PolynomialBasis basis_prefix(const PolynomialBasis& basis, int degree);

}  // namespace hho2d

#endif
