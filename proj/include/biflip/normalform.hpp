#pragma once

#include <biflip/jet.hpp>
#include <biflip/models.hpp>

#include <stdexcept>
#include <string>

namespace biflip {

/// Coefficients of the sextic normal form (a/2)p^2 + (nu1/2)q^2 + (nu2/4)q^4
/// + (b/6)q^6.  Two sextic conventions are carried side by side:
/// u3_coeff is the b of H = ... + b u^3 written in the invariant u = q^2/2
/// (so u3_coeff = 8 * (q^6 coefficient)), and b_q6 = (3/4) u3_coeff =
/// 6 * (q^6 coefficient) is the b of the (b/6)q^6 form, the convention the
/// rest of the pipeline (gradient, discriminant, concavity) consumes.
struct nf_coefficients {
  double a = 0.0;
  double nu1 = 0.0;
  double nu2 = 0.0;
  double u3_coeff = 0.0;
  double b_q6 = 0.0;
  double residual = 0.0;  ///< max |coefficient| of eliminated non-normal monomials
};

/// Central finite-difference estimates of the normal-form coefficients'
/// parameter derivatives at a base point (j*, t*).
struct nu_derivatives {
  double d_nu1_dj = 0.0;
  double d2_nu1_dj2 = 0.0;
  double d_nu1_dt = 0.0;
  double d_nu2_dj = 0.0;
  double step_j = 0.0;
  double step_t = 0.0;
};

enum class concavity_verdict { same_direction, opposite_direction, degenerate };

/// Concavity comparison of the two parabolas meeting at the bifurcation:
/// ratio = (1/(2b)) (d nu2/dj)^2 / (d^2 nu1/dj^2).
struct concavity_report_t {
  double ratio = 0.0;
  concavity_verdict verdict = concavity_verdict::degenerate;
  std::string b_convention;  ///< which b value was used (e.g. "b_q6")
};

/// Per-condition values and verdict of the saddle-node hypothesis check.
struct saddle_node_report {
  bool passes = false;
  double nu1 = 0.0;
  double d_nu1_dj = 0.0;
  double d2_nu1_dj2 = 0.0;
  double d_nu1_dt = 0.0;
  bool nu1_vanishes = false;
  bool slope_vanishes = false;
  bool curvature_nonzero = false;
  bool t_slope_nonzero = false;
};

/// Raised when a homological system is rank-deficient beyond its expected
/// one-dimensional kernel (a -> 0) or the transform leaves residual above
/// tolerance; carries the unresolved residual magnitude.
struct normalization_error : std::runtime_error {
  double residual;
  normalization_error(const std::string& msg, double res)
      : std::runtime_error(msg), residual(res) {}
};

struct quadratic_diagonalization {
  symplectic_map2<double> m;
  double a = 0.0;
  double nu1 = 0.0;
};

/// Rotate away the qp cross term.  a = 2*(p^2 coefficient), nu1 = 2*(q^2
/// coefficient); with a cross term present the axis labeling with |a| >= |nu1|
/// is chosen, without one the map is the identity and labels are untouched.
quadratic_diagonalization diagonalize_quadratic(const jet<double>& h);

struct normalize_result {
  nf_coefficients nf;
  jet<double> f2;                 ///< degree-4 Lie generator
  jet<double> f3;                 ///< degree-6 Lie generator
  symplectic_map2<double> m;      ///< diagonalizing rotation
  jet<double> normal_jet;         ///< the fully transformed jet
};

/// Full normalization: rotation, then Lie elimination of all degree-4 terms
/// except q^4 and all degree-6 terms except q^6.
normalize_result normalize(const jet<double>& h);

/// Finite-difference parameter derivatives of (nu1, nu2) through the full
/// normalize pipeline; h = fd_step * max(1, |j*|) and analogously for t.
/// One Richardson refinement of the j-derivatives is available behind a flag.
nu_derivatives estimate_nu_derivatives(model_id id, const model_params& params, double j,
                                       double t, double fd_step = 1e-4,
                                       bool richardson = false);

/// Saddle-node hypotheses: nu1 = 0, d nu1/dj = 0 (each to 1e-6), and
/// d^2 nu1/dj^2 != 0, d nu1/dt != 0 (each at least 1e-6).
saddle_node_report check_saddle_node(const nu_derivatives& d, double nu1_at_base);

/// Concavity/degeneracy verdict; tol = 1e-6 around ratio 1.
concavity_report_t concavity_report(const nu_derivatives& d, double b,
                                    const std::string& b_convention = "b_input");

std::string verdict_name(concavity_verdict v);

}  // namespace biflip
