#pragma once

#include <biflip/models.hpp>

#include <vector>

namespace biflip {

enum class branch_id { q1, q2_minus, q2_plus, numeric };
enum class point_class { centre, saddle, degenerate };

/// A critical point of the reduced Hamiltonian at fixed (j,t).  lambda_squared
/// is the squared eigenvalue of the linearized field: negative means centre,
/// positive means saddle, |lambda^2| below the scaled tolerance means
/// degenerate.  Only the q >= 0 representative of each symmetric pair is
/// reported.
struct critical_point {
  double q = 0.0;
  double p = 0.0;
  branch_id branch = branch_id::q1;
  int numeric_index = -1;  ///< position in the numeric scan (branch == numeric)
  double lambda_squared = 0.0;
  double h = 0.0;  ///< critical value of the Hamiltonian
  point_class cls = point_class::degenerate;
};

/// Discriminant of the reduced quartic radicand: nu2^2 - 4 b nu1 (b in the
/// (b/6)q^6 convention carried by b_q6).
double disc_b(double nu1, double nu2, double b);

/// Squared eigenvalue on one closed-form branch of the normal form.
/// Throws if the branch does not exist for these coefficients.
double eigenvalue_nf(branch_id branch, double a, double b, double nu1, double nu2);

/// Closed-form critical points of (a/2)p^2 + (nu1/2)q^2 + (nu2/4)q^4 + (b/6)q^6:
/// the origin plus the outer/inner branches q2 = sqrt((-nu2 -+ sqrt(disc))/(2b))
/// when their radicands are nonnegative.  Coincident branches are reported
/// once, labeled by the first of (Q1, Q2Minus, Q2Plus).
std::vector<critical_point> critical_points_nf(double a, double b, double nu1, double nu2);

/// Independent numerical scan: Newton on the finite-difference gradient from a
/// 41x41 seed grid, deduplicated; lambda^2 from the Richardson-refined
/// finite-difference Hessian as (d^2H/dqdp)^2 - (d^2H/dq^2)(d^2H/dp^2).
struct numeric_scan_result {
  std::vector<critical_point> points;
  bool newton_failed_everywhere = false;
};

numeric_scan_result numeric_critical_points(model_id id, const model_params& params,
                                            double j, double t);

std::string branch_name(const critical_point& pt);
std::string class_name(point_class c);

}  // namespace biflip
