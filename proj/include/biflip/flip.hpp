#pragma once

#include <biflip/models.hpp>

#include <string>
#include <vector>

namespace biflip {

enum class flip_kind { flip, dual_flip, undetermined };
enum class locus_side { minus, plus };

/// A root of nu1(.,t) at fixed t, classified by the sign of a*nu2 there:
/// dual flip when a*nu2 < -tol, plain flip when > +tol, undetermined inside
/// the tolerance band (tol = 1e-8).
struct flip_event {
  double j0 = 0.0;
  double t = 0.0;
  locus_side side = locus_side::minus;  ///< Minus/Plus by ascending j0
  double nu2_at = 0.0;
  flip_kind kind = flip_kind::undetermined;
};

/// Tangency data of the zero level set against the reduced cone's apex:
/// slope = -nu1/a, curvature = -2*nu2/a.  Positive curvature means the level
/// set re-enters the cone (the dual configuration).
struct cone_tangency_t {
  double slope = 0.0;
  double curvature = 0.0;
};

flip_kind flip_type(double a, double nu2);

/// All roots of j -> nu1(j,t) inside the window, with nu1/nu2 obtained by
/// normalizing the reduced 6-jet at each sample: 200-point sign-change scan,
/// bisection to |nu1| <= 1e-10.  A sign-touch (local |nu1| minimum reaching
/// <= 1e-10 without a crossing) is reported as a single event.  Events are
/// sorted by ascending j0; the first is labeled Minus, later ones Plus.
std::vector<flip_event> solve_flip_locus(model_id id, const model_params& params, double t,
                                         const domain_window& window);

cone_tangency_t cone_tangency(double a, double nu1, double nu2);

std::string flip_kind_name(flip_kind kind);
std::string side_name(locus_side side);

}  // namespace biflip
