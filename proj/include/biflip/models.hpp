#pragma once

#include <biflip/jet.hpp>

#include <string>
#include <utility>

namespace biflip {

/// Built-in two-parameter reduced Hamiltonians: the abstract normal-form
/// family plus three worked one-degree-of-freedom reductions.
enum class model_id { normal_form, oscillator12, oscillator12_cubic, hirzebruch };

/// Quadratic-in-j, linear-in-t coefficient recipe: nu(j,t) = c_jj j^2 + c_j j + c_t t.
struct nu_spec {
  double c_jj = 0.0;
  double c_j = 0.0;
  double c_t = 0.0;
};

inline double nu_value(const nu_spec& s, double j, double t) {
  return s.c_jj * j * j + s.c_j * j + s.c_t * t;
}

struct model_params {
  double epsilon = 0.125;  ///< oscillator coupling (oscillator models only)
  double a = 1.0;          ///< normal-form p^2/2 coefficient (normal_form only)
  double b = 1.0;          ///< normal-form q^6 sextic coefficient, H carries (b/6) q^6
  nu_spec nu1_spec;        ///< nu1(j,t) recipe (normal_form only)
  nu_spec nu2_spec;        ///< nu2(j,t) recipe (normal_form only)
  int branch_sign = +1;    ///< sign of the square-root branch used in reductions
};

/// Admissible j-range of a model at fixed t.
struct domain_window {
  double j_min;
  double j_max;
};

/// Numeric value of the reduced Hamiltonian at phase point (q,p), parameters (j,t).
double evaluate_reduced(model_id id, const model_params& params, double q, double p,
                        double j, double t);

/// 6-jet (or custom-cap jet) of the reduced Hamiltonian at the origin for fixed
/// (j,t); odd-degree coefficients of these symmetric models are verified small
/// and zeroed.
jet<double> reduced_jet(model_id id, const model_params& params, double j, double t,
                        int degree_cap = 6);

/// The model's candidate double-flip point (j0, t0).
std::pair<double, double> candidate(model_id id, const model_params& params);

/// Default admissible j-window bracketing the candidate and both flip loci.
domain_window default_window(model_id id, const model_params& params);

/// CLI-facing model names: "normal-form", "osc12", "osc12-cubic", "hirzebruch".
std::string model_name(model_id id);
model_id parse_model_name(const std::string& name);

}  // namespace biflip
