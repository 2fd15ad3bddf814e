#pragma once

#include <biflip/models.hpp>
#include <biflip/singularities.hpp>

#include <string>
#include <utility>
#include <vector>

namespace biflip {

/// One sampled critical point on a diagram branch.  Only (j, h, class) are
/// serialized; q, p and lambda_squared ride along for rendering and tests.
struct diagram_sample {
  double j = 0.0;
  double q = 0.0;
  double p = 0.0;
  double h = 0.0;
  double lambda_squared = 0.0;
  point_class cls = point_class::degenerate;
};

/// A branch of critical values h(j) at fixed t, samples strictly ascending
/// in j.  Closed-form (NormalForm) branches carry their branch_id; numeric
/// branches are labeled Numeric(index) in birth order.
struct diagram_curve {
  branch_id branch = branch_id::q1;
  int numeric_index = -1;
  std::vector<diagram_sample> samples;
};

enum class locus_kind { nu1_zero, disc_zero };

/// A zero-contour polyline in the (j,t) parameter plane.
struct locus_curve {
  locus_kind kind = locus_kind::nu1_zero;
  std::vector<std::pair<double, double>> points;  // (j, t), ordered along the curve
};

struct param_rect {
  double j_min, j_max;
  double t_min, t_max;
};

/// Sample the bifurcation diagram at fixed t over n uniform j-values.
/// NormalForm uses the closed-form branches (coefficients straight from the
/// params, so exact degeneracies stay exact); other models use the numeric
/// scan with nearest-continuation branch tracking in (q,h) (jump threshold
/// 10x the local inter-sample spacing, explicit birth/death).  Before
/// tracking, scan points that are Newton-noise copies of one critical point
/// are collapsed (within 1e-4 in (q,p) unconditionally, or within 3e-2 when
/// both squared eigenvalues are below 1e-6 — near a degenerate sample the
/// convergence floor lets Newton stop anywhere inside the flat well).  When
/// the two outer closed-form branches coalesce below the 1e-7 separation
/// they are reported once and the sample is marked Degenerate.
std::vector<diagram_curve> sample_diagram(model_id id, const model_params& params, double t,
                                          const domain_window& window, int n);

/// Marching-squares zero contours of nu1 and disc_b over an n x n grid on the
/// rectangle, both fields obtained by normalizing the reduced 6-jet at every
/// node.  DiscZero points are kept only where the merged outer branch exists,
/// i.e. -nu2/(2b) >= 0 at the crossing.  Normalization failure at more than
/// 10% of the nodes raises an error listing the failed nodes.
std::vector<locus_curve> trace_locus(model_id id, const model_params& params,
                                     const param_rect& rect, int n = 201);

/// CSV with header `model,t,branch,j,h,class`, rows sorted by (branch, j),
/// floats at 17 significant digits, LF line endings.
std::string emit_diagram_csv(model_id id, double t, const std::vector<diagram_curve>& curves);

/// CSV with header `model,kind,j,t`, curves in deterministic order.
std::string emit_locus_csv(model_id id, const std::vector<locus_curve>& curves);

struct parsed_diagram {
  std::string model;
  double t = 0.0;
  std::vector<diagram_curve> curves;  // q/p/lambda_squared are not in the CSV and stay 0
};
parsed_diagram parse_diagram_csv(const std::string& text);

struct parsed_locus {
  std::string model;
  std::vector<locus_curve> curves;
};
parsed_locus parse_locus_csv(const std::string& text);

/// Standalone 800x600 SVG.  Stroke pattern encodes the branch (solid /
/// dashed / dash-dot for Q1 / Q2Minus / Q2Plus, cycling for numeric curves),
/// color encodes the class, and degenerate samples get a dot marker.  Each
/// branch is drawn as one polyline per maximal same-class run.  shift_by_j
/// plots h + j on the ordinate (presentation only; CSV always stores raw h).
struct svg_style {
  bool shift_by_j = false;
};
std::string emit_svg(const std::vector<diagram_curve>& curves, const svg_style& style = {});

std::string locus_kind_name(locus_kind kind);

}  // namespace biflip
