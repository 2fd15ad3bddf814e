#pragma once

#include <string>
#include <vector>

#include <biflip/models.hpp>
#include <biflip/normalform.hpp>

namespace biflip {

/// Outcome of the full normalize-and-classify pipeline at one (j, t) point:
/// everything the `normalize` command reports, plus the process exit code the
/// command maps it to (0 = double flip affirmed, 2 = completed, negative).
struct normalize_outcome {
  nf_coefficients nf;
  nu_derivatives derivs;
  saddle_node_report saddle;
  concavity_report_t concavity;
  double lambda2_origin = 0.0;  ///< squared eigenvalue -a*nu1 of the axis point
  bool affirmed = false;
  int exit_code = 2;
  std::string text;  ///< deterministic human-readable report, one fact per line
};

normalize_outcome run_normalize(model_id id, const model_params& params, double j,
                                double t, double fd_step = 1e-4, int degree_cap = 6);

/// One pinned-value or structural property check.
struct check_row {
  std::string key;       ///< stable identifier, e.g. "osc-a"
  std::string expected;  ///< pinned reference rendered as text
  std::string actual;    ///< recomputed value rendered as text
  bool pass = false;
  bool known_discrepancy = false;  ///< pinned value the computation
                                   ///< reproducibly contradicts (see README)
};

struct selfcheck_report {
  std::vector<check_row> rows;
  int failures = 0;        ///< rows with pass == false
  int known_failures = 0;  ///< failing rows flagged known_discrepancy
  double seconds = 0.0;
};

/// Recomputes the pinned reference table (example-model coefficients,
/// derivative values, flip classifications, degenerate-family behaviour) and
/// the structural property suite (bracket axioms, invariant relations, even
/// symmetry, normalization residual grids, CSV round-trip).  Rows flagged
/// known_discrepancy fail by design: the quoted reference value disagrees
/// with the (stable, step-size-robust) computation.
selfcheck_report run_selfcheck();

/// Fixed-width table rendering of a report, one row per line.
std::string format_selfcheck(const selfcheck_report& report);

}  // namespace biflip
