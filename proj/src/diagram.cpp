#include <biflip/diagram.hpp>

#include <biflip/normalform.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

namespace biflip {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string curve_label(const diagram_curve& c) {
  switch (c.branch) {
    case branch_id::q1: return "Q1";
    case branch_id::q2_minus: return "Q2Minus";
    case branch_id::q2_plus: return "Q2Plus";
    case branch_id::numeric: return "Numeric(" + std::to_string(c.numeric_index) + ")";
  }
  return "?";
}

diagram_sample make_sample(double j, const critical_point& pt) {
  diagram_sample s;
  s.j = j;
  s.q = pt.q;
  s.p = pt.p;
  s.h = pt.h;
  s.lambda_squared = pt.lambda_squared;
  s.cls = pt.cls;
  return s;
}

void sample_diagram_nf(const model_params& params, double t, const domain_window& window,
                       int n, std::vector<diagram_curve>& out) {
  diagram_curve q1{branch_id::q1, -1, {}};
  diagram_curve q2m{branch_id::q2_minus, -1, {}};
  diagram_curve q2p{branch_id::q2_plus, -1, {}};

  const double width = window.j_max - window.j_min;
  for (int i = 0; i < n; ++i) {
    const double j = window.j_min + width * i / (n - 1);
    const double nu1 = nu_value(params.nu1_spec, j, t);
    const double nu2 = nu_value(params.nu2_spec, j, t);
    auto pts = critical_points_nf(params.a, params.b, nu1, nu2);

    // Coalescence marking: when an outer branch exists algebraically but was
    // merged into a coincident point (separation below 1e-7), the surviving
    // point is a branch meeting point and is flagged Degenerate.
    const double disc = disc_b(nu1, nu2, params.b);
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      for (const double sign : {-1.0, +1.0}) {
        const double radicand = (-nu2 + sign * s) / (2.0 * params.b);
        if (radicand < 0.0) continue;
        const branch_id br = (sign < 0.0) ? branch_id::q2_minus : branch_id::q2_plus;
        bool reported = false;
        for (const auto& pt : pts) reported = reported || pt.branch == br;
        if (reported) continue;
        const double q_math = std::sqrt(radicand);
        std::size_t nearest = 0;
        for (std::size_t k = 1; k < pts.size(); ++k) {
          if (std::abs(pts[k].q - q_math) < std::abs(pts[nearest].q - q_math)) nearest = k;
        }
        pts[nearest].cls = point_class::degenerate;
      }
    }

    for (const auto& pt : pts) {
      switch (pt.branch) {
        case branch_id::q1: q1.samples.push_back(make_sample(j, pt)); break;
        case branch_id::q2_minus: q2m.samples.push_back(make_sample(j, pt)); break;
        case branch_id::q2_plus: q2p.samples.push_back(make_sample(j, pt)); break;
        case branch_id::numeric: break;
      }
    }
  }

  for (auto& c : {std::move(q1), std::move(q2m), std::move(q2p)}) {
    if (!c.samples.empty()) out.push_back(c);
  }
}

// The scan converges Newton until the finite-difference gradient falls below
// an absolute floor, so every returned point carries positional noise of
// roughly floor / (local curvature).  Near a degenerate sample that noise
// radius grows macroscopic and one flat critical point comes back as dozens
// to hundreds of copies spread wider than the scan's duplicate radius, each
// of which would be born (and immediately die) as its own one-sample curve.
// Collapse such copies before tracking: a point joins the first kept point
// that is either within the unconditional noise radius, or within the flat
// radius when both squared eigenvalues are below the flatness bound (a well
// that flat cannot hold two distinct resolvable critical points that close).
// Points with resolvable curvature and macroscopic separation always
// survive, even when a flat cluster interleaves with them in q.
constexpr double kNoiseMergeRadius = 1e-4;
constexpr double kFlatLambda2 = 1e-6;
constexpr double kFlatMergeRadius = 3e-2;

std::vector<critical_point> collapse_scan_noise(const std::vector<critical_point>& pts) {
  std::vector<critical_point> kept;
  kept.reserve(pts.size());
  for (const auto& p : pts) {
    bool duplicate = false;
    for (const auto& rep : kept) {
      const double d = std::hypot(p.q - rep.q, p.p - rep.p);
      if (d <= kNoiseMergeRadius ||
          (d <= kFlatMergeRadius && std::abs(p.lambda_squared) <= kFlatLambda2 &&
           std::abs(rep.lambda_squared) <= kFlatLambda2)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(p);
  }
  return kept;
}

void sample_diagram_numeric(model_id id, const model_params& params, double t,
                            const domain_window& window, int n,
                            std::vector<diagram_curve>& out) {
  struct track {
    bool alive = true;
    double q_tail = 0.0;
    double h_tail = 0.0;
    double spacing = 0.0;  // last step length in (q,h); 0 until two samples exist
  };
  std::vector<track> tracks;

  const double width = window.j_max - window.j_min;
  const double dj = width / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double j = window.j_min + width * i / (n - 1);
    const auto scan = numeric_critical_points(id, params, j, t);
    const auto pts = collapse_scan_noise(scan.points);
    if (pts.empty()) {
      for (auto& tr : tracks) tr.alive = false;
      continue;
    }

    struct cand {
      double d;
      int pt;
      int tr;
    };
    std::vector<cand> cands;
    for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
      if (!tracks[ti].alive) continue;
      for (std::size_t pi = 0; pi < pts.size(); ++pi) {
        cands.push_back({std::hypot(pts[pi].q - tracks[ti].q_tail,
                                    pts[pi].h - tracks[ti].h_tail),
                         static_cast<int>(pi), static_cast<int>(ti)});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const cand& u, const cand& v) {
      if (u.d != v.d) return u.d < v.d;
      if (u.pt != v.pt) return u.pt < v.pt;
      return u.tr < v.tr;
    });

    std::vector<bool> pt_used(pts.size(), false), tr_used(tracks.size(), false);
    for (const cand& c : cands) {
      if (pt_used[c.pt] || tr_used[c.tr]) continue;
      track& tr = tracks[c.tr];
      const double fallback =
          dj * std::max({1.0, std::abs(tr.q_tail), std::abs(tr.h_tail)});
      if (c.d > 10.0 * std::max(tr.spacing, fallback)) continue;  // a jump, not a step
      pt_used[c.pt] = true;
      tr_used[c.tr] = true;
      out[c.tr].samples.push_back(make_sample(j, pts[c.pt]));
      tr.spacing = c.d;
      tr.q_tail = pts[c.pt].q;
      tr.h_tail = pts[c.pt].h;
    }
    for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
      if (tracks[ti].alive && !tr_used[ti]) tracks[ti].alive = false;  // branch death
    }
    for (std::size_t pi = 0; pi < pts.size(); ++pi) {
      if (pt_used[pi]) continue;  // branch birth
      diagram_curve c;
      c.branch = branch_id::numeric;
      c.numeric_index = static_cast<int>(out.size());
      c.samples.push_back(make_sample(j, pts[pi]));
      out.push_back(std::move(c));
      track tr;
      tr.q_tail = pts[pi].q;
      tr.h_tail = pts[pi].h;
      tracks.push_back(tr);
    }
  }
}

}  // namespace

std::vector<diagram_curve> sample_diagram(model_id id, const model_params& params, double t,
                                          const domain_window& window, int n) {
  if (n < 2) throw std::invalid_argument("sample_diagram: need at least 2 samples");
  if (!(window.j_max > window.j_min)) {
    throw std::invalid_argument("sample_diagram: window must satisfy j_min < j_max");
  }
  if (id != model_id::normal_form) {
    // Probe the window against the model's domain before scanning.
    for (const double j : {window.j_min, 0.5 * (window.j_min + window.j_max), window.j_max}) {
      evaluate_reduced(id, params, 0.0, 0.0, j, t);  // throws domain_error if outside
    }
  }

  std::vector<diagram_curve> out;
  if (id == model_id::normal_form) {
    sample_diagram_nf(params, t, window, n, out);
  } else {
    sample_diagram_numeric(id, params, t, window, n, out);
  }
  return out;
}

namespace {

struct node_fields {
  bool valid = false;
  double nu1 = 0.0;
  double nu2 = 0.0;
  double b = 0.0;    // sextic convention used for disc
  double disc = 0.0;
};

struct seg {
  double j1, t1, j2, t2;
  double nu2_1, b_1, nu2_2, b_2;  // interpolated transport for the existence filter
};

struct point_key {
  double j, t;
  bool operator<(const point_key& o) const {
    if (j != o.j) return j < o.j;
    return t < o.t;
  }
  bool operator==(const point_key& o) const { return j == o.j && t == o.t; }
};

/// Chains raw segments that share bit-identical endpoints into ordered
/// polylines, endpoints first, cycles afterwards, canonically oriented.
std::vector<std::vector<std::pair<double, double>>> chain_segments(const std::vector<seg>& segs) {
  std::map<point_key, std::vector<int>> adj;
  for (int i = 0; i < static_cast<int>(segs.size()); ++i) {
    adj[{segs[i].j1, segs[i].t1}].push_back(i);
    adj[{segs[i].j2, segs[i].t2}].push_back(i);
  }

  std::vector<bool> used(segs.size(), false);
  std::vector<std::vector<std::pair<double, double>>> curves;

  const auto walk = [&](point_key start) {
    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(start.j, start.t);
    point_key cur = start;
    while (true) {
      int next = -1;
      for (const int si : adj[cur]) {
        if (!used[si]) {
          next = si;
          break;
        }
      }
      if (next < 0) break;
      used[next] = true;
      const point_key other = (point_key{segs[next].j1, segs[next].t1} == cur)
                                  ? point_key{segs[next].j2, segs[next].t2}
                                  : point_key{segs[next].j1, segs[next].t1};
      pts.emplace_back(other.j, other.t);
      cur = other;
    }
    return pts;
  };

  // Open curves start at odd-degree points, in sorted order for determinism.
  for (const auto& [pt, incident] : adj) {
    int free_count = 0;
    for (const int si : incident) free_count += used[si] ? 0 : 1;
    if (free_count == 1) {
      auto pts = walk(pt);
      if (pts.size() >= 2) curves.push_back(std::move(pts));
    }
  }
  // Remaining segments form closed loops.
  for (int i = 0; i < static_cast<int>(segs.size()); ++i) {
    if (used[i]) continue;
    auto pts = walk({segs[i].j1, segs[i].t1});
    if (pts.size() >= 2) curves.push_back(std::move(pts));
  }

  for (auto& pts : curves) {
    const auto& a = pts.front();
    const auto& b = pts.back();
    if (b.first < a.first || (b.first == a.first && b.second < a.second)) {
      std::reverse(pts.begin(), pts.end());
    }
  }
  std::sort(curves.begin(), curves.end());
  return curves;
}

}  // namespace

std::vector<locus_curve> trace_locus(model_id id, const model_params& params,
                                     const param_rect& rect, int n) {
  if (n < 2) throw std::invalid_argument("trace_locus: need at least a 2x2 grid");
  if (!(rect.j_max > rect.j_min) || !(rect.t_max > rect.t_min)) {
    throw std::invalid_argument("trace_locus: rectangle must have positive extent");
  }

  std::vector<node_fields> grid(static_cast<std::size_t>(n) * n);
  std::vector<std::pair<double, double>> failed;
  const auto j_of = [&](int a) { return rect.j_min + (rect.j_max - rect.j_min) * a / (n - 1); };
  const auto t_of = [&](int b) { return rect.t_min + (rect.t_max - rect.t_min) * b / (n - 1); };

  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      node_fields& nf_at = grid[static_cast<std::size_t>(a) * n + b];
      const double j = j_of(a), t = t_of(b);
      try {
        const auto res = normalize(reduced_jet(id, params, j, t));
        nf_at.valid = true;
        nf_at.nu1 = res.nf.nu1;
        nf_at.nu2 = res.nf.nu2;
        nf_at.b = res.nf.b_q6;
        nf_at.disc = disc_b(res.nf.nu1, res.nf.nu2, res.nf.b_q6);
      } catch (const std::runtime_error&) {
        failed.emplace_back(j, t);
      } catch (const std::logic_error&) {
        failed.emplace_back(j, t);
      }
    }
  }

  if (failed.size() * 10 > grid.size()) {
    std::ostringstream msg;
    msg << "trace_locus: normalization failed at " << failed.size() << " of " << grid.size()
        << " grid nodes:";
    for (std::size_t i = 0; i < failed.size() && i < 12; ++i) {
      msg << " (" << fmt6(failed[i].first) << "," << fmt6(failed[i].second) << ")";
    }
    if (failed.size() > 12) msg << " ...";
    throw std::runtime_error(msg.str());
  }

  std::vector<locus_curve> out;
  for (const locus_kind kind : {locus_kind::nu1_zero, locus_kind::disc_zero}) {
    std::vector<seg> segs;
    const auto field = [&](int a, int b) -> const node_fields& {
      return grid[static_cast<std::size_t>(a) * n + b];
    };
    const auto value = [&](const node_fields& nf_at) {
      return kind == locus_kind::nu1_zero ? nf_at.nu1 : nf_at.disc;
    };

    struct xpt {
      double j, t, nu2, b;
    };
    // Each grid edge's crossing is computed once, in a fixed low-node ->
    // high-node orientation, so the two cells sharing the edge see the same
    // bit pattern and the segment chains close up exactly.
    const std::size_t ncells = static_cast<std::size_t>(n) * n;
    std::vector<xpt> hx(ncells), vx(ncells);
    std::vector<char> hx_has(ncells, 0), vx_has(ncells, 0);
    const auto cross = [&](const node_fields& na, const node_fields& nb, double ja,
                           double ta, double jb, double tb) -> xpt {
      const double va = value(na), vb = value(nb);
      const double tau = va / (va - vb);
      return {ja + tau * (jb - ja), ta + tau * (tb - ta), na.nu2 + tau * (nb.nu2 - na.nu2),
              na.b + tau * (nb.b - na.b)};
    };
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const std::size_t at = static_cast<std::size_t>(a) * n + b;
        const node_fields& here = field(a, b);
        if (!here.valid) continue;
        if (a + 1 < n && field(a + 1, b).valid &&
            (value(here) >= 0.0) != (value(field(a + 1, b)) >= 0.0)) {
          hx[at] = cross(here, field(a + 1, b), j_of(a), t_of(b), j_of(a + 1), t_of(b));
          hx_has[at] = 1;
        }
        if (b + 1 < n && field(a, b + 1).valid &&
            (value(here) >= 0.0) != (value(field(a, b + 1)) >= 0.0)) {
          vx[at] = cross(here, field(a, b + 1), j_of(a), t_of(b), j_of(a), t_of(b + 1));
          vx_has[at] = 1;
        }
      }
    }

    for (int a = 0; a + 1 < n; ++a) {
      for (int b = 0; b + 1 < n; ++b) {
        const node_fields* c00 = &field(a, b);
        const node_fields* c10 = &field(a + 1, b);
        const node_fields* c11 = &field(a + 1, b + 1);
        const node_fields* c01 = &field(a, b + 1);
        if (!c00->valid || !c10->valid || !c11->valid || !c01->valid) continue;

        const double v00 = value(*c00), v10 = value(*c10), v11 = value(*c11),
                     v01 = value(*c01);
        const int code = (v00 >= 0.0 ? 1 : 0) | (v10 >= 0.0 ? 2 : 0) | (v11 >= 0.0 ? 4 : 0) |
                         (v01 >= 0.0 ? 8 : 0);
        if (code == 0 || code == 15) continue;

        const std::size_t i00 = static_cast<std::size_t>(a) * n + b;
        const std::size_t i01 = static_cast<std::size_t>(a) * n + b + 1;
        const std::size_t i10 = static_cast<std::size_t>(a + 1) * n + b;
        const xpt& eB = hx[i00];
        const xpt& eT = hx[i01];
        const xpt& eL = vx[i00];
        const xpt& eR = vx[i10];

        const auto add = [&](const xpt& p1, const xpt& p2) {
          if (kind == locus_kind::disc_zero) {
            // Branch-existence filter: the merged outer branch needs
            // -nu2/(2b) >= 0 at the crossing.
            for (const xpt* p : {&p1, &p2}) {
              if (p->b == 0.0) return;
              if (-p->nu2 / (2.0 * p->b) < -1e-10) return;
            }
          }
          segs.push_back({p1.j, p1.t, p2.j, p2.t, p1.nu2, p1.b, p2.nu2, p2.b});
        };

        switch (code) {
          case 1: case 14: add(eL, eB); break;
          case 2: case 13: add(eB, eR); break;
          case 3: case 12: add(eL, eR); break;
          case 4: case 11: add(eR, eT); break;
          case 6: case 9: add(eB, eT); break;
          case 7: case 8: add(eL, eT); break;
          case 5: {  // corners 00 and 11 positive: resolve by cell centre
            const double centre = 0.25 * (v00 + v10 + v11 + v01);
            if (centre >= 0.0) {
              add(eB, eR);
              add(eT, eL);
            } else {
              add(eL, eB);
              add(eR, eT);
            }
            break;
          }
          case 10: {  // corners 10 and 01 positive
            const double centre = 0.25 * (v00 + v10 + v11 + v01);
            if (centre >= 0.0) {
              add(eL, eB);
              add(eR, eT);
            } else {
              add(eB, eR);
              add(eT, eL);
            }
            break;
          }
          default: break;
        }
      }
    }

    for (auto& pts : chain_segments(segs)) {
      locus_curve c;
      c.kind = kind;
      c.points = std::move(pts);
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::string emit_diagram_csv(model_id id, double t, const std::vector<diagram_curve>& curves) {
  std::vector<const diagram_curve*> order;
  for (const auto& c : curves) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](const diagram_curve* u, const diagram_curve* v) {
    if (u->branch != v->branch) return static_cast<int>(u->branch) < static_cast<int>(v->branch);
    return u->numeric_index < v->numeric_index;
  });

  std::string text = "model,t,branch,j,h,class\n";
  const std::string model = model_name(id);
  const std::string t_txt = fmt17(t);
  for (const diagram_curve* c : order) {
    const std::string label = curve_label(*c);
    for (const auto& s : c->samples) {
      text += model;
      text += ',';
      text += t_txt;
      text += ',';
      text += label;
      text += ',';
      text += fmt17(s.j);
      text += ',';
      text += fmt17(s.h);
      text += ',';
      text += class_name(s.cls);
      text += '\n';
    }
  }
  return text;
}

std::string emit_locus_csv(model_id id, const std::vector<locus_curve>& curves) {
  std::string text = "model,kind,j,t\n";
  const std::string model = model_name(id);
  for (const auto& c : curves) {
    const std::string kind = locus_kind_name(c.kind);
    for (const auto& [j, t] : c.points) {
      text += model;
      text += ',';
      text += kind;
      text += ',';
      text += fmt17(j);
      text += ',';
      text += fmt17(t);
      text += '\n';
    }
  }
  return text;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw std::invalid_argument("CSV parse: bad float field '" + s + "'");
  }
  return v;
}

point_class parse_class(const std::string& s) {
  if (s == "Centre") return point_class::centre;
  if (s == "Saddle") return point_class::saddle;
  if (s == "Degenerate") return point_class::degenerate;
  throw std::invalid_argument("CSV parse: bad class field '" + s + "'");
}

std::pair<branch_id, int> parse_branch(const std::string& s) {
  if (s == "Q1") return {branch_id::q1, -1};
  if (s == "Q2Minus") return {branch_id::q2_minus, -1};
  if (s == "Q2Plus") return {branch_id::q2_plus, -1};
  if (s.size() > 9 && s.compare(0, 8, "Numeric(") == 0 && s.back() == ')') {
    return {branch_id::numeric, std::atoi(s.c_str() + 8)};
  }
  throw std::invalid_argument("CSV parse: bad branch field '" + s + "'");
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

}  // namespace

parsed_diagram parse_diagram_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "model,t,branch,j,h,class") {
    throw std::invalid_argument("CSV parse: missing diagram header");
  }
  parsed_diagram result;
  std::string current_label;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 6) throw std::invalid_argument("CSV parse: bad diagram row");
    if (result.curves.empty() && result.model.empty()) {
      result.model = fields[0];
      result.t = parse_double(fields[1]);
    }
    if (fields[2] != current_label) {
      const auto [br, idx] = parse_branch(fields[2]);
      diagram_curve c;
      c.branch = br;
      c.numeric_index = idx;
      result.curves.push_back(std::move(c));
      current_label = fields[2];
    }
    diagram_sample s;
    s.j = parse_double(fields[3]);
    s.h = parse_double(fields[4]);
    s.cls = parse_class(fields[5]);
    result.curves.back().samples.push_back(s);
  }
  return result;
}

parsed_locus parse_locus_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "model,kind,j,t") {
    throw std::invalid_argument("CSV parse: missing locus header");
  }
  parsed_locus result;
  std::string current_kind;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 4) throw std::invalid_argument("CSV parse: bad locus row");
    if (result.curves.empty() && result.model.empty()) result.model = fields[0];
    if (fields[1] != current_kind) {
      locus_curve c;
      if (fields[1] == "Nu1Zero") {
        c.kind = locus_kind::nu1_zero;
      } else if (fields[1] == "DiscZero") {
        c.kind = locus_kind::disc_zero;
      } else {
        throw std::invalid_argument("CSV parse: bad kind field '" + fields[1] + "'");
      }
      result.curves.push_back(std::move(c));
      current_kind = fields[1];
    }
    result.curves.back().points.emplace_back(parse_double(fields[2]), parse_double(fields[3]));
  }
  return result;
}

std::string emit_svg(const std::vector<diagram_curve>& curves, const svg_style& style) {
  constexpr double kW = 800.0, kH = 600.0;
  constexpr double kLeft = 70.0, kRight = 20.0, kTop = 20.0, kBottom = 50.0;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;

  double jmin = 0.0, jmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool any = false;
  for (const auto& c : curves) {
    for (const auto& s : c.samples) {
      const double y = style.shift_by_j ? s.h + s.j : s.h;
      if (!any) {
        jmin = jmax = s.j;
        ymin = ymax = y;
        any = true;
      } else {
        jmin = std::min(jmin, s.j);
        jmax = std::max(jmax, s.j);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  double jspan = jmax - jmin, yspan = ymax - ymin;
  if (jspan <= 0.0) {
    jmin -= 0.5;
    jspan = 1.0;
  }
  if (yspan <= 0.0) {
    ymin -= 0.5;
    yspan = 1.0;
  }
  // 5% padding keeps strokes clear of the frame.
  jmin -= 0.05 * jspan;
  jspan *= 1.1;
  ymin -= 0.05 * yspan;
  yspan *= 1.1;

  const auto X = [&](double j) { return kLeft + (j - jmin) / jspan * plot_w; };
  const auto Y = [&](double y) { return kTop + (ymin + yspan - y) / yspan * plot_h; };

  const auto colour = [](point_class cls) {
    switch (cls) {
      case point_class::centre: return "#1f77b4";
      case point_class::saddle: return "#d62728";
      case point_class::degenerate: return "#555555";
    }
    return "#000000";
  };
  const auto dash = [](const diagram_curve& c) {
    int which = 0;
    switch (c.branch) {
      case branch_id::q1: which = 0; break;
      case branch_id::q2_minus: which = 1; break;
      case branch_id::q2_plus: which = 2; break;
      case branch_id::numeric: which = c.numeric_index >= 0 ? c.numeric_index % 3 : 0; break;
    }
    switch (which) {
      case 1: return " stroke-dasharray=\"8 5\"";
      case 2: return " stroke-dasharray=\"10 4 2 4\"";
      default: return "";
    }
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
  // Axes.
  svg += "<line x1=\"" + fmt6(kLeft) + "\" y1=\"" + fmt6(kTop) + "\" x2=\"" + fmt6(kLeft) +
         "\" y2=\"" + fmt6(kTop + plot_h) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + fmt6(kLeft) + "\" y1=\"" + fmt6(kTop + plot_h) + "\" x2=\"" +
         fmt6(kLeft + plot_w) + "\" y2=\"" + fmt6(kTop + plot_h) +
         "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  svg += "<text x=\"" + fmt6(kLeft) + "\" y=\"" + fmt6(kH - 14.0) +
         "\" font-size=\"13\" fill=\"#000000\">" + fmt6(jmin + 0.05 * jspan / 1.1) +
         "</text>\n";
  svg += "<text x=\"" + fmt6(kLeft + plot_w - 40.0) + "\" y=\"" + fmt6(kH - 14.0) +
         "\" font-size=\"13\" fill=\"#000000\">" + fmt6(jmin + jspan - 0.05 * jspan / 1.1) +
         "</text>\n";
  svg += "<text x=\"8\" y=\"" + fmt6(kTop + plot_h) + "\" font-size=\"13\" fill=\"#000000\">" +
         fmt6(ymin + 0.05 * yspan / 1.1) + "</text>\n";
  svg += "<text x=\"8\" y=\"" + fmt6(kTop + 12.0) + "\" font-size=\"13\" fill=\"#000000\">" +
         fmt6(ymin + yspan - 0.05 * yspan / 1.1) + "</text>\n";

  for (const auto& c : curves) {
    // One polyline per maximal same-class run, so the class is visible as
    // color while the branch keeps its stroke pattern.
    std::size_t run_start = 0;
    while (run_start < c.samples.size()) {
      std::size_t run_end = run_start + 1;
      while (run_end < c.samples.size() && c.samples[run_end].cls == c.samples[run_start].cls) {
        ++run_end;
      }
      const std::size_t lo = run_start > 0 ? run_start - 1 : run_start;  // join runs
      if (run_end - lo >= 2) {
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += colour(c.samples[run_start].cls);
        svg += "\" stroke-width=\"1.8\"";
        svg += dash(c);
        svg += " points=\"";
        for (std::size_t k = lo; k < run_end; ++k) {
          if (k > lo) svg += ' ';
          const double y = style.shift_by_j ? c.samples[k].h + c.samples[k].j : c.samples[k].h;
          svg += fmt6(X(c.samples[k].j));
          svg += ',';
          svg += fmt6(Y(y));
        }
        svg += "\"/>\n";
      }
      run_start = run_end;
    }
    for (const auto& s : c.samples) {
      if (s.cls != point_class::degenerate) continue;
      const double y = style.shift_by_j ? s.h + s.j : s.h;
      svg += "<circle cx=\"" + fmt6(X(s.j)) + "\" cy=\"" + fmt6(Y(y)) +
             "\" r=\"3\" fill=\"#111111\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::string locus_kind_name(locus_kind kind) {
  return kind == locus_kind::nu1_zero ? "Nu1Zero" : "DiscZero";
}

}  // namespace biflip
