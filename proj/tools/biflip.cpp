// biflip: command line front end for the double flip bifurcation toolkit.
//
// Subcommands
//   normalize  normal form + classification report at one (j,t) point
//   flip       flip / dual flip events along a t = const line
//   diagram    bifurcation diagram h(j) at fixed t (CSV/SVG/JSON)
//   locus      nu1 = 0 and discriminant = 0 contours in the (j,t) plane
//   selftest   pinned-value and property check table
//
// Exit codes: 0 success (verdict affirmed where applicable), 2 completed but
// negative verdict (not affirmed / no events / empty output / failed checks),
// 1 error.  Every error path prints a single line `error: <reason>` on
// stderr.  Identical option sets produce byte-identical outputs: all work is
// dispatched single threaded and floats are serialized at 17 significant
// digits (--threads is validated but does not change the computation).

#include <biflip/diagram.hpp>
#include <biflip/flip.hpp>
#include <biflip/models.hpp>
#include <biflip/normalform.hpp>
#include <biflip/selfcheck.hpp>
#include <biflip/singularities.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// All options shared across subcommands; each subcommand registers the
/// subset that affects it.  Defaults are the documented lowest-precedence
/// layer (config file overrides them, command line flags override both).
struct cli_options {
  std::string model = "normal-form";
  double epsilon = 0.125;
  double a = 1.0;
  double b = 1.0;
  std::string nu1 = "j2-t";
  std::string nu2 = "j-t";
  std::optional<double> j;
  std::optional<double> t;
  bool at_candidate = false;
  std::optional<double> j_min, j_max, t_min, t_max;
  int n = 201;
  int degree_cap = 6;
  double fd_step = 1e-4;
  std::string out;
  std::string format;  // empty = per-command default (text or csv)
  bool shift_by_j = false;
  int threads = 1;
};

// ---------------------------------------------------------------------------
// config files
//
// Plain `key = value` lines, one option per line, `#` starts a comment.  Keys
// are the long option names without the leading dashes (model, t, j-min,
// at-candidate, ...).  A key given on the command line wins over the config
// file; config file values win over built-in defaults.

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

/// One config-settable option: the CLI11 option (to detect explicit command
/// line use) plus a setter that parses the config value into the bound field.
struct config_binding {
  CLI::Option* opt = nullptr;
  std::function<void(const std::string&)> set;
};

using config_registry = std::map<std::string, config_binding>;

double parse_config_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key +
                                "' expects a number, got '" + value + "'");
  }
}

int parse_config_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key +
                                "' expects an integer, got '" + value + "'");
  }
}

bool parse_config_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config: key '" + key +
                              "' expects true or false, got '" + value + "'");
}

void apply_config_file(const std::string& path, const config_registry& reg) {
  if (path.empty()) return;
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open '" + path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " of '" + path + "' is not `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = reg.find(key);
    if (it == reg.end())
      throw std::invalid_argument("config: unknown key '" + key + "' (line " +
                                  std::to_string(line_no) + " of '" + path +
                                  "')");
    if (it->second.opt->count() > 0) continue;  // command line wins
    it->second.set(value);
  }
}

/// Parse a coefficient recipe like "j2-t", "3j-t", "-j2+t", "0.5j+2t": a sum
/// of signed terms, each an optional decimal coefficient followed by one of
/// the symbols j2 (or j^2), j, t.  Constant terms are rejected.  "0" means
/// the zero recipe.
biflip::nu_spec parse_nu_spec(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  biflip::nu_spec out{0.0, 0.0, 0.0};
  if (s.empty() || s == "0") return out;
  std::size_t i = 0;
  while (i < s.size()) {
    double sign = 1.0;
    if (s[i] == '+') {
      ++i;
    } else if (s[i] == '-') {
      sign = -1.0;
      ++i;
    }
    const std::size_t coef_start = i;
    while (i < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'))
      ++i;
    double coef = 1.0;
    if (i > coef_start) {
      try {
        std::size_t used = 0;
        coef = std::stod(s.substr(coef_start, i - coef_start), &used);
        if (used != i - coef_start) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw std::invalid_argument("nu recipe '" + raw +
                                    "': bad coefficient '" +
                                    s.substr(coef_start, i - coef_start) + "'");
      }
    }
    double* slot = nullptr;
    if (s.compare(i, 3, "j^2") == 0) {
      slot = &out.c_jj;
      i += 3;
    } else if (s.compare(i, 2, "j2") == 0) {
      slot = &out.c_jj;
      i += 2;
    } else if (i < s.size() && s[i] == 'j') {
      slot = &out.c_j;
      i += 1;
    } else if (i < s.size() && s[i] == 't') {
      slot = &out.c_t;
      i += 1;
    } else if (i > coef_start) {
      throw std::invalid_argument("nu recipe '" + raw +
                                  "': constant terms are not supported");
    } else {
      throw std::invalid_argument("nu recipe '" + raw + "': cannot parse at '" +
                                  s.substr(i) + "'");
    }
    *slot += sign * coef;
  }
  return out;
}

biflip::model_params make_params(const cli_options& o) {
  biflip::model_params mp;
  mp.epsilon = o.epsilon;
  mp.a = o.a;
  mp.b = o.b;
  mp.nu1_spec = parse_nu_spec(o.nu1);
  mp.nu2_spec = parse_nu_spec(o.nu2);
  return mp;
}

/// Collects option-level complaints so a bad invocation is rejected with one
/// aggregated message instead of dying on the first problem.
void reject_if_invalid(const std::vector<std::string>& issues) {
  if (issues.empty()) return;
  std::string msg = "invalid options: ";
  for (std::size_t k = 0; k < issues.size(); ++k) {
    if (k) msg += "; ";
    msg += issues[k];
  }
  throw std::invalid_argument(msg);
}

biflip::model_id resolve_model(const cli_options& o,
                               std::vector<std::string>& issues) {
  try {
    return biflip::parse_model_name(o.model);
  } catch (const std::exception& e) {
    issues.push_back(e.what());
    return biflip::model_id::normal_form;
  }
}

/// (j,t) evaluation point: --at-candidate or an explicit --j/--t pair.
std::pair<double, double> resolve_point(const cli_options& o,
                                        biflip::model_id id,
                                        const biflip::model_params& mp,
                                        std::vector<std::string>& issues) {
  const bool explicit_pt = o.j.has_value() || o.t.has_value();
  if (o.at_candidate && explicit_pt) {
    issues.push_back("use either --at-candidate or explicit --j/--t, not both");
    return {0.0, 0.0};
  }
  if (o.at_candidate) return biflip::candidate(id, mp);
  if (o.j.has_value() && o.t.has_value()) return {*o.j, *o.t};
  issues.push_back("specify the evaluation point: --j and --t together, or --at-candidate");
  return {0.0, 0.0};
}

biflip::domain_window resolve_window(const cli_options& o, biflip::model_id id,
                                     const biflip::model_params& mp,
                                     std::vector<std::string>& issues) {
  biflip::domain_window win = biflip::default_window(id, mp);
  if (o.j_min) win.j_min = *o.j_min;
  if (o.j_max) win.j_max = *o.j_max;
  if (!(win.j_min < win.j_max))
    issues.push_back("--j-min must be strictly below --j-max");
  return win;
}

void check_format(const std::string& format,
                  std::initializer_list<const char*> allowed,
                  const char* command, std::vector<std::string>& issues) {
  if (format.empty()) return;
  for (const char* f : allowed)
    if (format == f) return;
  std::string msg = "--format " + format + " is not supported by " + command +
                    " (choose from";
  for (const char* f : allowed) msg += std::string(" ") + f;
  msg += ")";
  issues.push_back(msg);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.close();
  if (!f) throw std::runtime_error("failed writing output file '" + path + "'");
}

// ---------------------------------------------------------------------------
// normalize

json normalize_json(biflip::model_id id, double j, double t,
                    const biflip::normalize_outcome& out) {
  json deriv{{"d_nu1_dj", out.derivs.d_nu1_dj},
             {"d2_nu1_dj2", out.derivs.d2_nu1_dj2},
             {"d_nu1_dt", out.derivs.d_nu1_dt},
             {"d_nu2_dj", out.derivs.d_nu2_dj},
             {"step_j", out.derivs.step_j},
             {"step_t", out.derivs.step_t}};
  json saddle{{"passes", out.saddle.passes},
              {"nu1_vanishes", out.saddle.nu1_vanishes},
              {"slope_vanishes", out.saddle.slope_vanishes},
              {"curvature_nonzero", out.saddle.curvature_nonzero},
              {"t_slope_nonzero", out.saddle.t_slope_nonzero}};
  json concavity{{"ratio", out.concavity.ratio},
                 {"verdict", biflip::verdict_name(out.concavity.verdict)},
                 {"b_convention", out.concavity.b_convention}};
  return json{{"model", biflip::model_name(id)},
              {"j", j},
              {"t", t},
              {"a", out.nf.a},
              {"nu1", out.nf.nu1},
              {"nu2", out.nf.nu2},
              {"b_u3", out.nf.u3_coeff},
              {"b_q6", out.nf.b_q6},
              {"residual", out.nf.residual},
              {"axis_lambda2", out.lambda2_origin},
              {"derivatives", deriv},
              {"saddle_node", saddle},
              {"concavity", concavity},
              {"double_flip", out.affirmed ? "affirmed" : "not affirmed"},
              {"exit_code", out.exit_code}};
}

std::string normalize_csv(biflip::model_id id, double j, double t,
                          const biflip::normalize_outcome& out) {
  std::string s = "key,value\n";
  auto row = [&s](const char* k, const std::string& v) {
    s += k;
    s += ',';
    s += v;
    s += '\n';
  };
  row("model", biflip::model_name(id));
  row("j", fmt17(j));
  row("t", fmt17(t));
  row("a", fmt17(out.nf.a));
  row("nu1", fmt17(out.nf.nu1));
  row("nu2", fmt17(out.nf.nu2));
  row("b_u3", fmt17(out.nf.u3_coeff));
  row("b_q6", fmt17(out.nf.b_q6));
  row("residual", fmt17(out.nf.residual));
  row("axis_lambda2", fmt17(out.lambda2_origin));
  row("d_nu1_dj", fmt17(out.derivs.d_nu1_dj));
  row("d2_nu1_dj2", fmt17(out.derivs.d2_nu1_dj2));
  row("d_nu1_dt", fmt17(out.derivs.d_nu1_dt));
  row("d_nu2_dj", fmt17(out.derivs.d_nu2_dj));
  row("saddle_node", out.saddle.passes ? "pass" : "fail");
  row("concavity_ratio", fmt17(out.concavity.ratio));
  row("concavity_verdict", biflip::verdict_name(out.concavity.verdict));
  row("b_convention", out.concavity.b_convention);
  row("double_flip", out.affirmed ? "affirmed" : "not affirmed");
  return s;
}

int cmd_normalize(const cli_options& o) {
  std::vector<std::string> issues;
  const biflip::model_id id = resolve_model(o, issues);
  check_format(o.format, {"csv", "json"}, "normalize", issues);
  if (!(o.fd_step > 0.0)) issues.push_back("--fd-step must be positive");
  if (o.degree_cap < 6) issues.push_back("--degree-cap must be at least 6");
  biflip::model_params mp;
  try {
    mp = make_params(o);
  } catch (const std::exception& e) {
    issues.push_back(e.what());
  }
  std::pair<double, double> pt{0.0, 0.0};
  if (issues.empty()) pt = resolve_point(o, id, mp, issues);
  reject_if_invalid(issues);

  const biflip::normalize_outcome out =
      biflip::run_normalize(id, mp, pt.first, pt.second, o.fd_step, o.degree_cap);
  if (o.format == "json")
    write_output(o.out, normalize_json(id, pt.first, pt.second, out).dump(2) + "\n");
  else if (o.format == "csv")
    write_output(o.out, normalize_csv(id, pt.first, pt.second, out));
  else
    write_output(o.out, out.text);
  return out.exit_code;
}

// ---------------------------------------------------------------------------
// flip

int cmd_flip(const cli_options& o) {
  std::vector<std::string> issues;
  const biflip::model_id id = resolve_model(o, issues);
  check_format(o.format, {"csv", "json"}, "flip", issues);
  if (!o.t.has_value()) issues.push_back("flip requires --t");
  biflip::model_params mp;
  biflip::domain_window win{0.0, 1.0};
  try {
    mp = make_params(o);
    if (issues.empty()) win = resolve_window(o, id, mp, issues);
  } catch (const std::exception& e) {
    issues.push_back(e.what());
  }
  reject_if_invalid(issues);

  const auto events = biflip::solve_flip_locus(id, mp, *o.t, win);
  std::string text;
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& ev : events)
      rows.push_back(json{{"side", biflip::side_name(ev.side)},
                          {"j0", ev.j0},
                          {"nu2", ev.nu2_at},
                          {"kind", biflip::flip_kind_name(ev.kind)}});
    json doc{{"model", biflip::model_name(id)},
             {"t", *o.t},
             {"j_min", win.j_min},
             {"j_max", win.j_max},
             {"events", rows}};
    text = doc.dump(2) + "\n";
  } else if (o.format == "csv") {
    text = "model,t,side,j0,nu2,kind\n";
    for (const auto& ev : events) {
      text += biflip::model_name(id);
      text += ',' + fmt17(ev.t) + ',' + biflip::side_name(ev.side) + ',' +
              fmt17(ev.j0) + ',' + fmt17(ev.nu2_at) + ',' +
              biflip::flip_kind_name(ev.kind) + '\n';
    }
  } else {
    text = "model: " + biflip::model_name(id) + "\n";
    text += "t: " + fmt17(*o.t) + "\n";
    text += "window: [" + fmt17(win.j_min) + ", " + fmt17(win.j_max) + "]\n";
    text += "events: " + std::to_string(events.size()) + "\n";
    for (const auto& ev : events)
      text += "side=" + biflip::side_name(ev.side) + "  j=" + fmt17(ev.j0) +
              "  nu2=" + fmt17(ev.nu2_at) + "  kind=" +
              biflip::flip_kind_name(ev.kind) + "\n";
  }
  write_output(o.out, text);
  return events.empty() ? 2 : 0;
}

// ---------------------------------------------------------------------------
// diagram

std::string diagram_branch_label(const biflip::diagram_curve& c) {
  switch (c.branch) {
    case biflip::branch_id::q1: return "Q1";
    case biflip::branch_id::q2_minus: return "Q2Minus";
    case biflip::branch_id::q2_plus: return "Q2Plus";
    case biflip::branch_id::numeric: break;
  }
  return "Numeric(" + std::to_string(c.numeric_index) + ")";
}

json diagram_json(biflip::model_id id, double t,
                  const std::vector<biflip::diagram_curve>& curves) {
  json arr = json::array();
  for (const auto& c : curves) {
    json samples = json::array();
    for (const auto& s : c.samples)
      samples.push_back(json{{"j", s.j},
                             {"h", s.h},
                             {"class", biflip::class_name(s.cls)}});
    arr.push_back(json{{"branch", diagram_branch_label(c)}, {"samples", samples}});
  }
  return json{{"model", biflip::model_name(id)}, {"t", t}, {"curves", arr}};
}

int cmd_diagram(const cli_options& o) {
  std::vector<std::string> issues;
  const biflip::model_id id = resolve_model(o, issues);
  check_format(o.format, {"csv", "svg", "json"}, "diagram", issues);
  if (!o.t.has_value()) issues.push_back("diagram requires --t");
  if (o.n < 2) issues.push_back("--n must be at least 2");
  biflip::model_params mp;
  biflip::domain_window win{0.0, 1.0};
  try {
    mp = make_params(o);
    if (issues.empty()) win = resolve_window(o, id, mp, issues);
  } catch (const std::exception& e) {
    issues.push_back(e.what());
  }
  reject_if_invalid(issues);

  const auto curves = biflip::sample_diagram(id, mp, *o.t, win, o.n);
  std::string text;
  if (o.format == "svg") {
    biflip::svg_style style;
    style.shift_by_j = o.shift_by_j;
    text = biflip::emit_svg(curves, style);
  } else if (o.format == "json") {
    text = diagram_json(id, *o.t, curves).dump(2) + "\n";
  } else {
    text = biflip::emit_diagram_csv(id, *o.t, curves);
  }
  write_output(o.out, text);
  return curves.empty() ? 2 : 0;
}

// ---------------------------------------------------------------------------
// locus

json locus_json(biflip::model_id id,
                const std::vector<biflip::locus_curve>& curves) {
  json arr = json::array();
  for (const auto& c : curves) {
    json pts = json::array();
    for (const auto& p : c.points)
      pts.push_back(json{{"j", p.first}, {"t", p.second}});
    arr.push_back(json{{"kind", biflip::locus_kind_name(c.kind)}, {"points", pts}});
  }
  return json{{"model", biflip::model_name(id)}, {"curves", arr}};
}

int cmd_locus(const cli_options& o) {
  std::vector<std::string> issues;
  const biflip::model_id id = resolve_model(o, issues);
  check_format(o.format, {"csv", "json"}, "locus", issues);
  if (o.n < 2) issues.push_back("--n must be at least 2");
  biflip::model_params mp;
  biflip::param_rect rect{0.0, 1.0, 0.0, 1.0};
  try {
    mp = make_params(o);
    if (issues.empty()) {
      const biflip::domain_window win = resolve_window(o, id, mp, issues);
      const double t0 = biflip::candidate(id, mp).second;
      rect.j_min = win.j_min;
      rect.j_max = win.j_max;
      rect.t_min = o.t_min ? *o.t_min : t0 - 0.1;
      rect.t_max = o.t_max ? *o.t_max : t0 + 0.1;
      if (!(rect.t_min < rect.t_max))
        issues.push_back("--t-min must be strictly below --t-max");
    }
  } catch (const std::exception& e) {
    issues.push_back(e.what());
  }
  reject_if_invalid(issues);

  const auto curves = biflip::trace_locus(id, mp, rect, o.n);
  std::string text;
  if (o.format == "json")
    text = locus_json(id, curves).dump(2) + "\n";
  else
    text = biflip::emit_locus_csv(id, curves);
  write_output(o.out, text);
  return curves.empty() ? 2 : 0;
}

// ---------------------------------------------------------------------------
// selftest

int cmd_selftest(const cli_options& o) {
  const biflip::selfcheck_report report = biflip::run_selfcheck();
  write_output(o.out, biflip::format_selfcheck(report));
  return report.failures == 0 ? 0 : 2;
}

void bind_key(config_registry& reg, const std::string& key, CLI::Option* opt,
          std::function<void(const std::string&)> set) {
  reg[key] = config_binding{opt, std::move(set)};
}

void bind_double(config_registry& reg, const std::string& key, CLI::Option* opt,
                 double& field) {
  bind_key(reg, key, opt, [&field, key](const std::string& v) {
    field = parse_config_double(key, v);
  });
}

void bind_opt_double(config_registry& reg, const std::string& key,
                     CLI::Option* opt, std::optional<double>& field) {
  bind_key(reg, key, opt, [&field, key](const std::string& v) {
    field = parse_config_double(key, v);
  });
}

void bind_string(config_registry& reg, const std::string& key, CLI::Option* opt,
                 std::string& field) {
  bind_key(reg, key, opt, [&field](const std::string& v) { field = v; });
}

void add_model_options(CLI::App* cmd, cli_options& o, config_registry& reg) {
  bind_string(reg, "model",
              cmd->add_option("--model", o.model,
                              "Model: normal-form, osc12, osc12-cubic, hirzebruch")
                  ->capture_default_str(),
              o.model);
  bind_double(reg, "epsilon",
              cmd->add_option("--epsilon", o.epsilon,
                              "Coupling strength (osc12 models)")
                  ->capture_default_str(),
              o.epsilon);
  bind_double(reg, "a",
              cmd->add_option("--a", o.a,
                              "Momentum coefficient a (normal-form model)")
                  ->capture_default_str(),
              o.a);
  bind_double(reg, "b",
              cmd->add_option("--b", o.b,
                              "Sextic coefficient b (normal-form model)")
                  ->capture_default_str(),
              o.b);
  bind_string(reg, "nu1",
              cmd->add_option("--nu1", o.nu1,
                              "nu1 recipe in j and t, e.g. j2-t (normal-form "
                              "model); write --nu1=-j2+t when the recipe "
                              "starts with '-'")
                  ->capture_default_str(),
              o.nu1);
  bind_string(reg, "nu2",
              cmd->add_option("--nu2", o.nu2, "nu2 recipe in j and t, e.g. 3j-t")
                  ->capture_default_str(),
              o.nu2);
}

void add_output_options(CLI::App* cmd, cli_options& o, config_registry& reg,
                        const std::string& formats) {
  bind_string(reg, "out",
              cmd->add_option("--out", o.out,
                              "Write output to this file instead of stdout"),
              o.out);
  bind_string(reg, "format",
              cmd->add_option("--format", o.format, "Output format: " + formats),
              o.format);
  CLI::Option* threads =
      cmd->add_option("--threads", o.threads,
                      "Accepted for compatibility; runs are single threaded")
          ->check(CLI::Range(1, 256));
  bind_key(reg, "threads", threads, [&o](const std::string& v) {
    o.threads = parse_config_int("threads", v);
    if (o.threads < 1 || o.threads > 256)
      throw std::invalid_argument("config: threads must be in [1, 256]");
  });
}

void add_window_options(CLI::App* cmd, cli_options& o, config_registry& reg) {
  bind_opt_double(reg, "j-min",
                  cmd->add_option("--j-min", o.j_min, "Window lower j bound"),
                  o.j_min);
  bind_opt_double(reg, "j-max",
                  cmd->add_option("--j-max", o.j_max, "Window upper j bound"),
                  o.j_max);
}

/// Wires `--config` into a subcommand: the callback applies the file (flags
/// win) and then dispatches.  The registry and path live in `main` for the
/// whole parse.
void add_config_option(CLI::App* cmd, std::string& path) {
  cmd->add_option("--config", path,
                  "Read options from a plain `key = value` file (command line "
                  "flags win)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"double flip bifurcation toolkit"};
  app.require_subcommand(1);
  cli_options o;
  int rc = 0;
  std::string config_path;
  config_registry norm_reg, flip_reg, diag_reg, locus_reg;

  CLI::App* norm = app.add_subcommand(
      "normalize", "Normal form and double flip report at one (j,t) point");
  add_model_options(norm, o, norm_reg);
  bind_opt_double(norm_reg, "j",
                  norm->add_option("--j", o.j, "Distinguished-parameter value j"),
                  o.j);
  bind_opt_double(norm_reg, "t",
                  norm->add_option("--t", o.t, "Unfolding-parameter value t"),
                  o.t);
  CLI::Option* norm_cand =
      norm->add_flag("--at-candidate", o.at_candidate,
                     "Evaluate at the model's built-in candidate point");
  bind_key(norm_reg, "at-candidate", norm_cand, [&o](const std::string& v) {
    o.at_candidate = parse_config_bool("at-candidate", v);
  });
  CLI::Option* norm_cap =
      norm->add_option("--degree-cap", o.degree_cap,
                       "Jet truncation degree (>= 6); coefficients beyond "
                       "degree 6 do not feed back into the reported normal form")
          ->capture_default_str();
  bind_key(norm_reg, "degree-cap", norm_cap, [&o](const std::string& v) {
    o.degree_cap = parse_config_int("degree-cap", v);
  });
  bind_double(norm_reg, "fd-step",
              norm->add_option("--fd-step", o.fd_step,
                               "Finite difference step for parameter derivatives")
                  ->capture_default_str(),
              o.fd_step);
  add_output_options(norm, o, norm_reg, "text (default), csv, json");
  add_config_option(norm, config_path);
  norm->callback([&] {
    apply_config_file(config_path, norm_reg);
    rc = cmd_normalize(o);
  });

  CLI::App* flip = app.add_subcommand(
      "flip", "Flip / dual flip events along a t = const line");
  add_model_options(flip, o, flip_reg);
  bind_opt_double(flip_reg, "t",
                  flip->add_option("--t", o.t,
                                   "Unfolding-parameter value t (required)"),
                  o.t);
  add_window_options(flip, o, flip_reg);
  add_output_options(flip, o, flip_reg, "text (default), csv, json");
  add_config_option(flip, config_path);
  flip->callback([&] {
    apply_config_file(config_path, flip_reg);
    rc = cmd_flip(o);
  });

  CLI::App* diag = app.add_subcommand(
      "diagram", "Bifurcation diagram h(j) at fixed t");
  add_model_options(diag, o, diag_reg);
  bind_opt_double(diag_reg, "t",
                  diag->add_option("--t", o.t,
                                   "Unfolding-parameter value t (required)"),
                  o.t);
  add_window_options(diag, o, diag_reg);
  CLI::Option* diag_n =
      diag->add_option("--n", o.n, "Number of j samples (>= 2)")
          ->capture_default_str();
  bind_key(diag_reg, "n", diag_n,
       [&o](const std::string& v) { o.n = parse_config_int("n", v); });
  CLI::Option* diag_shift =
      diag->add_flag("--shift-by-j", o.shift_by_j,
                     "SVG only: plot h + j on the ordinate");
  bind_key(diag_reg, "shift-by-j", diag_shift, [&o](const std::string& v) {
    o.shift_by_j = parse_config_bool("shift-by-j", v);
  });
  add_output_options(diag, o, diag_reg, "csv (default), svg, json");
  add_config_option(diag, config_path);
  diag->callback([&] {
    apply_config_file(config_path, diag_reg);
    rc = cmd_diagram(o);
  });

  CLI::App* locus = app.add_subcommand(
      "locus", "Zero loci of nu1 and of the discriminant in the (j,t) plane");
  add_model_options(locus, o, locus_reg);
  add_window_options(locus, o, locus_reg);
  bind_opt_double(locus_reg, "t-min",
                  locus->add_option("--t-min", o.t_min,
                                    "Rectangle lower t bound (default: "
                                    "candidate t - 0.1)"),
                  o.t_min);
  bind_opt_double(locus_reg, "t-max",
                  locus->add_option("--t-max", o.t_max,
                                    "Rectangle upper t bound (default: "
                                    "candidate t + 0.1)"),
                  o.t_max);
  CLI::Option* locus_n =
      locus->add_option("--n", o.n, "Grid resolution per axis (>= 2)")
          ->capture_default_str();
  bind_key(locus_reg, "n", locus_n,
       [&o](const std::string& v) { o.n = parse_config_int("n", v); });
  add_output_options(locus, o, locus_reg, "csv (default), json");
  add_config_option(locus, config_path);
  locus->callback([&] {
    apply_config_file(config_path, locus_reg);
    rc = cmd_locus(o);
  });

  CLI::App* self = app.add_subcommand(
      "selftest", "Run the pinned-value and property check table");
  self->add_option("--out", o.out, "Write the table to this file");
  self->callback([&] { rc = cmd_selftest(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return rc;
}
