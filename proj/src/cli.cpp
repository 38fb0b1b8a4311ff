#include "sfa/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "sfa/analysis.hpp"
#include "sfa/oracle.hpp"
#include "sfa/table.hpp"

namespace sfa::cli {

namespace {

constexpr double pi = std::numbers::pi;
using nlohmann::json;
using nlohmann::ordered_json;

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("not a number: '" + text + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<double> json_list(const json& j, const std::string& key) {
  if (j.is_number()) return {j.get<double>()};
  if (j.is_string()) return parse_list(j.get<std::string>());
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& v : j) {
      if (!v.is_number()) throw ConfigError("config key '" + key + "': list entries must be numbers");
      out.push_back(v.get<double>());
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
  }
  throw ConfigError("config key '" + key + "': expected number, list or range string");
}

std::vector<int> to_orders(const std::vector<double>& values) {
  std::vector<int> out;
  for (double v : values) {
    if (std::abs(v - std::round(v)) > 1e-9 || v < 1) throw ConfigError("orders must be positive integers");
    out.push_back(static_cast<int>(std::lround(v)));
  }
  return out;
}

void require_choice(const std::string& value, std::initializer_list<const char*> allowed, const char* what) {
  for (const char* a : allowed) {
    if (value == a) return;
  }
  throw ConfigError(std::string("invalid ") + what + ": '" + value + "'");
}

void check(const RunConfig& c) {
  for (const auto* list : {&c.wavelength_nm, &c.intensity_wcm2, &c.ip_ev}) {
    if (list->empty()) throw ConfigError("empty parameter list");
  }
  if (!(c.omega_step > 0.0) || c.omega_step > 0.1) throw ConfigError("omega_step must lie in (0, 0.1] (units of w)");
  if (c.phi_steps < 3) throw ConfigError("phi_steps must be at least 3");
  if (!(c.lambda2 >= 0.0)) throw ConfigError("lambda2 must be non-negative");
  require_choice(c.branch, {"1", "2", "both"}, "branch");
  require_choice(c.mode, {"single", "coherent"}, "mode");
  require_choice(c.window, {"interior", "literal"}, "window");
  require_choice(c.format, {"csv", "json"}, "format");
}

LaserConfig single_config(const RunConfig& c) {
  if (c.wavelength_nm.size() != 1 || c.intensity_wcm2.size() != 1 || c.ip_ev.size() != 1) {
    throw ConfigError("this command takes a single wavelength, intensity and ip (lists are for sweep/universal)");
  }
  LaserConfig l;
  l.wavelength_nm = c.wavelength_nm[0];
  l.intensity_wcm2 = c.intensity_wcm2[0];
  l.ip_ev = c.ip_ev[0];
  l.second_harmonic_ratio = c.lambda2;
  return l;
}

std::vector<LaserConfig> config_grid(const RunConfig& c) {
  std::vector<LaserConfig> out;
  for (double wl : c.wavelength_nm) {
    for (double ip : c.ip_ev) {
      for (double in : c.intensity_wcm2) {
        LaserConfig l;
        l.wavelength_nm = wl;
        l.intensity_wcm2 = in;
        l.ip_ev = ip;
        l.second_harmonic_ratio = c.lambda2;
        out.push_back(l);
      }
    }
  }
  return out;
}

PipelineOptions pipeline_options(const RunConfig& c) {
  PipelineOptions o;
  o.omega_step = c.omega_step;
  o.window = c.window == "literal" ? WindowMode::literal : WindowMode::interior;
  return o;
}

bool wants(const RunConfig& c, int branch) { return c.branch == "both" || c.branch == std::to_string(branch); }

double order_of(double omega_h, const FieldParams& f) { return omega_h / f.omega; }

// --- commands ---------------------------------------------------------------

void trace_rows(Table& t, const BranchTrajectory& traj, const FieldParams& f, const char* model, double shift) {
  for (const auto& sp : traj.points) {
    const double omega = sp.omega_h + shift;
    t.add_row({order_of(omega, f), hartree_to_ev(omega), double(sp.branch), std::string(model),
               sp.physical ? 1.0 : 0.0, sp.p.real(), sp.p.imag(), sp.t.real() / f.period, sp.t.imag() / f.period,
               sp.t0.real() / f.period, sp.t0.imag() / f.period, sp.residual_norm});
  }
}

Document cmd_trace(const RunConfig& c) {
  const FieldParams f = derive_field_params(single_config(c));
  const auto grid = default_omega_grid(f, c.omega_step);
  Document doc;
  Table t{"trace",
          {{"order", "1"},
           {"omega_h", "eV"},
           {"branch", "1"},
           {"model", ""},
           {"physical", "1"},
           {"re_p", "a.u."},
           {"im_p", "a.u."},
           {"re_t", "T"},
           {"im_t", "T"},
           {"re_t0", "T"},
           {"im_t0", "T"},
           {"residual", "a.u."}},
          {}};
  for (int b : {1, 2}) {
    if (wants(c, b)) trace_rows(t, trace_branch(b, grid, f), f, "quantum", 0.0);
  }
  if (c.classical_shift) {
    FieldParams f0 = f;
    f0.ip = 0.0;
    const auto grid0 = default_omega_grid(f0, c.omega_step);
    for (int b : {1, 2}) {
      if (wants(c, b)) trace_rows(t, trace_branch(b, grid0, f0), f, "classical", 1.3 * f.ip);
    }
    doc.notes["classical_shift_ev"] = hartree_to_ev(1.3 * f.ip);
  }
  doc.notes["nominal_cutoff_order"] = order_of(f.nominal_cutoff(), f);
  doc.tables.push_back(std::move(t));
  return doc;
}

void marker_notes(Document& doc, const PlateauMarkers& m, const FieldParams& f) {
  doc.notes["nominal_cutoff_order"] = order_of(m.nominal_cutoff, f);
  doc.notes["classical_cutoff_order"] = order_of(m.classical_cutoff, f);
  if (m.intra_plateau_crossing) {
    doc.notes["intra_plateau_crossing_order"] = order_of(*m.intra_plateau_crossing, f);
  } else {
    doc.notes["intra_plateau_crossing_order"] = nullptr;
  }
  doc.notes["insitu_gap_at_cutoff_rad"] = m.insitu_gap_at_cutoff;
  doc.notes["insitu_merge_at_cutoff"] = m.insitu_merge_at_cutoff;
}

Document cmd_insitu(const RunConfig& c) {
  const FieldParams f = derive_field_params(single_config(c));
  PipelineOptions opts = pipeline_options(c);
  opts.compute_gamma = false;
  const PipelineResult r = run_pipeline(f, opts);
  Document doc;
  Table t{"insitu",
          {{"order", "1"},
           {"omega_h", "eV"},
           {"branch", "1"},
           {"physical", "1"},
           {"phi0", "rad"},
           {"tau0", "T/2"},
           {"t_r", "T"}},
          {}};
  for (int b : {1, 2}) {
    if (!wants(c, b)) continue;
    const auto& traj = b == 1 ? r.branch1 : r.branch2;
    const auto& phi0 = b == 1 ? r.phi0_b1 : r.phi0_b2;
    const auto tr = emission_times(traj);
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
      const auto& sp = traj.points[i];
      t.add_row({order_of(sp.omega_h, f), hartree_to_ev(sp.omega_h), double(b), sp.physical ? 1.0 : 0.0,
                 phi0[i].phi0, tau0_half_periods(phi0[i].phi0, f), tr[i].t_r_over_period});
    }
  }
  marker_notes(doc, r.markers, f);
  doc.tables.push_back(std::move(t));
  return doc;
}

SpectrogramMode spectrogram_mode(const RunConfig& c) {
  if (c.mode == "coherent") return SpectrogramMode::coherent;
  if (c.branch == "1") return SpectrogramMode::branch1;
  if (c.branch == "2") return SpectrogramMode::branch2;
  throw ConfigError("--mode single needs --branch 1 or --branch 2");
}

Document cmd_spectrogram(const RunConfig& c) {
  const FieldParams f = derive_field_params(single_config(c));
  PipelineOptions opts = pipeline_options(c);
  opts.compute_gamma = false;
  const PipelineResult r = run_pipeline(f, opts);
  std::vector<int> orders = c.orders;
  if (orders.empty()) {
    const int lo = static_cast<int>(std::ceil(r.grid.front() / f.omega));
    const int hi = static_cast<int>(std::floor(f.nominal_cutoff() / f.omega));
    for (int q = lo; q <= hi; ++q) {
      if (q % 2 == 0) orders.push_back(q);
    }
  }
  const auto phi = default_phi_grid(c.phi_steps);
  const std::vector<BranchTrajectory> branches = {r.branch1, r.branch2};
  const Spectrogram s = spectrogram(branches, orders, phi, spectrogram_mode(c), f);

  Document doc;
  doc.notes["mode"] = to_string(s.mode);
  Table grid{"grid", {{"order", "1"}}, {}};
  for (double d : s.delays) grid.columns.push_back({format_number(d), "T"});
  for (std::size_t k = 0; k < s.orders.size(); ++k) {
    std::vector<Cell> row = {double(s.orders[k])};
    for (Eigen::Index j = 0; j < s.intensity.cols(); ++j) row.emplace_back(s.intensity(static_cast<Eigen::Index>(k), j));
    grid.add_row(std::move(row));
  }
  Table maxima{"maxima",
               {{"order", "1"},
                {"phi_max", "rad"},
                {"delay_max", "T"},
                {"delay_b1", "T"},
                {"delay_b2", "T"},
                {"nearest_branch", "1"}},
               {}};
  for (std::size_t k = 0; k < s.orders.size(); ++k) {
    const double omega_h = s.orders[k] * f.omega;
    const double p1 = std::fmod(std::fmod(phi0_at(r.phi0_b1, omega_h), pi) + pi, pi);
    const double p2 = std::fmod(std::fmod(phi0_at(r.phi0_b2, omega_h), pi) + pi, pi);
    const double pm = s.max_phi[k];
    maxima.add_row({double(s.orders[k]), pm, s.max_delay[k], -p1 / (4.0 * pi), -p2 / (4.0 * pi),
                    std::isfinite(pm) ? double(nearest_branch(pm, p1, p2)) : std::nan("")});
  }
  doc.tables.push_back(std::move(grid));
  doc.tables.push_back(std::move(maxima));
  return doc;
}

Document cmd_gamma(const RunConfig& c) {
  const FieldParams f = derive_field_params(single_config(c));
  const PipelineOptions opts = pipeline_options(c);
  const Window w = central_window(f, opts.window);
  PipelineOptions no_gamma = opts;
  no_gamma.compute_gamma = false;
  const PipelineResult r = run_pipeline(f, no_gamma);
  Document doc;
  doc.notes["window"] = to_string(opts.window);
  doc.notes["up_over_ip"] = f.ip > 0.0 ? f.up / f.ip : std::numeric_limits<double>::infinity();
  Table t{"gamma",
          {{"branch", "1"},
           {"gamma", "1"},
           {"slope_tr", "a.u."},
           {"slope_phi0", "a.u."},
           {"window_lo", "eV"},
           {"window_hi", "eV"},
           {"fit_residual", "1"}},
          {}};
  for (int b : {1, 2}) {
    if (!wants(c, b)) continue;
    const GammaReport g = b == 1 ? gamma_ratio(r.branch1, r.phi0_b1, w, opts.max_fit_residual)
                                 : gamma_ratio(r.branch2, r.phi0_b2, w, opts.max_fit_residual);
    t.add_row({double(b), g.gamma, g.slope_tr, g.slope_phi0, hartree_to_ev(w.lo), hartree_to_ev(w.hi),
               g.fit_residual});
  }
  doc.tables.push_back(std::move(t));
  return doc;
}

Table gamma_table(const std::vector<GammaRow>& rows) {
  Table t{"gamma",
          {{"wavelength_nm", "nm"},
           {"intensity_wcm2", "W/cm^2"},
           {"ip_ev", "eV"},
           {"up_over_ip", "1"},
           {"gamma_b1", "1"},
           {"gamma_b2", "1"},
           {"fit_residual_b1", "1"},
           {"fit_residual_b2", "1"},
           {"error", ""}},
          {}};
  for (const auto& r : rows) {
    t.add_row({r.config.wavelength_nm, r.config.intensity_wcm2, r.config.ip_ev, r.up_over_ip, r.gamma_b1, r.gamma_b2,
               r.fit_residual_b1, r.fit_residual_b2, r.error});
  }
  return t;
}

Document cmd_sweep(const RunConfig& c) {
  Document doc;
  doc.notes["window"] = c.window;
  doc.tables.push_back(gamma_table(gamma_scan(config_grid(c), pipeline_options(c))));
  return doc;
}

Document cmd_universal(const RunConfig& c) {
  Document doc;
  doc.notes["window"] = c.window;
  doc.tables.push_back(gamma_table(universal_curve(config_grid(c), pipeline_options(c))));
  return doc;
}

Document cmd_validate(const RunConfig& c, bool& failed) {
  const FieldParams f = derive_field_params(single_config(c));
  const auto checks = oracle::validate(f);
  Document doc;
  Table t{"checks", {{"check", ""}, {"max_error", ""}, {"tolerance", ""}, {"samples", "1"}, {"passed", "1"}}, {}};
  failed = false;
  for (const auto& k : checks) {
    t.add_row({k.name, k.max_error, k.tolerance, double(k.samples), k.passed() ? 1.0 : 0.0});
    failed = failed || !k.passed();
  }
  doc.tables.push_back(std::move(t));
  return doc;
}

void emit(const Document& doc, const RunConfig& c, std::ostream& out) {
  std::ostringstream buffer;
  if (c.format == "json") {
    write_json(buffer, doc);
  } else {
    write_csv(buffer, doc);
  }
  if (c.out.empty()) {
    out << buffer.str();
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw ConfigError("cannot open output file '" + c.out + "'");
  file << buffer.str();
}

void report(std::ostream& err, const char* kind, const std::string& message, int code,
            const ordered_json& extra = ordered_json::object()) {
  ordered_json j{{"error", kind}, {"message", message}, {"exit_code", code}};
  for (const auto& [k, v] : extra.items()) j[k] = v;
  err << j.dump() << "\n";
}

}  // namespace

ordered_json RunConfig::to_json() const {
  return {{"wavelength_nm", wavelength_nm}, {"intensity_wcm2", intensity_wcm2},
          {"ip_ev", ip_ev},                 {"lambda2", lambda2},
          {"orders", orders},               {"omega_step", omega_step},
          {"phi_steps", phi_steps},         {"branch", branch},
          {"mode", mode},                   {"window", window},
          {"classical_shift", classical_shift}, {"format", format}};
}

std::vector<double> parse_list(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("empty list");
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(trim(part));
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError("range must be start:stop[:step]: '" + s + "'");
    const double start = parse_number(parts[0]);
    const double stop = parse_number(parts[1]);
    const double step = parts.size() == 3 ? parse_number(parts[2]) : 1.0;
    if (!(step > 0.0)) throw ConfigError("range step must be positive: '" + s + "'");
    if (stop < start) throw ConfigError("range stop below start: '" + s + "'");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');) out.push_back(parse_number(trim(part)));
  return out;
}

void apply_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "wavelength_nm") c.wavelength_nm = json_list(v, key);
      else if (key == "intensity_wcm2") c.intensity_wcm2 = json_list(v, key);
      else if (key == "ip_ev") c.ip_ev = json_list(v, key);
      else if (key == "lambda2") c.lambda2 = v.get<double>();
      else if (key == "orders") c.orders = to_orders(json_list(v, key));
      else if (key == "omega_step") c.omega_step = v.get<double>();
      else if (key == "phi_steps") c.phi_steps = v.get<int>();
      else if (key == "branch") c.branch = v.is_number() ? std::to_string(v.get<int>()) : v.get<std::string>();
      else if (key == "mode") c.mode = v.get<std::string>();
      else if (key == "window") c.window = v.get<std::string>();
      else if (key == "classical_shift") c.classical_shift = v.get<bool>();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "out") c.out = v.get<std::string>();
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain:
    case ErrorKind::config:
    case ErrorKind::range: return 2;
    case ErrorKind::validation: return 4;
    default: return 3;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Saddle-point SFA harmonics: trajectories, in-situ phases and gamma ratios", "sfa"};
  app.require_subcommand(1);

  struct Flags {
    std::string wavelength, intensity, ip, orders, branch, mode, window, format, out, config;
    double lambda2 = 0.0, omega_step = 0.0;
    int phi_steps = 0;
    bool classical_shift = false;
  } flags;

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"trace", "saddle points of both branches vs harmonic order"},
      {"insitu", "in-situ phases (as delays) and emission times vs order"},
      {"spectrogram", "harmonic intensity vs two-color delay, with per-order maxima"},
      {"gamma", "gamma ratio for one configuration"},
      {"sweep", "gamma ratios over lists of wavelength, ip and intensity"},
      {"universal", "gamma ratios sorted by Up/Ip"},
      {"validate", "oracle suite: quadrature, grid scans, finite differences"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--wavelength-nm", flags.wavelength, "wavelength in nm (list or start:stop:step for sweeps)");
    sub->add_option("--intensity-wcm2", flags.intensity, "peak intensity in W/cm^2 (list or range for sweeps)");
    sub->add_option("--ip-ev", flags.ip, "ionization potential in eV (list or range for sweeps)");
    sub->add_option("--lambda2", flags.lambda2, "second-harmonic amplitude ratio");
    sub->add_option("--orders", flags.orders, "harmonic orders for the spectrogram (list or range)");
    sub->add_option("--omega-step", flags.omega_step, "harmonic grid spacing in units of the photon energy");
    sub->add_option("--phi-steps", flags.phi_steps, "relative-phase samples over [0, pi)");
    sub->add_option("--branch", flags.branch, "1, 2 or both");
    sub->add_option("--mode", flags.mode, "spectrogram mode: single or coherent");
    sub->add_option("--window", flags.window, "gamma fit window: interior or literal");
    sub->add_flag("--classical-shift", flags.classical_shift, "add the Ip = 0 trace shifted by 1.3 Ip");
    sub->add_option("--format", flags.format, "csv or json");
    sub->add_option("--out", flags.out, "output file (default stdout)");
    sub->add_option("--config", flags.config, "JSON config file; flags override its keys");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    report(err, "config", e.what(), 2);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  RunConfig config;
  try {
    if (sub->count("--config")) {
      std::ifstream file(flags.config);
      if (!file) throw ConfigError("cannot read config file '" + flags.config + "'");
      json j;
      try {
        j = json::parse(file);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
      }
      apply_json(config, j);
    }
    if (sub->count("--wavelength-nm")) config.wavelength_nm = parse_list(flags.wavelength);
    if (sub->count("--intensity-wcm2")) config.intensity_wcm2 = parse_list(flags.intensity);
    if (sub->count("--ip-ev")) config.ip_ev = parse_list(flags.ip);
    if (sub->count("--lambda2")) config.lambda2 = flags.lambda2;
    if (sub->count("--orders")) config.orders = to_orders(parse_list(flags.orders));
    if (sub->count("--omega-step")) config.omega_step = flags.omega_step;
    if (sub->count("--phi-steps")) config.phi_steps = flags.phi_steps;
    if (sub->count("--branch")) config.branch = flags.branch;
    if (sub->count("--mode")) config.mode = flags.mode;
    if (sub->count("--window")) config.window = flags.window;
    if (sub->count("--classical-shift")) config.classical_shift = flags.classical_shift;
    if (sub->count("--format")) config.format = flags.format;
    if (sub->count("--out")) config.out = flags.out;
    check(config);

    for (const auto& l : config_grid(config)) {
      for (const auto& w : validity_warnings(l)) err << "warning: " << w << "\n";
    }

    Document doc;
    bool failed = false;
    if (command == "trace") doc = cmd_trace(config);
    else if (command == "insitu") doc = cmd_insitu(config);
    else if (command == "spectrogram") doc = cmd_spectrogram(config);
    else if (command == "gamma") doc = cmd_gamma(config);
    else if (command == "sweep") doc = cmd_sweep(config);
    else if (command == "universal") doc = cmd_universal(config);
    else doc = cmd_validate(config, failed);
    doc.command = command;
    doc.config = config.to_json();
    emit(doc, config, out);
    if (failed) {
      report(err, "validation", "one or more oracle checks failed", 4);
      return 4;
    }
    return 0;
  } catch (const HomotopyError& e) {
    const int code = exit_code(e.kind());
    report(err, to_string(e.kind()), e.what(), code, {{"last_good_fraction", e.last_good_fraction()}});
    return code;
  } catch (const Error& e) {
    const int code = exit_code(e.kind());
    report(err, to_string(e.kind()), e.what(), code);
    return code;
  }
}

}  // namespace sfa::cli
