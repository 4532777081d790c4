#include "qbattery/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbattery/analysis.hpp"
#include "qbattery/config.hpp"
#include "qbattery/dynamics.hpp"
#include "qbattery/error.hpp"
#include "qbattery/io.hpp"
#include "qbattery/reproduce.hpp"

namespace qbattery {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kUsage =
    "usage: qb <command> [--config <file>] [--out <dir>] [--threads <k>] [overrides...]\n"
    "\n"
    "commands:\n"
    "  trace        E(t), P(t), Sigma(t) and <J_z>/(N/2) on the search grid\n"
    "  extrema      E_max, P_max, Sigma_bar and their times\n"
    "  sweep        two-axis parameter grid of one quantity\n"
    "  phase        ground-state <J_z>/(N/2) grid plus the critical line\n"
    "  scaling      P_max / g over a range of N and a power-law fit\n"
    "  convergence  extrema against the photon cutoff factor\n"
    "  reproduce    benchmark jobs compared against reference values\n"
    "\n"
    "Run 'qb <command> --help' for the options of a command.\n";

struct Overrides {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::optional<int> n_tls;
  std::optional<double> g, eta, omega_drive, omega_a, omega_c;
  std::optional<int> cutoff_factor;
  std::optional<std::string> drive;
  std::optional<double> horizon;
  std::optional<int> coarse_points;
  std::optional<double> refine_tolerance;
  std::optional<int> max_dim;
  std::optional<std::string> formats;
  std::optional<std::string> axis1, axis2, quantity;
  std::optional<std::string> n_range;
  std::optional<std::string> synthetic;
  std::optional<std::string> factors;
  std::optional<std::string> only;
};

template <class T>
void add_flag_value(CLI::App* app, const std::string& name, std::optional<T>& slot, const std::string& help) {
  app->add_option_function<T>(name, [&slot](const T& v) { slot = v; }, help);
}

void add_common(CLI::App* app, Overrides& o, bool physics) {
  app->add_option("--config", o.config_path, "JSON config file");
  add_flag_value(app, "--out", o.out_dir, "output directory");
  add_flag_value(app, "--threads", o.threads, "worker threads (default QB_THREADS or 1)");
  add_flag_value(app, "--formats", o.formats, "comma list of csv,json,svg");
  if (!physics) return;
  add_flag_value(app, "--n", o.n_tls, "number of two-level systems N");
  add_flag_value(app, "--g", o.g, "coupling g");
  add_flag_value(app, "--eta", o.eta, "interaction eta");
  add_flag_value(app, "--omega", o.omega_drive, "drive amplitude Omega");
  add_flag_value(app, "--omega-a", o.omega_a, "TLS splitting w_a");
  add_flag_value(app, "--omega-c", o.omega_c, "cavity frequency w_c");
  add_flag_value(app, "--cutoff-factor", o.cutoff_factor, "photon cutoff N_ph = factor * N");
  add_flag_value(app, "--drive", o.drive, "drive coupling: ladder_sum or collective_x");
  add_flag_value(app, "--horizon", o.horizon, "search horizon T in 1/w_a");
  add_flag_value(app, "--coarse-points", o.coarse_points, "coarse grid intervals");
  add_flag_value(app, "--refine-tol", o.refine_tolerance, "golden-section tolerance");
  add_flag_value(app, "--max-dim", o.max_dim, "Hilbert space dimension guard");
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read config file " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

struct UsageRequest {};  // empty config: print usage

RunConfig build_config(const std::string& command, const Overrides& o) {
  RunConfig c;
  c.command = command;
  if (!o.config_path.empty()) {
    const std::string txt = read_text(o.config_path);
    if (txt.find_first_not_of(" \t\r\n") == std::string::npos) throw UsageRequest{};
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(txt);
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
    merge_config(c, doc);
  }
  if (o.out_dir) c.out_dir = *o.out_dir;
  if (o.threads) c.threads = *o.threads;
  if (o.formats) {
    c.formats.clear();
    for (const std::string& f : split_list(*o.formats)) c.formats.insert(f);
  }
  if (o.n_tls) c.params.n_tls = *o.n_tls;
  if (o.g) c.params.g = *o.g;
  if (o.eta) c.params.eta = *o.eta;
  if (o.omega_drive) c.params.omega_drive = *o.omega_drive;
  if (o.omega_a) c.params.omega_a = *o.omega_a;
  if (o.omega_c) c.params.omega_c = *o.omega_c;
  if (o.cutoff_factor) c.params.cutoff_factor = *o.cutoff_factor;
  if (o.drive) c.params.drive = drive_coupling_from_string(*o.drive);
  if (o.horizon) c.protocol.search_horizon = *o.horizon;
  if (o.coarse_points) c.protocol.coarse_points = *o.coarse_points;
  if (o.refine_tolerance) c.protocol.refine_tolerance = *o.refine_tolerance;
  if (o.max_dim) {
    if (*o.max_dim < 1) throw InvalidArgument("max_dim must be positive");
    c.max_dim = static_cast<std::size_t>(*o.max_dim);
  }
  if (o.axis1 || o.axis2) {
    c.axes.resize(2);
    if (o.axis1) c.axes[0] = parse_axis(*o.axis1);
    if (o.axis2) c.axes[1] = parse_axis(*o.axis2);
  }
  if (o.quantity) c.quantity = sweep_quantity_from_string(*o.quantity);
  if (o.n_range) std::tie(c.n_min, c.n_max) = parse_int_range(*o.n_range);
  if (o.synthetic) {
    const auto parts = split_list(*o.synthetic);
    if (parts.size() != 2) throw InvalidArgument("--synthetic needs alpha,beta");
    c.synthetic = SyntheticLaw{std::stod(parts[0]), std::stod(parts[1])};
  }
  if (o.factors) {
    c.factors.clear();
    for (const std::string& f : split_list(*o.factors)) c.factors.push_back(std::stoi(f));
  }
  if (o.only) c.only = split_list(*o.only);
  if (command == "phase") c.quantity = SweepQuantity::gs_sz;
  validate_config(c);
  return c;
}

class Writer {
 public:
  Writer(const RunConfig& c, std::ostream& out) : config_(c), out_(out) {}

  bool wants(const char* format) const { return config_.formats.count(format) > 0; }

  void put(const std::string& name, const std::string& contents) {
    pending_.push_back({name, contents});
  }
  void csv(const std::string& name, const io::CsvTable& table) {
    if (wants("csv")) put(name, table.str());
  }
  void json(const std::string& name, const ojson& doc) {
    if (wants("json")) put(name, doc.dump(2) + "\n");
  }
  void svg(const std::string& name, const std::string& doc) {
    if (wants("svg")) put(name, doc);
  }
  void flush() {
    io::ensure_directory(config_.out_dir);
    for (const OutputFile& f : pending_) {
      io::write_file(config_.out_dir / f.name, f.contents);
      out_ << "wrote " << (config_.out_dir / f.name).string() << "\n";
    }
    pending_.clear();
  }

 private:
  const RunConfig& config_;
  std::ostream& out_;
  std::vector<OutputFile> pending_;
};

ojson sidecar(const RunConfig& c, const std::vector<std::string>& files) {
  ojson j;
  j["artifact_version"] = std::string(io::kArtifactVersion);
  j["command"] = c.command;
  j["files"] = files;
  j["params"] = to_json(c.params);
  j["protocol"] = to_json(c.protocol, c.params);
  j["max_dim"] = c.max_dim;
  j["units"] = units_json();
  return j;
}

int cmd_trace(const RunConfig& c, Writer& w) {
  const ChargingDynamics dyn(c.params, c.max_dim);
  const ChargingTrace tr = trace(dyn, c.protocol);
  io::CsvTable csv({"t", "energy", "power", "fluctuation", "sz_ratio"});
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    csv.add_row({tr.times[k], tr.energy[k], tr.power[k], tr.fluctuation[k], tr.sz[k]});
  }
  ojson meta = sidecar(c, {"trace.csv"});
  meta["horizon"] = tr.horizon;
  meta["rows"] = tr.times.size();
  meta["hilbert_dim"] = dyn.space().dim();
  meta["sector_dim"] = dyn.sector_dim();
  meta["warnings"] = tr.warnings;
  w.csv("trace.csv", csv);
  w.json("trace.json", meta);
  w.svg("trace.svg", io::svg_line_plot({"Charging trace", "t (1/w_a)", "w_a units"},
                                       {{"E(t)", tr.times, tr.energy, false},
                                        {"Sigma(t)", tr.times, tr.fluctuation, false}}));
  return kExitOk;
}

int cmd_extrema(const RunConfig& c, Writer& w) {
  const ExtremumReport r = find_extrema(ChargingDynamics(c.params, c.max_dim), c.protocol);
  io::CsvTable csv({"e_max", "t_e", "p_max", "t_p", "sigma_bar", "p_max_normalized", "horizon"});
  const double p_norm = c.params.g > 0 ? r.p_max / c.params.g : std::nan("");
  csv.add_row({r.e_max, r.t_e, r.p_max, r.t_p, r.sigma_bar, p_norm, r.horizon});
  ojson meta = sidecar(c, {"extrema.csv"});
  meta["horizon_warning"] = r.horizon_warning;
  meta["warnings"] = r.warnings;
  w.csv("extrema.csv", csv);
  w.json("extrema.json", meta);
  return kExitOk;
}

int cmd_sweep(const RunConfig& c, Writer& w) {
  const SweepGrid grid = sweep(c.params, c.axes[0], c.axes[1], c.quantity, c.protocol,
                               resolve_threads(c.threads));
  io::CsvTable csv({"axis1", "axis2", "value"});
  std::vector<double> values;
  ojson failed = ojson::array(), flagged = ojson::array();
  const auto& a = c.axes[0].values;
  const auto& b = c.axes[1].values;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const SweepCell& cell = grid.at(i, j);
      const double v = cell.ok ? cell.value : std::nan("");
      csv.add_row({a[i], b[j], v});
      values.push_back(v);
      if (!cell.ok) failed.push_back({{"axis1", a[i]}, {"axis2", b[j]}, {"error", cell.error}});
      if (cell.flagged) flagged.push_back({{"axis1", a[i]}, {"axis2", b[j]}});
    }
  }
  std::vector<std::string> files{"sweep.csv"};
  const bool g_eta = c.command == "phase" &&
                     ((c.axes[0].parameter == SweepParameter::g && c.axes[1].parameter == SweepParameter::eta) ||
                      (c.axes[0].parameter == SweepParameter::eta && c.axes[1].parameter == SweepParameter::g));
  if (g_eta) {
    const bool g_first = c.axes[0].parameter == SweepParameter::g;
    const auto& gs = g_first ? a : b;
    const auto& etas = g_first ? b : a;
    io::CsvTable crit({"g", "eta_c"});
    io::CsvTable bound({"g", "eta_c", "jump_lo", "jump_hi", "jump"});
    for (std::size_t gi = 0; gi < gs.size(); ++gi) {
      const double eta_c = critical_eta(gs[gi], c.params.n_tls, c.params.omega_a, c.params.omega_c);
      crit.add_row({gs[gi], eta_c});
      double best = -1, lo = std::nan(""), hi = std::nan("");
      for (std::size_t e = 0; e + 1 < etas.size(); ++e) {
        const SweepCell& c0 = g_first ? grid.at(gi, e) : grid.at(e, gi);
        const SweepCell& c1 = g_first ? grid.at(gi, e + 1) : grid.at(e + 1, gi);
        if (!c0.ok || !c1.ok) continue;
        const double jump = std::abs(std::abs(c1.value) - std::abs(c0.value));
        if (jump > best) {
          best = jump;
          lo = etas[e];
          hi = etas[e + 1];
        }
      }
      bound.add_row({gs[gi], eta_c, lo, hi, best < 0 ? std::nan("") : best});
    }
    w.csv("critical.csv", crit);
    w.csv("boundary.csv", bound);
    files.push_back("critical.csv");
    files.push_back("boundary.csv");
  }
  ojson meta = sidecar(c, files);
  meta["axis1"] = to_json(c.axes[0]);
  meta["axis2"] = to_json(c.axes[1]);
  meta["quantity"] = std::string(to_string(c.quantity));
  meta["failed_cells"] = failed;
  meta["flagged_cells"] = flagged;
  w.csv("sweep.csv", csv);
  w.json("sweep.json", meta);
  w.svg("sweep.svg", io::svg_heatmap({std::string(to_string(c.quantity)),
                                      std::string(to_string(c.axes[0].parameter)),
                                      std::string(to_string(c.axes[1].parameter))},
                                     a, b, values));
  return grid.failed_cells() > 0 ? kExitPartialSweep : kExitOk;
}

std::string file_label(const std::string& label) {
  std::string s = label;
  for (char& ch : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '_';
    if (!ok) ch = '_';
  }
  return s.empty() ? "set" : s;
}

int cmd_scaling(const RunConfig& c, Writer& w) {
  std::vector<ScalingSet> sets = c.scaling_sets;
  if (sets.empty()) sets.push_back({"base", c.params});
  std::vector<int> ns;
  for (int n = c.n_min; n <= c.n_max; ++n) ns.push_back(n);
  io::CsvTable summary({"label", "alpha", "beta", "residual"});
  ojson set_meta = ojson::array();
  std::vector<io::Series> series;
  std::vector<std::string> files{"alphas.csv"};
  for (const ScalingSet& set : sets) {
    ScalingFit fit;
    ojson warnings = ojson::array();
    if (c.synthetic) {
      std::vector<ScalingPoint> pts;
      for (int n : ns) pts.push_back({n, c.synthetic->beta * std::pow(static_cast<double>(n), c.synthetic->alpha)});
      fit = fit_power_scaling(pts);
    } else {
      const ScalingRun run = power_scaling(set.params, ns, c.protocol, resolve_threads(c.threads));
      fit = run.fit;
      for (std::size_t k = 0; k < run.reports.size(); ++k) {
        if (run.reports[k].horizon_warning) warnings.push_back("horizon warning at N=" + std::to_string(ns[k]));
      }
    }
    const std::string name = "scaling_" + file_label(set.label) + ".csv";
    io::CsvTable pts({"N", "p_max_normalized"});
    std::vector<double> x;
    for (std::size_t k = 0; k < fit.n_values.size(); ++k) {
      pts.add_row({static_cast<double>(fit.n_values[k]), fit.p_max_values[k]});
      x.push_back(fit.n_values[k]);
    }
    w.csv(name, pts);
    files.push_back(name);
    summary.add_text_row({set.label, io::format_double(fit.alpha), io::format_double(fit.beta),
                          io::format_double(fit.residual)});
    ojson m;
    m["label"] = set.label;
    m["file"] = name;
    m["params"] = to_json(set.params);
    m["alpha"] = fit.alpha;
    m["beta"] = fit.beta;
    m["beta_log10_intercept"] = fit.beta_log10_intercept;
    m["residual"] = fit.residual;
    m["warnings"] = warnings;
    set_meta.push_back(m);
    series.push_back({set.label, x, fit.p_max_values, true});
  }
  ojson meta = sidecar(c, files);
  meta["n_range"] = {c.n_min, c.n_max};
  meta["synthetic"] = c.synthetic ? ojson{{"alpha", c.synthetic->alpha}, {"beta", c.synthetic->beta}} : ojson(nullptr);
  meta["beta_convention"] = "beta = exp(intercept) of ln P = alpha ln N + ln beta";
  meta["sets"] = set_meta;
  w.csv("alphas.csv", summary);
  w.json("scaling.json", meta);
  w.svg("scaling.svg", io::svg_line_plot({"P_max / g against N", "N", "P_max / g (g w_a^2)", true, true},
                                         series));
  return kExitOk;
}

int cmd_convergence(const RunConfig& c, Writer& w) {
  const auto rows = cutoff_convergence(c.params, c.factors, c.protocol, c.max_dim);
  io::CsvTable csv({"factor", "n_ph_max", "e_max", "p_max", "delta_e", "delta_p"});
  for (const ConvergenceRow& r : rows) {
    csv.add_row({static_cast<double>(r.factor), static_cast<double>(r.factor * c.params.n_tls), r.e_max,
                 r.p_max, r.delta_e, r.delta_p});
  }
  w.csv("convergence.csv", csv);
  w.json("convergence.json", sidecar(c, {"convergence.csv"}));
  return kExitOk;
}

int cmd_reproduce(const RunConfig& c, Writer& w, std::ostream& err) {
  const std::vector<ReproJob> jobs = run_reproduce(c.only, resolve_threads(c.threads), &err);
  ojson summary = ojson::array();
  bool ok = true;
  for (const ReproJob& j : jobs) {
    ok = ok && j.passed();
    ojson files = ojson::array();
    for (const OutputFile& f : j.files) {
      w.put(f.name, f.contents);
      files.push_back(f.name);
    }
    std::size_t failed = 0;
    for (const Comparison& cmp : j.comparisons) failed += cmp.gating && !cmp.pass() ? 1 : 0;
    summary.push_back({{"job", j.name}, {"passed", j.passed()}, {"failed_comparisons", failed}, {"files", files}});
  }
  w.put("report.md", render_report(jobs));
  ojson meta;
  meta["artifact_version"] = std::string(io::kArtifactVersion);
  meta["command"] = "reproduce";
  meta["units"] = units_json();
  meta["jobs"] = summary;
  w.json("reproduce.json", meta);
  return ok ? kExitOk : kExitReproMismatch;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (argc < 2) {
    err << kUsage;
    return kExitUsage;
  }
  CLI::App app{"Extended Dicke quantum battery simulator", "qb"};
  app.require_subcommand(1);
  Overrides o;
  CLI::App* trace_cmd = app.add_subcommand("trace", "charging trace");
  CLI::App* extrema_cmd = app.add_subcommand("extrema", "charging extrema");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "two-axis sweep");
  CLI::App* phase_cmd = app.add_subcommand("phase", "ground-state phase grid");
  CLI::App* scaling_cmd = app.add_subcommand("scaling", "power scaling with N");
  CLI::App* conv_cmd = app.add_subcommand("convergence", "photon cutoff audit");
  CLI::App* repro_cmd = app.add_subcommand("reproduce", "benchmark reproduction");
  for (CLI::App* sub : {trace_cmd, extrema_cmd, sweep_cmd, phase_cmd, scaling_cmd, conv_cmd}) {
    add_common(sub, o, true);
  }
  add_common(repro_cmd, o, false);
  for (CLI::App* sub : {sweep_cmd, phase_cmd}) {
    add_flag_value(sub, "--axis1", o.axis1, "first axis, name=v1,v2,... or name=start:stop:count");
    add_flag_value(sub, "--axis2", o.axis2, "second axis");
  }
  add_flag_value(sweep_cmd, "--quantity", o.quantity, "e_max, p_max, sigma_bar or gs_sz");
  add_flag_value(scaling_cmd, "--n-range", o.n_range, "lo:hi (inclusive)");
  add_flag_value(scaling_cmd, "--synthetic", o.synthetic, "alpha,beta: fit an exact power law instead");
  add_flag_value(conv_cmd, "--factors", o.factors, "comma list of cutoff factors");
  add_flag_value(repro_cmd, "--only", o.only, "comma list of jobs: table1..table5, phase");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help() << "\n";
    for (CLI::App* sub : app.get_subcommands()) out << sub->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qb: " << e.what() << "\n\n" << kUsage;
    return kExitUsage;
  }
  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  try {
    const RunConfig config = build_config(command, o);
    Writer w(config, out);
    int code = kExitOk;
    if (command == "trace") code = cmd_trace(config, w);
    else if (command == "extrema") code = cmd_extrema(config, w);
    else if (command == "sweep" || command == "phase") code = cmd_sweep(config, w);
    else if (command == "scaling") code = cmd_scaling(config, w);
    else if (command == "convergence") code = cmd_convergence(config, w);
    else code = cmd_reproduce(config, w, err);
    w.flush();
    if (code == kExitPartialSweep) err << "qb: some sweep cells failed, see sweep.json\n";
    if (code == kExitReproMismatch) err << "qb: reproduction mismatch, see report.md\n";
    return code;
  } catch (const UsageRequest&) {
    err << "qb: config file is empty\n\n" << kUsage;
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "qb: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "qb: bad number in arguments: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "qb: " << e.what() << "\n";
    return kExitEnvironment;
  } catch (const std::bad_alloc&) {
    err << "qb: out of memory\n";
    return kExitEnvironment;
  }
}

}  // namespace qbattery
