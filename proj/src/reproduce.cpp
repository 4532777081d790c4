#include "qbattery/reproduce.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

#include "qbattery/analysis.hpp"
#include "qbattery/error.hpp"
#include "qbattery/io.hpp"

namespace qbattery {

namespace {

constexpr double kTol = 0.05;
constexpr std::array<double, 3> kCouplings{0.1, 0.5, 2.0};
constexpr int kExtremaN = 10;
constexpr int kScalingNMax = 30;
constexpr double kPhaseStep = 0.2;
constexpr double kGridRounding = 1e-9;  // decimal grid values are not exact in binary

using io::format_double;

std::string fmt(double v) { return format_double(v); }

// report.md is for reading; the CSVs carry full precision
std::string brief(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

Comparison within(std::string item, double reference, double computed, bool gating = true,
                  std::string note = {}) {
  return {std::move(item), reference, computed, reference - kTol, reference + kTol, gating,
          std::move(note)};
}

ModelParams point(int n, double g, double eta, double omega) {
  ModelParams p;
  p.n_tls = n;
  p.g = g;
  p.eta = eta;
  p.omega_drive = omega;
  return p;
}

// ---- extrema tables -------------------------------------------------------

struct ExtremaRow {
  double row_value;  // eta (table 1) or Omega (table 2)
  std::array<double, 3> e;
  std::array<double, 3> sigma;
};

ReproJob extrema_table(const std::string& name, const std::string& title, bool rows_are_drive,
                       const std::vector<ExtremaRow>& rows, int threads) {
  ReproJob job{name, title, {}, {}, {}};
  const std::size_t cells = rows.size() * kCouplings.size();
  std::vector<ExtremumReport> reports(cells);
  const ChargingProtocol protocol;
  parallel_for(cells, threads, [&](std::size_t k) {
    const ExtremaRow& r = rows[k / kCouplings.size()];
    const double g = kCouplings[k % kCouplings.size()];
    reports[k] = find_extrema(
        point(kExtremaN, g, rows_are_drive ? 0.0 : r.row_value, rows_are_drive ? r.row_value : 0.0),
        protocol);
  });
  const char* row_name = rows_are_drive ? "omega_drive" : "eta";
  io::CsvTable csv({row_name, "g", "e_max", "e_reference", "sigma_bar", "sigma_reference", "t_e",
                    "horizon"});
  for (std::size_t k = 0; k < cells; ++k) {
    const ExtremaRow& r = rows[k / kCouplings.size()];
    const std::size_t c = k % kCouplings.size();
    const ExtremumReport& rep = reports[k];
    const std::string cell =
        std::string(row_name) + "=" + fmt(r.row_value) + ", g=" + fmt(kCouplings[c]);
    job.comparisons.push_back(within("E_max " + cell, r.e[c], rep.e_max));
    job.comparisons.push_back(within("Sigma_bar " + cell, r.sigma[c], rep.sigma_bar));
    if (rep.horizon_warning) job.notes.push_back("horizon warning at " + cell);
    csv.add_row({r.row_value, kCouplings[c], rep.e_max, r.e[c], rep.sigma_bar, r.sigma[c], rep.t_e,
                 rep.horizon});
  }
  job.files.push_back({name + ".csv", csv.str()});
  return job;
}

// ---- scaling tables -------------------------------------------------------

using ScalingKey = std::tuple<double, double, double>;  // g, eta, Omega

class ScalingCache {
 public:
  explicit ScalingCache(int threads, std::ostream* log) : threads_(threads), log_(log) {}

  const ScalingRun& get(double g, double eta, double omega) {
    const ScalingKey key{g, eta, omega};
    auto it = runs_.find(key);
    if (it != runs_.end()) return it->second;
    if (log_) *log_ << "  scaling g=" << fmt(g) << " eta=" << fmt(eta) << " omega=" << fmt(omega) << std::endl;
    std::vector<int> ns(kScalingNMax);
    std::iota(ns.begin(), ns.end(), 1);
    ScalingRun run = power_scaling(point(1, g, eta, omega), ns, ChargingProtocol{}, threads_);
    return runs_.emplace(key, std::move(run)).first->second;
  }

 private:
  int threads_;
  std::ostream* log_;
  std::map<ScalingKey, ScalingRun> runs_;
};

struct ScalingRow {
  double row_value;
  std::array<double, 3> alpha;
  std::array<double, 3> beta;
};

struct ScalingTable {
  std::string name;
  std::string title;
  const char* row_name;  // "eta" or "omega_drive"
  double fixed_eta;      // used when rows are drive values
  std::vector<ScalingRow> rows;
};

ReproJob scaling_table(const ScalingTable& t, ScalingCache& cache,
                       const std::function<void(ReproJob&, const ScalingRow&, std::size_t,
                                                const ScalingFit&)>& compare) {
  ReproJob job{t.name, t.title, {}, {}, {}};
  const bool drive_rows = std::string(t.row_name) == "omega_drive";
  io::CsvTable summary({t.row_name, "g", "alpha", "alpha_reference", "beta_log10_intercept",
                        "beta_reference", "beta", "residual"});
  io::CsvTable points({t.row_name, "g", "N", "p_max_normalized"});
  for (const ScalingRow& r : t.rows) {
    for (std::size_t c = 0; c < kCouplings.size(); ++c) {
      const double g = kCouplings[c];
      const ScalingRun& run = drive_rows ? cache.get(g, t.fixed_eta, r.row_value)
                                         : cache.get(g, r.row_value, 0.0);
      const ScalingFit& f = run.fit;
      compare(job, r, c, f);
      summary.add_row({r.row_value, g, f.alpha, r.alpha[c], f.beta_log10_intercept, r.beta[c], f.beta,
                       f.residual});
      for (std::size_t k = 0; k < f.n_values.size(); ++k) {
        points.add_row({r.row_value, g, static_cast<double>(f.n_values[k]), f.p_max_values[k]});
      }
      for (std::size_t k = 0; k < run.reports.size(); ++k) {
        if (run.reports[k].horizon_warning) {
          job.notes.push_back(std::string(t.row_name) + "=" + fmt(r.row_value) + ", g=" + fmt(g) +
                              ": horizon warning at N=" + std::to_string(f.n_values[k]));
        }
      }
    }
  }
  job.files.push_back({t.name + ".csv", summary.str()});
  job.files.push_back({t.name + "_points.csv", points.str()});
  return job;
}

std::string cell_name(const char* row_name, double row, double g) {
  return std::string(row_name) + "=" + fmt(row) + ", g=" + fmt(g);
}

const ScalingTable& table3() {
  static const ScalingTable t{"table3", "Power scaling over N = 1..30 with interaction (no drive)",
                              "eta", 0.0,
                              {{-3.0, {1.87, 1.56, 1.47}, {0.38, 0.85, 0.97}},
                               {0.0, {1.62, 1.50, 1.46}, {0.73, 0.93, 0.98}},
                               {1.5, {1.68, 1.50, 1.46}, {0.70, 0.92, 0.98}},
                               {3.0, {1.62, 1.50, 1.46}, {0.73, 0.93, 0.98}},
                               {6.0, {1.88, 1.56, 1.47}, {0.36, 0.84, 0.97}}}};
  return t;
}

const ScalingTable& table4() {
  static const ScalingTable t{"table4", "Power scaling over N = 1..30 with drive (eta = 0)",
                              "omega_drive", 0.0,
                              {{0.0, {1.56, 1.50, 1.46}, {0.78, 0.93, 0.98}},
                               {0.1, {1.58, 1.50, 1.46}, {0.76, 0.93, 0.98}},
                               {0.5, {1.19, 1.49, 1.46}, {1.38, 0.94, 0.98}},
                               {2.0, {1.00, 1.22, 1.46}, {3.17, 1.27, 0.98}},
                               {5.0, {1.00, 1.00, 1.36}, {4.76, 2.15, 1.10}}}};
  return t;
}

const ScalingTable& table5() {
  static const ScalingTable t{"table5", "Power scaling over N = 1..30 with drive (eta = 1.5)",
                              "omega_drive", 1.5,
                              {{0.1, {1.60, 1.18, 1.00}, {0.38, 0.85, 0.97}},
                               {0.5, {1.50, 1.49, 1.42}, {0.46, 0.90, 0.97}},
                               {1.0, {1.46, 1.46, 1.46}, {0.73, 0.93, 0.98}}}};
  return t;
}

ReproJob run_table3(ScalingCache& cache) {
  return scaling_table(table3(), cache, [](ReproJob& job, const ScalingRow& r, std::size_t c,
                                           const ScalingFit& f) {
    const std::string cell = cell_name("eta", r.row_value, kCouplings[c]);
    job.comparisons.push_back(within("alpha " + cell, r.alpha[c], f.alpha));
    job.comparisons.push_back(within("beta " + cell, r.beta[c], f.beta_log10_intercept));
  });
}

ReproJob run_table4(ScalingCache& cache) {
  ReproJob job = scaling_table(table4(), cache, [](ReproJob& job, const ScalingRow& r, std::size_t c,
                                                   const ScalingFit& f) {
    const double g = kCouplings[c];
    const std::string cell = cell_name("omega_drive", r.row_value, g);
    if (r.row_value == 0.0 && g == 0.1) {
      // the same physical point is tabulated as 1.62 in the interaction table
      Comparison band{"alpha " + cell, r.alpha[c], f.alpha, 1.51, 1.67, true,
                      "union band of the two tabulated values 1.56 and 1.62; distance to 1.56 = " +
                          brief(std::abs(f.alpha - 1.56)) + ", to 1.62 = " + brief(std::abs(f.alpha - 1.62))};
      job.comparisons.push_back(band);
    } else {
      job.comparisons.push_back(within("alpha " + cell, r.alpha[c], f.alpha));
    }
    job.comparisons.push_back(within("beta " + cell, r.beta[c], f.beta_log10_intercept, false));
  });
  return job;
}

ReproJob run_table5(ScalingCache& cache) {
  const ScalingTable& t = table5();
  ReproJob job = scaling_table(t, cache, [](ReproJob& job, const ScalingRow& r, std::size_t c,
                                            const ScalingFit& f) {
    const std::string cell = cell_name("omega_drive", r.row_value, kCouplings[c]);
    const bool gating = r.row_value != 0.1;
    job.comparisons.push_back(within("alpha " + cell, r.alpha[c], f.alpha, gating,
                                     gating ? "" : "row reported only"));
    job.comparisons.push_back(within("beta " + cell, r.beta[c], f.beta_log10_intercept, false));
  });
  // Reading the tabulated grid with rows and columns exchanged (row i <-> g_i,
  // column j <-> Omega_j) is reported for reference.
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < kCouplings.size(); ++j) {
      const double g = kCouplings[i];
      const double omega = t.rows[j].row_value;
      const double alpha = cache.get(g, t.fixed_eta, omega).fit.alpha;
      job.comparisons.push_back(within("alpha (transposed reading) g=" + fmt(g) + ", omega_drive=" +
                                           fmt(omega),
                                       t.rows[i].alpha[j], alpha, false, "reported only"));
    }
  }
  return job;
}

// ---- ground-state boundary --------------------------------------------------

ReproJob run_phase(int threads) {
  ReproJob job{"phase", "Ground-state boundary against the mean-field critical interaction", {}, {}, {}};
  const std::array<double, 4> gs{0.05, 0.1, 0.15, 0.2};
  std::vector<double> etas;
  for (int k = 0; k <= 120; ++k) etas.push_back((-20.0 * (120 - k) + 4.0 * k) / 120);
  std::vector<PhaseBoundaryEstimate> est(gs.size());
  std::vector<std::vector<double>> ratios(gs.size());
  parallel_for(gs.size(), threads, [&](std::size_t k) {
    est[k] = locate_phase_boundary(point(kExtremaN, gs[k], 0.0, 0.0), etas, &ratios[k]);
  });
  io::CsvTable boundary({"g", "eta_c", "jump_lo", "jump_hi", "jump", "distance"});
  io::CsvTable grid({"g", "eta", "abs_sz_ratio"});
  for (std::size_t k = 0; k < gs.size(); ++k) {
    const PhaseBoundaryEstimate& e = est[k];
    job.comparisons.push_back({"jump distance from eta_c at g=" + brief(gs[k]) + " (eta_c=" +
                                   brief(e.eta_critical) + ", jump in [" + brief(e.jump_lo) + ", " +
                                   brief(e.jump_hi) + "])",
                               0.0, e.distance(), 0.0, kPhaseStep + kGridRounding, true, ""});
    boundary.add_row({gs[k], e.eta_critical, e.jump_lo, e.jump_hi, e.jump, e.distance()});
    for (std::size_t j = 0; j < etas.size(); ++j) grid.add_row({gs[k], etas[j], ratios[k][j]});
  }
  job.files.push_back({"phase_boundary.csv", boundary.str()});
  job.files.push_back({"phase_grid.csv", grid.str()});
  return job;
}

}  // namespace

bool ReproJob::passed() const {
  return std::all_of(comparisons.begin(), comparisons.end(),
                     [](const Comparison& c) { return !c.gating || c.pass(); });
}

const std::vector<std::string>& reproduce_job_names() {
  static const std::vector<std::string> names{"table1", "table2", "table3", "table4", "table5", "phase"};
  return names;
}

std::vector<ReproJob> run_reproduce(const std::vector<std::string>& only, int threads,
                                    std::ostream* log) {
  const auto& names = reproduce_job_names();
  for (const std::string& n : only) {
    if (std::find(names.begin(), names.end(), n) == names.end()) {
      throw InvalidArgument("unknown reproduce job '" + n + "'");
    }
  }
  auto wanted = [&](const std::string& n) {
    return only.empty() || std::find(only.begin(), only.end(), n) != only.end();
  };
  ScalingCache cache(threads, log);
  std::vector<ReproJob> jobs;
  for (const std::string& n : names) {
    if (!wanted(n)) continue;
    if (log) *log << "reproduce: " << n << std::endl;
    if (n == "table1") {
      jobs.push_back(extrema_table("table1", "Charging extrema at N = 10 with interaction (no drive)",
                                   false,
                                   {{-2.0, {1.473, 6.662, 6.992}, {2.013, 3.468, 3.533}},
                                    {0.0, {7.931, 6.768, 7.000}, {1.391, 3.473, 3.528}},
                                    {2.0, {5.899, 6.709, 6.995}, {2.525, 3.488, 3.530}}},
                                   threads));
    } else if (n == "table2") {
      jobs.push_back(extrema_table("table2", "Charging extrema at N = 10 with drive (eta = 0)", true,
                                   {{0.0, {7.931, 6.768, 7.000}, {1.391, 3.473, 3.528}},
                                    {0.5, {4.917, 6.451, 6.978}, {2.944, 3.421, 3.522}},
                                    {2.0, {8.424, 5.437, 6.667}, {1.443, 3.443, 3.486}}},
                                   threads));
    } else if (n == "table3") {
      jobs.push_back(run_table3(cache));
    } else if (n == "table4") {
      jobs.push_back(run_table4(cache));
    } else if (n == "table5") {
      jobs.push_back(run_table5(cache));
    } else {
      jobs.push_back(run_phase(threads));
    }
  }
  return jobs;
}

std::string render_report(const std::vector<ReproJob>& jobs) {
  std::ostringstream s;
  s << "# Reproduction report\n\n";
  s << "Artifact version: " << io::kArtifactVersion << "\n\n";
  s << "| job | result | gating comparisons | failed |\n|---|---|---|---|\n";
  for (const ReproJob& j : jobs) {
    const auto gating = std::count_if(j.comparisons.begin(), j.comparisons.end(),
                                      [](const Comparison& c) { return c.gating; });
    const auto failed = std::count_if(j.comparisons.begin(), j.comparisons.end(),
                                      [](const Comparison& c) { return c.gating && !c.pass(); });
    s << "| " << j.name << " | " << (j.passed() ? "PASS" : "FAIL") << " | " << gating << " | "
      << failed << " |\n";
  }
  for (const ReproJob& j : jobs) {
    s << "\n## " << j.name << ": " << j.title << "\n\n";
    s << "| quantity | reference | computed | abs diff | band | status | note |\n";
    s << "|---|---|---|---|---|---|---|\n";
    for (const Comparison& c : j.comparisons) {
      const char* status = c.pass() ? "pass" : (c.gating ? "FAIL" : "off (reported)");
      s << "| " << c.item << " | " << brief(c.reference) << " | " << brief(c.computed) << " | "
        << brief(std::abs(c.computed - c.reference)) << " | [" << brief(c.lo) << ", " << brief(c.hi)
        << "] | " << status << " | " << c.note << " |\n";
    }
    if (!j.notes.empty()) {
      s << "\nNotes:\n\n";
      for (const std::string& n : j.notes) s << "- " << n << "\n";
    }
    s << "\nFiles: ";
    for (std::size_t k = 0; k < j.files.size(); ++k) s << (k ? ", " : "") << "`" << j.files[k].name << "`";
    s << "\n";
  }
  return s.str();
}

}  // namespace qbattery
