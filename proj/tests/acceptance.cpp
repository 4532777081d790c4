// Acceptance suite: one PASS/FAIL line per criterion, then a summary.
// Usage: qb_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "qbattery/analysis.hpp"
#include "qbattery/cli.hpp"
#include "qbattery/dynamics.hpp"
#include "qbattery/hilbert.hpp"
#include "qbattery/model.hpp"
#include "qbattery/platform.hpp"

using namespace qbattery;
namespace fs = std::filesystem;

namespace {

constexpr double kTol = 0.05;
constexpr std::array<double, 3> kG{0.1, 0.5, 2.0};

struct Outcome {
  int id = 0;
  std::string title;
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

ModelParams point(int n, double g, double eta, double omega) {
  ModelParams p;
  p.n_tls = n;
  p.g = g;
  p.eta = eta;
  p.omega_drive = omega;
  return p;
}

int threads() { return resolve_threads(0); }

// ---- extrema tables -------------------------------------------------------

struct ExtremaRef {
  double row;
  std::array<double, 3> e, s;
};

Outcome extrema_criterion(int id, const std::string& title, bool drive_rows, const std::vector<ExtremaRef>& rows) {
  Outcome o{id, title};
  std::vector<ExtremumReport> reps(rows.size() * 3);
  parallel_for(reps.size(), threads(), [&](std::size_t k) {
    const ExtremaRef& r = rows[k / 3];
    reps[k] = find_extrema(point(10, kG[k % 3], drive_rows ? 0 : r.row, drive_rows ? r.row : 0), ChargingProtocol{});
  });
  int ok = 0;
  double worst = 0;
  for (std::size_t k = 0; k < reps.size(); ++k) {
    const ExtremaRef& r = rows[k / 3];
    const std::size_t c = k % 3;
    const double de = std::abs(reps[k].e_max - r.e[c]);
    const double ds = std::abs(reps[k].sigma_bar - r.s[c]);
    worst = std::max({worst, de, ds});
    const bool pass = de <= kTol && ds <= kTol;
    ok += pass;
    o.details.push_back(std::string(pass ? "ok   " : "FAIL ") + (drive_rows ? "Omega=" : "eta=") + num(r.row, 1) +
                        " g=" + num(kG[c], 1) + ": E " + num(reps[k].e_max) + " (ref " + num(r.e[c], 3) +
                        "), Sigma " + num(reps[k].sigma_bar) + " (ref " + num(r.s[c], 3) + ")");
  }
  o.pass = ok == static_cast<int>(reps.size());
  o.summary = std::to_string(ok) + "/" + std::to_string(reps.size()) + " cells within 0.05, worst diff " + num(worst);
  return o;
}

// ---- scaling tables -------------------------------------------------------

class ScalingRuns {
 public:
  const ScalingFit& fit(double g, double eta, double omega) {
    const auto key = std::make_tuple(g, eta, omega);
    auto it = fits_.find(key);
    if (it != fits_.end()) return it->second;
    const auto start = std::chrono::steady_clock::now();
    std::vector<int> ns(30);
    std::iota(ns.begin(), ns.end(), 1);
    ScalingFit f = power_scaling(point(1, g, eta, omega), ns, ChargingProtocol{}, threads()).fit;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "  [scaling g=" << g << " eta=" << eta << " Omega=" << omega << "] alpha=" << num(f.alpha)
              << " (" << num(secs, 1) << " s)" << std::endl;
    return fits_.emplace(key, f).first->second;
  }

 private:
  std::map<std::tuple<double, double, double>, ScalingFit> fits_;
};

struct ScalingRef {
  double row;
  std::array<double, 3> alpha, beta;
};

Outcome criterion3(ScalingRuns& runs) {
  Outcome o{3, "power scaling with interaction: alpha and beta within 0.05 (15 cells)"};
  const std::vector<ScalingRef> table{{-3.0, {1.87, 1.56, 1.47}, {0.38, 0.85, 0.97}},
                                      {0.0, {1.62, 1.50, 1.46}, {0.73, 0.93, 0.98}},
                                      {1.5, {1.68, 1.50, 1.46}, {0.70, 0.92, 0.98}},
                                      {3.0, {1.62, 1.50, 1.46}, {0.73, 0.93, 0.98}},
                                      {6.0, {1.88, 1.56, 1.47}, {0.36, 0.84, 0.97}}};
  int ok = 0;
  for (const auto& r : table) {
    for (std::size_t c = 0; c < 3; ++c) {
      const ScalingFit& f = runs.fit(kG[c], r.row, 0.0);
      const bool pass = std::abs(f.alpha - r.alpha[c]) <= kTol && std::abs(f.beta_log10_intercept - r.beta[c]) <= kTol;
      ok += pass;
      o.details.push_back(std::string(pass ? "ok   " : "FAIL ") + "eta=" + num(r.row, 1) + " g=" + num(kG[c], 1) +
                          ": alpha " + num(f.alpha, 3) + " (ref " + num(r.alpha[c], 2) + "), beta " +
                          num(f.beta_log10_intercept, 3) + " (ref " + num(r.beta[c], 2) + ")");
    }
  }
  o.pass = ok == 15;
  o.summary = std::to_string(ok) + "/15 cells";
  return o;
}

Outcome criterion4(ScalingRuns& runs) {
  Outcome o{4, "power scaling with drive at eta=0: alpha within 0.05 (15 cells)"};
  const std::vector<ScalingRef> table{{0.0, {1.56, 1.50, 1.46}, {}},
                                      {0.1, {1.58, 1.50, 1.46}, {}},
                                      {0.5, {1.19, 1.49, 1.46}, {}},
                                      {2.0, {1.00, 1.22, 1.46}, {}},
                                      {5.0, {1.00, 1.00, 1.36}, {}}};
  int ok = 0;
  for (const auto& r : table) {
    for (std::size_t c = 0; c < 3; ++c) {
      const ScalingFit& f = runs.fit(kG[c], 0.0, r.row);
      double lo = r.alpha[c] - kTol, hi = r.alpha[c] + kTol;
      if (r.row == 0.0 && kG[c] == 0.1) lo = 1.51, hi = 1.67;
      const bool pass = f.alpha >= lo && f.alpha <= hi;
      ok += pass;
      o.details.push_back(std::string(pass ? "ok   " : "FAIL ") + "Omega=" + num(r.row, 1) + " g=" + num(kG[c], 1) +
                          ": alpha " + num(f.alpha, 3) + " in [" + num(lo, 2) + ", " + num(hi, 2) + "]");
    }
  }
  const bool saturated = std::abs(runs.fit(0.1, 0.0, 5.0).alpha - 1.0) <= kTol &&
                         std::abs(runs.fit(0.5, 0.0, 5.0).alpha - 1.0) <= kTol;
  o.details.push_back(std::string(saturated ? "ok   " : "FAIL ") + "drive saturation alpha -> 1 at Omega=5, g=0.1 and 0.5");
  o.pass = ok == 15 && saturated;
  o.summary = std::to_string(ok) + "/15 cells, saturation " + (saturated ? "holds" : "fails");
  return o;
}

Outcome criterion5(ScalingRuns& runs) {
  Outcome o{5, "power scaling with drive at eta=1.5: alpha within 0.05 (Omega=0.5 and 1.0 rows)"};
  const std::vector<ScalingRef> table{{0.1, {1.60, 1.18, 1.00}, {}},
                                      {0.5, {1.50, 1.49, 1.42}, {}},
                                      {1.0, {1.46, 1.46, 1.46}, {}}};
  int ok = 0, gated = 0;
  for (const auto& r : table) {
    for (std::size_t c = 0; c < 3; ++c) {
      const ScalingFit& f = runs.fit(kG[c], 1.5, r.row);
      const bool within = std::abs(f.alpha - r.alpha[c]) <= kTol;
      const bool gating = r.row != 0.1;
      gated += gating;
      ok += gating && within;
      o.details.push_back(std::string(!gating ? "info " : within ? "ok   " : "FAIL ") + "Omega=" + num(r.row, 1) +
                          " g=" + num(kG[c], 1) + ": alpha " + num(f.alpha, 3) + " (ref " + num(r.alpha[c], 2) + ")");
    }
  }
  // reference grid read with rows as g and columns as Omega, for information
  int transposed = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      transposed += std::abs(runs.fit(kG[i], 1.5, table[j].row).alpha - table[i].alpha[j]) <= kTol;
    }
  }
  o.details.push_back("info transposed reading of the reference grid: " + std::to_string(transposed) +
                      "/9 cells within 0.05");
  o.pass = ok == gated;
  o.summary = std::to_string(ok) + "/" + std::to_string(gated) + " gating cells";
  return o;
}

// ---- phase boundary -------------------------------------------------------

Outcome criterion6() {
  Outcome o{6, "ground-state jump within one eta step (0.2) of the critical line, N=10"};
  const std::array<double, 4> gs{0.05, 0.1, 0.15, 0.2};
  std::vector<double> etas;
  for (int k = 0; k <= 120; ++k) etas.push_back((-20.0 * (120 - k) + 4.0 * k) / 120);
  std::vector<PhaseBoundaryEstimate> est(gs.size());
  parallel_for(gs.size(), threads(), [&](std::size_t k) { est[k] = locate_phase_boundary(point(10, gs[k], 0, 0), etas); });
  int ok = 0;
  for (const auto& e : est) {
    const bool pass = e.distance() <= 0.2 + 1e-9;
    ok += pass;
    o.details.push_back(std::string(pass ? "ok   " : "FAIL ") + "g=" + num(e.g, 2) + ": eta_c=" + num(e.eta_critical, 3) +
                        ", largest jump in [" + num(e.jump_lo, 1) + ", " + num(e.jump_hi, 1) + "], distance " +
                        num(e.distance(), 3));
  }
  o.pass = ok == 4;
  o.summary = std::to_string(ok) + "/4 couplings";
  return o;
}

// ---- property suite -------------------------------------------------------

Outcome criterion7() {
  Outcome o{7, "property suite"};
  std::mt19937 rng(20240607);
  std::uniform_real_distribution<double> ug(0.0, 1.5), ue(-6.0, 6.0), uo(0.0, 2.0), ut(0.0, 15.0);
  auto record = [&](const std::string& what, double value, double bound) {
    const bool pass = value <= bound;
    o.pass = o.pass && pass;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e <= %.0e", value, bound);
    o.details.push_back(std::string(pass ? "ok   " : "FAIL ") + what + ": " + buf);
  };

  double su2 = 0, adag = 0;
  for (int n = 1; n <= 6; ++n) {
    const HilbertSpace s = build_space(n, 4);
    const OperatorMatrix jz = op_jz(s), jp = op_jplus(s), jm = op_jminus(s);
    su2 = std::max({su2, max_abs(commutator(jp, jm) - 2.0 * jz), max_abs(commutator(jz, jp) - jp),
                    max_abs(commutator(jz, jm) + jm)});
    adag = std::max(adag, max_abs(op_create(s) - op_annihilate(s).transpose()));
  }
  record("su(2) commutators, N=1..6", su2, 1e-12);
  record("a^dagger = a^T", adag, 0.0);

  double asym = 0, casimir = 0, formula = 0;
  for (int k = 0; k < 24; ++k) {
    ModelParams p = point(1 + k % 6, ug(rng), ue(rng), uo(rng));
    p.drive = k % 2 ? DriveCoupling::collective_x : DriveCoupling::ladder_sum;
    const HilbertSpace s = space_for(p);
    const OperatorMatrix h = build_h_total(p, s);
    asym = std::max(asym, h.max_asymmetry());
    casimir = std::max(casimir, max_abs(commutator(h, op_jsquared(s))));
    if (p.n_tls <= 3) formula = std::max(formula, explicit_formula_deviation(p, s));
  }
  record("H symmetric", asym, 1e-12);
  record("[H, J^2]", casimir, 1e-9);
  record("closed-form matrix elements, N=1..3", formula, 1e-12);

  double norm_drift = 0, energy_drift = 0, bound_violation = 0, start = 0;
  for (int k = 0; k < 10; ++k) {
    const ModelParams p = point(1 + k % 5, ug(rng), ue(rng), uo(rng));
    const ChargingDynamics dyn(p);
    ChargingProtocol proto;
    proto.coarse_points = 200;
    proto.search_horizon = 5.0 + ut(rng);
    const ChargingTrace tr = trace(dyn, proto);
    const HilbertSpace& s = dyn.space();
    const OperatorMatrix h = build_h_total(p, s);
    const double e0 = expectation(h, initial_state(s));
    start = std::max({start, std::abs(tr.energy[0]), std::abs(tr.fluctuation[0])});
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const QuantumState psi = dyn.state(tr.times[i]);
      norm_drift = std::max(norm_drift, std::abs(psi.norm() - 1.0));
      energy_drift = std::max(energy_drift, std::abs(expectation(h, psi) - e0) / std::max(1.0, std::abs(e0)));
      bound_violation = std::max({bound_violation, -tr.energy[i], tr.energy[i] - p.n_tls * p.omega_a});
    }
  }
  record("norm conservation along traces", norm_drift, 1e-9);
  record("<H> conservation along traces", energy_drift, 1e-9);
  record("E(0) and Sigma(0)", start, 0.0);
  record("E(t) outside [0, N w_a]", std::max(0.0, bound_violation), 1e-9);

  double prop = 0;
  for (int k = 0; k < 6; ++k) {
    const ModelParams p = point(1 + k % 2, ug(rng), ue(rng), uo(rng));
    const HilbertSpace s = space_for(p);
    const OperatorMatrix h = build_h_total(p, s);
    const SpectralDecomposition d = decompose(h);
    const QuantumState psi0 = initial_state(s);
    const double t = ut(rng);
    const Eigen::VectorXcd ref = testing::propagator_taylor(h.elements(), t) * psi0.amplitudes;
    prop = std::max(prop, (evolve(d, psi0, t).amplitudes - ref).cwiseAbs().maxCoeff());
  }
  record("spectral propagation vs Taylor propagator, N<=2", prop, 1e-9);
  o.summary = o.pass ? "all properties hold" : "property violated";
  return o;
}

// ---- cutoff convergence ---------------------------------------------------

Outcome criterion8() {
  Outcome o{8, "cutoff convergence |e_max(5N) - e_max(4N)| <= 1e-2 at N=10"};
  const std::vector<std::array<double, 3>> cases{{0.5, 0, 0}, {2.0, 0, 0}, {0.1, 6, 0}, {0.1, 0, 5}};
  const std::vector<int> factors{4, 5};
  double worst = 0;
  for (const auto& c : cases) {
    const auto rows = cutoff_convergence(point(10, c[0], c[1], c[2]), factors, ChargingProtocol{});
    const double d = rows[1].delta_e;
    worst = std::max(worst, d);
    const bool pass = d <= 1e-2;
    o.pass = o.pass && pass;
    char buf[160];
    std::snprintf(buf, sizeof buf, "(g, eta, Omega) = (%g, %g, %g): e_max %.6f -> %.6f, delta %.2e", c[0], c[1], c[2],
                  rows[0].e_max, rows[1].e_max, d);
    o.details.push_back(std::string(pass ? "ok   " : "FAIL ") + buf);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "worst delta %.2e", worst);
  o.summary = buf;
  return o;
}

// ---- synthetic fit --------------------------------------------------------

Outcome criterion9() {
  Outcome o{9, "synthetic power laws recovered to 1e-12"};
  const std::vector<std::pair<double, double>> laws{{1.5, 2.0}, {1.0, 0.37}, {1.88, 0.36}, {0.5, 10.0}, {2.2, 1.0}};
  double worst = 0;
  for (const auto& [a, b] : laws) {
    std::vector<ScalingPoint> pts;
    for (int n = 1; n <= 30; ++n) pts.push_back({n, b * std::pow(static_cast<double>(n), a)});
    const ScalingFit f = fit_power_scaling(pts);
    worst = std::max({worst, std::abs(f.alpha - a), std::abs(f.beta - b)});
  }
  o.pass = worst <= 1e-12;
  char buf[64];
  std::snprintf(buf, sizeof buf, "worst error %.2e over %zu laws", worst, laws.size());
  o.summary = buf;
  return o;
}

// ---- determinism ----------------------------------------------------------

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream f(e.path(), std::ios::binary);
    files[e.path().filename().string()] = {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
  }
  return files;
}

Outcome criterion10() {
  Outcome o{10, "reproduce sub-jobs are byte-identical across runs"};
  const fs::path root = fs::temp_directory_path() / "qb_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> runs{{"a", "1"}, {"b", "1"}, {"c", "2"}};
  std::vector<std::map<std::string, std::string>> outputs;
  for (const auto& [name, thr] : runs) {
    const std::string out = (root / name).string();
    const char* argv[] = {"qb", "reproduce", "--only", "table1,table2,phase", "--threads", thr.c_str(), "--out", out.c_str()};
    std::ostringstream sink_out, sink_err;
    run_cli(8, argv, sink_out, sink_err);
    outputs.push_back(read_dir(root / name));
  }
  std::size_t csv = 0;
  for (const auto& [file, contents] : outputs[0]) {
    if (file.size() > 4 && file.substr(file.size() - 4) == ".csv") ++csv;
    for (std::size_t k = 1; k < outputs.size(); ++k) {
      const auto it = outputs[k].find(file);
      const bool same = it != outputs[k].end() && it->second == contents;
      if (!same) {
        o.pass = false;
        o.details.push_back("FAIL " + file + " differs in run " + runs[k].first + " (threads " + runs[k].second + ")");
      }
    }
  }
  if (csv == 0) o.pass = false;
  o.summary = std::to_string(outputs[0].size()) + " files (" + std::to_string(csv) +
              " CSV) compared over 3 runs, threads 1, 1, 2";
  return o;
}

void report(const Outcome& o) {
  std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "criterion " << o.id << ": " << o.title << " | " << o.summary
            << std::endl;
  for (const std::string& d : o.details) std::cout << "         " << d << "\n";
  std::cout.flush();
}

}  // namespace

int main(int argc, char** argv) {
  ensure_working_blas(argv);
  std::set<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.insert(std::atoi(argv[k]));
  auto want = [&](int id) { return wanted.empty() || wanted.count(id) > 0; };

  const std::vector<ExtremaRef> table1{{-2.0, {1.473, 6.662, 6.992}, {2.013, 3.468, 3.533}},
                                       {0.0, {7.931, 6.768, 7.000}, {1.391, 3.473, 3.528}},
                                       {2.0, {5.899, 6.709, 6.995}, {2.525, 3.488, 3.530}}};
  const std::vector<ExtremaRef> table2{{0.0, {7.931, 6.768, 7.000}, {1.391, 3.473, 3.528}},
                                       {0.5, {4.917, 6.451, 6.978}, {2.944, 3.421, 3.522}},
                                       {2.0, {8.424, 5.437, 6.667}, {1.443, 3.443, 3.486}}};
  ScalingRuns runs;
  std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {7, criterion7},
      {9, criterion9},
      {1, [&] { return extrema_criterion(1, "extrema at N=10 with interaction (9 cells, E and Sigma)", false, table1); }},
      {2, [&] { return extrema_criterion(2, "extrema at N=10 with drive (9 cells, E and Sigma)", true, table2); }},
      {6, criterion6},
      {8, criterion8},
      {10, criterion10},
      {3, [&] { return criterion3(runs); }},
      {4, [&] { return criterion4(runs); }},
      {5, [&] { return criterion5(runs); }},
  };
  std::vector<Outcome> outcomes;
  for (auto& [id, run] : criteria) {
    if (!want(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what(), {}};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.summary += " (" + num(secs, 1) + " s)";
    report(o);
    outcomes.push_back(o);
  }
  std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  std::cout << "\nsummary\n";
  int failed = 0;
  for (const Outcome& o : outcomes) {
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "criterion " << o.id << ": " << o.title << "\n";
    failed += !o.pass;
  }
  std::cout << (outcomes.size() - failed) << "/" << outcomes.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
