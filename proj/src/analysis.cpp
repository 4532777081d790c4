#include "qbattery/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "qbattery/error.hpp"

namespace qbattery {

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::g:
      return "g";
    case SweepParameter::eta:
      return "eta";
    case SweepParameter::omega_drive:
      return "omega_drive";
    case SweepParameter::n_tls:
      return "n_tls";
  }
  return "g";
}

std::string_view to_string(SweepQuantity q) {
  switch (q) {
    case SweepQuantity::e_max:
      return "e_max";
    case SweepQuantity::p_max:
      return "p_max";
    case SweepQuantity::sigma_bar:
      return "sigma_bar";
    case SweepQuantity::gs_sz:
      return "gs_sz";
  }
  return "e_max";
}

SweepParameter sweep_parameter_from_string(std::string_view s) {
  if (s == "g") return SweepParameter::g;
  if (s == "eta") return SweepParameter::eta;
  if (s == "omega_drive") return SweepParameter::omega_drive;
  if (s == "n_tls") return SweepParameter::n_tls;
  throw InvalidArgument("unknown sweep parameter '" + std::string(s) +
                        "' (expected g, eta, omega_drive or n_tls)");
}

SweepQuantity sweep_quantity_from_string(std::string_view s) {
  if (s == "e_max") return SweepQuantity::e_max;
  if (s == "p_max") return SweepQuantity::p_max;
  if (s == "sigma_bar") return SweepQuantity::sigma_bar;
  if (s == "gs_sz") return SweepQuantity::gs_sz;
  throw InvalidArgument("unknown quantity '" + std::string(s) +
                        "' (expected e_max, p_max, sigma_bar or gs_sz)");
}

ModelParams with_parameter(ModelParams base, SweepParameter p, double value) {
  switch (p) {
    case SweepParameter::g:
      base.g = value;
      break;
    case SweepParameter::eta:
      base.eta = value;
      break;
    case SweepParameter::omega_drive:
      base.omega_drive = value;
      break;
    case SweepParameter::n_tls: {
      const double r = std::round(value);
      if (std::abs(r - value) > 1e-9 || r < 1) {
        throw InvalidArgument("n_tls axis values must be positive integers");
      }
      base.n_tls = static_cast<int>(r);
      break;
    }
  }
  return base;
}

std::size_t SweepGrid::failed_cells() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const SweepCell& c) { return !c.ok; }));
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = next++; k < count; k = next++) job(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int resolve_threads(int requested) {
  int cap = 0;
  if (const char* env = std::getenv("QB_THREADS")) cap = std::max(0, std::atoi(env));
  if (requested <= 0) return cap > 0 ? cap : 1;
  return cap > 0 ? std::min(requested, cap) : requested;
}

namespace {

void validate_axis(const SweepAxis& axis) {
  if (axis.values.empty()) throw InvalidArgument("sweep axis has no values");
  for (double v : axis.values) {
    if (!std::isfinite(v)) throw InvalidArgument("sweep axis contains a non-finite value");
  }
  if (!std::is_sorted(axis.values.begin(), axis.values.end())) {
    throw InvalidArgument("sweep axis values must be sorted ascending");
  }
}

}  // namespace

SweepGrid sweep(const ModelParams& base, const SweepAxis& axis1, const SweepAxis& axis2,
                SweepQuantity quantity, const ChargingProtocol& protocol, int threads) {
  validate_axis(axis1);
  validate_axis(axis2);
  if (axis1.parameter == axis2.parameter) {
    throw InvalidArgument("sweep axes must name distinct parameters");
  }
  if (quantity != SweepQuantity::gs_sz) protocol.validate();

  SweepGrid grid{axis1, axis2, quantity, base, {}};
  const std::size_t n2 = axis2.values.size();
  grid.cells.resize(axis1.values.size() * n2);
  parallel_for(grid.cells.size(), threads, [&](std::size_t k) {
    SweepCell& cell = grid.cells[k];
    try {
      ModelParams p = with_parameter(base, axis1.parameter, axis1.values[k / n2]);
      p = with_parameter(p, axis2.parameter, axis2.values[k % n2]);
      if (quantity == SweepQuantity::gs_sz) {
        const GroundStateReport gs = ground_state_sz(p);
        cell.value = gs.sz_ratio;
        cell.flagged = gs.degenerate;
      } else {
        const ExtremumReport rep = find_extrema(p, protocol);
        cell.value = quantity == SweepQuantity::e_max   ? rep.e_max
                     : quantity == SweepQuantity::p_max ? rep.p_max
                                                        : rep.sigma_bar;
        cell.flagged = rep.horizon_warning;
      }
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  });
  return grid;
}

GroundStateReport ground_state_sz(const ModelParams& params) {
  const HilbertSpace space = space_for(params);
  const OperatorMatrix h = build_h_total(params, space);
  const int count = space.dim() > 1 ? 2 : 1;
  const SpectralDecomposition low = lowest_eigenpairs(h.elements(), count);
  const Eigen::VectorXd phi = low.eigenvectors.col(0);
  double jz = 0.0;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    jz += space.state_of(i).m * phi(k) * phi(k);
  }
  GroundStateReport rep;
  rep.sz_ratio = jz / space.j();
  rep.gap = count > 1 ? low.eigenvalues(1) - low.eigenvalues(0) : 0.0;
  rep.degenerate = count > 1 && rep.gap < kDegeneracyGap;
  return rep;
}

double critical_eta(double g, int n_tls, double omega_a, double omega_c) {
  if (!(omega_c > 0.0)) throw InvalidArgument("omega_c must be positive");
  return omega_a - 4.0 * g * g * n_tls / omega_c;
}

ScalingFit fit_power_scaling(std::span<const ScalingPoint> points) {
  if (points.size() < 3) throw InvalidArgument("power-law fit needs at least 3 points");
  ScalingFit fit;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const ScalingPoint& p = points[k];
    if (p.n < 1) throw InvalidArgument("N values must be >= 1");
    if (k > 0 && p.n <= points[k - 1].n) throw InvalidArgument("N values must be strictly increasing");
    if (!(p.p_max > 0.0) || !std::isfinite(p.p_max)) {
      throw InvalidArgument("power-law fit needs finite P_max > 0 (N = " + std::to_string(p.n) + ")");
    }
    fit.n_values.push_back(p.n);
    fit.p_max_values.push_back(p.p_max);
  }
  const auto m = static_cast<double>(points.size());
  double sx = 0.0;
  double sy = 0.0;
  for (const ScalingPoint& p : points) {
    sx += std::log(static_cast<double>(p.n));
    sy += std::log(p.p_max);
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const ScalingPoint& p : points) {
    const double dx = std::log(static_cast<double>(p.n)) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.p_max) - my);
  }
  fit.alpha = sxy / sxx;
  const double intercept = my - fit.alpha * mx;
  fit.beta = std::exp(intercept);
  fit.beta_log10_intercept = std::exp(intercept / std::log(10.0));
  double ss = 0.0;
  for (const ScalingPoint& p : points) {
    const double r =
        std::log(p.p_max) - (fit.alpha * std::log(static_cast<double>(p.n)) + intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

ScalingRun power_scaling(const ModelParams& base, std::span<const int> n_values,
                         const ChargingProtocol& protocol, int threads) {
  if (!(base.g > 0.0)) throw InvalidArgument("power scaling is normalised by g, which must be > 0");
  ScalingRun run;
  run.reports.resize(n_values.size());
  // Largest N first so the expensive decompositions start early.
  parallel_for(n_values.size(), threads, [&](std::size_t k) {
    const std::size_t idx = n_values.size() - 1 - k;
    ModelParams p = base;
    p.n_tls = n_values[idx];
    run.reports[idx] = find_extrema(p, protocol);
  });
  std::vector<ScalingPoint> points;
  for (std::size_t k = 0; k < n_values.size(); ++k) {
    points.push_back({n_values[k], run.reports[k].p_max / base.g});
  }
  run.fit = fit_power_scaling(points);
  return run;
}

std::vector<ConvergenceRow> cutoff_convergence(const ModelParams& params,
                                               std::span<const int> factors,
                                               const ChargingProtocol& protocol,
                                               std::size_t max_dim) {
  if (factors.empty()) throw InvalidArgument("no cutoff factors given");
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k] < 1) throw InvalidArgument("cutoff factors must be >= 1");
    if (k > 0 && factors[k] <= factors[k - 1]) {
      throw InvalidArgument("cutoff factors must be strictly increasing");
    }
  }
  std::vector<ConvergenceRow> rows;
  for (int f : factors) {
    ModelParams p = params;
    p.cutoff_factor = f;
    const ExtremumReport rep = find_extrema(ChargingDynamics(p, max_dim), protocol);
    ConvergenceRow row{f, rep.e_max, rep.p_max, 0.0, 0.0};
    if (!rows.empty()) {
      row.delta_e = std::abs(row.e_max - rows.back().e_max);
      row.delta_p = std::abs(row.p_max - rows.back().p_max);
    }
    rows.push_back(row);
  }
  return rows;
}

double PhaseBoundaryEstimate::distance() const {
  if (eta_critical < jump_lo) return jump_lo - eta_critical;
  if (eta_critical > jump_hi) return eta_critical - jump_hi;
  return 0.0;
}

PhaseBoundaryEstimate locate_phase_boundary(const ModelParams& base, std::span<const double> etas,
                                            std::vector<double>* ratios) {
  if (etas.size() < 2) throw InvalidArgument("phase boundary scan needs at least two eta values");
  if (!std::is_sorted(etas.begin(), etas.end())) throw InvalidArgument("eta grid must be ascending");
  std::vector<double> r;
  for (double eta : etas) {
    ModelParams p = base;
    p.eta = eta;
    r.push_back(std::abs(ground_state_sz(p).sz_ratio));
  }
  PhaseBoundaryEstimate est;
  est.g = base.g;
  est.eta_critical = critical_eta(base.g, base.n_tls, base.omega_a, base.omega_c);
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    const double jump = std::abs(r[k + 1] - r[k]);
    if (jump > est.jump) {
      est.jump = jump;
      est.jump_lo = etas[k];
      est.jump_hi = etas[k + 1];
    }
  }
  if (ratios) *ratios = std::move(r);
  return est;
}

}  // namespace qbattery
