#include "qbattery/config.hpp"

#include <charconv>
#include <cmath>

#include "qbattery/error.hpp"

namespace qbattery {

namespace {

using nlohmann::json;

double number(const json& v, std::string_view key) {
  if (!v.is_number()) throw InvalidArgument("config key '" + std::string(key) + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidArgument("config key '" + std::string(key) + "' must be finite");
  return x;
}

int integer(const json& v, std::string_view key) {
  if (!v.is_number_integer()) {
    throw InvalidArgument("config key '" + std::string(key) + "' must be an integer");
  }
  return v.get<int>();
}

std::string text(const json& v, std::string_view key) {
  if (!v.is_string()) throw InvalidArgument("config key '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

void require_object(const json& v, std::string_view key) {
  if (!v.is_object()) throw InvalidArgument("config key '" + std::string(key) + "' must be an object");
}

void unknown(std::string_view section, const std::string& key) {
  throw InvalidArgument("unknown config key '" + std::string(section) + key + "'");
}

void merge_params(ModelParams& p, const json& doc, std::string_view section) {
  require_object(doc, section);
  for (const auto& [key, v] : doc.items()) {
    if (key == "omega_a") p.omega_a = number(v, key);
    else if (key == "omega_c") p.omega_c = number(v, key);
    else if (key == "g") p.g = number(v, key);
    else if (key == "eta") p.eta = number(v, key);
    else if (key == "omega_drive") p.omega_drive = number(v, key);
    else if (key == "n_tls") p.n_tls = integer(v, key);
    else if (key == "cutoff_factor") p.cutoff_factor = integer(v, key);
    else if (key == "drive") p.drive = drive_coupling_from_string(text(v, key));
    else if (key != "label") unknown(section, key);
  }
}

std::vector<double> linspace(double start, double stop, int count) {
  if (count < 1) throw InvalidArgument("axis range needs count >= 1");
  if (count == 1) return {start};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    out[static_cast<std::size_t>(k)] = (start * (count - 1 - k) + stop * k) / (count - 1);
  }
  return out;
}

SweepAxis axis_from_json(const json& doc) {
  require_object(doc, "axes[]");
  SweepAxis axis;
  bool have_param = false;
  for (const auto& [key, v] : doc.items()) {
    if (key == "parameter") {
      axis.parameter = sweep_parameter_from_string(text(v, key));
      have_param = true;
    } else if (key == "values") {
      if (!v.is_array()) throw InvalidArgument("axis values must be an array");
      for (const auto& x : v) axis.values.push_back(number(x, "values[]"));
    } else if (key == "range") {
      if (!v.is_array() || v.size() != 3) throw InvalidArgument("axis range must be [start, stop, count]");
      axis.values = linspace(number(v[0], "range[0]"), number(v[1], "range[1]"), integer(v[2], "range[2]"));
    } else {
      unknown("axes[].", key);
    }
  }
  if (!have_param) throw InvalidArgument("axis needs a 'parameter'");
  return axis;
}

double parse_number(std::string_view s) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw InvalidArgument("not a finite number: '" + std::string(s) + "'");
  }
  return v;
}

int parse_int(std::string_view s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidArgument("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t end = std::min(s.find(',', start), s.size());
    if (end > start) out.emplace_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

SweepAxis parse_axis(std::string_view s) {
  const std::size_t eq = s.find('=');
  if (eq == std::string_view::npos) throw InvalidArgument("axis must look like name=values");
  SweepAxis axis;
  axis.parameter = sweep_parameter_from_string(s.substr(0, eq));
  const std::string_view rest = s.substr(eq + 1);
  if (rest.find(':') != std::string_view::npos) {
    const std::size_t a = rest.find(':');
    const std::size_t b = rest.find(':', a + 1);
    if (b == std::string_view::npos) throw InvalidArgument("axis range must be start:stop:count");
    axis.values = linspace(parse_number(rest.substr(0, a)), parse_number(rest.substr(a + 1, b - a - 1)),
                           parse_int(rest.substr(b + 1)));
  } else {
    for (const std::string& item : split_list(rest)) axis.values.push_back(parse_number(item));
  }
  return axis;
}

std::pair<int, int> parse_int_range(std::string_view s) {
  const std::size_t c = s.find(':');
  if (c == std::string_view::npos) throw InvalidArgument("range must be lo:hi");
  return {parse_int(s.substr(0, c)), parse_int(s.substr(c + 1))};
}

void merge_config(RunConfig& config, const json& doc) {
  require_object(doc, "<root>");
  // scaling sets start from the merged base parameters
  if (doc.contains("params")) merge_params(config.params, doc["params"], "params.");
  for (const auto& [key, v] : doc.items()) {
    if (key == "params") {
      continue;
    } else if (key == "protocol") {
      require_object(v, key);
      for (const auto& [k, x] : v.items()) {
        if (k == "search_horizon") {
          if (x.is_null()) config.protocol.search_horizon.reset();
          else config.protocol.search_horizon = number(x, k);
        } else if (k == "coarse_points") {
          config.protocol.coarse_points = integer(x, k);
        } else if (k == "refine_tolerance") {
          config.protocol.refine_tolerance = number(x, k);
        } else {
          unknown("protocol.", k);
        }
      }
    } else if (key == "axes") {
      if (!v.is_array()) throw InvalidArgument("'axes' must be an array");
      config.axes.clear();
      for (const auto& a : v) config.axes.push_back(axis_from_json(a));
    } else if (key == "quantity") {
      config.quantity = sweep_quantity_from_string(text(v, key));
    } else if (key == "scaling") {
      require_object(v, key);
      for (const auto& [k, x] : v.items()) {
        if (k == "n") {
          if (!x.is_array() || x.size() != 2) throw InvalidArgument("scaling.n must be [lo, hi]");
          config.n_min = integer(x[0], "scaling.n[0]");
          config.n_max = integer(x[1], "scaling.n[1]");
        } else if (k == "sets") {
          if (!x.is_array()) throw InvalidArgument("scaling.sets must be an array");
          config.scaling_sets.clear();
          for (const auto& s : x) {
            ScalingSet set{"", config.params};
            merge_params(set.params, s, "scaling.sets[].");
            if (!s.contains("label")) throw InvalidArgument("scaling set needs a 'label'");
            set.label = text(s["label"], "label");
            config.scaling_sets.push_back(std::move(set));
          }
        } else if (k == "synthetic") {
          require_object(x, k);
          config.synthetic = SyntheticLaw{number(x.at("alpha"), "alpha"), number(x.at("beta"), "beta")};
        } else {
          unknown("scaling.", k);
        }
      }
    } else if (key == "convergence") {
      require_object(v, key);
      for (const auto& [k, x] : v.items()) {
        if (k != "factors" || !x.is_array()) unknown("convergence.", k);
        config.factors.clear();
        for (const auto& f : x) config.factors.push_back(integer(f, "factors[]"));
      }
    } else if (key == "reproduce") {
      require_object(v, key);
      for (const auto& [k, x] : v.items()) {
        if (k != "only" || !x.is_array()) unknown("reproduce.", k);
        config.only.clear();
        for (const auto& s : x) config.only.push_back(text(s, "only[]"));
      }
    } else if (key == "output") {
      require_object(v, key);
      for (const auto& [k, x] : v.items()) {
        if (k == "dir") {
          config.out_dir = text(x, k);
        } else if (k == "formats") {
          if (!x.is_array()) throw InvalidArgument("output.formats must be an array");
          config.formats.clear();
          for (const auto& f : x) config.formats.insert(text(f, "formats[]"));
        } else {
          unknown("output.", k);
        }
      }
    } else if (key == "threads") {
      config.threads = integer(v, key);
    } else if (key == "max_dim") {
      const int m = integer(v, key);
      if (m < 1) throw InvalidArgument("max_dim must be positive");
      config.max_dim = static_cast<std::size_t>(m);
    } else {
      unknown("", key);
    }
  }
}

void validate_config(const RunConfig& c) {
  c.params.validate();
  c.protocol.validate();
  for (const std::string& f : c.formats) {
    if (f != "csv" && f != "json" && f != "svg") throw InvalidArgument("unknown output format '" + f + "'");
  }
  if (c.threads < 0) throw InvalidArgument("threads must be >= 0");
  if (c.command == "sweep" || c.command == "phase") {
    if (c.axes.size() != 2) throw InvalidArgument(c.command + " needs exactly two axes");
    if (c.axes[0].parameter == c.axes[1].parameter) throw InvalidArgument("sweep axes must differ");
    for (const SweepAxis& a : c.axes) {
      if (a.values.empty()) throw InvalidArgument("sweep axis has no values");
    }
  }
  if (c.command == "scaling") {
    if (c.n_min < 1 || c.n_max - c.n_min < 2) throw InvalidArgument("scaling needs N range lo >= 1 with >= 3 points");
  }
  if (c.command == "convergence" && c.factors.empty()) throw InvalidArgument("convergence needs cutoff factors");
}

nlohmann::ordered_json to_json(const ModelParams& p) {
  nlohmann::ordered_json j;
  j["n_tls"] = p.n_tls;
  j["omega_a"] = p.omega_a;
  j["omega_c"] = p.omega_c;
  j["g"] = p.g;
  j["eta"] = p.eta;
  j["omega_drive"] = p.omega_drive;
  j["drive"] = std::string(to_string(p.drive));
  j["cutoff_factor"] = p.cutoff_factor;
  j["n_ph_max"] = p.cutoff_factor * p.n_tls;
  return j;
}

nlohmann::ordered_json to_json(const ChargingProtocol& protocol, const ModelParams& params) {
  nlohmann::ordered_json j;
  if (protocol.search_horizon) j["search_horizon"] = *protocol.search_horizon;
  else j["search_horizon"] = nullptr;
  j["effective_horizon"] = protocol.horizon_for(params);
  j["coarse_points"] = protocol.coarse_points;
  j["refine_tolerance"] = protocol.refine_tolerance;
  return j;
}

nlohmann::ordered_json to_json(const SweepAxis& axis) {
  nlohmann::ordered_json j;
  j["parameter"] = std::string(to_string(axis.parameter));
  j["values"] = axis.values;
  return j;
}

nlohmann::ordered_json units_json() {
  nlohmann::ordered_json j;
  j["time"] = "1/omega_a";
  j["energy"] = "omega_a";
  j["power"] = "omega_a^2";
  j["power_normalized"] = "g*omega_a^2";
  j["fluctuation"] = "omega_a";
  j["sz_ratio"] = "<J_z>/(N/2)";
  return j;
}

}  // namespace qbattery
