#pragma once

// Command-line front end: JSON config parsing, command dispatch and artifact
// emission. Exit codes: 0 success, 1 verification failure, 2 config error.

#include "snncrs/channel_model.hpp"
#include "snncrs/optimizer.hpp"
#include "snncrs/rate_regions.hpp"
#include "snncrs/schemes.hpp"
#include "snncrs/selftest.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace snncrs::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitConfigError = 2;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config error at '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct FixedParams {
  double alpha = 0.5, beta = 0.5, nhat3 = 1.0, nhat2 = 1.0;
  double s = 0.5, t = 0.5, g2 = 0.5;
  double rho12 = 0.0, rho13 = 0.0, rho23 = 0.0;

  std::vector<double> vector_for(SchemeId scheme) const {
    switch (scheme) {
      case SchemeId::SNNC_RS_JOINT:
      case SchemeId::SNNC_RS_SUCCESSIVE: return {alpha, beta, nhat3};
      case SchemeId::DF_SNNC: return {beta, nhat3};
      case SchemeId::DF_DF: return {s, t, g2};
      case SchemeId::NNC: return {nhat2, nhat3};
      case SchemeId::CUTSET: return {rho12, rho13, rho23};
    }
    return {};
  }
};

struct LineGeometry {
  double d12 = 0.1, d34 = 0.05, d14 = 1.0;
};

struct RunConfig {
  std::string command;
  std::optional<LineGeometry> line;
  std::optional<NodePlacement> placement;
  double gamma = 2.0;
  Powers powers{};
  std::vector<SchemeId> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  FixedParams params;
  std::size_t resolution = 21;
  std::size_t rounds = 5;
  double shrink = 0.5;
  std::map<SchemeId, SearchBox> boxes;
  bool fallbacks = true;
  std::optional<SweepParameter> sweep_parameter;
  std::vector<double> sweep_values;
  std::string out_dir;
  std::uint64_t seed = 1;
  double fm_tolerance = 1e-9;
  std::size_t valuations = 100;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());

  bool has_geometry() const { return line || placement; }

  ChannelGains channel() const {
    if (placement) {
      NodePlacement pl = *placement;
      pl.pathloss_exponent = gamma;
      return gains_from_geometry(pl, powers);
    }
    if (!line) throw ConfigError("geometry", "missing");
    return gains_from_geometry(line_placement(line->d12, line->d34, line->d14, gamma), powers);
  }

  SearchBox box_for(SchemeId s) const {
    auto it = boxes.find(s);
    SearchBox b = it != boxes.end() ? it->second : default_box(s, resolution, rounds);
    b.shrink = shrink;
    return b;
  }

  SweepSpec sweep_spec() const {
    SweepSpec spec;
    if (line) {
      spec.d12 = line->d12;
      spec.d34 = line->d34;
      spec.d14 = line->d14;
    }
    spec.placement = placement;
    spec.gamma = gamma;
    spec.powers = powers;
    spec.parameter = sweep_parameter.value_or(SweepParameter::P);
    spec.values = sweep_values;
    spec.schemes = schemes;
    for (SchemeId s : schemes) spec.boxes[s] = box_for(s);
    spec.resolution = resolution;
    spec.rounds = rounds;
    spec.fallbacks = fallbacks;
    spec.threads = threads;
    return spec;
  }
};

// Scalar overrides given on the command line.
struct Overrides {
  std::optional<std::string> command;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> gamma;
  std::optional<double> power;
  std::optional<std::string> schemes;  // comma separated
};

namespace detail {

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + key, "missing");
  return j.at(key);
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number, got " + j.dump());
  return j.get<double>();
}

inline double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(path, "must be a positive number");
  return v;
}

inline double non_negative(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(path, "must be a number >= 0");
  return v;
}

inline double unit_interval(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(path, "must lie in [0, 1]");
  return v;
}

inline std::size_t count(const json& j, const std::string& path, std::size_t min = 1) {
  if (!j.is_number_integer() || j.get<long long>() < static_cast<long long>(min))
    throw ConfigError(path, "expected an integer >= " + std::to_string(min));
  return j.get<std::size_t>();
}

inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    (void)v;
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError(path + k, "unknown field");
  }
}

inline std::vector<SchemeId> parse_scheme_list(const std::vector<std::string>& names,
                                               const std::string& path) {
  std::vector<SchemeId> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    try {
      out.push_back(parse_scheme(names[i]));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + "[" + std::to_string(i) + "]", e.what());
    }
  }
  if (out.empty()) throw ConfigError(path, "needs at least one scheme");
  return out;
}

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

inline void parse_geometry(const json& g, RunConfig& c) {
  check_keys(g, "geometry.", {"line", "coordinates"});
  if (g.contains("line") == g.contains("coordinates"))
    throw ConfigError("geometry", "give exactly one of 'line' or 'coordinates'");
  if (g.contains("line")) {
    const json& l = g.at("line");
    check_keys(l, "geometry.line.", {"d12", "d34", "d14"});
    LineGeometry lg;
    if (l.contains("d12")) lg.d12 = positive(l.at("d12"), "geometry.line.d12");
    if (l.contains("d34")) lg.d34 = positive(l.at("d34"), "geometry.line.d34");
    if (l.contains("d14")) lg.d14 = positive(l.at("d14"), "geometry.line.d14");
    c.line = lg;
    return;
  }
  const json& pts = g.at("coordinates");
  if (!pts.is_array() || pts.size() != 4)
    throw ConfigError("geometry.coordinates", "expected 4 [x, y] pairs");
  NodePlacement pl;
  for (std::size_t i = 0; i < 4; ++i) {
    const std::string path = "geometry.coordinates[" + std::to_string(i) + "]";
    if (!pts[i].is_array() || pts[i].size() != 2) throw ConfigError(path, "expected [x, y]");
    pl.nodes[i] = Point{number(pts[i][0], path + "[0]"), number(pts[i][1], path + "[1]")};
  }
  c.placement = pl;
}

inline SearchBox parse_box(const json& j, SchemeId s, const RunConfig& c, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of dimensions");
  SearchBox box = default_box(s, c.resolution, c.rounds);
  if (j.size() != box.dims.size())
    throw ConfigError(path, to_string(s) + " has " + std::to_string(box.dims.size()) +
                                " parameters, got " + std::to_string(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "].";
    check_keys(j[i], p, {"lo", "hi", "scale"});
    auto& d = box.dims[i];
    if (j[i].contains("lo")) d.lo = number(j[i].at("lo"), p + "lo");
    if (j[i].contains("hi")) d.hi = number(j[i].at("hi"), p + "hi");
    if (j[i].contains("scale")) {
      const auto sc = j[i].at("scale");
      if (sc == "linear")
        d.scale = Scale::linear;
      else if (sc == "log")
        d.scale = Scale::log;
      else
        throw ConfigError(p + "scale", "expected \"linear\" or \"log\"");
    }
  }
  try {
    box.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  return box;
}

}  // namespace detail

inline RunConfig parse_config(const json& j, const Overrides& ov = {}) {
  using namespace detail;
  RunConfig c;
  check_keys(j, "", {"command", "geometry", "gamma", "power", "powers", "schemes", "params",
                     "search", "sweep", "output", "seed", "tolerances", "verify", "threads"});

  if (ov.command)
    c.command = *ov.command;
  else if (j.contains("command")) {
    if (!j.at("command").is_string()) throw ConfigError("command", "expected a string");
    c.command = j.at("command").get<std::string>();
  }
  if (c.command.empty()) throw ConfigError("command", "missing");
  if (c.command != "rates" && c.command != "optimize" && c.command != "sweep" &&
      c.command != "verify-fm" && c.command != "selftest")
    throw ConfigError("command",
                      "unknown command '" + c.command +
                          "' (expected rates, optimize, sweep, verify-fm or selftest)");

  if (j.contains("geometry")) parse_geometry(j.at("geometry"), c);
  if (j.contains("gamma")) c.gamma = positive(j.at("gamma"), "gamma");
  if (ov.gamma) c.gamma = *ov.gamma;
  if (!(c.gamma > 0.0)) throw ConfigError("gamma", "must be positive");

  if (j.contains("power") && j.contains("powers"))
    throw ConfigError("powers", "give either 'power' or 'powers', not both");
  if (j.contains("power")) {
    const double p = non_negative(j.at("power"), "power");
    c.powers = Powers{p, p, p};
  }
  if (j.contains("powers")) {
    const json& p = j.at("powers");
    check_keys(p, "powers.", {"P1", "P2", "P3"});
    c.powers.P1 = non_negative(require(p, "P1", "powers."), "powers.P1");
    c.powers.P2 = non_negative(require(p, "P2", "powers."), "powers.P2");
    c.powers.P3 = non_negative(require(p, "P3", "powers."), "powers.P3");
  }
  if (ov.power) {
    if (!(*ov.power >= 0.0)) throw ConfigError("power", "must be >= 0");
    c.powers = Powers{*ov.power, *ov.power, *ov.power};
  }

  if (j.contains("schemes")) {
    const json& s = j.at("schemes");
    if (!s.is_array()) throw ConfigError("schemes", "expected an array of scheme names");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_string())
        throw ConfigError("schemes[" + std::to_string(i) + "]", "expected a string");
      names.push_back(s[i].get<std::string>());
    }
    c.schemes = parse_scheme_list(names, "schemes");
  }
  if (ov.schemes) c.schemes = parse_scheme_list(split_csv(*ov.schemes), "schemes");

  if (j.contains("params")) {
    const json& p = j.at("params");
    check_keys(p, "params.", {"alpha", "beta", "nhat3", "nhat2", "splits", "corr"});
    if (p.contains("alpha")) c.params.alpha = unit_interval(p.at("alpha"), "params.alpha");
    if (p.contains("beta")) c.params.beta = unit_interval(p.at("beta"), "params.beta");
    if (p.contains("nhat3")) c.params.nhat3 = positive(p.at("nhat3"), "params.nhat3");
    if (p.contains("nhat2")) c.params.nhat2 = positive(p.at("nhat2"), "params.nhat2");
    if (p.contains("splits")) {
      const json& s = p.at("splits");
      check_keys(s, "params.splits.", {"s", "t", "g2"});
      if (s.contains("s")) c.params.s = unit_interval(s.at("s"), "params.splits.s");
      if (s.contains("t")) c.params.t = unit_interval(s.at("t"), "params.splits.t");
      if (s.contains("g2")) c.params.g2 = unit_interval(s.at("g2"), "params.splits.g2");
    }
    if (p.contains("corr")) {
      const json& r = p.at("corr");
      check_keys(r, "params.corr.", {"rho12", "rho13", "rho23"});
      if (r.contains("rho12")) c.params.rho12 = unit_interval(r.at("rho12"), "params.corr.rho12");
      if (r.contains("rho13")) c.params.rho13 = unit_interval(r.at("rho13"), "params.corr.rho13");
      if (r.contains("rho23")) c.params.rho23 = unit_interval(r.at("rho23"), "params.corr.rho23");
    }
  }

  if (j.contains("search")) {
    const json& s = j.at("search");
    check_keys(s, "search.", {"resolution", "rounds", "shrink", "fallbacks", "boxes"});
    if (s.contains("resolution")) c.resolution = count(s.at("resolution"), "search.resolution", 2);
    if (s.contains("rounds")) c.rounds = count(s.at("rounds"), "search.rounds", 0);
    if (s.contains("shrink")) {
      c.shrink = number(s.at("shrink"), "search.shrink");
      if (!(c.shrink > 0.0 && c.shrink <= 1.0)) throw ConfigError("search.shrink", "must lie in (0, 1]");
    }
    if (s.contains("fallbacks")) {
      if (!s.at("fallbacks").is_boolean()) throw ConfigError("search.fallbacks", "expected a boolean");
      c.fallbacks = s.at("fallbacks").get<bool>();
    }
    if (s.contains("boxes")) {
      const json& b = s.at("boxes");
      if (!b.is_object()) throw ConfigError("search.boxes", "expected an object keyed by scheme");
      for (const auto& [name, dims] : b.items()) {
        const std::string path = "search.boxes." + name;
        SchemeId id;
        try {
          id = parse_scheme(name);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(path, e.what());
        }
        c.boxes[id] = parse_box(dims, id, c, path);
      }
    }
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_keys(s, "sweep.", {"parameter", "values", "log_range"});
    if (s.contains("parameter")) {
      if (!s.at("parameter").is_string()) throw ConfigError("sweep.parameter", "expected a string");
      try {
        c.sweep_parameter = parse_sweep_parameter(s.at("parameter").get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ConfigError("sweep.parameter", e.what());
      }
    } else {
      c.sweep_parameter = SweepParameter::P;
    }
    if (s.contains("values") == s.contains("log_range"))
      throw ConfigError("sweep", "give exactly one of 'values' or 'log_range'");
    if (s.contains("values")) {
      const json& v = s.at("values");
      if (!v.is_array() || v.empty()) throw ConfigError("sweep.values", "expected a non-empty array");
      for (std::size_t i = 0; i < v.size(); ++i)
        c.sweep_values.push_back(number(v[i], "sweep.values[" + std::to_string(i) + "]"));
    } else {
      const json& r = s.at("log_range");
      check_keys(r, "sweep.log_range.", {"from", "to", "count"});
      const double from = positive(require(r, "from", "sweep.log_range."), "sweep.log_range.from");
      const double to = positive(require(r, "to", "sweep.log_range."), "sweep.log_range.to");
      const std::size_t n = count(require(r, "count", "sweep.log_range."), "sweep.log_range.count");
      c.sweep_values = log_spaced(from, to, n);
    }
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, "output.", {"dir"});
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) throw ConfigError("output.dir", "expected a string");
      c.out_dir = o.at("dir").get<std::string>();
    }
  }
  if (ov.out_dir) c.out_dir = *ov.out_dir;

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed", "expected an unsigned integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (ov.seed) c.seed = *ov.seed;

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    check_keys(t, "tolerances.", {"fm"});
    if (t.contains("fm")) c.fm_tolerance = positive(t.at("fm"), "tolerances.fm");
  }
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    check_keys(v, "verify.", {"valuations"});
    if (v.contains("valuations")) c.valuations = count(v.at("valuations"), "verify.valuations");
  }
  if (j.contains("threads")) c.threads = count(j.at("threads"), "threads");

  // command-specific requirements
  if ((c.command == "rates" || c.command == "optimize" || c.command == "sweep") && !c.has_geometry())
    throw ConfigError("geometry", "required by '" + c.command + "'");
  if (c.command == "sweep") {
    if (c.sweep_values.empty()) throw ConfigError("sweep", "required by 'sweep'");
    if (c.placement && c.sweep_parameter != SweepParameter::P &&
        c.sweep_parameter != SweepParameter::gamma)
      throw ConfigError("sweep.parameter", "distance sweeps need a line geometry");
    if (c.out_dir.empty()) c.out_dir = ".";
  }
  if (c.has_geometry() && c.command != "sweep") {
    try {
      c.channel();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("geometry", e.what());
    }
  }
  return c;
}

// Parses JSON text; syntax errors become ConfigError with line/column.
inline RunConfig parse_config_text(const std::string& text, const Overrides& ov = {}) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<json>", e.what());
  }
  return parse_config(j, ov);
}

// ---------------------------------------------------------------------------
// Artifacts

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
  if (!f) throw std::runtime_error("write failed for " + p.string());
}

inline void ensure_writable(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("output.dir", "cannot create '" + dir + "': " + ec.message());
  const fs::path probe = fs::path(dir) / ".snncrs_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw ConfigError("output.dir", "'" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
}

inline std::string x_label(SweepParameter p) {
  switch (p) {
    case SweepParameter::P: return "P (P1 = P2 = P3)";
    case SweepParameter::gamma: return "path-loss exponent";
    case SweepParameter::d12: return "d12";
    case SweepParameter::d34: return "d34";
    case SweepParameter::d14: return "d14";
  }
  return "value";
}

inline nlohmann::ordered_json bounds_json(const RateBounds& b) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& item : b.items)
    out.push_back({{"name", item.name}, {"multiplier", item.multiplier}, {"value", item.value}});
  return out;
}

}  // namespace detail

// Writes sweep.csv, sweep.json, sweep.dat and sweep.gp into `dir`.
inline SweepResult write_sweep_artifacts(const SweepSpec& spec, const std::string& dir) {
  namespace fs = std::filesystem;
  const auto res = sweep(spec);
  detail::write_file(fs::path(dir) / "sweep.csv", sweep_csv(res));
  detail::write_file(fs::path(dir) / "sweep.json", sweep_json(res).dump(2) + "\n");
  detail::write_file(fs::path(dir) / "sweep.dat", sweep_dat(res, spec.schemes));
  detail::write_file(fs::path(dir) / "sweep.gp",
                     sweep_gnuplot("sweep.dat", detail::x_label(spec.parameter), spec.schemes,
                                   spec.parameter == SweepParameter::P));
  return res;
}

// Reduced sweep used by the determinism check of the self-test.
inline SweepSpec selftest_sweep_spec() {
  SweepSpec spec;
  spec.values = log_spaced(0.1, 100.0, 4);
  spec.resolution = 9;
  spec.rounds = 2;
  return spec;
}

inline std::string sweep_csv_via_files(const SweepSpec& spec, const std::string& dir) {
  detail::ensure_writable(dir);
  write_sweep_artifacts(spec, dir);
  std::ifstream f(std::filesystem::path(dir) / "sweep.csv", std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {

inline int cmd_rates(const RunConfig& c, std::ostream& out) {
  const auto ch = c.channel();
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (SchemeId s : c.schemes) {
    const auto x = c.params.vector_for(s);
    const auto ev = evaluate_scheme(ch, s, x, false);
    nlohmann::ordered_json params;
    const auto names = scheme_parameter_names(s);
    for (std::size_t i = 0; i < names.size(); ++i) params[names[i]] = x[i];
    out << to_string(s) << "  rate " << format_number(ev.rate) << "  binding " << ev.binding()
        << "  params " << params.dump() << "\n";
    for (const auto& b : ev.bounds.items) {
      out << "  " << b.name;
      if (b.multiplier != 1) out << " (x" << b.multiplier << ")";
      out << "  " << format_number(b.value) << "\n";
    }
    records.push_back({{"scheme", to_string(s)},
                       {"params", params},
                       {"config", ev.config},
                       {"bounds", bounds_json(ev.bounds)},
                       {"rate", ev.rate}});
  }
  if (!c.out_dir.empty())
    write_file(std::filesystem::path(c.out_dir) / "rates.json", records.dump(2) + "\n");
  return kExitOk;
}

inline int cmd_optimize(const RunConfig& c, std::ostream& out) {
  const auto ch = c.channel();
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  const auto results =
      optimize_schemes(ch, c.schemes, [&](SchemeId s) { return c.box_for(s); }, c.fallbacks);
  for (SchemeId s : c.schemes) {
    const auto& r = results.at(s);
    out << to_string(s) << "  rate " << format_number(r.rate()) << "  binding "
        << r.evaluation.binding() << "  params " << r.params_json().dump() << "\n";
    records.push_back({{"scheme", to_string(s)},
                       {"params", r.params_json()},
                       {"bounds", bounds_json(r.evaluation.bounds)},
                       {"binding", r.evaluation.binding()},
                       {"rate", r.rate()},
                       {"evaluations", r.opt.evaluations}});
  }
  if (!c.out_dir.empty())
    write_file(std::filesystem::path(c.out_dir) / "optimize.json", records.dump(2) + "\n");
  return kExitOk;
}

inline int cmd_sweep(const RunConfig& c, std::ostream& out) {
  const auto spec = c.sweep_spec();
  const auto res = write_sweep_artifacts(spec, c.out_dir);
  std::size_t invalid = 0;
  for (const auto& r : res.rows) invalid += !r.valid;
  out << "sweep: " << res.rows.size() << " rows (" << invalid << " invalid) written to "
      << c.out_dir << "/sweep.{csv,json,dat,gp}\n";
  return kExitOk;
}

inline int cmd_verify_fm(const RunConfig& c, std::ostream& out) {
  const auto appendix = appendix_system();
  const auto projected = fm_eliminate(fm_eliminate(appendix, "R30"), "R31");
  const auto thm = theorem2_system();
  const auto fb = fallback_system();
  ValuationSampling s;
  s.count = c.valuations;
  s.seed = c.seed;
  s.sparse_every = 2;
  const auto vals = sample_valuations(atom_union({&appendix, &thm, &fb}), s);
  const auto rep = verify_equivalence(projected, thm, vals, c.fm_tolerance);
  const auto fallback = verify_fallback(vals, c.fm_tolerance);
  const bool pass = rep.pass && fallback.pass();
  nlohmann::ordered_json j;
  j["status"] = pass ? "PASS" : "FAIL";
  j["seed"] = c.seed;
  j["equivalence"] = rep.to_json();
  j["fallback"] = {{"condition_violations", fallback.violating},
                   {"failures", fallback.failures},
                   {"pass", fallback.pass()}};
  j["projected_constraints"] = projected.constraints.size();
  const std::string text = j.dump(2) + "\n";
  out << text;
  if (!c.out_dir.empty()) write_file(std::filesystem::path(c.out_dir) / "verify_fm.json", text);
  return pass ? kExitOk : kExitVerificationFailed;
}

inline int cmd_selftest(const RunConfig& c, std::ostream& out) {
  namespace fs = std::filesystem;
  const fs::path base = c.out_dir.empty() ? fs::temp_directory_path() / "snncrs_selftest"
                                          : fs::path(c.out_dir) / "selftest";
  int run = 0;
  const bool ok = testing::run_acceptance(out, c.seed, [&] {
    return sweep_csv_via_files(selftest_sweep_spec(), (base / ("run" + std::to_string(run++))).string());
  });
  return ok ? kExitOk : kExitVerificationFailed;
}

}  // namespace detail

// Runs a parsed config; runtime failures other than config errors map to 1.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (!c.out_dir.empty()) detail::ensure_writable(c.out_dir);
    if (c.command == "rates") return detail::cmd_rates(c, out);
    if (c.command == "optimize") return detail::cmd_optimize(c, out);
    if (c.command == "sweep") return detail::cmd_sweep(c, out);
    if (c.command == "verify-fm") return detail::cmd_verify_fm(c, out);
    if (c.command == "selftest") return detail::cmd_selftest(c, out);
    throw ConfigError("command", "unknown command '" + c.command + "'");
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitVerificationFailed;
  }
}

// Full entry: optional config file plus overrides.
inline int run_main(const std::optional<std::string>& config_path, const Overrides& ov,
                    std::ostream& out, std::ostream& err) {
  RunConfig c;
  try {
    std::string text = "{}";
    if (config_path) {
      std::ifstream f(*config_path, std::ios::binary);
      if (!f) throw ConfigError("--config", "cannot read '" + *config_path + "'");
      std::stringstream ss;
      ss << f.rdbuf();
      text = ss.str();
    }
    c = parse_config_text(text, ov);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfigError;
  }
  return run(c, out, err);
}

}  // namespace snncrs::cli
