#pragma once

// Deterministic box search (full grid, then golden-section and Nelder-Mead
// refinement), scheme-level wiring with default boxes, and parameter sweeps
// over the line network.

#include "snncrs/channel_model.hpp"
#include "snncrs/schemes.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace snncrs {

enum class Scale { linear, log };

struct Dimension {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  Scale scale = Scale::linear;

  double to_unit(double x) const { return scale == Scale::log ? std::log10(x) : x; }
  double from_unit(double u) const { return scale == Scale::log ? std::pow(10.0, u) : u; }
};

struct SearchBox {
  std::vector<Dimension> dims;
  std::size_t resolution = 21;  // grid points per dimension
  std::size_t rounds = 5;       // refinement rounds
  double shrink = 0.5;          // bracket half-width factor per round
  std::size_t golden_iterations = 48;
  // Nelder-Mead restarts after the coordinate rounds; they move along ridges
  // where two bounds cross, which single-coordinate steps cannot follow.
  std::size_t polish_restarts = 30;
  std::size_t polish_iterations = 400;

  void validate() const {
    if (dims.empty()) throw std::invalid_argument("search box has no dimensions");
    if (resolution == 0) throw std::invalid_argument("grid resolution must be >= 1");
    if (!(shrink > 0.0 && shrink <= 1.0)) throw std::invalid_argument("shrink must be in (0,1]");
    for (const auto& d : dims) {
      if (!(d.lo <= d.hi) || !std::isfinite(d.lo) || !std::isfinite(d.hi))
        throw std::invalid_argument("dimension " + d.name + " has an empty or infinite range");
      if (d.scale == Scale::log && !(d.lo > 0.0))
        throw std::invalid_argument("log-scaled dimension " + d.name + " needs lo > 0");
    }
  }

  double grid_step(std::size_t k) const {
    const auto& d = dims[k];
    const double span = d.to_unit(d.hi) - d.to_unit(d.lo);
    return resolution > 1 ? span / static_cast<double>(resolution - 1) : span;
  }

  double grid_value(std::size_t k, std::size_t i) const {
    const auto& d = dims[k];
    if (resolution == 1) return d.from_unit(0.5 * (d.to_unit(d.lo) + d.to_unit(d.hi)));
    if (i + 1 == resolution) return d.hi;
    return d.from_unit(d.to_unit(d.lo) + grid_step(k) * static_cast<double>(i));
  }
};

struct OptResult {
  std::vector<double> params;
  double rate = -std::numeric_limits<double>::infinity();
  double grid_rate = -std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  std::vector<double> round_rates;  // best start before refinement and after each round
};

using Objective = std::function<double(std::span<const double>)>;

namespace detail {

// Maximizes in unit coordinates from the incumbent; the simplex stays inside
// the box (widened to contain the incumbent). Each restart rebuilds a
// grid-step simplex around the current best; restarts stop once one fails
// to improve.
inline void nelder_mead_polish(const Objective& evaluate, const SearchBox& box, OptResult& res) {
  const std::size_t n = box.dims.size();
  std::vector<double> lo(n), hi(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& d = box.dims[k];
    const double u = d.to_unit(res.params[k]);
    lo[k] = std::min(d.to_unit(d.lo), u);
    hi[k] = std::max(d.to_unit(d.hi), u);
  }
  auto value = [&](std::vector<double> u) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
      u[k] = std::clamp(u[k], lo[k], hi[k]);
      x[k] = box.dims[k].from_unit(u[k]);
    }
    const double v = evaluate(x);
    ++res.evaluations;
    if (std::isfinite(v) && v > res.rate) {
      res.rate = v;
      res.params = x;
    }
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  };

  double edge = 0.0;  // fixed simplex edge
  for (std::size_t k = 0; k < n; ++k) edge = std::max(edge, box.grid_step(k));
  double before = -std::numeric_limits<double>::infinity();
  for (std::size_t restart = 0; restart < box.polish_restarts && res.rate > before;
       ++restart) {
    before = res.rate;
    std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k) simplex[0][k] = box.dims[k].to_unit(res.params[k]);
    for (std::size_t i = 1; i <= n; ++i) {
      simplex[i] = simplex[0];
      const std::size_t k = i - 1;
      simplex[i][k] += simplex[0][k] + edge <= hi[k] ? edge : -edge;
    }
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) f[i] = value(simplex[i]);

    for (std::size_t it = 0; it < box.polish_iterations; ++it) {
      std::vector<std::size_t> order(n + 1);
      for (std::size_t i = 0; i <= n; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
      const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
      double spread = 0.0;
      for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t k = 0; k < n; ++k)
          spread = std::max(spread, std::abs(simplex[i][k] - simplex[best][k]));
      if (spread < 1e-12) break;

      std::vector<double> centroid(n, 0.0);
      for (std::size_t i = 0; i <= n; ++i)
        if (i != worst)
          for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
      auto along = [&](double t) {
        std::vector<double> u(n);
        for (std::size_t k = 0; k < n; ++k)
          u[k] = std::clamp(centroid[k] + t * (simplex[worst][k] - centroid[k]), lo[k], hi[k]);
        return u;
      };
      const auto xr = along(-1.0);
      const double fr = value(xr);
      if (fr > f[best]) {
        const auto xe = along(-2.0);
        const double fe = value(xe);
        if (fe > fr) {
          simplex[worst] = xe;
          f[worst] = fe;
        } else {
          simplex[worst] = xr;
          f[worst] = fr;
        }
      } else if (fr > f[second]) {
        simplex[worst] = xr;
        f[worst] = fr;
      } else {
        const auto xc = fr > f[worst] ? along(-0.5) : along(0.5);
        const double fc = value(xc);
        if (fc > std::max(fr, f[worst])) {
          simplex[worst] = xc;
          f[worst] = fc;
        } else {
          for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k)
              simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
            f[i] = value(simplex[i]);
          }
        }
      }
    }
  }
}

// `rounds` rounds of golden-section search along each coordinate around the
// incumbent of `res`, then the Nelder-Mead polish.
inline void refine(const Objective& evaluate, const SearchBox& box, OptResult& res) {
  constexpr double kInvPhi = 0.6180339887498949;
  const std::size_t n = box.dims.size();
  for (std::size_t round = 0; round < box.rounds; ++round) {
    const double factor = std::pow(box.shrink, static_cast<double>(round));
    for (std::size_t k = 0; k < n; ++k) {
      const auto& d = box.dims[k];
      const double u0 = d.to_unit(res.params[k]);
      const double w = box.grid_step(k) * factor;
      double a = std::max(d.to_unit(d.lo), u0 - w), b = std::min(d.to_unit(d.hi), u0 + w);
      a = std::min(a, u0);  // seeds may sit outside the box
      b = std::max(b, u0);
      if (!(b > a)) continue;

      std::vector<double> best = res.params;
      double best_v = res.rate;
      auto probe = [&](double u) {
        std::vector<double> y = res.params;
        y[k] = d.from_unit(u);
        const double v = evaluate(y);
        ++res.evaluations;
        if (std::isfinite(v) && v > best_v) {
          best_v = v;
          best = y;
        }
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
      };
      double c = b - kInvPhi * (b - a), e = a + kInvPhi * (b - a);
      double fc = probe(c), fe = probe(e);
      for (std::size_t it = 0; it < box.golden_iterations; ++it) {
        if (fc >= fe) {
          b = e;
          e = c;
          fe = fc;
          c = b - kInvPhi * (b - a);
          fc = probe(c);
        } else {
          a = c;
          c = e;
          fc = fe;
          e = a + kInvPhi * (b - a);
          fe = probe(e);
        }
      }
      if (best_v > res.rate) {
        res.rate = best_v;
        res.params = best;
      }
    }
    res.round_rates.push_back(res.rate);
  }
  if (box.polish_restarts > 0) nelder_mead_polish(evaluate, box, res);
}

}  // namespace detail

// Full grid in lexicographic order (first dimension slowest; the first
// strict maximum wins). Local refinement then starts from the grid best and
// from each extra seed separately; the best refined point wins, earlier
// starts on ties. Non-finite objective values are never selected.
inline OptResult optimize(const Objective& evaluate, const SearchBox& box,
                          const std::vector<std::vector<double>>& seeds = {}) {
  box.validate();
  const std::size_t n = box.dims.size();
  OptResult res;
  std::vector<double> x(n);
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    for (std::size_t k = 0; k < n; ++k) x[k] = box.grid_value(k, idx[k]);
    const double v = evaluate(x);
    ++res.evaluations;
    if (std::isfinite(v) && (res.params.empty() || v > res.rate)) {
      res.rate = v;
      res.params = x;
    }
    std::size_t k = n;
    while (k > 0 && ++idx[k - 1] == box.resolution) idx[--k] = 0;
    if (k == 0) break;
  }
  if (res.params.empty()) throw std::domain_error("objective is not finite anywhere on the grid");
  res.grid_rate = res.rate;

  std::vector<OptResult> starts{res};
  for (const auto& s : seeds) {
    if (s.size() != n) throw std::invalid_argument("seed has wrong dimension");
    OptResult start;
    start.params = s;
    start.rate = evaluate(s);
    ++res.evaluations;
    if (std::isfinite(start.rate)) starts.push_back(std::move(start));
  }

  OptResult best;
  std::vector<double> round_rates(box.rounds + 1, -std::numeric_limits<double>::infinity());
  for (auto& start : starts) {
    start.evaluations = 0;
    start.round_rates = {start.rate};
    detail::refine(evaluate, box, start);
    res.evaluations += start.evaluations;
    for (std::size_t r = 0; r < round_rates.size(); ++r)
      round_rates[r] = std::max(round_rates[r], start.round_rates[r]);
    if (best.params.empty() || start.rate > best.rate) best = start;
  }
  res.params = best.params;
  res.rate = best.rate;
  res.round_rates = round_rates;
  return res;
}

// ---------------------------------------------------------------------------
// Schemes

inline SearchBox default_box(SchemeId scheme, std::size_t resolution = 21, std::size_t rounds = 5) {
  const Dimension unit_a{"alpha", 0.0, 1.0, Scale::linear};
  const Dimension unit_b{"beta", 0.0, 1.0, Scale::linear};
  auto nhat = [](const char* name) { return Dimension{name, 1e-3, 1e3, Scale::log}; };
  SearchBox box;
  box.resolution = resolution;
  box.rounds = rounds;
  switch (scheme) {
    case SchemeId::SNNC_RS_JOINT:
    case SchemeId::SNNC_RS_SUCCESSIVE: box.dims = {unit_a, unit_b, nhat("nhat3")}; break;
    case SchemeId::DF_SNNC: box.dims = {unit_b, nhat("nhat3")}; break;
    case SchemeId::DF_DF:
      box.dims = {{"s", 0.0, 1.0, Scale::linear},
                  {"t", 0.0, 1.0, Scale::linear},
                  {"g2", 0.0, 1.0, Scale::linear}};
      break;
    case SchemeId::NNC: box.dims = {nhat("nhat2"), nhat("nhat3")}; break;
    case SchemeId::CUTSET:
      box.dims = {{"rho12", 0.0, 0.999, Scale::linear},
                  {"rho13", 0.0, 0.999, Scale::linear},
                  {"rho23", 0.0, 0.999, Scale::linear}};
      break;
  }
  return box;
}

struct SchemeOptResult {
  SchemeId scheme{};
  OptResult opt;
  SchemeEvaluation evaluation;  // at opt.params

  double rate() const { return opt.rate; }

  nlohmann::ordered_json params_json() const {
    nlohmann::ordered_json j;
    const auto names = scheme_parameter_names(scheme);
    for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = opt.params[i];
    j["config"] = evaluation.config;
    return j;
  }
};

struct SchemeOptions {
  bool fallbacks = true;
  std::vector<std::vector<double>> seeds;
  // Seed the cut-set search with the induced correlation of every
  // achievable scheme's optimum (computed here when no seeds are given).
  bool cutset_scheme_seeds = true;
  // Seed SNNC-RS with the DF-SNNC optimum at alpha = 0.
  bool snncrs_dfsnnc_seed = true;
};

inline Objective scheme_objective(const ChannelGains& ch, SchemeId scheme, bool fallbacks) {
  return [ch, scheme, fallbacks](std::span<const double> x) {
    return evaluate_scheme(ch, scheme, x, fallbacks).rate;
  };
}

inline SchemeOptResult optimize_scheme(const ChannelGains& ch, SchemeId scheme,
                                       const SearchBox& box, const SchemeOptions& options = {});

namespace detail {

inline void require_box_matches(SchemeId scheme, const SearchBox& box) {
  if (box.dims.size() != scheme_parameter_names(scheme).size())
    throw std::invalid_argument("search box for " + to_string(scheme) + " needs " +
                                std::to_string(scheme_parameter_names(scheme).size()) +
                                " dimensions, got " + std::to_string(box.dims.size()));
}

inline std::vector<double> correlation_seed(const InputCorrelation& c) {
  return {c.r12, c.r13, c.r23};
}

}  // namespace detail

inline SchemeOptResult optimize_scheme(const ChannelGains& ch, SchemeId scheme,
                                       const SearchBox& box, const SchemeOptions& options) {
  ch.validate();
  detail::require_box_matches(scheme, box);
  std::vector<std::vector<double>> seeds = options.seeds;

  if ((scheme == SchemeId::SNNC_RS_JOINT || scheme == SchemeId::SNNC_RS_SUCCESSIVE) &&
      options.snncrs_dfsnnc_seed) {
    SearchBox sub = box;
    sub.dims = {box.dims[1], box.dims[2]};
    SchemeOptions o;
    o.fallbacks = options.fallbacks;
    const auto df = optimize_scheme(ch, SchemeId::DF_SNNC, sub, o);
    seeds.push_back({0.0, df.opt.params[0], df.opt.params[1]});
  }
  if (scheme == SchemeId::CUTSET && options.cutset_scheme_seeds && options.seeds.empty()) {
    for (SchemeId s : kAllSchemes) {
      if (s == SchemeId::CUTSET) continue;
      SearchBox sb = default_box(s, box.resolution, box.rounds);
      SchemeOptions o;
      o.fallbacks = options.fallbacks;
      seeds.push_back(detail::correlation_seed(optimize_scheme(ch, s, sb, o).evaluation.induced));
    }
  }

  SchemeOptResult out;
  out.scheme = scheme;
  out.opt = optimize(scheme_objective(ch, scheme, options.fallbacks), box, seeds);
  out.evaluation = evaluate_scheme(ch, scheme, out.opt.params, options.fallbacks);
  return out;
}

// Optimizes several schemes on one channel. Successive decoding runs before
// joint decoding and seeds it (joint is never below successive at equal
// parameters); the cut-set search runs last, seeded with every achievable
// optimum's induced input correlation.
inline std::map<SchemeId, SchemeOptResult> optimize_schemes(
    const ChannelGains& ch, const std::vector<SchemeId>& schemes,
    const std::function<SearchBox(SchemeId)>& box_for, bool fallbacks = true) {
  auto wants = [&](SchemeId s) { return std::find(schemes.begin(), schemes.end(), s) != schemes.end(); };
  std::vector<SchemeId> order;
  if (wants(SchemeId::SNNC_RS_SUCCESSIVE)) order.push_back(SchemeId::SNNC_RS_SUCCESSIVE);
  for (SchemeId s : schemes)
    if (s != SchemeId::SNNC_RS_SUCCESSIVE && s != SchemeId::CUTSET &&
        std::find(order.begin(), order.end(), s) == order.end())
      order.push_back(s);

  std::map<SchemeId, SchemeOptResult> out;
  std::vector<std::vector<double>> cut_seeds;
  for (SchemeId s : order) {
    SchemeOptions o;
    o.fallbacks = fallbacks;
    if (s == SchemeId::SNNC_RS_JOINT && out.count(SchemeId::SNNC_RS_SUCCESSIVE))
      o.seeds.push_back(out.at(SchemeId::SNNC_RS_SUCCESSIVE).opt.params);
    out[s] = optimize_scheme(ch, s, box_for(s), o);
    cut_seeds.push_back(detail::correlation_seed(out[s].evaluation.induced));
  }
  if (wants(SchemeId::CUTSET)) {
    SchemeOptions o;
    o.fallbacks = fallbacks;
    o.seeds = cut_seeds;
    o.cutset_scheme_seeds = cut_seeds.empty();
    out[SchemeId::CUTSET] = optimize_scheme(ch, SchemeId::CUTSET, box_for(SchemeId::CUTSET), o);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepParameter { P, gamma, d12, d34, d14 };

inline std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::P: return "P";
    case SweepParameter::gamma: return "gamma";
    case SweepParameter::d12: return "d12";
    case SweepParameter::d34: return "d34";
    case SweepParameter::d14: return "d14";
  }
  return "?";
}

inline SweepParameter parse_sweep_parameter(const std::string& s) {
  for (auto p : {SweepParameter::P, SweepParameter::gamma, SweepParameter::d12, SweepParameter::d34,
                 SweepParameter::d14})
    if (to_string(p) == s) return p;
  throw std::invalid_argument("unknown sweep parameter '" + s + "'");
}

struct SweepSpec {
  // Either a collinear layout (d12, d34, d14) or a full 2-D placement.
  double d12 = 0.1, d34 = 0.05, d14 = 1.0;
  std::optional<NodePlacement> placement;
  double gamma = 2.0;
  Powers powers{};
  SweepParameter parameter = SweepParameter::P;
  std::vector<double> values;
  std::vector<SchemeId> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  std::map<SchemeId, SearchBox> boxes;  // defaults when absent
  std::size_t resolution = 21;
  std::size_t rounds = 5;
  bool fallbacks = true;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());

  void validate() const {
    if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
    if (schemes.empty()) throw std::invalid_argument("sweep needs at least one scheme");
    if (placement && parameter != SweepParameter::P && parameter != SweepParameter::gamma)
      throw std::invalid_argument("distance sweeps need a line geometry");
    for (const auto& [s, b] : boxes) detail::require_box_matches(s, b);
  }

  SearchBox box_for(SchemeId s) const {
    auto it = boxes.find(s);
    return it != boxes.end() ? it->second : default_box(s, resolution, rounds);
  }

  // Channel at one sweep point; the P sweep sets P1 = P2 = P3 = value.
  ChannelGains channel_at(double v) const {
    double g = gamma, a = d12, b = d34, c = d14;
    Powers pw = powers;
    switch (parameter) {
      case SweepParameter::P: pw = Powers{v, v, v}; break;
      case SweepParameter::gamma: g = v; break;
      case SweepParameter::d12: a = v; break;
      case SweepParameter::d34: b = v; break;
      case SweepParameter::d14: c = v; break;
    }
    if (placement) {
      NodePlacement pl = *placement;
      pl.pathloss_exponent = g;
      return gains_from_geometry(pl, pw);
    }
    return gains_from_geometry(line_placement(a, b, c, g), pw);
  }
};

inline std::vector<double> log_spaced(double from, double to, std::size_t count) {
  if (!(from > 0.0) || !(to > 0.0) || count == 0)
    throw std::invalid_argument("log range needs positive bounds and count >= 1");
  std::vector<double> v;
  for (std::size_t i = 0; i < count; ++i) {
    if (count == 1) {
      v.push_back(from);
      break;
    }
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    v.push_back(i + 1 == count ? to : std::pow(10.0, std::log10(from) + t * (std::log10(to) - std::log10(from))));
  }
  return v;
}

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  SchemeId scheme{};
  bool valid = true;
  double rate = std::numeric_limits<double>::quiet_NaN();
  std::string binding = "invalid";
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  nlohmann::ordered_json flags = nlohmann::ordered_json::object();
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

namespace detail {

inline nlohmann::ordered_json remark_json(const RemarkFlags& f) {
  nlohmann::ordered_json j;
  j["remark2_full_decode"] = f.remark2_full_decode;
  j["remark3"] = f.remark3;
  j["remark4"] = f.remark4;
  if (f.gaussian_full) j["gaussian_full"] = *f.gaussian_full;
  j["condition_not_needed"] = f.condition_not_needed;
  return j;
}

// Rows of one sweep point, in the order of `spec.schemes`.
inline std::vector<SweepRow> sweep_point(const SweepSpec& spec, double v) {
  std::optional<ChannelGains> ch;
  std::string error;
  try {
    ch = spec.channel_at(v);
  } catch (const std::invalid_argument& e) {
    error = e.what();
  }
  std::map<SchemeId, SchemeOptResult> results;
  if (ch)
    results = optimize_schemes(*ch, spec.schemes,
                               [&](SchemeId s) { return spec.box_for(s); }, spec.fallbacks);
  std::vector<SweepRow> rows;
  for (SchemeId s : spec.schemes) {
    SweepRow row;
    row.parameter = to_string(spec.parameter);
    row.value = v;
    row.scheme = s;
    if (!ch) {
      row.valid = false;
      row.flags["error"] = error;
      rows.push_back(std::move(row));
      continue;
    }
    const auto& r = results.at(s);
    row.rate = r.rate();
    row.binding = r.evaluation.binding();
    row.params = r.params_json();
    if (s == SchemeId::SNNC_RS_JOINT || s == SchemeId::SNNC_RS_SUCCESSIVE ||
        s == SchemeId::DF_SNNC) {
      const SnncRsParams p = s == SchemeId::DF_SNNC
                                 ? SnncRsParams{0.0, r.opt.params[0], r.opt.params[1]}
                                 : SnncRsParams{r.opt.params[0], r.opt.params[1], r.opt.params[2]};
      row.flags = detail::remark_json(remark_conditions(*ch, p));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

// Points run on up to `spec.threads` workers; rows are collected in order.
inline SweepResult sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<std::vector<SweepRow>> points(spec.values.size());
  std::vector<std::exception_ptr> errors(spec.values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < spec.values.size();) {
      try {
        points[i] = detail::sweep_point(spec, spec.values[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::clamp<std::size_t>(spec.threads, 1, spec.values.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  SweepResult out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    for (auto& r : points[i]) out.rows.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string sweep_csv(const SweepResult& r) {
  std::string out = "sweep_param,sweep_value,scheme,rate_bits,binding_bound,params_json,flags_json\n";
  for (const auto& row : r.rows)
    out += row.parameter + "," + format_number(row.value) + "," + to_string(row.scheme) + "," +
           format_number(row.rate) + "," + csv_quote(row.binding) + "," +
           csv_quote(row.params.dump()) + "," + csv_quote(row.flags.dump()) + "\n";
  return out;
}

inline nlohmann::ordered_json sweep_json(const SweepResult& r) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json j;
    j["sweep_param"] = row.parameter;
    j["sweep_value"] = row.value;
    j["scheme"] = to_string(row.scheme);
    j["valid"] = row.valid;
    if (row.valid)
      j["rate_bits"] = row.rate;
    else
      j["rate_bits"] = nullptr;
    j["binding_bound"] = row.binding;
    j["params"] = row.params;
    j["flags"] = row.flags;
    rows.push_back(std::move(j));
  }
  return {{"rows", rows}};
}

// Whitespace-separated table for gnuplot: one row per sweep value, one
// column per scheme (NaN where invalid).
inline std::string sweep_dat(const SweepResult& r, const std::vector<SchemeId>& schemes) {
  std::string out = "# " + (r.rows.empty() ? std::string("value") : r.rows.front().parameter);
  for (SchemeId s : schemes) out += " " + to_string(s);
  out += "\n";
  for (std::size_t i = 0; i < r.rows.size(); i += schemes.size()) {
    out += format_number(r.rows[i].value);
    for (std::size_t k = 0; k < schemes.size() && i + k < r.rows.size(); ++k)
      out += " " + format_number(r.rows[i + k].rate);
    out += "\n";
  }
  return out;
}

inline std::string sweep_gnuplot(const std::string& dat_file, const std::string& x_label,
                                 const std::vector<SchemeId>& schemes, bool log_x) {
  std::string out = "set xlabel '" + x_label + "'\nset ylabel 'rate [bits/use]'\nset key left top\n";
  if (log_x) out += "set logscale x\n";
  out += "plot ";
  for (std::size_t k = 0; k < schemes.size(); ++k) {
    if (k) out += ", \\\n     ";
    out += "'" + dat_file + "' using 1:" + std::to_string(k + 2) + " with linespoints title '" +
           to_string(schemes[k]) + "'";
  }
  return out + "\n";
}

}  // namespace snncrs
