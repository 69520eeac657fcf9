#pragma once

// Acceptance suite: one pass/fail line per criterion. Shared by the
// acceptance test binary and the `selftest` CLI command.

#include "snncrs/optimizer.hpp"
#include "snncrs/rate_regions.hpp"
#include "snncrs/sampling.hpp"
#include "snncrs/schemes.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace snncrs::testing {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double time_limit = 0.0;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Independent oracles

// I(A;B|C) = sum p(a,b,c) log2( p(a,b,c) p(c) / (p(a,c) p(b,c)) ), by direct
// enumeration of the joint table with hashed marginals.
inline double brute_force_mi(const JointPmf& joint, const Group& a, const Group& b,
                             const Group& c) {
  const auto& labels = joint.labels();
  const auto& sizes = joint.sizes();
  auto positions = [&](const Group& g) {
    std::vector<std::size_t> pos;
    for (const auto& l : g) {
      auto it = std::find(labels.begin(), labels.end(), l);
      if (it == labels.end()) throw std::invalid_argument("oracle: unknown label " + l);
      pos.push_back(static_cast<std::size_t>(it - labels.begin()));
    }
    return pos;
  };
  const auto pa = positions(a), pb = positions(b), pc = positions(c);
  auto key = [](const std::vector<std::size_t>& digits, const std::vector<std::size_t>& pos) {
    std::string k;
    for (std::size_t p : pos) k += std::to_string(digits[p]) + ".";
    return k;
  };
  std::map<std::string, double> m_abc, m_ac, m_bc, m_c;
  std::map<std::string, std::array<std::string, 3>> parts;
  std::vector<std::size_t> digits(labels.size(), 0);
  const auto& probs = joint.probabilities();
  for (std::size_t cell = 0; cell < probs.size(); ++cell) {
    std::size_t rest = cell;
    for (std::size_t i = labels.size(); i-- > 0;) {
      digits[i] = rest % sizes[i];
      rest /= sizes[i];
    }
    const double p = probs[cell];
    if (p <= 0.0) continue;
    const std::string ka = key(digits, pa), kb = key(digits, pb), kc = key(digits, pc);
    const std::string abc = ka + "|" + kb + "|" + kc;
    m_abc[abc] += p;
    m_ac[ka + "|" + kc] += p;
    m_bc[kb + "|" + kc] += p;
    m_c[kc] += p;
    parts[abc] = {ka + "|" + kc, kb + "|" + kc, kc};
  }
  double total = 0.0;
  for (const auto& [abc, pabc] : m_abc) {
    const auto& k = parts[abc];
    total += pabc * std::log2(pabc * m_c[k[2]] / (m_ac[k[0]] * m_bc[k[1]]));
  }
  return total;
}

// Max R of a system in (R, R30, R31) by scanning a (R30, R31) grid. Each row
// is relaxed by the most that snapping to the nearest grid point can move
// it, so the grid value never falls below the exact optimum.
inline double grid_max_rate(const InequalitySystem& sys, const AtomValuation& val, double step,
                            double extent) {
  struct Row {
    double r, r30, r31, b;
  };
  std::vector<Row> rows;
  for (const auto& c : sys.constraints) {
    const auto le = c.as_le();
    double b = le.constant.get_d();
    for (const auto& [id, k] : le.atoms) b += k.get_d() * val.at(id);
    const double r30 = le.coeff("R30").get_d(), r31 = le.coeff("R31").get_d();
    b += (std::abs(r30) + std::abs(r31)) * step / 2;
    rows.push_back({le.coeff("R").get_d(), r30, r31, b});
  }
  double best = -std::numeric_limits<double>::infinity();
  const auto n = static_cast<long>(std::ceil(extent / step));
  for (long i = 0; i <= n; ++i)
    for (long j = 0; j <= n; ++j) {
      const double x = static_cast<double>(i) * step, y = static_cast<double>(j) * step;
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      bool ok = true;
      for (const auto& r : rows) {
        const double rest = r.b - r.r30 * x - r.r31 * y;
        if (r.r > 0)
          hi = std::min(hi, rest / r.r);
        else if (r.r < 0)
          lo = std::max(lo, rest / r.r);
        else if (rest < 0) {
          ok = false;
          break;
        }
      }
      if (ok && lo <= hi) best = std::max(best, hi);
    }
  return best;
}

// max over beta of min{C((1-beta) h12^2 P1), C(h14^2 P1 + h24^2 P2 + 2 h14 h24 sqrt(beta P1 P2))}
inline double two_node_df_rate(const ChannelGains& ch) {
  auto f = [&](double beta) { return std::log2(1 + (1 - beta) * ch.h12 * ch.h12 * ch.P1); };
  auto g = [&](double beta) {
    return std::log2(1 + ch.h14 * ch.h14 * ch.P1 + ch.h24 * ch.h24 * ch.P2 +
                     2 * ch.h14 * ch.h24 * std::sqrt(beta * ch.P1 * ch.P2));
  };
  if (f(0) <= g(0)) return f(0);
  if (f(1) >= g(1)) return g(1);
  double lo = 0, hi = 1;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > g(mid) ? lo : hi) = mid;
  }
  return std::min(f(lo), g(lo));
}

// ---------------------------------------------------------------------------
// Criteria

namespace detail {

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

template <class F>
CriterionResult timed(int id, std::string name, double limit, F&& body) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.time_limit = limit;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.pass = body(r.detail);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds >= limit) {
    r.pass = false;
    r.detail += " [time limit " + sci(limit) + " s exceeded]";
  }
  return r;
}

}  // namespace detail

inline CriterionResult closed_form_fidelity(std::uint64_t seed) {
  return detail::timed(1, "closed-form bounds match log-det evaluation", 10.0, [&](std::string& d) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto ch = random_channel(rng);
      const auto p = random_snncrs_params(rng);
      const auto closed = snncrs_bounds_gaussian(ch, p);
      const auto sys = snncrs_system(ch, p);
      const auto logdet = thm2_bounds(gaussian_mi_fn(sys));
      for (std::size_t k = 0; k < closed.items.size(); ++k)
        worst = std::max(worst, std::abs(closed.items[k].value - logdet.items[k].value));
    }
    d = "max |diff| = " + detail::sci(worst) + " bits over 1000 draws x 5 bounds (tol 1e-9)";
    return worst <= 1e-9;
  });
}

inline CriterionResult fm_verification(std::uint64_t seed) {
  return detail::timed(2, "appendix elimination reproduces the joint-decoding region", 60.0,
                       [&](std::string& d) {
    const auto appendix = appendix_system();
    const auto projected = fm_eliminate(fm_eliminate(appendix, "R30"), "R31");
    const auto thm = theorem2_system();
    const auto fb = fallback_system();
    const auto atoms = atom_union({&appendix, &thm, &fb});
    ValuationSampling s;
    s.count = 100;
    s.seed = seed;
    s.sparse_every = 2;
    const auto vals = sample_valuations(atoms, s);
    const auto rep = verify_equivalence(projected, thm, vals, 1e-9);
    const auto fallback = verify_fallback(vals);

    // grid oracle on the first 20 valuations with a positive optimum
    ValuationSampling gs = s;
    gs.count = 1000;
    gs.seed = seed + 1;
    double worst_grid = 0.0;
    std::size_t graded = 0;
    for (const auto& v : sample_valuations(atoms, gs)) {
      const auto exact = max_rate(appendix, v);
      if (!exact.feasible || exact.unbounded || exact.value <= 1e-6) continue;
      const double extent = v.at(atoms::quant_useful().id) + v.at(atoms::relay2_given_source().id);
      const double grid = grid_max_rate(appendix, v, 1e-3, extent + 2e-3);
      worst_grid = std::max(worst_grid, std::abs(grid - exact.value));
      if (++graded == 20) break;
    }
    d = "equivalence " + std::string(rep.pass ? "PASS" : "FAIL") + " on " +
        std::to_string(rep.valuations) + " valuations (worst gap " + detail::sci(rep.worst_gap) +
        "); fallback covers " + std::to_string(fallback.violating) +
        " condition violations: " + (fallback.pass() ? "yes" : "no") +
        "; grid oracle worst gap " + detail::sci(worst_grid) + " on " + std::to_string(graded) +
        " valuations (tol 2e-3)";
    return rep.pass && fallback.pass() && graded == 20 && worst_grid <= 2e-3;
  });
}

inline CriterionResult remark_checks(std::uint64_t seed) {
  return detail::timed(3, "full-decoding remark matches h32 > h34", 10.0, [&](std::string& d) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int mismatches = 0, ties = 0, trues = 0;
    for (int i = 0; i < 500; ++i) {
      auto ch = random_channel(rng);
      if (i % 10 == 0) {
        ch.h34 = ch.h32;
        ++ties;
      }
      auto p = random_snncrs_params(rng);
      p.alpha = 1.0 - u(rng);  // (0, 1]
      const auto f = remark_conditions(ch, p);
      trues += f.remark2_full_decode;
      if (f.remark2_full_decode != *f.gaussian_full) ++mismatches;
    }
    d = std::to_string(mismatches) + " mismatches on 500 channels (" + std::to_string(ties) +
        " exact ties, " + std::to_string(trues) + " with full decoding)";
    return mismatches == 0;
  });
}

inline CriterionResult scheme_ordering() {
  return detail::timed(4, "scheme ordering on the line network", 300.0, [&](std::string& d) {
    int points = 0, violations = 0;
    double worst_split = 0.0, worst_cut = 0.0;
    for (double gamma : {2.0, 3.0}) {
      SweepSpec spec;
      spec.gamma = gamma;
      spec.values = log_spaced(0.1, 100.0, 10);
      const auto res = sweep(spec);
      for (std::size_t i = 0; i < res.rows.size(); i += spec.schemes.size()) {
        std::map<SchemeId, double> rate;
        for (std::size_t k = 0; k < spec.schemes.size(); ++k)
          rate[res.rows[i + k].scheme] = res.rows[i + k].rate;
        ++points;
        const double split = rate[SchemeId::DF_SNNC] - rate[SchemeId::SNNC_RS_JOINT];
        worst_split = std::max(worst_split, split);
        if (split > 1e-6) ++violations;
        for (auto [s, v] : rate) {
          if (s == SchemeId::CUTSET) continue;
          worst_cut = std::max(worst_cut, v - rate[SchemeId::CUTSET]);
          if (v > rate[SchemeId::CUTSET] + 1e-6) ++violations;
        }
      }
    }
    d = std::to_string(points) + " points, " + std::to_string(violations) +
        " violations; max(DF-SNNC - SNNC-RS) = " + detail::sci(worst_split) +
        ", max(scheme - cut-set) = " + detail::sci(worst_cut);
    return violations == 0 && points == 20;
  });
}

inline CriterionResult degenerate_networks() {
  return detail::timed(5, "degenerate-network oracles", 30.0, [&](std::string& d) {
    double worst_df = 0.0, worst_direct = 0.0;
    for (double gamma : {2.0, 3.0})
      for (double P : {0.1, 1.0, 10.0, 100.0}) {
        const auto ch = line_network(0.1, 0.05, 1.0, gamma, P, P, P);
        const auto r2 = ch.without_relay2();
        const auto rs = optimize_scheme(r2, SchemeId::SNNC_RS_JOINT, default_box(SchemeId::SNNC_RS_JOINT));
        worst_df = std::max(worst_df, std::abs(rs.rate() - two_node_df_rate(r2)));

        const auto none = ch.without_relays();
        const double direct = std::log2(1 + none.h14 * none.h14 * none.P1);
        for (SchemeId s : kAllSchemes) {
          const auto r = optimize_scheme(none, s, default_box(s, 7, 2));
          worst_direct = std::max(worst_direct, std::abs(r.rate() - direct));
        }
      }
    d = "relay 2 removed: max |SNNC-RS - two-node DF| = " + detail::sci(worst_df) +
        " (tol 1e-6); relays removed: max |scheme - C(h14^2 P1)| = " + detail::sci(worst_direct) +
        " (tol 1e-9)";
    return worst_df <= 1e-6 && worst_direct <= 1e-9;
  });
}

inline CriterionResult discrete_theorems(std::uint64_t seed) {
  return detail::timed(6, "discrete theorem bounds match brute-force MI", 60.0, [&](std::string& d) {
    Rng rng(seed);
    JointSampleOptions opt;
    opt.alphabet_choices = {2};
    double worst = 0.0;
    int feasibility_mismatch = 0;
    for (int i = 0; i < 50; ++i) {
      const auto j = random_thm2_joint(rng, opt);
      auto mi = [&](const Group& a, const Group& b, const Group& c) {
        return brute_force_mi(j, a, b, c);
      };
      const auto b2 = thm2_bounds_discrete(j), o2 = thm2_bounds(mi);
      const auto b3 = thm3_bounds_discrete(j), o3 = thm3_bounds(mi);
      for (std::size_t k = 0; k < b2.items.size(); ++k)
        worst = std::max(worst, std::abs(b2.items[k].value - o2.items[k].value));
      for (std::size_t k = 0; k < b3.bounds.items.size(); ++k)
        worst = std::max(worst, std::abs(b3.bounds.items[k].value - o3.bounds.items[k].value));
      worst = std::max(worst, std::abs(b3.feasibility_margin - o3.feasibility_margin));
      feasibility_mismatch += b3.feasible != o3.feasible;
    }
    d = "max |diff| = " + detail::sci(worst) + " bits over 50 binary joints (tol 1e-9), " +
        std::to_string(feasibility_mismatch) + " feasibility mismatches";
    return worst <= 1e-9 && feasibility_mismatch == 0;
  });
}

// `run_sweep_csv` produces the CSV of one sweep run (e.g. via the CLI).
inline CriterionResult determinism(const std::function<std::string()>& run_sweep_csv) {
  return detail::timed(7, "sweep output is byte-identical across runs", 120.0, [&](std::string& d) {
    const std::string a = run_sweep_csv(), b = run_sweep_csv();
    d = std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "DIFFERENT");
    return a == b && !a.empty();
  });
}

inline std::string format(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "[%s] %d %s (%.2f s): ", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds);
  return head + r.detail;
}

inline bool run_acceptance(std::ostream& out, std::uint64_t seed,
                           const std::function<std::string()>& run_sweep_csv) {
  bool all = true;
  auto report = [&](const CriterionResult& r) {
    out << format(r) << std::endl;
    all = all && r.pass;
  };
  report(closed_form_fidelity(seed));
  report(fm_verification(seed));
  report(remark_checks(seed));
  report(scheme_ordering());
  report(degenerate_networks());
  report(discrete_theorems(seed));
  report(determinism(run_sweep_csv));
  out << (all ? "acceptance: all criteria passed" : "acceptance: FAILED") << std::endl;
  return all;
}

}  // namespace snncrs::testing
