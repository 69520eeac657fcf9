#pragma once

// Linear rate constraints with rational coefficients over rate variables
// (R, R30, R31) and symbolic mutual-information atoms; exact Fourier-Motzkin
// elimination, and numeric evaluation of the resulting systems on atom
// valuations computed from actual distributions.

#include "snncrs/info_measures.hpp"
#include "snncrs/sampling.hpp"

#include <gmpxx.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace snncrs {

using Rational = mpq_class;

inline const std::string kRate = "R";

// ---------------------------------------------------------------------------
// Atoms

struct Atom {
  std::string id;  // canonical "I(A;B|C)"
  Group a, b, c;
};

namespace detail {

// Canonical label order; X3 and Xbar are expanded by the caller.
inline Group canonical(Group g) {
  const auto& order = thm2_labels();
  auto rank = [&](const std::string& l) {
    auto it = std::find(order.begin(), order.end(), l);
    return it == order.end() ? order.size() : static_cast<std::size_t>(it - order.begin());
  };
  std::sort(g.begin(), g.end(), [&](const std::string& x, const std::string& y) {
    const auto rx = rank(x), ry = rank(y);
    return rx != ry ? rx < ry : x < y;
  });
  return g;
}

inline Group split_labels(const std::string& s) {
  Group out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (cur.empty()) throw std::invalid_argument("empty label in atom");
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace detail

inline Atom make_atom(Group a, Group b, Group c = {}) {
  if (a.empty() || b.empty()) throw std::invalid_argument("atom groups A and B must be nonempty");
  detail::require_disjoint(a, b, c);
  Atom atom{"", detail::canonical(std::move(a)), detail::canonical(std::move(b)),
            detail::canonical(std::move(c))};
  atom.id = "I(" + detail::join(atom.a) + ";" + detail::join(atom.b) +
            (atom.c.empty() ? "" : "|" + detail::join(atom.c)) + ")";
  return atom;
}

inline bool is_atom_symbol(const std::string& s) {
  return s.size() > 4 && s.rfind("I(", 0) == 0 && s.back() == ')';
}

inline Atom parse_atom(const std::string& s) {
  if (!is_atom_symbol(s)) throw std::invalid_argument("not an atom: '" + s + "'");
  const std::string body = s.substr(2, s.size() - 3);
  const auto semi = body.find(';');
  if (semi == std::string::npos) throw std::invalid_argument("atom without ';': '" + s + "'");
  const auto bar = body.find('|', semi);
  const std::string a = body.substr(0, semi);
  const std::string b = body.substr(semi + 1, bar == std::string::npos ? std::string::npos
                                                                      : bar - semi - 1);
  const std::string c = bar == std::string::npos ? "" : body.substr(bar + 1);
  return make_atom(detail::split_labels(a), detail::split_labels(b), detail::split_labels(c));
}

// ---------------------------------------------------------------------------
// Constraints and systems

enum class Sense { le, ge };

// sum_v vars[v] * v  (<= | >=)  sum_a atoms[a] * a + constant
struct LinearConstraint {
  std::string label;
  std::map<std::string, Rational> vars;
  std::map<std::string, Rational> atoms;
  Rational constant = 0;
  Sense sense = Sense::le;

  Rational coeff(const std::string& v) const {
    auto it = vars.find(v);
    return it == vars.end() ? Rational(0) : it->second;
  }
  bool has_variables() const { return !vars.empty(); }

  // Same constraint written as "<=".
  LinearConstraint as_le() const {
    if (sense == Sense::le) return *this;
    LinearConstraint out = *this;
    for (auto& [k, v] : out.vars) v = -v;
    for (auto& [k, v] : out.atoms) v = -v;
    out.constant = -out.constant;
    out.sense = Sense::le;
    return out;
  }

  void prune() {
    std::erase_if(vars, [](const auto& kv) { return kv.second == 0; });
    std::erase_if(atoms, [](const auto& kv) { return kv.second == 0; });
  }

  bool operator==(const LinearConstraint& o) const {
    return vars == o.vars && atoms == o.atoms && constant == o.constant && sense == o.sense;
  }
};

struct InequalitySystem {
  std::vector<std::string> variables;
  std::map<std::string, Atom> atoms;
  std::vector<LinearConstraint> constraints;

  bool has_variable(const std::string& v) const {
    return std::find(variables.begin(), variables.end(), v) != variables.end();
  }

  void declare_atom(const Atom& a) { atoms.emplace(a.id, a); }

  void validate() const {
    for (const auto& c : constraints) {
      for (const auto& [v, k] : c.vars)
        if (!has_variable(v))
          throw std::invalid_argument("constraint " + c.label + " uses undeclared variable " + v);
      for (const auto& [a, k] : c.atoms)
        if (!atoms.count(a))
          throw std::invalid_argument("constraint " + c.label + " uses undeclared atom " + a);
    }
  }

  const LinearConstraint& at(const std::string& label) const {
    for (const auto& c : constraints)
      if (c.label == label) return c;
    throw std::out_of_range("no constraint labeled " + label);
  }
};

// Small builder so systems read like their inequalities.
class SystemBuilder {
 public:
  explicit SystemBuilder(std::vector<std::string> vars) { sys_.variables = std::move(vars); }

  SystemBuilder& add(std::string label, std::map<std::string, Rational> vars, Sense sense,
                     std::vector<std::pair<Atom, Rational>> atoms, Rational constant = 0) {
    LinearConstraint c;
    c.label = std::move(label);
    c.vars = std::move(vars);
    c.sense = sense;
    c.constant = constant;
    for (auto& [a, k] : atoms) {
      sys_.declare_atom(a);
      c.atoms[a.id] += k;
    }
    c.prune();
    sys_.constraints.push_back(std::move(c));
    return *this;
  }

  InequalitySystem build() {
    sys_.validate();
    return sys_;
  }

 private:
  InequalitySystem sys_;
};

// ---------------------------------------------------------------------------
// Named atoms of the SNNC-RS derivation; Xbar = X1,X2 and X3 = X30,X31.

namespace atoms {
inline Atom relay1_private() { return make_atom({"X1"}, {"Y2"}, {"X2", "X30"}); }
inline Atom dest_source() { return make_atom({"X1", "X2"}, {"Yh3", "Y4"}, {"X30", "X31"}); }
inline Atom quant_useful() { return make_atom({"Yh3"}, {"X1", "X2", "Y4"}, {"X30", "X31"}); }
inline Atom relay2_given_source() { return make_atom({"X30", "X31"}, {"Y4"}, {"X1", "X2"}); }
inline Atom dest_all() { return make_atom({"X1", "X2", "X30", "X31"}, {"Y4"}); }
inline Atom dest_x31() { return make_atom({"X31"}, {"Y4"}, {"X1", "X2", "X30"}); }
inline Atom dest_source_x31() { return make_atom({"X1", "X2", "X31"}, {"Y4"}, {"X30"}); }
inline Atom relay1_pair() { return make_atom({"X1", "X30"}, {"Y2"}, {"X2"}); }
inline Atom quant_rate() { return make_atom({"Yh3"}, {"Y3"}, {"X30", "X31"}); }
inline Atom quant_penalty() { return make_atom({"Yh3"}, {"Y3"}, {"X1", "X2", "X30", "X31", "Y4"}); }
inline Atom relay1_cloud_given_source() { return make_atom({"X30"}, {"Y2"}, {"X1", "X2"}); }
inline Atom relay1_source() { return make_atom({"X1"}, {"Y2"}, {"X2"}); }
inline Atom relay1_cloud() { return make_atom({"X30"}, {"Y2"}, {"X2"}); }
inline Atom dest_source_only() { return make_atom({"X1", "X2"}, {"Y4"}); }
}  // namespace atoms

// Joint decoding at relay 1 before eliminating the quantization-index rates.
inline InequalitySystem appendix_system() {
  using namespace atoms;
  const Rational one = 1;
  return SystemBuilder({"R", "R30", "R31"})
      .add("JD1", {{"R", 1}}, Sense::le, {{relay1_private(), one}})
      .add("JD2", {{"R", 1}}, Sense::le, {{dest_source(), one}})
      .add("JD3", {{"R30", 1}, {"R31", 1}}, Sense::le,
           {{quant_useful(), one}, {relay2_given_source(), one}})
      .add("JD4", {{"R", 1}, {"R30", 1}, {"R31", 1}}, Sense::le,
           {{quant_useful(), one}, {dest_all(), one}})
      .add("JD5", {{"R31", 1}}, Sense::le, {{quant_useful(), one}, {dest_x31(), one}})
      .add("JD6", {{"R", 1}, {"R31", 1}}, Sense::le,
           {{quant_useful(), one}, {dest_source_x31(), one}})
      .add("JD9", {{"R", 1}, {"R30", 1}}, Sense::le, {{relay1_pair(), one}})
      .add("JD7", {{"R30", 1}, {"R31", 1}}, Sense::ge, {{quant_rate(), one}})
      .add("R>=0", {{"R", 1}}, Sense::ge, {})
      .add("R30>=0", {{"R30", 1}}, Sense::ge, {})
      .add("R31>=0", {{"R31", 1}}, Sense::ge, {})
      .build();
}

// Final rate region of joint decoding, including the condition under which
// the elimination is exact.
inline InequalitySystem theorem2_system(bool with_condition = true) {
  using namespace atoms;
  const Rational one = 1, minus = -1;
  SystemBuilder b({"R"});
  b.add("jd1", {{"R", 1}}, Sense::le, {{relay1_private(), one}})
      .add("jd2", {{"R", 1}}, Sense::le, {{dest_source(), one}})
      .add("jd3", {{"R", 1}}, Sense::le, {{dest_all(), one}, {quant_penalty(), minus}})
      .add("jd9", {{"R", 1}}, Sense::le,
           {{dest_x31(), one}, {quant_penalty(), minus}, {relay1_pair(), one}})
      .add("2R", {{"R", 2}}, Sense::le,
           {{dest_source_x31(), one},
            {quant_penalty(), minus},
            {relay1_cloud_given_source(), one},
            {relay1_source(), one}});
  if (with_condition)
    b.add("cond", {}, Sense::le, {{quant_penalty(), minus}, {relay2_given_source(), one}});
  return b.build();
}

// Successive decoding at relay 1.
inline InequalitySystem theorem3_system() {
  using namespace atoms;
  const Rational one = 1, minus = -1;
  return SystemBuilder({"R"})
      .add("sd1", {{"R", 1}}, Sense::le, {{relay1_private(), one}})
      .add("sd2", {{"R", 1}}, Sense::le, {{dest_source(), one}})
      .add("sd3", {{"R", 1}}, Sense::le, {{dest_all(), one}, {quant_penalty(), minus}})
      .add("sd4", {{"R", 1}}, Sense::le,
           {{dest_source_x31(), one}, {quant_penalty(), minus}, {relay1_cloud(), one}})
      .add("sd5", {}, Sense::le,
           {{dest_x31(), one}, {relay1_cloud(), one}, {quant_penalty(), minus}})
      .build();
}

// Relay 2 treated as noise: R <= min{I(X1;Y2|X2X30), I(Xbar;Y4)}.
inline InequalitySystem fallback_system() {
  using namespace atoms;
  const Rational one = 1;
  return SystemBuilder({"R"})
      .add("fb1", {{"R", 1}}, Sense::le, {{relay1_private(), one}})
      .add("fb2", {{"R", 1}}, Sense::le, {{dest_source_only(), one}})
      .build();
}

inline InequalitySystem without_constraint(InequalitySystem sys, const std::string& label) {
  const auto n = sys.constraints.size();
  std::erase_if(sys.constraints, [&](const LinearConstraint& c) { return c.label == label; });
  if (sys.constraints.size() == n) throw std::out_of_range("no constraint labeled " + label);
  return sys;
}

// ---------------------------------------------------------------------------
// Exact Fourier-Motzkin elimination

inline InequalitySystem fm_eliminate(const InequalitySystem& sys, const std::string& var) {
  if (!sys.has_variable(var)) return sys;

  InequalitySystem out;
  for (const auto& v : sys.variables)
    if (v != var) out.variables.push_back(v);
  out.atoms = sys.atoms;

  std::vector<LinearConstraint> pos, neg;
  for (const auto& c : sys.constraints) {
    const Rational k = c.coeff(var);
    if (k == 0) {
      out.constraints.push_back(c);
      continue;
    }
    LinearConstraint le = c.as_le();
    (le.coeff(var) > 0 ? pos : neg).push_back(std::move(le));
  }
  // p: k_p var + ... <= ...,  n: -|k_n| var + ... <= ...  ->  p/k_p + n/|k_n|
  for (const auto& p : pos)
    for (const auto& n : neg) {
      const Rational wp = 1 / p.coeff(var), wn = 1 / (-n.coeff(var));
      LinearConstraint c;
      c.label = "(" + p.label + "+" + n.label + ")";
      for (const auto& [v, k] : p.vars) c.vars[v] += wp * k;
      for (const auto& [v, k] : n.vars) c.vars[v] += wn * k;
      for (const auto& [a, k] : p.atoms) c.atoms[a] += wp * k;
      for (const auto& [a, k] : n.atoms) c.atoms[a] += wn * k;
      c.constant = wp * p.constant + wn * n.constant;
      c.vars.erase(var);
      c.prune();
      out.constraints.push_back(std::move(c));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Atom valuations

struct AtomValuation {
  std::map<std::string, double> values;
  std::string provenance;

  double at(const std::string& id) const {
    auto it = values.find(id);
    if (it == values.end()) throw std::out_of_range("valuation has no value for atom " + id);
    return it->second;
  }
};

inline AtomValuation atoms_from_pmf(const JointPmf& joint, const std::vector<Atom>& list,
                                    std::string provenance = "") {
  AtomValuation v;
  v.provenance = std::move(provenance);
  for (const auto& a : list) v.values[a.id] = mutual_info(joint, a.a, a.b, a.c);
  return v;
}

inline AtomValuation atoms_from_gaussian(const GaussianSystem& sys, const std::vector<Atom>& list,
                                         std::string provenance = "") {
  AtomValuation v;
  v.provenance = std::move(provenance);
  for (const auto& a : list) v.values[a.id] = gaussian_mi(sys, a.a, a.b, a.c);
  return v;
}

inline std::vector<Atom> atom_union(std::initializer_list<const InequalitySystem*> systems) {
  std::map<std::string, Atom> all;
  for (const auto* s : systems) all.insert(s->atoms.begin(), s->atoms.end());
  std::vector<Atom> out;
  for (auto& [id, a] : all) out.push_back(a);
  return out;
}

struct ValuationSampling {
  std::size_t count = 100;
  std::uint64_t seed = 1;
  JointSampleOptions joints{};
  // Every k-th sample (k > 0) uses sparse Dirichlet rows; 0 disables.
  std::size_t sparse_every = 0;
  double sparse_concentration = 0.05;
  // Structured joints appended after the random ones, per witness kind.
  std::size_t witnesses_per_kind = 0;
};

inline std::vector<AtomValuation> sample_valuations(const std::vector<Atom>& list,
                                                    const ValuationSampling& s) {
  Rng rng(s.seed);
  std::vector<AtomValuation> out;
  out.reserve(s.count);
  for (std::size_t i = 0; i < s.count; ++i) {
    JointSampleOptions opt = s.joints;
    if (s.sparse_every && i % s.sparse_every == s.sparse_every - 1)
      opt.concentration = s.sparse_concentration;
    const JointPmf j = random_thm2_joint(rng, opt);
    out.push_back(atoms_from_pmf(j, list,
                                 "seed=" + std::to_string(s.seed) + " sample=" + std::to_string(i) +
                                     " concentration=" + std::to_string(opt.concentration)));
  }
  for (WitnessKind k : {WitnessKind::relay1_hears_cloud_weakly, WitnessKind::relay2_hears_nothing})
    for (std::size_t i = 0; i < s.witnesses_per_kind; ++i)
      out.push_back(atoms_from_pmf(witness_thm2_joint(rng, k), list,
                                   "seed=" + std::to_string(s.seed) + " witness=" +
                                       std::to_string(static_cast<int>(k)) + "/" +
                                       std::to_string(i)));
  return out;
}

// ---------------------------------------------------------------------------
// Numeric evaluation

inline constexpr double kNumericZero = 1e-12;
inline constexpr double kFeasibilityTol = 1e-12;

namespace detail {

struct Row {
  std::vector<double> a;  // a . x <= b
  double b = 0.0;
};

inline std::vector<Row> numeric_fm(const std::vector<Row>& rows, std::size_t k) {
  std::vector<Row> out, pos, neg;
  for (const auto& r : rows) {
    if (std::abs(r.a[k]) <= kNumericZero)
      out.push_back(r);
    else
      (r.a[k] > 0 ? pos : neg).push_back(r);
  }
  for (const auto& p : pos)
    for (const auto& n : neg) {
      const double wp = 1.0 / p.a[k], wn = -1.0 / n.a[k];
      Row c;
      c.a.resize(p.a.size());
      for (std::size_t i = 0; i < c.a.size(); ++i) c.a[i] = wp * p.a[i] + wn * n.a[i];
      c.a[k] = 0.0;
      c.b = wp * p.b + wn * n.b;
      out.push_back(std::move(c));
    }
  for (auto& r : out) r.a[k] = 0.0;
  return out;
}

inline double rhs_value(const LinearConstraint& c, const AtomValuation& val) {
  double v = c.constant.get_d();
  for (const auto& [a, k] : c.atoms) v += k.get_d() * val.at(a);
  return v;
}

inline Row to_row(const LinearConstraint& c, const std::vector<std::string>& vars,
                  const AtomValuation& val) {
  const LinearConstraint le = c.as_le();
  Row r;
  r.a.assign(vars.size(), 0.0);
  for (const auto& [v, k] : le.vars) {
    auto it = std::find(vars.begin(), vars.end(), v);
    if (it == vars.end()) throw std::invalid_argument("undeclared variable " + v);
    r.a[static_cast<std::size_t>(it - vars.begin())] = k.get_d();
  }
  r.b = rhs_value(le, val);
  return r;
}

struct Interval {
  bool feasible = true;
  bool unbounded = false;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

// Range of x[keep] over the polyhedron (all other variables eliminated).
inline Interval project_onto(std::vector<Row> rows, std::size_t keep, std::size_t nvars) {
  for (std::size_t k = 0; k < nvars; ++k)
    if (k != keep) rows = numeric_fm(rows, k);
  Interval out;
  for (const auto& r : rows) {
    const double a = r.a[keep];
    if (std::abs(a) <= kNumericZero) {
      if (r.b < -kFeasibilityTol) out.feasible = false;
    } else if (a > 0) {
      out.hi = std::min(out.hi, r.b / a);
    } else {
      out.lo = std::max(out.lo, r.b / a);
    }
  }
  if (out.lo > out.hi + kFeasibilityTol) out.feasible = false;
  out.unbounded = std::isinf(out.hi);
  return out;
}

inline std::vector<Row> rows_with_rate_floor(const InequalitySystem& sys, const AtomValuation& val,
                                             std::optional<std::size_t> skip = std::nullopt) {
  std::vector<Row> rows;
  for (std::size_t i = 0; i < sys.constraints.size(); ++i)
    if (!skip || *skip != i) rows.push_back(to_row(sys.constraints[i], sys.variables, val));
  Row floor;
  floor.a.assign(sys.variables.size(), 0.0);
  floor.a[static_cast<std::size_t>(
      std::find(sys.variables.begin(), sys.variables.end(), kRate) - sys.variables.begin())] = -1.0;
  rows.push_back(std::move(floor));
  return rows;
}

inline std::size_t rate_index(const InequalitySystem& sys) {
  auto it = std::find(sys.variables.begin(), sys.variables.end(), kRate);
  if (it == sys.variables.end()) throw std::invalid_argument("system has no rate variable R");
  return static_cast<std::size_t>(it - sys.variables.begin());
}

}  // namespace detail

struct MaxRate {
  double value = 0.0;  // 0 when infeasible
  bool feasible = false;
  bool unbounded = false;
};

// max R subject to the system and R >= 0.
inline MaxRate max_rate(const InequalitySystem& sys, const AtomValuation& val) {
  const std::size_t r = detail::rate_index(sys);
  const auto iv =
      detail::project_onto(detail::rows_with_rate_floor(sys, val), r, sys.variables.size());
  MaxRate out;
  out.feasible = iv.feasible;
  out.unbounded = iv.feasible && iv.unbounded;
  if (out.feasible && !out.unbounded) out.value = std::max(0.0, iv.hi);
  if (out.unbounded) out.value = std::numeric_limits<double>::infinity();
  return out;
}

// Largest value of (lhs - rhs) of constraint `target` over the remaining
// constraints (plus R >= 0). Infeasible rest -> -inf, unbounded -> +inf.
inline double max_violation(const InequalitySystem& sys, std::size_t target,
                            const AtomValuation& val) {
  const std::size_t n = sys.variables.size();
  auto rows = detail::rows_with_rate_floor(sys, val, target);
  const detail::Row obj = detail::to_row(sys.constraints[target], sys.variables, val);
  for (auto& row : rows) row.a.push_back(0.0);
  detail::Row t;  // t - a.x <= -b
  t.a.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) t.a[i] = -obj.a[i];
  t.a[n] = 1.0;
  t.b = -obj.b;
  rows.push_back(std::move(t));
  const auto iv = detail::project_onto(std::move(rows), n, n + 1);
  if (!iv.feasible) return -std::numeric_limits<double>::infinity();
  return iv.hi;
}

inline bool same_max_rate(const MaxRate& a, const MaxRate& b, double tol) {
  if (a.feasible != b.feasible || a.unbounded != b.unbounded) return false;
  if (!a.feasible || a.unbounded) return true;
  return std::abs(a.value - b.value) <= tol;
}

// Greedy: a constraint is dropped when the others imply it and max-R is
// unchanged at every valuation.
inline InequalitySystem remove_redundant(const InequalitySystem& sys,
                                         const std::vector<AtomValuation>& vals,
                                         double tol = 1e-9) {
  if (vals.empty()) throw std::invalid_argument("remove_redundant needs at least one valuation");
  InequalitySystem cur = sys;
  std::size_t i = 0;
  while (i < cur.constraints.size()) {
    InequalitySystem trial = cur;
    trial.constraints.erase(trial.constraints.begin() + static_cast<std::ptrdiff_t>(i));
    bool drop = true;
    for (const auto& v : vals) {
      if (max_violation(cur, i, v) > tol ||
          !same_max_rate(max_rate(cur, v), max_rate(trial, v), tol)) {
        drop = false;
        break;
      }
    }
    if (drop)
      cur = std::move(trial);
    else
      ++i;
  }
  return cur;
}

inline std::size_t count_rate_upper_bounds(const InequalitySystem& sys) {
  std::size_t n = 0;
  for (const auto& c : sys.constraints) {
    const auto le = c.as_le();
    if (le.coeff(kRate) > 0) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Equivalence reports

struct EquivalenceReport {
  bool pass = true;
  std::size_t valuations = 0;
  std::size_t failures = 0;
  double worst_gap = 0.0;
  std::string worst_provenance;
  double tolerance = 0.0;

  nlohmann::json to_json() const {
    return {{"pass", pass},           {"valuations", valuations}, {"failures", failures},
            {"worst_gap", worst_gap}, {"tolerance", tolerance},   {"worst_provenance", worst_provenance}};
  }
};

inline EquivalenceReport verify_equivalence(const InequalitySystem& a, const InequalitySystem& b,
                                            const std::vector<AtomValuation>& vals,
                                            double tol = 1e-9) {
  EquivalenceReport rep;
  rep.tolerance = tol;
  rep.valuations = vals.size();
  for (const auto& v : vals) {
    const MaxRate ra = max_rate(a, v), rb = max_rate(b, v);
    double gap = 0.0;
    if (ra.feasible != rb.feasible || ra.unbounded != rb.unbounded)
      gap = std::numeric_limits<double>::infinity();
    else if (ra.feasible && !ra.unbounded)
      gap = std::abs(ra.value - rb.value);
    if (gap > rep.worst_gap || (rep.worst_provenance.empty() && gap > tol)) {
      rep.worst_gap = gap;
      rep.worst_provenance = v.provenance;
    }
    if (gap > tol) {
      rep.pass = false;
      ++rep.failures;
    }
  }
  return rep;
}

struct FallbackReport {
  std::size_t violating = 0;  // valuations where the condition fails
  std::size_t failures = 0;   // of those, five-bound max-R above the fallback
  double worst_excess = -std::numeric_limits<double>::infinity();
  bool pass() const { return failures == 0; }
};

// Where the condition fails, the five-bound rate must stay achievable by
// treating relay 2 as noise: max-R(five bounds) <= max-R(fallback).
inline FallbackReport verify_fallback(const std::vector<AtomValuation>& vals, double tol = 1e-9) {
  const auto five = theorem2_system(false);
  const auto fb = fallback_system();
  const auto full = theorem2_system(true);
  const auto& cond = full.at("cond");
  FallbackReport rep;
  for (const auto& v : vals) {
    if (detail::rhs_value(cond, v) >= -kFeasibilityTol) continue;
    ++rep.violating;
    const double excess = max_rate(five, v).value - max_rate(fb, v).value;
    rep.worst_excess = std::max(rep.worst_excess, excess);
    if (excess > tol) ++rep.failures;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Text format:  label: 1*R + 1*R30 <= 1*I(X1;Y2|X2,X30) + -1*I(...) + 3/2

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline Rational parse_rational(const std::string& s) {
  Rational q;
  const std::string t = trim(s);
  if (t.empty() || q.set_str(t[0] == '+' ? t.substr(1) : t, 10) != 0)
    throw std::invalid_argument("bad rational '" + s + "'");
  q.canonicalize();
  return q;
}

// Splits on " + " at parenthesis depth 0.
inline std::vector<std::string> split_terms(const std::string& side) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (std::size_t i = 0; i < side.size(); ++i) {
    const char ch = side[i];
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (depth == 0 && ch == '+' && i > 0 && side[i - 1] == ' ') {
      out.push_back(trim(cur));
      cur.clear();
      continue;
    }
    cur += ch;
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

}  // namespace detail

inline std::string to_text(const LinearConstraint& c) {
  std::ostringstream os;
  os << c.label << ": ";
  bool first = true;
  for (const auto& [v, k] : c.vars) {
    os << (first ? "" : " + ") << k.get_str() << "*" << v;
    first = false;
  }
  if (first) os << "0";
  os << (c.sense == Sense::le ? " <= " : " >= ");
  first = true;
  for (const auto& [a, k] : c.atoms) {
    os << (first ? "" : " + ") << k.get_str() << "*" << a;
    first = false;
  }
  if (c.constant != 0 || first) os << (first ? "" : " + ") << c.constant.get_str();
  return os.str();
}

inline std::string to_text(const InequalitySystem& sys) {
  std::string out;
  for (const auto& c : sys.constraints) out += to_text(c) + "\n";
  return out;
}

// Symbols of the form I(...) are atoms, anything else is a variable.
inline InequalitySystem parse_system(const std::string& text) {
  InequalitySystem sys;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + why);
    };
    const auto colon = line.find(": ");
    if (colon == std::string::npos) fail("missing 'label: '");
    LinearConstraint c;
    c.label = detail::trim(line.substr(0, colon));
    const std::string body = line.substr(colon + 2);
    auto op = body.find("<=");
    c.sense = Sense::le;
    if (op == std::string::npos) {
      op = body.find(">=");
      c.sense = Sense::ge;
    }
    if (op == std::string::npos) fail("missing <= or >=");

    auto absorb = [&](const std::string& side, int sign) {
      for (const auto& term : detail::split_terms(side)) {
        const auto star = term.find('*');
        Rational k = 1;
        std::string sym = term;
        if (star != std::string::npos && star < term.find('(')) {
          k = detail::parse_rational(term.substr(0, star));
          sym = detail::trim(term.substr(star + 1));
        } else if (term.find_first_not_of("+-0123456789/ ") == std::string::npos) {
          const Rational q = detail::parse_rational(term);
          c.constant += sign > 0 ? q : Rational(-q);
          continue;
        }
        if (is_atom_symbol(sym)) {
          const Atom a = parse_atom(sym);
          sys.declare_atom(a);
          c.atoms[a.id] += sign > 0 ? k : Rational(-k);  // atoms live on the right
        } else {
          if (sym.empty()) fail("empty symbol");
          if (!sys.has_variable(sym)) sys.variables.push_back(sym);
          c.vars[sym] += sign > 0 ? Rational(-k) : k;  // variables live on the left
        }
      }
    };
    absorb(body.substr(0, op), -1);
    absorb(body.substr(op + 2), +1);
    c.prune();
    sys.constraints.push_back(std::move(c));
  }
  return sys;
}

}  // namespace snncrs
