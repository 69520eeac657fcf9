#pragma once

// Rate expressions for the two-relay channel: DF at relay 1 combined with
// SNNC with rate splitting (SNNC-RS) at relay 2, the DF-SNNC special case
// without splitting, and the DF-DF / NNC / cut-set baselines.
//
// Closed forms use C(x) = log2(1 + x). Their log-det counterparts are built
// on a GaussianSystem with Field::complex, which has the same convention.

#include "snncrs/channel_model.hpp"
#include "snncrs/info_measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace snncrs {

inline double cap(double x) {
  if (!(x >= 0.0)) throw std::domain_error("C(x) requires x >= 0");
  return std::log2(1.0 + x);
}

struct SnncRsParams {
  double alpha = 0.0;  // power fraction of the cloud-center codeword X30
  double beta = 0.0;   // coherent-combining fraction between X1 and X2
  double nhat3 = 1.0;  // quantization noise variance at relay 2

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must be in [0,1]");
    if (!(nhat3 > 0.0) || !std::isfinite(nhat3))
      throw std::invalid_argument("nhat3 must be finite and > 0");
  }
};

struct RateBound {
  std::string name;
  int multiplier = 1;  // multiplier * R <= value
  double value = 0.0;
};

struct RateBounds {
  std::vector<RateBound> items;

  // max(0, min_i value_i / multiplier_i)
  double rate() const {
    if (items.empty()) return 0.0;
    double r = std::numeric_limits<double>::infinity();
    for (const auto& b : items) r = std::min(r, b.value / b.multiplier);
    return std::max(0.0, r);
  }

  // First bound attaining the minimum.
  const RateBound& binding() const {
    if (items.empty()) throw std::logic_error("empty bound set");
    std::size_t best = 0;
    for (std::size_t i = 1; i < items.size(); ++i)
      if (items[i].value / items[i].multiplier < items[best].value / items[best].multiplier)
        best = i;
    return items[best];
  }

  const RateBound& at(std::string_view name) const {
    for (const auto& b : items)
      if (b.name == name) return b;
    throw std::out_of_range("no bound named " + std::string(name));
  }

  void add(std::string name, double value, int multiplier = 1) {
    for (const auto& b : items)
      if (b.name == name) throw std::logic_error("duplicate bound name " + name);
    if (!std::isfinite(value)) throw std::domain_error("bound " + name + " is not finite");
    items.push_back({std::move(name), multiplier, value});
  }
};

inline double snncrs_rate(const RateBounds& bounds) { return bounds.rate(); }

enum class SchemeId { SNNC_RS_JOINT, SNNC_RS_SUCCESSIVE, DF_SNNC, DF_DF, NNC, CUTSET };

inline constexpr std::array<SchemeId, 6> kAllSchemes{
    SchemeId::SNNC_RS_JOINT, SchemeId::SNNC_RS_SUCCESSIVE, SchemeId::DF_SNNC,
    SchemeId::DF_DF,         SchemeId::NNC,                SchemeId::CUTSET};

inline std::string to_string(SchemeId s) {
  switch (s) {
    case SchemeId::SNNC_RS_JOINT: return "SNNC_RS_JOINT";
    case SchemeId::SNNC_RS_SUCCESSIVE: return "SNNC_RS_SUCCESSIVE";
    case SchemeId::DF_SNNC: return "DF_SNNC";
    case SchemeId::DF_DF: return "DF_DF";
    case SchemeId::NNC: return "NNC";
    case SchemeId::CUTSET: return "CUTSET";
  }
  return "?";
}

inline SchemeId parse_scheme(std::string_view name) {
  for (SchemeId s : kAllSchemes)
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// SNNC-RS, Gaussian closed form

namespace detail {

// Received power at the destination from X1, X2 (correlated by beta) plus
// `relay_power` worth of h34^2 P3.
inline double dest_power(const ChannelGains& ch, double beta, double relay_fraction) {
  return ch.h14 * ch.h14 * ch.P1 + ch.h24 * ch.h24 * ch.P2 +
         2.0 * ch.h14 * ch.h24 * std::sqrt(beta * ch.P1 * ch.P2) +
         relay_fraction * ch.h34 * ch.h34 * ch.P3;
}

}  // namespace detail

inline RateBounds snncrs_bounds_gaussian(const ChannelGains& ch, const SnncRsParams& p) {
  ch.validate();
  p.validate();
  const double a = p.alpha, ab = 1.0 - p.alpha;
  const double b = p.beta, bb = 1.0 - p.beta;
  const double n = p.nhat3;
  const double P1 = ch.P1, P2 = ch.P2, P3 = ch.P3;
  const double g12 = ch.h12 * ch.h12 * P1;  // h12^2 P1
  const double g32 = ch.h32 * ch.h32 * P3;  // h32^2 P3
  const double penalty = cap(1.0 / n);

  RateBounds out;
  out.add("B1", cap(bb * g12 / (1.0 + ab * g32)));

  const double cross = ch.h13 * ch.h24 - ch.h23 * ch.h14;
  out.add("B2", cap(P1 * (ch.h13 * ch.h13 / (1.0 + n) + ch.h14 * ch.h14) +
                    P2 * (ch.h23 * ch.h23 / (1.0 + n) + ch.h24 * ch.h24) +
                    2.0 * std::sqrt(b * P1 * P2) * (ch.h13 * ch.h23 / (1.0 + n) + ch.h14 * ch.h24) +
                    bb * P1 * P2 / (1.0 + n) * cross * cross));

  out.add("B3", cap(detail::dest_power(ch, b, 1.0)) - penalty);
  out.add("B4", cap(ab * ch.h34 * ch.h34 * P3) + cap((bb * g12 + a * g32) / (1.0 + ab * g32)) -
                    penalty);
  out.add("B5",
          cap(detail::dest_power(ch, b, ab)) - penalty + cap(a * g32 / (1.0 + ab * g32)) +
              cap(bb * g12 / (1.0 + g32)),
          2);
  return out;
}

// DF-SNNC without rate splitting: alpha = 0, bounds B1-B3.
inline RateBounds dfsnnc_bounds_gaussian(const ChannelGains& ch, double beta, double nhat3) {
  RateBounds full = snncrs_bounds_gaussian(ch, {0.0, beta, nhat3});
  full.items.resize(3);
  return full;
}

// Jointly Gaussian realization of the SNNC-RS input structure:
//   X2 = sqrt(P2) U2,  X1 = sqrt(beta P1) U2 + sqrt((1-beta) P1) U1,
//   X30 ~ N(0, alpha P3), X31 ~ N(0, (1-alpha) P3), X3 = X30 + X31,
//   Yh3 = Y3 + N(0, nhat3).
inline GaussianSystem snncrs_system(const ChannelGains& ch, const SnncRsParams& p,
                                    Field field = Field::complex) {
  ch.validate();
  p.validate();
  GaussianSystem sys(field);
  const auto u1 = sys.add_source();
  const auto u2 = sys.add_source();
  sys.add_variable("X2", {{u2, std::sqrt(ch.P2)}});
  sys.add_variable("X1", {{u2, std::sqrt(p.beta * ch.P1)}, {u1, std::sqrt((1 - p.beta) * ch.P1)}});
  sys.add_input("X30", p.alpha * ch.P3);
  sys.add_input("X31", (1 - p.alpha) * ch.P3);
  sys.add_output("Y2", {{"X1", ch.h12}, {"X30", ch.h32}, {"X31", ch.h32}});
  sys.add_output("Y3", {{"X1", ch.h13}, {"X2", ch.h23}});
  sys.add_output("Y4", {{"X1", ch.h14}, {"X2", ch.h24}, {"X30", ch.h34}, {"X31", ch.h34}});
  sys.add_quantized("Yh3", "Y3", p.nhat3);
  return sys;
}

// ---------------------------------------------------------------------------
// Theorem-level bounds over an arbitrary mutual-information evaluator
// mi(A, B, C) -> I(A;B|C). Labels: X1 X2 X30 X31 Y2 Y3 Y4 Yh3.

template <class Mi>
RateBounds thm2_bounds(Mi&& mi) {
  const Group xbar{"X1", "X2"}, x3{"X30", "X31"};
  const double p = mi(Group{"Yh3"}, Group{"Y3"}, Group{"X1", "X2", "X30", "X31", "Y4"});
  const double relay_pair = mi(Group{"X1", "X30"}, Group{"Y2"}, Group{"X2"});
  RateBounds out;
  out.add("B1", mi(Group{"X1"}, Group{"Y2"}, Group{"X2", "X30"}));
  out.add("B2", mi(xbar, Group{"Yh3", "Y4"}, x3));
  out.add("B3", mi(Group{"X1", "X2", "X30", "X31"}, Group{"Y4"}, Group{}) - p);
  out.add("B4", mi(Group{"X31"}, Group{"Y4"}, Group{"X1", "X2", "X30"}) - p + relay_pair);
  out.add("B5", mi(Group{"X1", "X2", "X31"}, Group{"Y4"}, Group{"X30"}) - p + relay_pair, 2);
  return out;
}

// Bounds of the DF-SNNC scheme without splitting, X3 carried by `x3`.
template <class Mi>
RateBounds k1_bounds(Mi&& mi, const Group& x3) {
  const Group xbar{"X1", "X2"};
  Group all = xbar;
  all.insert(all.end(), x3.begin(), x3.end());
  Group cond = all;
  cond.push_back("Y4");
  RateBounds out;
  out.add("B1", mi(Group{"X1"}, Group{"Y2"}, Group{"X2"}));
  out.add("B2", mi(xbar, Group{"Yh3", "Y4"}, x3));
  out.add("B3", mi(all, Group{"Y4"}, Group{}) - mi(Group{"Yh3"}, Group{"Y3"}, cond));
  return out;
}

struct Thm3Result {
  RateBounds bounds;
  bool feasible = false;
  double feasibility_margin = 0.0;
  double rate() const { return feasible ? bounds.rate() : 0.0; }
};

// Successive decoding at relay 1. The feasibility constraint is applied
// non-strictly, like every other rate constraint.
template <class Mi>
Thm3Result thm3_bounds(Mi&& mi) {
  const Group xbar{"X1", "X2"}, x3{"X30", "X31"};
  const double p = mi(Group{"Yh3"}, Group{"Y3"}, Group{"X1", "X2", "X30", "X31", "Y4"});
  const double cloud = mi(Group{"X30"}, Group{"Y2"}, Group{"X2"});
  Thm3Result out;
  out.bounds.add("S1", mi(Group{"X1"}, Group{"Y2"}, Group{"X2", "X30"}));
  out.bounds.add("S2", mi(xbar, Group{"Yh3", "Y4"}, x3));
  out.bounds.add("S3", mi(Group{"X1", "X2", "X30", "X31"}, Group{"Y4"}, Group{}) - p);
  out.bounds.add("S4", mi(Group{"X1", "X2", "X31"}, Group{"Y4"}, Group{"X30"}) - p + cloud);
  out.feasibility_margin = mi(Group{"X31"}, Group{"Y4"}, Group{"X1", "X2", "X30"}) + cloud - p;
  out.feasible = out.feasibility_margin >= -1e-12;
  return out;
}

struct RemarkFlags {
  bool remark2_full_decode = false;  // I(X30;Y4|Xbar) < I(X30;Y2|Xbar)
  bool remark3 = false;              // I(X30;Y4) < I(X30;Y2|X2)
  bool remark4 = false;              // I(Xbar X30;Y4) < I(X1 X30;Y2|X2)
  std::optional<bool> gaussian_full;  // h32 > h34
  bool condition_not_needed = false;  // I(Yh3;Y3|Xbar X3 Y4) <= I(X3;Y4|Xbar)
};

namespace detail {
inline bool strictly_less(double a, double b) { return a < b - 1e-12; }
}  // namespace detail

template <class Mi>
RemarkFlags remark_conditions_mi(Mi&& mi) {
  const Group xbar{"X1", "X2"};
  RemarkFlags f;
  f.remark2_full_decode = detail::strictly_less(mi(Group{"X30"}, Group{"Y4"}, xbar),
                                                mi(Group{"X30"}, Group{"Y2"}, xbar));
  f.remark3 = detail::strictly_less(mi(Group{"X30"}, Group{"Y4"}, Group{}),
                                    mi(Group{"X30"}, Group{"Y2"}, Group{"X2"}));
  f.remark4 = detail::strictly_less(mi(Group{"X1", "X2", "X30"}, Group{"Y4"}, Group{}),
                                    mi(Group{"X1", "X30"}, Group{"Y2"}, Group{"X2"}));
  const double p = mi(Group{"Yh3"}, Group{"Y3"}, Group{"X1", "X2", "X30", "X31", "Y4"});
  f.condition_not_needed = p <= mi(Group{"X30", "X31"}, Group{"Y4"}, xbar) + 1e-12;
  return f;
}

inline auto gaussian_mi_fn(const GaussianSystem& sys) {
  return [&sys](const Group& a, const Group& b, const Group& c) {
    return gaussian_mi(sys, a, b, c);
  };
}

inline auto discrete_mi_fn(const JointPmf& joint) {
  return [&joint](const Group& a, const Group& b, const Group& c) {
    return mutual_info(joint, a, b, c);
  };
}

inline RemarkFlags remark_conditions(const ChannelGains& ch, const SnncRsParams& p) {
  const GaussianSystem sys = snncrs_system(ch, p);
  RemarkFlags f = remark_conditions_mi(gaussian_mi_fn(sys));
  f.gaussian_full = ch.h32 > ch.h34;
  return f;
}

class FactorizationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Checks p(x1 x2) p(x30 x31) p(yh3|x30 x31 y3) p(y2 y3 y4|x1 x2 x30 x31).
inline void check_thm2_factorization(const JointPmf& joint, double tol = 1e-9) {
  for (const auto& l : thm2_labels())
    if (!joint.has(l)) throw LabelError("joint pmf is missing label '" + l + "'");
  const double inputs = mutual_info(joint, {"X1", "X2"}, {"X30", "X31"});
  if (inputs > tol)
    throw FactorizationError("conditional-independence test failed: I(X1,X2;X30,X31) = " +
                             std::to_string(inputs));
  const double quant =
      mutual_info(joint, {"Yh3"}, {"X1", "X2", "Y2", "Y4"}, {"X30", "X31", "Y3"});
  if (quant > tol)
    throw FactorizationError(
        "conditional-independence test failed: I(Yh3;X1,X2,Y2,Y4|X30,X31,Y3) = " +
        std::to_string(quant));
}

inline RateBounds thm2_bounds_discrete(const JointPmf& joint) {
  check_thm2_factorization(joint);
  return thm2_bounds(discrete_mi_fn(joint));
}

inline Thm3Result thm3_bounds_discrete(const JointPmf& joint) {
  check_thm2_factorization(joint);
  return thm3_bounds(discrete_mi_fn(joint));
}

inline RemarkFlags remark_conditions(const JointPmf& joint) {
  check_thm2_factorization(joint);
  return remark_conditions_mi(discrete_mi_fn(joint));
}

// Successive decoding evaluated on the Gaussian realization (not a closed form).
inline Thm3Result thm3_bounds_gaussian(const ChannelGains& ch, const SnncRsParams& p) {
  const GaussianSystem sys = snncrs_system(ch, p);
  return thm3_bounds(gaussian_mi_fn(sys));
}

// ---------------------------------------------------------------------------
// DF at both relays, sequential decoding 1 -> 2 -> 3 -> 4.
//
//   X1 = sqrt(g1a P1) Ua + sqrt(g1b P1) Ub + sqrt(g1c P1) Uc
//   X2 = sqrt(g2 P2) Ub + sqrt((1-g2) P2) Uc
//   X3 = sqrt(P3) Uc

struct DfSplits {
  double g1a = 1.0, g1b = 0.0, g1c = 0.0;  // source split: fresh / relay-1 / relay-2 coherent
  double g2 = 1.0;                         // relay-1 split

  void validate() const {
    for (double g : {g1a, g1b, g1c, g2})
      if (!(g >= 0.0 && g <= 1.0)) throw std::invalid_argument("DF split outside [0,1]");
    if (std::abs(g1a + g1b + g1c - 1.0) > 1e-9)
      throw std::invalid_argument("source DF splits must sum to 1");
  }

  // (s, t, g2) -> simplex point g1a = s, g1b = (1-s) t, g1c = (1-s)(1-t)
  static DfSplits from_box(double s, double t, double g2) {
    return {s, (1.0 - s) * t, (1.0 - s) * (1.0 - t), g2};
  }
};

inline RateBounds dfdf_bounds_gaussian(const ChannelGains& ch, const DfSplits& s) {
  ch.validate();
  s.validate();
  const double P1 = ch.P1, P2 = ch.P2, P3 = ch.P3;
  const double g2b = 1.0 - s.g2;
  RateBounds out;
  out.add("relay1", cap(s.g1a * ch.h12 * ch.h12 * P1));
  const double coh3 = std::sqrt(s.g1b * P1) * ch.h13 + std::sqrt(s.g2 * P2) * ch.h23;
  out.add("relay2", cap(s.g1a * ch.h13 * ch.h13 * P1 + coh3 * coh3));
  const double cohb = std::sqrt(s.g1b * P1) * ch.h14 + std::sqrt(s.g2 * P2) * ch.h24;
  const double cohc =
      std::sqrt(s.g1c * P1) * ch.h14 + std::sqrt(g2b * P2) * ch.h24 + std::sqrt(P3) * ch.h34;
  out.add("destination", cap(s.g1a * ch.h14 * ch.h14 * P1 + cohb * cohb + cohc * cohc));
  return out;
}

inline double dfdf_rate_gaussian(const ChannelGains& ch, const DfSplits& s) {
  return dfdf_bounds_gaussian(ch, s).rate();
}

// Latent-codeword realization of the DF-DF inputs (for log-det checks).
inline GaussianSystem dfdf_system(const ChannelGains& ch, const DfSplits& s,
                                  Field field = Field::complex) {
  ch.validate();
  s.validate();
  GaussianSystem sys(field);
  sys.add_input("Ua", 1.0);
  sys.add_input("Ub", 1.0);
  sys.add_input("Uc", 1.0);
  const double P1 = ch.P1, P2 = ch.P2, P3 = ch.P3;
  // express X's through the latent codewords
  sys.add_output("X1",
                 {{"Ua", std::sqrt(s.g1a * P1)}, {"Ub", std::sqrt(s.g1b * P1)},
                  {"Uc", std::sqrt(s.g1c * P1)}},
                 0.0);
  sys.add_output("X2", {{"Ub", std::sqrt(s.g2 * P2)}, {"Uc", std::sqrt((1 - s.g2) * P2)}}, 0.0);
  sys.add_output("X3", {{"Uc", std::sqrt(P3)}}, 0.0);
  sys.add_output("Y2", {{"X1", ch.h12}, {"X3", ch.h32}});
  sys.add_output("Y3", {{"X1", ch.h13}, {"X2", ch.h23}});
  sys.add_output("Y4", {{"X1", ch.h14}, {"X2", ch.h24}, {"X3", ch.h34}});
  return sys;
}

// ---------------------------------------------------------------------------
// Noisy network coding at both relays: independent Gaussian inputs,
// Yhk = Yk + N(0, nhat_k). One bound per set S of relays on the source side:
//   R <= I(X1 X_S; Yh_{S^c} Y4 | X_{S^c}) - I(Y_S; Yh_S | X1 X2 X3 Yh_{S^c} Y4)

struct RelaySet {
  bool relay1 = true;  // node 2
  bool relay2 = true;  // node 3
};

inline GaussianSystem nnc_system(const ChannelGains& ch, double nhat2, double nhat3,
                                 RelaySet active = {}, Field field = Field::complex) {
  ch.validate();
  GaussianSystem sys(field);
  sys.add_input("X1", ch.P1);
  sys.add_input("X2", active.relay1 ? ch.P2 : 0.0);
  sys.add_input("X3", active.relay2 ? ch.P3 : 0.0);
  sys.add_output("Y2", {{"X1", ch.h12}, {"X3", ch.h32}});
  sys.add_output("Y3", {{"X1", ch.h13}, {"X2", ch.h23}});
  sys.add_output("Y4", {{"X1", ch.h14}, {"X2", ch.h24}, {"X3", ch.h34}});
  if (active.relay1) sys.add_quantized("Yh2", "Y2", nhat2);
  if (active.relay2) sys.add_quantized("Yh3", "Y3", nhat3);
  return sys;
}

inline RateBounds nnc_bounds_gaussian(const ChannelGains& ch, double nhat2, double nhat3,
                                      RelaySet active = {}) {
  if (!(nhat2 > 0.0) || !(nhat3 > 0.0) || !std::isfinite(nhat2) || !std::isfinite(nhat3))
    throw std::invalid_argument("NNC quantization variances must be finite and > 0");
  const GaussianSystem sys = nnc_system(ch, nhat2, nhat3, active);

  struct Relay {
    bool on;
    const char *x, *y, *yh, *tag;
  };
  const std::array<Relay, 2> relays{Relay{active.relay1, "X2", "Y2", "Yh2", "2"},
                                    Relay{active.relay2, "X3", "Y3", "Yh3", "3"}};
  RateBounds out;
  for (unsigned mask = 0; mask < 4; ++mask) {
    Group xs{"X1"}, xsc, ys, yhs, yhsc;
    std::string name = "S={";
    bool skip = false;
    for (std::size_t k = 0; k < 2; ++k) {
      const bool in_s = mask & (1u << k);
      if (!relays[k].on) {
        if (in_s) skip = true;
        continue;
      }
      if (in_s) {
        xs.push_back(relays[k].x);
        ys.push_back(relays[k].y);
        yhs.push_back(relays[k].yh);
        if (name.size() > 3) name += ",";
        name += relays[k].tag;
      } else {
        xsc.push_back(relays[k].x);
        yhsc.push_back(relays[k].yh);
      }
    }
    if (skip) continue;
    name += "}";
    Group received = yhsc;
    received.push_back("Y4");
    double value = gaussian_mi(sys, xs, received, xsc);
    if (!ys.empty()) {
      Group cond{"X1", "X2", "X3"};
      cond.insert(cond.end(), received.begin(), received.end());
      value -= gaussian_mi(sys, ys, yhs, cond);
    }
    out.add(name, value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cut-set bound for a given input correlation (the bound itself is the
// maximum over correlations; see optimizer.hpp).

struct InputCorrelation {
  double r12 = 0.0, r13 = 0.0, r23 = 0.0;
};

inline Eigen::Matrix3d input_covariance(const ChannelGains& ch, const InputCorrelation& c) {
  const double s1 = std::sqrt(ch.P1), s2 = std::sqrt(ch.P2), s3 = std::sqrt(ch.P3);
  Eigen::Matrix3d cov;
  cov << ch.P1, c.r12 * s1 * s2, c.r13 * s1 * s3,  //
      c.r12 * s1 * s2, ch.P2, c.r23 * s2 * s3,     //
      c.r13 * s1 * s3, c.r23 * s2 * s3, ch.P3;
  return cov;
}

inline bool correlation_is_psd(const InputCorrelation& c) {
  for (double r : {c.r12, c.r13, c.r23})
    if (!(r >= -1.0 && r <= 1.0)) return false;
  Eigen::Matrix3d corr;
  corr << 1, c.r12, c.r13, c.r12, 1, c.r23, c.r13, c.r23, 1;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(corr, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -1e-12;
}

inline GaussianSystem cutset_system(const ChannelGains& ch, const InputCorrelation& c,
                                    Field field = Field::complex) {
  ch.validate();
  if (!correlation_is_psd(c)) throw NotPsdError("input correlation triple is not PSD");
  GaussianSystem sys = GaussianSystem::from_inputs({"X1", "X2", "X3"}, input_covariance(ch, c), field);
  sys.add_output("Y2", {{"X1", ch.h12}, {"X3", ch.h32}});
  sys.add_output("Y3", {{"X1", ch.h13}, {"X2", ch.h23}});
  sys.add_output("Y4", {{"X1", ch.h14}, {"X2", ch.h24}, {"X3", ch.h34}});
  return sys;
}

inline RateBounds cutset_bounds_gaussian(const ChannelGains& ch, const InputCorrelation& c) {
  const GaussianSystem sys = cutset_system(ch, c);
  RateBounds out;
  out.add("cut{1}", gaussian_mi(sys, {"X1"}, {"Y2", "Y3", "Y4"}, {"X2", "X3"}));
  out.add("cut{1,2}", gaussian_mi(sys, {"X1", "X2"}, {"Y3", "Y4"}, {"X3"}));
  out.add("cut{1,3}", gaussian_mi(sys, {"X1", "X3"}, {"Y2", "Y4"}, {"X2"}));
  out.add("cut{1,2,3}", gaussian_mi(sys, {"X1", "X2", "X3"}, {"Y4"}, {}));
  return out;
}

inline double cutset_bound_gaussian(const ChannelGains& ch, const InputCorrelation& c) {
  return cutset_bounds_gaussian(ch, c).rate();
}

// ---------------------------------------------------------------------------
// Scheme evaluation over a flat parameter vector.
//
// Every scheme can also run with some relays silent (zero power, no
// quantization), and the SNNC variants can decode while treating relay 2
// as noise. With fallbacks enabled the scheme rate is the best of these
// configurations; the theorem configuration is always listed first so ties
// keep it.

struct SchemeEvaluation {
  std::string config;
  RateBounds bounds;
  double rate = 0.0;
  InputCorrelation induced;  // input correlation of the winning configuration

  std::string binding() const { return config + "/" + bounds.binding().name; }
};

inline std::vector<std::string> scheme_parameter_names(SchemeId s) {
  switch (s) {
    case SchemeId::SNNC_RS_JOINT:
    case SchemeId::SNNC_RS_SUCCESSIVE: return {"alpha", "beta", "nhat3"};
    case SchemeId::DF_SNNC: return {"beta", "nhat3"};
    case SchemeId::DF_DF: return {"s", "t", "g2"};
    case SchemeId::NNC: return {"nhat2", "nhat3"};
    case SchemeId::CUTSET: return {"rho12", "rho13", "rho23"};
  }
  return {};
}

namespace detail {

inline void offer(SchemeEvaluation& best, bool& have, std::string config, RateBounds bounds,
                  InputCorrelation induced, std::optional<double> rate_override = std::nullopt) {
  const double r = rate_override ? *rate_override : bounds.rate();
  if (!have || r > best.rate) {
    best = SchemeEvaluation{std::move(config), std::move(bounds), r, induced};
    have = true;
  }
}

// Configurations shared by the SNNC variants, given beta and nhat3.
inline void snnc_fallbacks(const ChannelGains& ch, double alpha, double beta, double nhat3,
                           SchemeEvaluation& best, bool& have) {
  const double bb = 1.0 - beta;
  const double g32 = ch.h32 * ch.h32 * ch.P3;
  const InputCorrelation coherent{std::sqrt(beta), 0.0, 0.0};

  RateBounds noise;
  noise.add("relay1", cap(bb * ch.h12 * ch.h12 * ch.P1 / (1.0 + (1.0 - alpha) * g32)));
  noise.add("destination",
            cap(dest_power(ch, beta, 0.0) / (1.0 + ch.h34 * ch.h34 * ch.P3)));
  offer(best, have, "noise", std::move(noise), coherent);

  RateBounds r2off;
  r2off.add("relay1", cap(bb * ch.h12 * ch.h12 * ch.P1));
  r2off.add("destination", cap(dest_power(ch, beta, 0.0)));
  offer(best, have, "relay2-silent", std::move(r2off), coherent);

  RateBounds r1off;
  r1off.add("relay2", cap(ch.P1 * (ch.h13 * ch.h13 / (1.0 + nhat3) + ch.h14 * ch.h14)));
  r1off.add("destination",
            cap(ch.h14 * ch.h14 * ch.P1 + ch.h34 * ch.h34 * ch.P3) - cap(1.0 / nhat3));
  offer(best, have, "relay1-silent", std::move(r1off), {});

  RateBounds direct;
  direct.add("direct", cap(ch.h14 * ch.h14 * ch.P1));
  offer(best, have, "direct", std::move(direct), {});
}

inline void require_arity(SchemeId s, std::span<const double> x) {
  if (x.size() != scheme_parameter_names(s).size())
    throw std::invalid_argument(to_string(s) + " expects " +
                                std::to_string(scheme_parameter_names(s).size()) +
                                " parameters, got " + std::to_string(x.size()));
}

}  // namespace detail

inline SchemeEvaluation evaluate_scheme(const ChannelGains& ch, SchemeId scheme,
                                        std::span<const double> x, bool fallbacks = true) {
  detail::require_arity(scheme, x);
  SchemeEvaluation best;
  bool have = false;
  switch (scheme) {
    case SchemeId::SNNC_RS_JOINT: {
      const SnncRsParams p{x[0], x[1], x[2]};
      detail::offer(best, have, "full", snncrs_bounds_gaussian(ch, p),
                    {std::sqrt(p.beta), 0.0, 0.0});
      if (fallbacks) detail::snnc_fallbacks(ch, p.alpha, p.beta, p.nhat3, best, have);
      break;
    }
    case SchemeId::SNNC_RS_SUCCESSIVE: {
      const SnncRsParams p{x[0], x[1], x[2]};
      Thm3Result t = thm3_bounds_gaussian(ch, p);
      const double r = t.rate();
      detail::offer(best, have, t.feasible ? "full" : "full-infeasible", std::move(t.bounds),
                    {std::sqrt(p.beta), 0.0, 0.0}, r);
      if (fallbacks) detail::snnc_fallbacks(ch, p.alpha, p.beta, p.nhat3, best, have);
      break;
    }
    case SchemeId::DF_SNNC: {
      detail::offer(best, have, "full", dfsnnc_bounds_gaussian(ch, x[0], x[1]),
                    {std::sqrt(x[0]), 0.0, 0.0});
      if (fallbacks) detail::snnc_fallbacks(ch, 0.0, x[0], x[1], best, have);
      break;
    }
    case SchemeId::DF_DF: {
      const DfSplits s = DfSplits::from_box(x[0], x[1], x[2]);
      detail::offer(best, have, "both", dfdf_bounds_gaussian(ch, s),
                    {std::sqrt(s.g1b * s.g2) + std::sqrt(s.g1c * (1.0 - s.g2)), std::sqrt(s.g1c),
                     std::sqrt(1.0 - s.g2)});
      if (fallbacks) {
        const double frac = x[0], coh = 1.0 - x[0];
        RateBounds r1;
        r1.add("relay1", cap(frac * ch.h12 * ch.h12 * ch.P1));
        r1.add("destination", cap(ch.h14 * ch.h14 * ch.P1 + ch.h24 * ch.h24 * ch.P2 +
                                  2.0 * ch.h14 * ch.h24 * std::sqrt(coh * ch.P1 * ch.P2)));
        detail::offer(best, have, "relay1-only", std::move(r1), {std::sqrt(coh), 0.0, 0.0});
        RateBounds r2;
        r2.add("relay2", cap(frac * ch.h13 * ch.h13 * ch.P1));
        r2.add("destination", cap(ch.h14 * ch.h14 * ch.P1 + ch.h34 * ch.h34 * ch.P3 +
                                  2.0 * ch.h14 * ch.h34 * std::sqrt(coh * ch.P1 * ch.P3)));
        detail::offer(best, have, "relay2-only", std::move(r2), {0.0, std::sqrt(coh), 0.0});
        RateBounds direct;
        direct.add("direct", cap(ch.h14 * ch.h14 * ch.P1));
        detail::offer(best, have, "direct", std::move(direct), {});
      }
      break;
    }
    case SchemeId::NNC: {
      detail::offer(best, have, "both", nnc_bounds_gaussian(ch, x[0], x[1]), {});
      if (fallbacks) {
        detail::offer(best, have, "relay1-only", nnc_bounds_gaussian(ch, x[0], x[1], {true, false}),
                      {});
        detail::offer(best, have, "relay2-only", nnc_bounds_gaussian(ch, x[0], x[1], {false, true}),
                      {});
        RateBounds direct;
        direct.add("direct", cap(ch.h14 * ch.h14 * ch.P1));
        detail::offer(best, have, "direct", std::move(direct), {});
      }
      break;
    }
    case SchemeId::CUTSET: {
      const InputCorrelation c{x[0], x[1], x[2]};
      if (!correlation_is_psd(c)) {
        RateBounds none;
        none.add("not-psd", 0.0);
        detail::offer(best, have, "cutset", std::move(none), c);
      } else {
        detail::offer(best, have, "cutset", cutset_bounds_gaussian(ch, c), c);
      }
      break;
    }
  }
  return best;
}

}  // namespace snncrs
