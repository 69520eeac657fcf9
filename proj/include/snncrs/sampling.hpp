#pragma once

// Seeded random channels, parameters and factored joint distributions.

#include "snncrs/channel_model.hpp"
#include "snncrs/info_measures.hpp"
#include "snncrs/schemes.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace snncrs {

using Rng = std::mt19937_64;

inline std::vector<double> dirichlet(Rng& rng, std::size_t n, double concentration = 1.0) {
  std::gamma_distribution<double> g(concentration, 1.0);
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& x : v) s += (x = g(rng));
  if (!(s > 0.0)) {  // every draw underflowed: fall back to a random point mass
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::fill(v.begin(), v.end(), 0.0);
    v[pick(rng)] = 1.0;
    return v;
  }
  for (auto& x : v) x /= s;
  return v;
}

inline double log_uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

// Gains U[0, gain_max], powers U[p_lo, p_hi].
inline ChannelGains random_channel(Rng& rng, double gain_max = 3.0, double p_lo = 0.1,
                                   double p_hi = 10.0) {
  std::uniform_real_distribution<double> g(0.0, gain_max), p(p_lo, p_hi);
  ChannelGains ch;
  for (double* h : {&ch.h12, &ch.h13, &ch.h14, &ch.h23, &ch.h24, &ch.h32, &ch.h34}) *h = g(rng);
  ch.P1 = p(rng);
  ch.P2 = p(rng);
  ch.P3 = p(rng);
  return ch;
}

// alpha, beta U[0,1]; nhat3 log-uniform on [1e-2, 1e2].
inline SnncRsParams random_snncrs_params(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SnncRsParams p;
  p.alpha = u(rng);
  p.beta = u(rng);
  p.nhat3 = log_uniform(rng, 1e-2, 1e2);
  return p;
}

inline ConditionalPmf random_conditional(Rng& rng, Group cond, std::vector<std::size_t> cond_sizes,
                                         Group out, std::vector<std::size_t> out_sizes,
                                         double concentration = 1.0) {
  ConditionalPmf c{std::move(cond), std::move(cond_sizes), std::move(out), std::move(out_sizes), {}};
  c.table.reserve(c.rows() * c.cols());
  for (std::size_t r = 0; r < c.rows(); ++r) {
    const auto row = dirichlet(rng, c.cols(), concentration);
    c.table.insert(c.table.end(), row.begin(), row.end());
  }
  return c;
}

struct JointSampleOptions {
  std::vector<std::size_t> alphabet_choices{2, 3};
  double concentration = 1.0;
};

// Random joint with the input/quantizer factorization of the SNNC-RS scheme.
inline JointPmf random_thm2_joint(Rng& rng, const JointSampleOptions& opt = {}) {
  std::uniform_int_distribution<std::size_t> pick(0, opt.alphabet_choices.size() - 1);
  auto size = [&] { return opt.alphabet_choices[pick(rng)]; };
  const std::size_t n1 = size(), n2 = size(), n30 = size(), n31 = size();
  const std::size_t ny2 = size(), ny3 = size(), ny4 = size(), nh = size();
  const double a = opt.concentration;
  const JointPmf pin({"X1", "X2"}, {n1, n2}, dirichlet(rng, n1 * n2, a));
  const JointPmf pr({"X30", "X31"}, {n30, n31}, dirichlet(rng, n30 * n31, a));
  const auto q = random_conditional(rng, {"X30", "X31", "Y3"}, {n30, n31, ny3}, {"Yh3"}, {nh}, a);
  const auto ch = random_conditional(rng, {"X1", "X2", "X30", "X31"}, {n1, n2, n30, n31},
                                     {"Y2", "Y3", "Y4"}, {ny2, ny3, ny4}, a);
  return build_joint_thm2(pin, pr, q, ch);
}

enum class WitnessKind {
  relay1_hears_cloud_weakly,  // I(X30;Y2|X2) < I(X30;Y4): the 2R bound binds
  relay2_hears_nothing,       // relay 2 observes no source signal: the jd2 bound binds
};

// Deterministic channels of a given shape, mixed with a random channel of
// weight eps in [eps_lo, eps_hi]. Values are generic, the binding bound is not.
inline JointPmf witness_thm2_joint(Rng& rng, WitnessKind kind, double eps_lo = 0.01,
                                   double eps_hi = 0.1) {
  std::uniform_real_distribution<double> ue(eps_lo, eps_hi);
  const double eps = ue(rng);
  auto mix = [&](std::vector<double> det) {
    const auto noise = dirichlet(rng, det.size());
    for (std::size_t i = 0; i < det.size(); ++i) det[i] = (1 - eps) * det[i] + eps * noise[i];
    return det;
  };
  const std::size_t n1 = 4, n2 = 2, n30 = 2, n31 = 2, ny2 = 4, ny4 = 4;
  const bool quiet = kind == WitnessKind::relay2_hears_nothing;
  const std::size_t ny3 = quiet ? 2 : 4, nh = ny3;

  const JointPmf pin({"X1", "X2"}, {n1, n2}, mix(std::vector<double>(n1 * n2, 1.0 / (n1 * n2))));
  const JointPmf pr({"X30", "X31"}, {n30, n31},
                    mix(std::vector<double>(n30 * n31, 1.0 / (n30 * n31))));

  ConditionalPmf q{{"X30", "X31", "Y3"}, {n30, n31, ny3}, {"Yh3"}, {nh}, {}};
  for (std::size_t r = 0; r < q.rows(); ++r) {
    std::vector<double> row(nh, 0.0);
    row[quiet ? 0 : r % ny3] = 1.0;  // constant or identity quantizer
    const auto m = mix(row);
    q.table.insert(q.table.end(), m.begin(), m.end());
  }

  ConditionalPmf ch{{"X1", "X2", "X30", "X31"}, {n1, n2, n30, n31}, {"Y2", "Y3", "Y4"},
                    {ny2, ny3, ny4}, {}};
  for (std::size_t x1 = 0; x1 < n1; ++x1)
    for (std::size_t x2 = 0; x2 < n2; ++x2)
      for (std::size_t x30 = 0; x30 < n30; ++x30)
        for (std::size_t x31 = 0; x31 < n31; ++x31) {
          const std::size_t y2 = x1, y3 = quiet ? 0 : x1, y4 = 2 * x30 + x31;
          std::vector<double> row(ny2 * ny3 * ny4, 0.0);
          row[(y2 * ny3 + y3) * ny4 + y4] = 1.0;
          const auto m = mix(row);
          ch.table.insert(ch.table.end(), m.begin(), m.end());
        }
  return build_joint_thm2(pin, pr, q, ch);
}

}  // namespace snncrs
