#pragma once

// Mutual information for finite-alphabet joint distributions (dense tables)
// and for jointly Gaussian systems (log-determinant form). All quantities
// are in bits.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace snncrs {

using Group = std::vector<std::string>;

class LabelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxJointCells = 10'000'000;

namespace detail {

inline std::string join(const Group& g, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out += sep;
    out += g[i];
  }
  return out;
}

inline void require_disjoint(const Group& a, const Group& b, const Group& c) {
  std::set<std::string> seen;
  for (const Group* g : {&a, &b, &c})
    for (const auto& l : *g)
      if (!seen.insert(l).second)
        throw LabelError("label '" + l + "' appears in more than one group");
}

inline Group concat(std::initializer_list<const Group*> groups) {
  Group out;
  for (const Group* g : groups) out.insert(out.end(), g->begin(), g->end());
  return out;
}

}  // namespace detail

// Dense joint pmf over labeled finite alphabets, row-major (first label slowest).
class JointPmf {
 public:
  JointPmf(Group labels, std::vector<std::size_t> sizes, std::vector<double> probs)
      : labels_(std::move(labels)), sizes_(std::move(sizes)), probs_(std::move(probs)) {
    if (labels_.size() != sizes_.size())
      throw std::invalid_argument("labels and alphabet sizes differ in length");
    std::set<std::string> uniq(labels_.begin(), labels_.end());
    if (uniq.size() != labels_.size())
      throw LabelError("joint pmf labels must be unique");
    std::size_t cells = 1;
    for (std::size_t s : sizes_) {
      if (s == 0) throw std::invalid_argument("alphabet sizes must be >= 1");
      if (cells > kMaxJointCells / s)
        throw std::length_error("joint pmf exceeds 10^7 cells");
      cells *= s;
    }
    if (probs_.size() != cells)
      throw std::invalid_argument("probability table has " + std::to_string(probs_.size()) +
                                  " entries, expected " + std::to_string(cells));
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw std::invalid_argument("probabilities must be finite and >= 0");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("total probability mass is " + std::to_string(total) +
                                  ", expected 1");
  }

  const Group& labels() const { return labels_; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  const std::vector<double>& probabilities() const { return probs_; }
  std::size_t cells() const { return probs_.size(); }

  bool has(const std::string& label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
  }

  std::size_t axis(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw LabelError("label '" + label + "' not in joint pmf");
    return static_cast<std::size_t>(it - labels_.begin());
  }

  std::size_t alphabet_size(const std::string& label) const { return sizes_[axis(label)]; }

  // Marginal table over `group`, row-major in the order given.
  std::vector<double> marginal_table(const Group& group) const {
    std::vector<std::size_t> axes;
    axes.reserve(group.size());
    for (const auto& l : group) axes.push_back(axis(l));

    // stride of each joint axis inside the marginal table (0 if summed out)
    std::vector<std::size_t> stride(labels_.size(), 0);
    std::size_t out_cells = 1;
    for (std::size_t k = axes.size(); k-- > 0;) {
      stride[axes[k]] = out_cells;
      out_cells *= sizes_[axes[k]];
    }

    std::vector<double> out(out_cells, 0.0);
    std::vector<std::size_t> digit(labels_.size(), 0);
    std::size_t target = 0;
    for (std::size_t cell = 0; cell < probs_.size(); ++cell) {
      out[target] += probs_[cell];
      for (std::size_t a = labels_.size(); a-- > 0;) {
        if (++digit[a] < sizes_[a]) {
          target += stride[a];
          break;
        }
        target -= stride[a] * (sizes_[a] - 1);
        digit[a] = 0;
      }
    }
    return out;
  }

  JointPmf marginal(const Group& group) const {
    std::vector<std::size_t> sz;
    for (const auto& l : group) sz.push_back(alphabet_size(l));
    auto table = marginal_table(group);
    // renormalize away summation round-off so the invariant check passes
    const double total = std::accumulate(table.begin(), table.end(), 0.0);
    for (double& p : table) p /= total;
    return JointPmf(group, std::move(sz), std::move(table));
  }

 private:
  Group labels_;
  std::vector<std::size_t> sizes_;
  std::vector<double> probs_;
};

// Conditional pmf p(out | cond); rows indexed by cond tuple (row-major),
// each row a distribution over the out tuple (row-major).
struct ConditionalPmf {
  Group cond_labels;
  std::vector<std::size_t> cond_sizes;
  Group out_labels;
  std::vector<std::size_t> out_sizes;
  std::vector<double> table;

  std::size_t rows() const {
    return std::accumulate(cond_sizes.begin(), cond_sizes.end(), std::size_t{1},
                           std::multiplies<>());
  }
  std::size_t cols() const {
    return std::accumulate(out_sizes.begin(), out_sizes.end(), std::size_t{1},
                           std::multiplies<>());
  }
  double at(std::size_t row, std::size_t col) const { return table[row * cols() + col]; }

  void validate() const {
    if (cond_labels.size() != cond_sizes.size() || out_labels.size() != out_sizes.size())
      throw std::invalid_argument("conditional pmf labels and sizes differ in length");
    if (table.size() != rows() * cols())
      throw std::invalid_argument("conditional pmf table has wrong size");
    for (std::size_t r = 0; r < rows(); ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < cols(); ++c) {
        const double p = at(r, c);
        if (!(p >= 0.0) || !std::isfinite(p))
          throw std::invalid_argument("conditional probabilities must be finite and >= 0");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("conditional pmf row " + std::to_string(r) +
                                    " is not normalized");
    }
  }
};

// Shannon entropy of the marginal on `group`; 0 log 0 = 0.
inline double entropy(const JointPmf& joint, const Group& group) {
  if (group.empty()) return 0.0;
  detail::require_disjoint(group, {}, {});
  double h = 0.0;
  for (double p : joint.marginal_table(group))
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

// I(A;B|C) = H(AC) + H(BC) - H(C) - H(ABC), clamped at 0.
inline double mutual_info(const JointPmf& joint, const Group& a, const Group& b,
                          const Group& c = {}) {
  detail::require_disjoint(a, b, c);
  for (const Group* g : {&a, &b, &c})
    for (const auto& l : *g) joint.axis(l);
  if (a.empty() || b.empty()) return 0.0;
  const double v = entropy(joint, detail::concat({&a, &c})) +
                   entropy(joint, detail::concat({&b, &c})) - entropy(joint, c) -
                   entropy(joint, detail::concat({&a, &b, &c}));
  return std::max(0.0, v);
}

inline const Group& thm2_labels() {
  static const Group labels{"X1", "X2", "X30", "X31", "Y2", "Y3", "Y4", "Yh3"};
  return labels;
}

// Joint p(x1 x2) p(x30 x31) p(yh3 | x30 x31 y3) p(y2 y3 y4 | x1 x2 x30 x31)
// over labels X1 X2 X30 X31 Y2 Y3 Y4 Yh3.
inline JointPmf build_joint_thm2(const JointPmf& p_x1x2, const JointPmf& p_x30x31,
                                 const ConditionalPmf& q_yhat, const ConditionalPmf& channel) {
  auto expect = [](const Group& got, const Group& want, const char* what) {
    if (got != want)
      throw LabelError(std::string(what) + " must be over (" + detail::join(want) + "), got (" +
                       detail::join(got) + ")");
  };
  expect(p_x1x2.labels(), {"X1", "X2"}, "source pmf");
  expect(p_x30x31.labels(), {"X30", "X31"}, "relay pmf");
  expect(q_yhat.cond_labels, {"X30", "X31", "Y3"}, "quantizer conditioning");
  expect(q_yhat.out_labels, {"Yh3"}, "quantizer output");
  expect(channel.cond_labels, {"X1", "X2", "X30", "X31"}, "channel conditioning");
  expect(channel.out_labels, {"Y2", "Y3", "Y4"}, "channel output");
  q_yhat.validate();
  channel.validate();

  const std::size_t n1 = p_x1x2.sizes()[0], n2 = p_x1x2.sizes()[1];
  const std::size_t n30 = p_x30x31.sizes()[0], n31 = p_x30x31.sizes()[1];
  const std::size_t ny2 = channel.out_sizes[0], ny3 = channel.out_sizes[1],
                    ny4 = channel.out_sizes[2];
  const std::size_t nh = q_yhat.out_sizes[0];

  if (channel.cond_sizes != std::vector<std::size_t>{n1, n2, n30, n31})
    throw std::invalid_argument("channel input alphabets do not match the input pmfs");
  if (q_yhat.cond_sizes != std::vector<std::size_t>{n30, n31, ny3})
    throw std::invalid_argument("quantizer alphabets do not match relay input / Y3");

  std::vector<std::size_t> sizes{n1, n2, n30, n31, ny2, ny3, ny4, nh};
  std::vector<double> probs;
  probs.reserve(n1 * n2 * n30 * n31 * ny2 * ny3 * ny4 * nh);
  const auto& px = p_x1x2.probabilities();
  const auto& pr = p_x30x31.probabilities();
  for (std::size_t x1 = 0; x1 < n1; ++x1)
    for (std::size_t x2 = 0; x2 < n2; ++x2)
      for (std::size_t x30 = 0; x30 < n30; ++x30)
        for (std::size_t x31 = 0; x31 < n31; ++x31) {
          const double pin = px[x1 * n2 + x2] * pr[x30 * n31 + x31];
          const std::size_t crow = ((x1 * n2 + x2) * n30 + x30) * n31 + x31;
          for (std::size_t y2 = 0; y2 < ny2; ++y2)
            for (std::size_t y3 = 0; y3 < ny3; ++y3)
              for (std::size_t y4 = 0; y4 < ny4; ++y4) {
                const double pch = channel.at(crow, (y2 * ny3 + y3) * ny4 + y4);
                const std::size_t qrow = (x30 * n31 + x31) * ny3 + y3;
                for (std::size_t h = 0; h < nh; ++h)
                  probs.push_back(pin * pch * q_yhat.at(qrow, h));
              }
        }
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& p : probs) p /= total;
  return JointPmf(thm2_labels(), std::move(sizes), std::move(probs));
}

// ---------------------------------------------------------------------------
// Jointly Gaussian systems

// Real-valued signalling gives I = 1/2 log det(...); circularly-symmetric
// complex signalling gives I = log det(...), which is the C(x) = log2(1+x)
// convention of the rate expressions in schemes.hpp.
enum class Field { real, complex };

class NotPsdError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Every variable is a linear combination of independent unit-variance
// Gaussian sources; covariances of any subset follow from the loadings.
class GaussianSystem {
 public:
  explicit GaussianSystem(Field field = Field::real) : field_(field) {}

  // Inputs with covariance `cov` (PSD), factored with pivoted LDL^T.
  static GaussianSystem from_inputs(const Group& names, const Eigen::MatrixXd& cov,
                                    Field field = Field::real) {
    const auto n = static_cast<Eigen::Index>(names.size());
    if (cov.rows() != n || cov.cols() != n)
      throw std::invalid_argument("input covariance has wrong dimensions");
    GaussianSystem sys(field);
    if (n == 0) return sys;

    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw NotPsdError("input covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
      throw NotPsdError("input covariance is not positive semidefinite");

    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    Eigen::MatrixXd L = ldlt.matrixL();
    Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = std::max(d.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = d(i) <= 1e-13 * dmax ? 0.0 : std::sqrt(d(i));
    // cov = P^T L D L^T P
    Eigen::MatrixXd F = ldlt.transpositionsP().transpose() * (L * d.asDiagonal());

    std::vector<std::size_t> src;
    for (Eigen::Index j = 0; j < n; ++j) src.push_back(sys.add_source());
    for (Eigen::Index i = 0; i < n; ++i) {
      std::vector<std::pair<std::size_t, double>> load;
      for (Eigen::Index j = 0; j < n; ++j)
        if (F(i, j) != 0.0) load.emplace_back(src[static_cast<std::size_t>(j)], F(i, j));
      sys.add_variable(names[static_cast<std::size_t>(i)], load);
    }
    return sys;
  }

  Field field() const { return field_; }

  std::size_t add_source() { return n_sources_++; }

  void add_variable(const std::string& name,
                    const std::vector<std::pair<std::size_t, double>>& loadings) {
    if (index_.count(name)) throw LabelError("variable '" + name + "' already defined");
    std::vector<double> row(n_sources_, 0.0);
    for (auto [s, w] : loadings) {
      if (s >= n_sources_) throw std::out_of_range("unknown source index");
      if (!std::isfinite(w)) throw std::invalid_argument("loading must be finite");
      row[s] += w;
    }
    index_[name] = rows_.size();
    names_.push_back(name);
    rows_.push_back(std::move(row));
  }

  // Independent input with the given variance.
  void add_input(const std::string& name, double variance) {
    if (!(variance >= 0.0)) throw std::invalid_argument("input variance must be >= 0");
    const std::size_t s = add_source();
    add_variable(name, {{s, std::sqrt(variance)}});
  }

  // name = sum_k gain_k * var_k + N(0, noise_variance)
  void add_output(const std::string& name,
                  const std::vector<std::pair<std::string, double>>& terms,
                  double noise_variance = 1.0) {
    if (!(noise_variance >= 0.0)) throw std::invalid_argument("noise variance must be >= 0");
    std::vector<std::pair<std::size_t, double>> load;
    for (const auto& [var, gain] : terms) {
      const auto& row = rows_[index_of(var)];
      for (std::size_t s = 0; s < row.size(); ++s)
        if (row[s] != 0.0) load.emplace_back(s, gain * row[s]);
    }
    if (noise_variance > 0.0) load.emplace_back(add_source(), std::sqrt(noise_variance));
    add_variable(name, load);
  }

  // name = of + N(0, quant_variance), quant_variance > 0.
  void add_quantized(const std::string& name, const std::string& of, double quant_variance) {
    if (!(quant_variance > 0.0) || !std::isfinite(quant_variance))
      throw std::invalid_argument("quantization variance must be finite and > 0");
    add_output(name, {{of, 1.0}}, quant_variance);
  }

  bool has(const std::string& name) const { return index_.count(name) != 0; }
  const Group& names() const { return names_; }
  std::size_t sources() const { return n_sources_; }

  Eigen::MatrixXd loadings(const Group& group) const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(group.size()),
                                              static_cast<Eigen::Index>(n_sources_));
    for (std::size_t i = 0; i < group.size(); ++i) {
      const auto& row = rows_[index_of(group[i])];
      for (std::size_t s = 0; s < row.size(); ++s)
        M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) = row[s];
    }
    return M;
  }

  Eigen::MatrixXd covariance(const Group& group) const {
    const Eigen::MatrixXd M = loadings(group);
    return M * M.transpose();
  }

 private:
  std::size_t index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw LabelError("variable '" + name + "' not in Gaussian system");
    return it->second;
  }

  Field field_;
  std::size_t n_sources_ = 0;
  Group names_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<double>> rows_;
};

struct GaussianMi {
  double bits = 0.0;
  bool degenerate = false;  // some covariance block was singular
};

namespace detail {

inline constexpr double kEigenFloor = 1e-12;

struct PseudoLogDet {
  double log2det = 0.0;  // log2 of the product of the nonzero eigenvalues
  long deficiency = 0;   // number of (numerically) zero eigenvalues
};

// log2 det(M M^T) from the singular values of M. Rank is decided relative
// to the largest singular value, which is stable against round-off in
// exactly-dependent rows.
inline PseudoLogDet pseudo_log2det(const Eigen::MatrixXd& M) {
  PseudoLogDet out;
  const Eigen::Index k = M.rows();
  if (k == 0) return out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double tol = 1e-9 * smax;
  long rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol && s(i) > 0.0) {
      out.log2det += 2.0 * std::log2(s(i));
      ++rank;
    }
  out.deficiency = static_cast<long>(k) - rank;
  return out;
}

}  // namespace detail

// I(A;B|C) = k * log2( det S(AC) det S(BC) / (det S(C) det S(ABC)) ),
// k = 1/2 (real) or 1 (complex). Singular blocks use eigenvalue flooring
// at 1e-12, so exactly-dependent variables cancel between numerator and
// denominator.
inline GaussianMi gaussian_mi_detail(const GaussianSystem& sys, const Group& a, const Group& b,
                                     const Group& c = {}) {
  detail::require_disjoint(a, b, c);
  GaussianMi out;
  if (a.empty() || b.empty()) {
    for (const Group* g : {&a, &b, &c}) sys.loadings(*g);  // label validation
    return out;
  }
  const auto ac = detail::pseudo_log2det(sys.loadings(detail::concat({&a, &c})));
  const auto bc = detail::pseudo_log2det(sys.loadings(detail::concat({&b, &c})));
  const auto cc = detail::pseudo_log2det(sys.loadings(c));
  const auto abc = detail::pseudo_log2det(sys.loadings(detail::concat({&a, &b, &c})));
  const long balance = ac.deficiency + bc.deficiency - cc.deficiency - abc.deficiency;
  out.degenerate = ac.deficiency || bc.deficiency || cc.deficiency || abc.deficiency;
  double v = ac.log2det + bc.log2det - cc.log2det - abc.log2det +
             static_cast<double>(balance) * std::log2(detail::kEigenFloor);
  if (sys.field() == Field::real) v *= 0.5;
  out.bits = std::max(0.0, v);
  return out;
}

inline double gaussian_mi(const GaussianSystem& sys, const Group& a, const Group& b,
                          const Group& c = {}) {
  return gaussian_mi_detail(sys, a, b, c).bits;
}

}  // namespace snncrs
