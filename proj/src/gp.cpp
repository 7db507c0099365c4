#include "robustbo/gp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <string>

#include "robustbo/errors.hpp"

namespace robustbo {

namespace {

constexpr double kJitterLadder[] = {1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6};

bool factor_ok(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  if (llt.info() != Eigen::Success) return false;
  const auto& m = llt.matrixLLT();
  for (Index i = 0; i < m.rows(); ++i) {
    if (!(m(i, i) > 0.0) || !std::isfinite(m(i, i))) return false;
  }
  return true;
}

}  // namespace

Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& cov, double* used_jitter) {
  const Index n = cov.rows();
  const double scale = std::max(1.0, n > 0 ? cov.diagonal().maxCoeff() : 1.0);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (factor_ok(llt)) {
    if (used_jitter) *used_jitter = 0.0;
    return llt.matrixL();
  }
  for (double rung : kJitterLadder) {
    Eigen::MatrixXd shifted = cov;
    shifted.diagonal().array() += rung * scale;
    llt.compute(shifted);
    if (factor_ok(llt)) {
      if (used_jitter) *used_jitter = rung * scale;
      return llt.matrixL();
    }
  }
  throw_numerical("covariance factorization failed after jitter " + std::to_string(kJitterLadder[6] * scale));
}

GPosterior::GPosterior(KernelSpec kernel, double noise_var, const ProblemGrid& grid)
    : kernel_(std::move(kernel)),
      noise_var_(noise_var),
      n_design_(grid.design_count()),
      n_env_(grid.env_count()),
      dim_(grid.joint_dim()),
      coords_(grid.joint_coords()) {
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) throw_invalid("GPosterior: noise_var must be positive");
  kernel_.validate(dim_);
  const Index n = size();
  prior_var_.resize(n);
  for (Index j = 0; j < n; ++j) prior_var_[j] = kernel_(coords(j), coords(j));
  mean_ = Eigen::VectorXd::Zero(n);
  var_ = prior_var_;
  chol_.resize(0, 0);
  white_y_.resize(0);
}

Index GPosterior::joint_index(JointPoint p) const {
  if (p.x < 0 || p.x >= n_design_ || p.w < 0 || p.w >= n_env_) throw_invalid("GPosterior: point outside grid");
  return p.x * n_env_ + p.w;
}

std::span<const double> GPosterior::coords(Index joint) const {
  return {coords_.data() + joint * dim_, static_cast<std::size_t>(dim_)};
}

std::span<const double> GPosterior::mean_row(Index x) const {
  return {mean_.data() + x * n_env_, static_cast<std::size_t>(n_env_)};
}

std::span<const double> GPosterior::variance_row(Index x) const {
  return {var_.data() + x * n_env_, static_cast<std::size_t>(n_env_)};
}

double GPosterior::prior_covariance(Index a, Index b) const { return kernel_(coords(a), coords(b)); }

double GPosterior::covariance(Index a, Index b) const {
  double c = prior_covariance(a, b);
  for (const auto& row : cross_) c -= row[a] * row[b];
  return c;
}

Eigen::MatrixXd GPosterior::covariance(std::span<const Index> joints) const {
  const Index m = static_cast<Index>(joints.size());
  Eigen::MatrixXd cov(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j <= i; ++j) cov(i, j) = prior_covariance(joints[i], joints[j]);
  }
  if (!cross_.empty()) {
    Eigen::MatrixXd v(static_cast<Index>(cross_.size()), m);
    for (std::size_t r = 0; r < cross_.size(); ++r) {
      for (Index i = 0; i < m; ++i) v(static_cast<Index>(r), i) = cross_[r][joints[i]];
    }
    cov.triangularView<Eigen::Lower>() -= v.transpose() * v;
  }
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  return cov;
}

void GPosterior::update(JointPoint p, double y) {
  if (!std::isfinite(y)) throw_invalid("GPosterior::update: non-finite observation");
  const Index joint = joint_index(p);
  const Index t = static_cast<Index>(obs_.size());
  const double diag_noise = noise_var_ + jitter_;

  Eigen::VectorXd kvec(t);
  for (Index i = 0; i < t; ++i) kvec[i] = kernel_(coords(joint), coords(obs_[i].joint));
  Eigen::VectorXd l = kvec;
  if (t > 0) chol_.triangularView<Eigen::Lower>().solveInPlace(l);
  const double pivot_sq = prior_var_[joint] + diag_noise - l.squaredNorm();

  obs_.push_back({p, joint, y});

  if (!(pivot_sq > 0.5 * noise_var_) || !std::isfinite(pivot_sq)) {
    refactor();
    return;
  }

  const double pivot = std::sqrt(pivot_sq);
  chol_.conservativeResize(t + 1, t + 1);
  chol_.row(t).head(t) = l.transpose();
  chol_.col(t).head(t).setZero();
  chol_(t, t) = pivot;

  const double z = (y - (t > 0 ? l.dot(white_y_) : 0.0)) / pivot;
  white_y_.conservativeResize(t + 1);
  white_y_[t] = z;

  const Index n = size();
  Eigen::VectorXd row(n);
  const auto c = coords(joint);
  for (Index j = 0; j < n; ++j) row[j] = kernel_(c, coords(j));
  for (Index i = 0; i < t; ++i) row.noalias() -= l[i] * cross_[static_cast<std::size_t>(i)];
  row /= pivot;

  mean_.noalias() += z * row;
  var_.array() -= row.array().square();
  var_ = var_.cwiseMax(0.0);
  cross_.push_back(std::move(row));
}

void GPosterior::refactor() {
  const Index t = static_cast<Index>(obs_.size());
  Eigen::MatrixXd gram(t, t);
  for (Index i = 0; i < t; ++i) {
    for (Index j = 0; j <= i; ++j) {
      gram(i, j) = kernel_(coords(obs_[i].joint), coords(obs_[j].joint));
      gram(j, i) = gram(i, j);
    }
  }
  gram.diagonal().array() += noise_var_;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  jitter_ = 0.0;
  if (!factor_ok(llt)) {
    bool done = false;
    for (double rung : kJitterLadder) {
      Eigen::MatrixXd shifted = gram;
      shifted.diagonal().array() += rung;
      llt.compute(shifted);
      if (factor_ok(llt)) {
        jitter_ = rung;
        done = true;
        break;
      }
    }
    if (!done) throw_numerical("GPosterior: kernel matrix factorization failed after maximum jitter");
  }
  chol_ = llt.matrixL();

  Eigen::VectorXd y(t);
  for (Index i = 0; i < t; ++i) y[i] = obs_[i].y;
  white_y_ = chol_.triangularView<Eigen::Lower>().solve(y);

  const Index n = size();
  Eigen::MatrixXd cross(t, n);
  for (Index i = 0; i < t; ++i) {
    const auto c = coords(obs_[i].joint);
    for (Index j = 0; j < n; ++j) cross(i, j) = kernel_(c, coords(j));
  }
  chol_.triangularView<Eigen::Lower>().solveInPlace(cross);
  cross_.clear();
  for (Index i = 0; i < t; ++i) cross_.emplace_back(cross.row(i).transpose());
  mean_ = cross.transpose() * white_y_;
  var_ = (prior_var_ - cross.colwise().squaredNorm().transpose()).cwiseMax(0.0);
}

Eigen::VectorXd GPosterior::alpha() const {
  if (obs_.empty()) return {};
  return chol_.transpose().triangularView<Eigen::Upper>().solve(white_y_);
}

double GPosterior::realized_info_gain() const {
  const Index t = static_cast<Index>(obs_.size());
  if (t == 0) return 0.0;
  double log_det = 0.0;
  for (Index i = 0; i < t; ++i) log_det += std::log(chol_(i, i));
  return std::max(0.0, log_det - 0.5 * static_cast<double>(t) * std::log(noise_var_ + jitter_));
}

PosteriorField posterior_field(const GPosterior& state) {
  PosteriorField f;
  const Index nx = state.design_count();
  const Index nw = state.env_count();
  f.mean.resize(nx, nw);
  f.sd.resize(nx, nw);
  for (Index x = 0; x < nx; ++x) {
    for (Index w = 0; w < nw; ++w) {
      const Index j = x * nw + w;
      f.mean(x, w) = state.mean(j);
      f.sd(x, w) = std::sqrt(state.variance(j));
    }
  }
  return f;
}

}  // namespace robustbo
