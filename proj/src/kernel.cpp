#include "robustbo/kernel.hpp"

#include <cmath>
#include <sstream>

#include "robustbo/errors.hpp"

namespace robustbo {

namespace {

void check_positive(double lengthscale, double variance) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) throw_invalid("kernel lengthscale must be positive");
  if (!(variance > 0.0) || !std::isfinite(variance)) throw_invalid("kernel variance must be positive");
}

double stationary(KernelForm form, double lengthscale, double variance, double sq_dist) {
  if (form == KernelForm::SquaredExponential) {
    return variance * std::exp(-sq_dist / (2.0 * lengthscale * lengthscale));
  }
  const double s = std::sqrt(3.0 * sq_dist) / lengthscale;
  return variance * (1.0 + s) * std::exp(-s);
}

}  // namespace

KernelSpec KernelSpec::squared_exponential(double lengthscale, double variance) {
  check_positive(lengthscale, variance);
  KernelSpec k;
  k.form_ = KernelForm::SquaredExponential;
  k.lengthscale_ = lengthscale;
  k.variance_ = variance;
  return k;
}

KernelSpec KernelSpec::matern32(double lengthscale, double variance) {
  check_positive(lengthscale, variance);
  KernelSpec k;
  k.form_ = KernelForm::Matern32;
  k.lengthscale_ = lengthscale;
  k.variance_ = variance;
  return k;
}

KernelSpec KernelSpec::sum(std::vector<KernelComponent> components) {
  if (components.empty()) throw_invalid("Sum kernel needs at least one component");
  for (const auto& c : components) {
    if (c.map.rows() == 0 || c.map.cols() == 0) throw_invalid("Sum kernel component has an empty input map");
    if (c.kernel.form() == KernelForm::Sum) c.kernel.validate(c.map.rows());
  }
  KernelSpec k;
  k.form_ = KernelForm::Sum;
  k.components_ = std::move(components);
  return k;
}

double KernelSpec::from_difference(std::span<const double> diff) const {
  if (form_ != KernelForm::Sum) {
    double sq = 0.0;
    for (double d : diff) sq += d * d;
    return stationary(form_, lengthscale_, variance_, sq);
  }
  double total = 0.0;
  for (const auto& c : components_) {
    if (static_cast<Eigen::Index>(diff.size()) != c.map.cols()) {
      throw_invalid("kernel input dimension " + std::to_string(diff.size()) + " does not match component map with " +
                    std::to_string(c.map.cols()) + " columns");
    }
    if (c.kernel.form() != KernelForm::Sum && !c.indices.empty()) {
      double sq = 0.0;
      for (Eigen::Index i : c.indices) sq += diff[static_cast<std::size_t>(i)] * diff[static_cast<std::size_t>(i)];
      total += stationary(c.kernel.form_, c.kernel.lengthscale_, c.kernel.variance_, sq);
    } else {
      Eigen::Map<const Eigen::VectorXd> d(diff.data(), static_cast<Eigen::Index>(diff.size()));
      const Eigen::VectorXd projected = c.map * d;
      total += c.kernel.from_difference({projected.data(), static_cast<std::size_t>(projected.size())});
    }
  }
  return total;
}

double KernelSpec::operator()(std::span<const double> a, std::span<const double> b) const {
  if (a.size() != b.size()) {
    throw_invalid("kernel_eval: dimension mismatch (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  constexpr std::size_t kInline = 16;
  if (a.size() <= kInline) {
    double diff[kInline];
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    return from_difference({diff, a.size()});
  }
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return from_difference(diff);
}

double KernelSpec::diagonal_bound() const {
  if (form_ != KernelForm::Sum) return variance_;
  double total = 0.0;
  for (const auto& c : components_) total += c.kernel.diagonal_bound();
  return total;
}

void KernelSpec::validate(Eigen::Index joint_dim) const {
  if (form_ != KernelForm::Sum) return;
  for (const auto& c : components_) {
    if (c.map.cols() != joint_dim) {
      throw_invalid("kernel component expects " + std::to_string(c.map.cols()) + " inputs, joint point has " +
                    std::to_string(joint_dim));
    }
    c.kernel.validate(c.map.rows());
  }
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  switch (form_) {
    case KernelForm::SquaredExponential:
      os << "SE(l=" << lengthscale_ << ",v=" << variance_ << ")";
      break;
    case KernelForm::Matern32:
      os << "Matern32(l=" << lengthscale_ << ",v=" << variance_ << ")";
      break;
    case KernelForm::Sum:
      os << "Sum[";
      for (std::size_t i = 0; i < components_.size(); ++i) {
        if (i) os << " + ";
        os << components_[i].kernel.describe();
      }
      os << "]";
      break;
  }
  return os.str();
}

KernelComponent KernelComponent::projected(KernelSpec kernel, std::vector<Eigen::Index> indices, Eigen::Index joint_dim) {
  if (indices.empty()) throw_invalid("projection must select at least one coordinate");
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(indices.size()), joint_dim);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] < 0 || indices[r] >= joint_dim) {
      throw_invalid("projection index " + std::to_string(indices[r]) + " outside joint dimension " +
                    std::to_string(joint_dim));
    }
    map(static_cast<Eigen::Index>(r), indices[r]) = 1.0;
  }
  return {std::move(kernel), std::move(map), std::move(indices)};
}

KernelComponent KernelComponent::linear(KernelSpec kernel, Eigen::MatrixXd map) {
  if (!map.allFinite()) throw_invalid("kernel input map must be finite");
  return {std::move(kernel), std::move(map), {}};
}

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b) { return spec(a, b); }

}  // namespace robustbo
