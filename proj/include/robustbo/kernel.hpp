#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

namespace robustbo {

enum class KernelForm { SquaredExponential, Matern32, Sum };

struct KernelComponent;

/// Stationary covariance function on joint (x, w) coordinate vectors.
///
/// SquaredExponential: v * exp(-r^2 / (2 l^2)).
/// Matern32:           v * (1 + sqrt(3) r / l) * exp(-sqrt(3) r / l).
/// Sum:                sum of component kernels, each applied to a linear
///                     image (usually a coordinate projection) of the input.
class KernelSpec {
 public:
  static KernelSpec squared_exponential(double lengthscale, double variance = 1.0);
  static KernelSpec matern32(double lengthscale, double variance = 1.0);
  static KernelSpec sum(std::vector<KernelComponent> components);

  KernelForm form() const noexcept { return form_; }
  double lengthscale() const noexcept { return lengthscale_; }
  double variance() const noexcept { return variance_; }
  const std::vector<KernelComponent>& components() const noexcept { return components_; }

  double operator()(std::span<const double> a, std::span<const double> b) const;

  /// k evaluated on a coordinate difference a - b.
  double from_difference(std::span<const double> diff) const;

  /// Upper bound on k(t, t) over all inputs.
  double diagonal_bound() const;

  /// Throws invalid-argument unless every component map accepts `joint_dim` inputs.
  void validate(Eigen::Index joint_dim) const;

  std::string describe() const;

 private:
  KernelForm form_ = KernelForm::SquaredExponential;
  double lengthscale_ = 1.0;
  double variance_ = 1.0;
  std::vector<KernelComponent> components_;
};

/// One summand of a Sum kernel: `kernel` applied to `map * theta`.
struct KernelComponent {
  KernelSpec kernel;
  Eigen::MatrixXd map;
  std::vector<Eigen::Index> indices;  // non-empty when `map` is a pure coordinate selection

  /// Select the coordinates `indices` of a `joint_dim`-vector.
  static KernelComponent projected(KernelSpec kernel, std::vector<Eigen::Index> indices, Eigen::Index joint_dim);
  static KernelComponent linear(KernelSpec kernel, Eigen::MatrixXd map);
};

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b);

}  // namespace robustbo
