#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "robustbo/grid.hpp"
#include "robustbo/kernel.hpp"
#include "robustbo/measures.hpp"
#include "robustbo/policy.hpp"

namespace robustbo {

enum class Benchmark { Syn2D, Syn4D, Syn6D, Carrier };

std::string_view to_string(Benchmark b);

/// Axis lattice of `s` points on [-M, M], endpoints exact.
std::vector<double> axis_lattice(double M, int s);

/// s^(D/2) design points and s^(D/2) environment points; enumeration is
/// row-major with the first axis varying slowest.
ProblemGrid gen_grid(double M, int D, int s, EnvDist dist = {});

/// True function values on a grid.
struct TabulatedOracle {
  using Table = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Table values;  // |X| x |Omega|
  double noise_var = 0.0;

  double value(JointPoint p) const { return values(p.x, p.w); }
  std::span<const double> row(Index x) const {
    return {values.data() + x * values.cols(), static_cast<std::size_t>(values.cols())};
  }
};

/// Wraps a table as a black-box: adds N(0, noise_var) noise when noise_var > 0.
/// The table is captured by reference and must outlive the evaluator.
Evaluator make_evaluator(const TabulatedOracle& oracle);

/// Draws of a zero-mean GP on a fixed point set; the prior factor is computed once.
class GpFunctionSampler {
 public:
  GpFunctionSampler(const KernelSpec& kernel, const std::vector<Eigen::VectorXd>& points);

  Eigen::VectorXd draw(Rng& rng) const;
  Index size() const noexcept { return factor_.rows(); }
  double jitter() const noexcept { return jitter_; }

 private:
  Eigen::MatrixXd factor_;
  double jitter_ = 0.0;
};

inline constexpr double kSyntheticNoise = 1e-6;

ProblemGrid benchmark_grid(Benchmark b);
EnvDist benchmark_pmf(Benchmark b);
KernelSpec benchmark_kernel(Benchmark b);

/// (h, alpha) used by the threshold and mean-minus-deviation measures.
struct MeasurePreset {
  double h = 0.0;
  double alpha = 0.0;
};
MeasurePreset benchmark_preset(Benchmark b);

/// One GP prior draw tabulated over the whole joint grid.
TabulatedOracle synthetic_2d(const GpFunctionSampler& sampler, const ProblemGrid& grid, std::uint64_t seed);
TabulatedOracle synthetic_2d(const ProblemGrid& grid, const KernelSpec& kernel, std::uint64_t seed);

double himmelblau_scaled(double a, double b);
TabulatedOracle himmelblau_oracle(const ProblemGrid& grid);

/// Sum of four draws on the 7^3 cube wired as
/// f1(x1,x2,x3) + f2(x2,x3,w1) + f3(x3,w1,w2) + f4(w1,w2,w3).
class Synthetic6dSampler {
 public:
  Synthetic6dSampler();
  TabulatedOracle draw(const ProblemGrid& grid, std::uint64_t seed) const;
  /// Component tables, each indexed by the 343-point cube enumeration.
  std::vector<Eigen::VectorXd> components(std::uint64_t seed) const;

 private:
  GpFunctionSampler sampler_;
};

TabulatedOracle synthetic_6d(const ProblemGrid& grid, std::uint64_t seed);

struct CarrierProblem {
  ProblemGrid grid;
  TabulatedOracle oracle;
  std::vector<std::string> warnings;
};

/// Reads `x1,x2,lt` rows and builds the 64 x 99 table by coordinate addition.
CarrierProblem load_carrier_lifetime(const std::string& path);

/// Writes a smooth synthetic surface on the 88 x 72 lattice {(2a+6, 2b+6)}.
void write_carrier_standin(const std::string& path, std::uint64_t seed);

struct Optimum {
  Index x_star = 0;
  double f_star = 0.0;
  std::vector<double> values;  // F(x) for every design
};

Optimum true_optimum(const TabulatedOracle& oracle, const MeasureSpec& spec, const EnvDist& dist);

}  // namespace robustbo
