#include "robustbo/bench.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "robustbo/argmax.hpp"
#include "robustbo/csv.hpp"
#include "robustbo/errors.hpp"
#include "robustbo/gp.hpp"

namespace robustbo {

std::string_view to_string(Benchmark b) {
  switch (b) {
    case Benchmark::Syn2D: return "syn2d";
    case Benchmark::Syn4D: return "syn4d";
    case Benchmark::Syn6D: return "syn6d";
    case Benchmark::Carrier: return "carrier";
  }
  return "unknown";
}

std::vector<double> axis_lattice(double M, int s) {
  if (!(M > 0.0) || !std::isfinite(M)) throw_invalid("axis_lattice: M must be positive");
  if (s < 2) throw_invalid("axis_lattice: s must be >= 2");
  std::vector<double> axis(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) axis[static_cast<std::size_t>(i)] = -M + 2.0 * M * i / (s - 1);
  axis.front() = -M;
  axis.back() = M;
  return axis;
}

namespace {

Eigen::MatrixXd cartesian(const std::vector<double>& axis, int dims) {
  const auto s = static_cast<Index>(axis.size());
  Index count = 1;
  for (int d = 0; d < dims; ++d) count *= s;
  Eigen::MatrixXd out(count, dims);
  for (Index r = 0; r < count; ++r) {
    Index rem = r;
    for (int d = dims - 1; d >= 0; --d) {
      out(r, d) = axis[static_cast<std::size_t>(rem % s)];
      rem /= s;
    }
  }
  return out;
}

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

std::vector<double> normalized_axis_weights(const std::vector<double>& axis, double (*density)(double)) {
  std::vector<double> w(axis.size());
  long double total = 0.0L;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    w[i] = density(axis[i]);
    total += w[i];
  }
  for (double& v : w) v = static_cast<double>(static_cast<long double>(v) / total);
  return w;
}

EnvDist product_pmf(const std::vector<std::vector<double>>& factors) {
  std::vector<double> weights{1.0};
  for (const auto& f : factors) {
    std::vector<double> next;
    next.reserve(weights.size() * f.size());
    for (double a : weights) {
      for (double b : f) next.push_back(a * b);
    }
    weights = std::move(next);
  }
  return EnvDist::from_weights(weights);
}

KernelSpec se_from_denominator(double denom, double weight = 1.0) {
  // exp(-d^2 / denom) == exp(-d^2 / (2 l^2)) with l^2 = denom / 2
  return KernelSpec::squared_exponential(std::sqrt(denom / 2.0), weight);
}

Eigen::MatrixXd carrier_design() {
  Eigen::MatrixXd x(64, 2);
  for (int a = 1; a <= 8; ++a) {
    for (int b = 1; b <= 8; ++b) {
      const int r = (a - 1) * 8 + (b - 1);
      x(r, 0) = 22.0 * a - 4.0;
      x(r, 1) = 18.0 * b - 2.0;
    }
  }
  return x;
}

Eigen::MatrixXd carrier_env() {
  Eigen::MatrixXd w(99, 2);
  for (int a = 1; a <= 11; ++a) {
    for (int b = 1; b <= 9; ++b) {
      const int r = (a - 1) * 9 + (b - 1);
      w(r, 0) = 2.0 * a - 12.0;
      w(r, 1) = 2.0 * b - 10.0;
    }
  }
  return w;
}

std::vector<Eigen::VectorXd> joint_points(const ProblemGrid& grid) {
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(static_cast<std::size_t>(grid.size()));
  for (Index x = 0; x < grid.design_count(); ++x) {
    for (Index w = 0; w < grid.env_count(); ++w) pts.push_back(grid.coords({x, w}));
  }
  return pts;
}

}  // namespace

ProblemGrid gen_grid(double M, int D, int s, EnvDist dist) {
  if (D < 2 || D % 2 != 0) throw_invalid("gen_grid: D must be even and >= 2");
  const auto axis = axis_lattice(M, s);
  Eigen::MatrixXd design = cartesian(axis, D / 2);
  Eigen::MatrixXd env = cartesian(axis, D / 2);
  if (dist.size() == 0) dist = EnvDist::uniform(static_cast<std::size_t>(env.rows()));
  return ProblemGrid(std::move(design), std::move(env), std::move(dist));
}

Evaluator make_evaluator(const TabulatedOracle& oracle) {
  return [&oracle](JointPoint p, Rng& rng) {
    const double f = oracle.values(p.x, p.w);
    return oracle.noise_var > 0.0 ? f + std::sqrt(oracle.noise_var) * rng.normal() : f;
  };
}

GpFunctionSampler::GpFunctionSampler(const KernelSpec& kernel, const std::vector<Eigen::VectorXd>& points) {
  const auto n = static_cast<Index>(points.size());
  if (n < 1) throw_invalid("GpFunctionSampler: no points");
  Eigen::MatrixXd cov(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto& a = points[static_cast<std::size_t>(i)];
    for (Index j = 0; j <= i; ++j) {
      const auto& b = points[static_cast<std::size_t>(j)];
      cov(i, j) = kernel({a.data(), static_cast<std::size_t>(a.size())}, {b.data(), static_cast<std::size_t>(b.size())});
      cov(j, i) = cov(i, j);
    }
  }
  factor_ = jittered_cholesky(cov, &jitter_);
}

Eigen::VectorXd GpFunctionSampler::draw(Rng& rng) const {
  Eigen::VectorXd z(factor_.rows());
  for (Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return factor_.triangularView<Eigen::Lower>() * z;
}

ProblemGrid benchmark_grid(Benchmark b) {
  switch (b) {
    case Benchmark::Syn2D: return gen_grid(5.0, 2, 50, benchmark_pmf(b));
    case Benchmark::Syn4D: return gen_grid(2.5, 4, 15, benchmark_pmf(b));
    case Benchmark::Syn6D: return gen_grid(2.0, 6, 7, benchmark_pmf(b));
    case Benchmark::Carrier: return ProblemGrid(carrier_design(), carrier_env(), benchmark_pmf(b));
  }
  throw_invalid("benchmark_grid: unknown benchmark");
}

EnvDist benchmark_pmf(Benchmark b) {
  switch (b) {
    case Benchmark::Syn2D: return EnvDist::uniform(50);
    case Benchmark::Syn4D: {
      const auto axis = axis_lattice(2.5, 15);
      const auto f = normalized_axis_weights(axis, [](double a) {
        return 0.25 * std_normal_pdf(a - 1.0) + 0.75 * std_normal_pdf(a + 5.0);
      });
      return product_pmf({f, f});
    }
    case Benchmark::Syn6D: {
      const auto axis = axis_lattice(2.0, 7);
      return product_pmf({normalized_axis_weights(axis, [](double v) { return std_normal_pdf(v - 1.0); }),
                          normalized_axis_weights(axis, [](double v) { return std_normal_pdf(v); }),
                          normalized_axis_weights(axis, [](double v) { return std_normal_pdf(v + 1.0); })});
    }
    case Benchmark::Carrier: return EnvDist::uniform(99);
  }
  throw_invalid("benchmark_pmf: unknown benchmark");
}

KernelSpec benchmark_kernel(Benchmark b) {
  switch (b) {
    case Benchmark::Syn2D: return se_from_denominator(2.0);
    case Benchmark::Syn4D: return se_from_denominator(10.0);
    case Benchmark::Syn6D:
      return KernelSpec::sum({
          KernelComponent::projected(se_from_denominator(1.75, 1.25), {0, 1, 2}, 6),
          KernelComponent::projected(se_from_denominator(1.75, 0.75), {1, 2, 3}, 6),
          KernelComponent::projected(se_from_denominator(2.0), {2, 3, 4}, 6),
          KernelComponent::projected(se_from_denominator(1.5), {3, 4, 5}, 6),
      });
    case Benchmark::Carrier: {
      Eigen::MatrixXd map(2, 4);
      map << 1, 0, 1, 0, 0, 1, 0, 1;
      return KernelSpec::sum({KernelComponent::linear(KernelSpec::matern32(25.0, 4.0), map)});
    }
  }
  throw_invalid("benchmark_kernel: unknown benchmark");
}

MeasurePreset benchmark_preset(Benchmark b) {
  switch (b) {
    case Benchmark::Syn2D: return {0.5, 1.0};
    case Benchmark::Syn4D: return {0.18, 4.0};
    case Benchmark::Syn6D: return {2.0, 8.0};
    case Benchmark::Carrier: return {2.9, 4.0};
  }
  throw_invalid("benchmark_preset: unknown benchmark");
}

TabulatedOracle synthetic_2d(const GpFunctionSampler& sampler, const ProblemGrid& grid, std::uint64_t seed) {
  if (sampler.size() != grid.size()) throw_invalid("synthetic_2d: sampler does not cover the grid");
  Rng rng(seed);
  const Eigen::VectorXd draw = sampler.draw(rng);
  TabulatedOracle oracle;
  oracle.noise_var = kSyntheticNoise;
  oracle.values.resize(grid.design_count(), grid.env_count());
  for (Index x = 0; x < grid.design_count(); ++x) {
    for (Index w = 0; w < grid.env_count(); ++w) oracle.values(x, w) = draw[x * grid.env_count() + w];
  }
  return oracle;
}

TabulatedOracle synthetic_2d(const ProblemGrid& grid, const KernelSpec& kernel, std::uint64_t seed) {
  return synthetic_2d(GpFunctionSampler(kernel, joint_points(grid)), grid, seed);
}

double himmelblau_scaled(double a, double b) {
  const double p = a * a + b - 11.0;
  const double q = a + b * b - 7.0;
  return (-(p * p + q * q) + 104.8905) / std::sqrt(3281.531);
}

TabulatedOracle himmelblau_oracle(const ProblemGrid& grid) {
  if (grid.design_dim() != 2 || grid.env_dim() != 2) throw_invalid("himmelblau_oracle: needs a 2+2 dimensional grid");
  TabulatedOracle oracle;
  oracle.noise_var = kSyntheticNoise;
  oracle.values.resize(grid.design_count(), grid.env_count());
  for (Index x = 0; x < grid.design_count(); ++x) {
    for (Index w = 0; w < grid.env_count(); ++w) {
      oracle.values(x, w) = himmelblau_scaled(grid.design()(x, 0) + grid.env()(w, 0),
                                              grid.design()(x, 1) + 0.5 * grid.env()(w, 1));
    }
  }
  return oracle;
}

namespace {
std::vector<Eigen::VectorXd> cube_points() {
  const Eigen::MatrixXd cube = cartesian(axis_lattice(2.0, 7), 3);
  std::vector<Eigen::VectorXd> pts;
  for (Index r = 0; r < cube.rows(); ++r) pts.emplace_back(cube.row(r).transpose());
  return pts;
}
}  // namespace

Synthetic6dSampler::Synthetic6dSampler() : sampler_(se_from_denominator(1.75), cube_points()) {}

std::vector<Eigen::VectorXd> Synthetic6dSampler::components(std::uint64_t seed) const {
  std::vector<Eigen::VectorXd> out;
  for (std::uint64_t k = 0; k < 4; ++k) {
    Rng rng = Rng::derive(seed, k);
    out.push_back(sampler_.draw(rng));
  }
  return out;
}

TabulatedOracle Synthetic6dSampler::draw(const ProblemGrid& grid, std::uint64_t seed) const {
  if (grid.design_count() != 343 || grid.env_count() != 343) throw_invalid("synthetic_6d: needs the 7^3 x 7^3 grid");
  const auto f = components(seed);
  TabulatedOracle oracle;
  oracle.noise_var = kSyntheticNoise;
  oracle.values.resize(343, 343);
  for (Index x = 0; x < 343; ++x) {
    const Index i2 = (x / 7) % 7, i3 = x % 7;
    for (Index w = 0; w < 343; ++w) {
      const Index j1 = w / 49, j2 = (w / 7) % 7;
      oracle.values(x, w) = f[0][x] + f[1][i2 * 49 + i3 * 7 + j1] + f[2][i3 * 49 + j1 * 7 + j2] + f[3][w];
    }
  }
  return oracle;
}

TabulatedOracle synthetic_6d(const ProblemGrid& grid, std::uint64_t seed) { return Synthetic6dSampler().draw(grid, seed); }

CarrierProblem load_carrier_lifetime(const std::string& path) {
  const CsvTable table = read_csv(path);
  const std::vector<std::string> expected{"x1", "x2", "lt"};
  if (table.header != expected) {
    throw Error(ErrorCode::ParseError, path + ":1: expected header 'x1,x2,lt'");
  }
  CarrierProblem problem;
  std::map<std::pair<double, double>, double> lookup;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto where = path + ":" + std::to_string(table.line_numbers[r]);
    if (row.size() != 3) throw Error(ErrorCode::ParseError, where + ": expected 3 fields, got " + std::to_string(row.size()));
    const auto x1 = parse_double(row[0]);
    const auto x2 = parse_double(row[1]);
    const auto lt = parse_double(row[2]);
    if (!x1 || !x2 || !lt || !std::isfinite(*x1) || !std::isfinite(*x2) || !std::isfinite(*lt)) {
      throw Error(ErrorCode::ParseError, where + ": malformed number");
    }
    const auto [it, inserted] = lookup.insert_or_assign({*x1, *x2}, *lt);
    (void)it;
    if (!inserted) {
      problem.warnings.push_back(where + ": duplicate coordinate (" + format_double(*x1) + ", " + format_double(*x2) +
                                 "), last value kept");
    }
  }
  problem.grid = benchmark_grid(Benchmark::Carrier);
  const auto& X = problem.grid.design();
  const auto& W = problem.grid.env();
  problem.oracle.noise_var = 0.0;
  problem.oracle.values.resize(X.rows(), W.rows());
  for (Index x = 0; x < X.rows(); ++x) {
    for (Index w = 0; w < W.rows(); ++w) {
      const std::pair<double, double> key{X(x, 0) + W(w, 0), X(x, 1) + W(w, 1)};
      const auto it = lookup.find(key);
      if (it == lookup.end()) {
        throw Error(ErrorCode::DataError, path + ": missing lifetime at (" + format_double(key.first) + ", " +
                                              format_double(key.second) + ")");
      }
      problem.oracle.values(x, w) = it->second;
    }
  }
  return problem;
}

void write_carrier_standin(const std::string& path, std::uint64_t seed) {
  // A few smooth bumps on a positive baseline, in the same units range as the real surface.
  Rng rng(seed);
  struct Bump {
    double cx, cy, amp, width;
  };
  std::vector<Bump> bumps;
  for (int k = 0; k < 8; ++k) {
    Bump b;
    b.cx = 8.0 + 174.0 * rng.uniform();
    b.cy = 8.0 + 142.0 * rng.uniform();
    b.amp = (k % 3 == 2 ? -1.0 : 1.0) * (0.5 + 1.5 * rng.uniform());
    b.width = 15.0 + 30.0 * rng.uniform();
    bumps.push_back(b);
  }
  std::ostringstream os;
  os << "x1,x2,lt\n";
  for (int a = 1; a <= 88; ++a) {
    for (int b = 1; b <= 72; ++b) {
      const double x1 = 2.0 * a + 6.0;
      const double x2 = 2.0 * b + 6.0;
      double lt = 2.0;
      for (const auto& bump : bumps) {
        const double d2 = (x1 - bump.cx) * (x1 - bump.cx) + (x2 - bump.cy) * (x2 - bump.cy);
        lt += bump.amp * std::exp(-d2 / (2.0 * bump.width * bump.width));
      }
      os << format_double(x1) << ',' << format_double(x2) << ',' << format_double(lt) << '\n';
    }
  }
  write_text_file(path, os.str());
}

Optimum true_optimum(const TabulatedOracle& oracle, const MeasureSpec& spec, const EnvDist& dist) {
  if (static_cast<Index>(dist.size()) != oracle.values.cols()) throw_invalid("true_optimum: pmf size does not match table");
  Optimum opt;
  opt.values.resize(static_cast<std::size_t>(oracle.values.rows()));
  for (Index x = 0; x < oracle.values.rows(); ++x) {
    opt.values[static_cast<std::size_t>(x)] = measure_eval(spec, oracle.row(x), dist);
  }
  opt.x_star = argmax_first(opt.values);
  opt.f_star = opt.values[static_cast<std::size_t>(opt.x_star)];
  return opt;
}

}  // namespace robustbo
