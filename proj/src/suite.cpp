#include "evobo/suite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "evobo/errors.hpp"

namespace evobo::suite {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

enum class Stream : std::uint64_t { XOpt = 1, FOpt, RotationR, RotationQ, Peaks, Signs, Permutation };

std::uint64_t instance_key(int function_id, int instance_id) {
  return splitmix(splitmix(static_cast<std::uint64_t>(function_id)) ^
                  static_cast<std::uint64_t>(instance_id));
}

// Counter-based generator: draw k of stream s is a pure function of (key, s, k).
class CounterStream {
 public:
  CounterStream(std::uint64_t key, Stream stream)
      : key_(splitmix(key ^ (static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL))) {}

  double uniform() {
    return static_cast<double>(splitmix(key_ ^ splitmix(counter_++)) >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

MatrixXd random_rotation(std::uint64_t key, Stream stream, int dim) {
  CounterStream rng(key, stream);
  MatrixXd m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = rng.normal();
  // Modified Gram-Schmidt, applied twice for orthogonality close to machine precision.
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < j; ++k) m.col(j) -= m.col(k).dot(m.col(j)) * m.col(k);
      m.col(j).normalize();
    }
  }
  return m;
}

// Elementwise transforms of the noiseless suite.
double t_osz(double x) {
  if (x == 0.0) return 0.0;
  const double xhat = std::log(std::abs(x));
  const double c1 = x > 0 ? 10.0 : 5.5;
  const double c2 = x > 0 ? 7.9 : 3.1;
  const double s = x > 0 ? 1.0 : -1.0;
  return s * std::exp(xhat + 0.049 * (std::sin(c1 * xhat) + std::sin(c2 * xhat)));
}

VectorXd t_osz(const VectorXd& x) { return x.unaryExpr([](double v) { return t_osz(v); }); }

VectorXd t_asy(const VectorXd& x, double beta) {
  const auto d = x.size();
  VectorXd out = x;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (x[i] > 0) {
      const double frac = d > 1 ? static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
      out[i] = std::pow(x[i], 1.0 + beta * frac * std::sqrt(x[i]));
    }
  }
  return out;
}

VectorXd lambda_diag(int dim, double alpha) {
  VectorXd out(dim);
  for (int i = 0; i < dim; ++i) {
    const double frac = dim > 1 ? static_cast<double>(i) / (dim - 1) : 0.0;
    out[i] = std::pow(alpha, 0.5 * frac);
  }
  return out;
}

double f_pen(const VectorXd& x) {
  double s = 0.0;
  for (double v : x) {
    const double excess = std::abs(v) - 5.0;
    if (excess > 0) s += excess * excess;
  }
  return s;
}

double rastrigin_core(const VectorXd& z) {
  const double d = static_cast<double>(z.size());
  double c = 0.0;
  for (double v : z) c += std::cos(2.0 * kPi * v);
  return 10.0 * (d - c) + z.squaredNorm();
}

double conditioned_sum(const VectorXd& z, double log10_cond) {
  const auto d = z.size();
  double s = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double frac = d > 1 ? static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
    s += std::pow(10.0, log10_cond * frac) * z[i] * z[i];
  }
  return s;
}

double rosenbrock_core(const VectorXd& z) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < z.size(); ++i) {
    const double a = z[i] * z[i] - z[i + 1];
    const double b = z[i] - 1.0;
    s += 100.0 * a * a + b * b;
  }
  return s;
}

double schaffers_core(const VectorXd& z) {
  const auto d = z.size();
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    const double si = std::sqrt(z[i] * z[i] + z[i + 1] * z[i + 1]);
    const double root = std::sqrt(si);
    const double sn = std::sin(50.0 * std::pow(si, 0.2));
    s += root + root * sn * sn;
  }
  s /= static_cast<double>(d - 1);
  return s * s;
}

struct GallagherPeaks {
  std::vector<VectorXd> rotated_centers;  // R * y_i
  std::vector<VectorXd> scales;           // diagonal of C_i
  std::vector<double> weights;
};

constexpr double kSchwefelOptimum = 4.2096874633;
constexpr double kLunacekMu0 = 2.5;

}  // namespace

struct InstanceData {
  ProblemSpec spec;
  std::vector<double> x_opt;
  VectorXd xopt;
  double f_opt = 0.0;
  std::uint64_t rotation_seed = 0;
  bool rotated = false;
  MatrixXd R;
  MatrixXd Q;
  VectorXd lambda10;
  VectorXd lambda100;
  VectorXd lambda1000;
  VectorXd signs;
  GallagherPeaks peaks;
  std::function<double(const InstanceData&, const VectorXd&)> core;
};

namespace {

using Core = std::function<double(const InstanceData&, const VectorXd&)>;

struct FunctionDef {
  const char* name;
  bool rotated;
  Core core;
};

double gallagher_core(const InstanceData& p, const VectorXd& x) {
  const VectorXd rx = p.R * x;
  const double d = static_cast<double>(x.size());
  double best = 0.0;
  for (std::size_t i = 0; i < p.peaks.weights.size(); ++i) {
    const VectorXd diff = rx - p.peaks.rotated_centers[i];
    const double quad = (diff.array().square() * p.peaks.scales[i].array()).sum();
    best = std::max(best, p.peaks.weights[i] * std::exp(-quad / (2.0 * d)));
  }
  const double t = t_osz(10.0 - best);
  return t * t + f_pen(x);
}

const std::array<FunctionDef, 25>& registry() {
  static const std::array<FunctionDef, 25> defs = {{
      {nullptr, false, nullptr},
      // f1 sphere
      {"sphere", false,
       [](const InstanceData& p, const VectorXd& x) { return (x - p.xopt).squaredNorm(); }},
      // f2 separable ellipsoid
      {"ellipsoid_separable", false,
       [](const InstanceData& p, const VectorXd& x) {
         return conditioned_sum(t_osz(VectorXd(x - p.xopt)), 6.0);
       }},
      // f3 separable rastrigin
      {"rastrigin_separable", false,
       [](const InstanceData& p, const VectorXd& x) {
         const VectorXd z = p.lambda10.cwiseProduct(t_asy(t_osz(VectorXd(x - p.xopt)), 0.2));
         return rastrigin_core(z);
       }},
      // f4 bueche-rastrigin
      {"bueche_rastrigin", false,
       [](const InstanceData& p, const VectorXd& x) {
         VectorXd z = t_osz(VectorXd(x - p.xopt));
         const auto d = z.size();
         for (Eigen::Index i = 0; i < d; ++i) {
           const double frac = d > 1 ? static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
           double s = std::pow(10.0, 0.5 * frac);
           if (z[i] > 0 && i % 2 == 0) s *= 10.0;
           z[i] *= s;
         }
         return rastrigin_core(z) + 100.0 * f_pen(x);
       }},
      // f5 linear slope: optimum sits on the boundary, not provided
      {nullptr, false, nullptr},
      // f6 attractive sector
      {"attractive_sector", true,
       [](const InstanceData& p, const VectorXd& x) {
         const VectorXd z = p.Q * p.lambda10.cwiseProduct(p.R * (x - p.xopt));
         double s = 0.0;
         for (Eigen::Index i = 0; i < z.size(); ++i) {
           const double w = z[i] * p.xopt[i] > 0 ? 100.0 : 1.0;
           s += (w * z[i]) * (w * z[i]);
         }
         return std::pow(t_osz(s), 0.9);
       }},
      // f7 step ellipsoid
      {"step_ellipsoid", true,
       [](const InstanceData& p, const VectorXd& x) {
         const VectorXd zhat = p.lambda10.cwiseProduct(p.R * (x - p.xopt));
         VectorXd ztilde(zhat.size());
         for (Eigen::Index i = 0; i < zhat.size(); ++i) {
           ztilde[i] = std::abs(zhat[i]) > 0.5 ? std::floor(0.5 + zhat[i])
                                               : std::floor(0.5 + 10.0 * zhat[i]) / 10.0;
         }
         const VectorXd z = p.Q * ztilde;
         return 0.1 * std::max(std::abs(zhat[0]) / 1e4, conditioned_sum(z, 2.0)) + f_pen(x);
       }},
      // f8 rosenbrock
      {"rosenbrock", false,
       [](const InstanceData& p, const VectorXd& x) {
         const double c = std::max(1.0, std::sqrt(static_cast<double>(x.size())) / 8.0);
         const VectorXd z = (c * (x - p.xopt)).array() + 1.0;
         return rosenbrock_core(z);
       }},
      // f9 rotated rosenbrock
      {"rosenbrock_rotated", true,
       [](const InstanceData& p, const VectorXd& x) {
         const double c = std::max(1.0, std::sqrt(static_cast<double>(x.size())) / 8.0);
         const VectorXd z = (c * (p.R * x)).array() + 0.5;
         return rosenbrock_core(z);
       }},
      // f10 rotated ellipsoid
      {"ellipsoid", true,
       [](const InstanceData& p, const VectorXd& x) {
         return conditioned_sum(t_osz(VectorXd(p.R * (x - p.xopt))), 6.0);
       }},
      // f11 discus
      {"discus", true,
       [](const InstanceData& p, const VectorXd& x) {
         const VectorXd z = t_osz(VectorXd(p.R * (x - p.xopt)));
         return 1e6 * z[0] * z[0] + z.tail(z.size() - 1).squaredNorm();
       }},
      // f12 bent cigar
      {"bent_cigar", true,
       [](const InstanceData& p, const VectorXd& x) {
         const VectorXd z = p.R * t_asy(VectorXd(p.R * (x - p.xopt)), 0.5);
         return z[0] * z[0] + 1e6 * z.tail(z.size() - 1).squaredNorm();
       }},
      // f13 sharp ridge
      {"sharp_ridge", true,
       [](const InstanceData& p, const VectorXd& x) {
         const VectorXd z = p.Q * p.lambda10.cwiseProduct(p.R * (x - p.xopt));
         return z[0] * z[0] + 100.0 * z.tail(z.size() - 1).norm();
       }},
      // f14 different powers
      {"different_powers", true,
       [](const InstanceData& p, const VectorXd& x) {
         const VectorXd z = p.R * (x - p.xopt);
         const auto d = z.size();
         double s = 0.0;
         for (Eigen::Index i = 0; i < d; ++i) {
           const double frac = d > 1 ? static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
           s += std::pow(std::abs(z[i]), 2.0 + 4.0 * frac);
         }
         return std::sqrt(s);
       }},
      // f15 rotated rastrigin
      {"rastrigin", true,
       [](const InstanceData& p, const VectorXd& x) {
         const VectorXd inner = t_asy(t_osz(VectorXd(p.R * (x - p.xopt))), 0.2);
         const VectorXd z = p.R * p.lambda10.cwiseProduct(p.Q * inner);
         return rastrigin_core(z);
       }},
      // f16 weierstrass
      {"weierstrass", true,
       [](const InstanceData& p, const VectorXd& x) {
         const VectorXd lam = lambda_diag(static_cast<int>(x.size()), 0.01);
         const VectorXd z = p.R * lam.cwiseProduct(p.Q * t_osz(VectorXd(p.R * (x - p.xopt))));
         double f0 = 0.0;
         for (int k = 0; k < 12; ++k) f0 += std::pow(0.5, k) * std::cos(kPi * std::pow(3.0, k));
         double s = 0.0;
         for (double zi : z) {
           for (int k = 0; k < 12; ++k)
             s += std::pow(0.5, k) * std::cos(2.0 * kPi * std::pow(3.0, k) * (zi + 0.5));
         }
         const double d = static_cast<double>(x.size());
         const double inner = s / d - f0;
         return 10.0 * inner * inner * inner + 10.0 / d * f_pen(x);
       }},
      // f17 schaffers F7
      {"schaffers", true,
       [](const InstanceData& p, const VectorXd& x) {
         const VectorXd z = p.lambda10.cwiseProduct(p.Q * t_asy(VectorXd(p.R * (x - p.xopt)), 0.5));
         return schaffers_core(z) + 10.0 * f_pen(x);
       }},
      // f18 schaffers F7, moderately ill-conditioned
      {"schaffers_ill_conditioned", true,
       [](const InstanceData& p, const VectorXd& x) {
         const VectorXd z =
             p.lambda1000.cwiseProduct(p.Q * t_asy(VectorXd(p.R * (x - p.xopt)), 0.5));
         return schaffers_core(z) + 10.0 * f_pen(x);
       }},
      // f19 composite griewank-rosenbrock
      {"griewank_rosenbrock", true,
       [](const InstanceData& p, const VectorXd& x) {
         const double d = static_cast<double>(x.size());
         const double c = std::max(1.0, std::sqrt(d) / 8.0);
         const VectorXd z = (c * (p.R * x)).array() + 0.5;
         double s = 0.0;
         for (Eigen::Index i = 0; i + 1 < z.size(); ++i) {
           const double a = z[i] * z[i] - z[i + 1];
           const double b = z[i] - 1.0;
           const double si = 100.0 * a * a + b * b;
           s += si / 4000.0 - std::cos(si);
         }
         return 10.0 / (d - 1.0) * s + 10.0;
       }},
      // f20 schwefel
      {"schwefel", false,
       [](const InstanceData& p, const VectorXd& x) {
         const auto d = x.size();
         const VectorXd xhat = 2.0 * p.signs.cwiseProduct(x);
         const VectorXd two_abs_opt = 2.0 * p.xopt.cwiseAbs();
         VectorXd zhat = xhat;
         for (Eigen::Index i = 1; i < d; ++i) zhat[i] += 0.25 * (xhat[i - 1] - two_abs_opt[i - 1]);
         const VectorXd z = 100.0 * (p.lambda10.cwiseProduct(zhat - two_abs_opt) + two_abs_opt);
         double s = 0.0;
         for (double zi : z) s += zi * std::sin(std::sqrt(std::abs(zi)));
         // Constant chosen so that the core vanishes at the optimum.
         const double peak = 100.0 * kSchwefelOptimum;
         const double offset = peak * std::sin(std::sqrt(peak)) / 100.0;
         return -s / (100.0 * static_cast<double>(d)) + offset + 100.0 * f_pen(VectorXd(z / 100.0));
       }},
      // f21 gallagher, 101 peaks
      {"gallagher_101", true, gallagher_core},
      // f22 gallagher, 21 peaks
      {"gallagher_21", true, gallagher_core},
      // f23 katsuura
      {"katsuura", true,
       [](const InstanceData& p, const VectorXd& x) {
         const VectorXd z = p.Q * p.lambda100.cwiseProduct(p.R * (x - p.xopt));
         const double d = static_cast<double>(x.size());
         double prod = 1.0;
         for (Eigen::Index i = 0; i < z.size(); ++i) {
           double s = 0.0;
           for (int j = 1; j <= 32; ++j) {
             const double t = std::ldexp(z[i], j);
             s += std::abs(t - std::nearbyint(t)) / std::ldexp(1.0, j);
           }
           prod *= std::pow(1.0 + static_cast<double>(i + 1) * s, 10.0 / std::pow(d, 1.2));
         }
         return 10.0 / (d * d) * prod - 10.0 / (d * d) + f_pen(x);
       }},
      // f24 lunacek bi-rastrigin
      {"lunacek_bi_rastrigin", true,
       [](const InstanceData& p, const VectorXd& x) {
         const double d = static_cast<double>(x.size());
         const double s = 1.0 - 1.0 / (2.0 * std::sqrt(d + 20.0) - 8.2);
         const double mu1 = -std::sqrt((kLunacekMu0 * kLunacekMu0 - 1.0) / s);
         const VectorXd xhat = 2.0 * p.signs.cwiseProduct(x);
         const VectorXd shifted = xhat.array() - kLunacekMu0;
         const VectorXd z = p.Q * p.lambda100.cwiseProduct(p.R * shifted);
         const double sphere0 = shifted.squaredNorm();
         const double sphere1 = d + s * (xhat.array() - mu1).square().sum();
         double c = 0.0;
         for (double zi : z) c += std::cos(2.0 * kPi * zi);
         return std::min(sphere0, sphere1) + 10.0 * (d - c) + 1e4 * f_pen(x);
       }},
  }};
  return defs;
}

GallagherPeaks make_peaks(int function_id, int dim, std::uint64_t key, const MatrixXd& R) {
  const bool many = function_id == 21;
  const int count = many ? 101 : 21;
  const double first_alpha = many ? 1000.0 : 1e6;
  const double spread = 4.9;
  const double first_spread = many ? 4.0 : 3.92;

  CounterStream rng(key, Stream::Peaks);
  CounterStream perm(key, Stream::Permutation);

  // Shuffles indices with the counter stream (Fisher-Yates).
  auto shuffled = [&perm](int n) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(perm.uniform() * (i + 1));
      std::swap(idx[i], idx[std::min(j, i)]);
    }
    return idx;
  };

  std::vector<double> alphas(count);
  alphas[0] = first_alpha;
  const auto order = shuffled(count - 1);
  for (int j = 0; j < count - 1; ++j)
    alphas[j + 1] = std::pow(1000.0, 2.0 * order[j] / static_cast<double>(count - 2));

  GallagherPeaks peaks;
  for (int i = 0; i < count; ++i) {
    VectorXd y(dim);
    const double half = i == 0 ? first_spread : spread;
    for (int k = 0; k < dim; ++k) y[k] = rng.uniform(-half, half);
    peaks.rotated_centers.push_back(R * y);

    const VectorXd base = lambda_diag(dim, alphas[i]);
    const auto p = shuffled(dim);
    VectorXd scale(dim);
    for (int k = 0; k < dim; ++k) scale[k] = base[p[k]] / std::pow(alphas[i], 0.25);
    peaks.scales.push_back(scale);

    const double w = i == 0 ? 10.0 : 1.1 + 8.0 * (i - 1) / static_cast<double>(count - 2);
    peaks.weights.push_back(w);
  }
  return peaks;
}

}  // namespace

ProblemInstance make_instance(const ProblemSpec& spec) {
  if (!is_implemented(spec.function_id))
    throw UnknownFunction("unknown function id f" + std::to_string(spec.function_id));
  if (spec.dim < 2) throw InvalidDim("dimension must be at least 2, got " + std::to_string(spec.dim));

  const auto& def = registry()[spec.function_id];
  const int d = spec.dim;
  const std::uint64_t key = instance_key(spec.function_id, spec.instance_id);

  auto data = std::make_shared<InstanceData>();
  data->spec = spec;
  data->rotated = def.rotated;
  data->rotation_seed = splitmix(key ^ static_cast<std::uint64_t>(Stream::RotationR));
  data->core = def.core;

  if (def.rotated) {
    data->R = random_rotation(key, Stream::RotationR, d);
    data->Q = random_rotation(key, Stream::RotationQ, d);
  } else {
    data->R = MatrixXd::Identity(d, d);
    data->Q = MatrixXd::Identity(d, d);
  }
  data->lambda10 = lambda_diag(d, 10.0);
  data->lambda100 = lambda_diag(d, 100.0);
  data->lambda1000 = lambda_diag(d, 1000.0);

  CounterStream fopt_rng(key, Stream::FOpt);
  data->f_opt = fopt_rng.uniform(-100.0, 100.0);

  CounterStream sign_rng(key, Stream::Signs);
  data->signs = VectorXd(d);
  for (int i = 0; i < d; ++i) data->signs[i] = sign_rng.uniform() < 0.5 ? -1.0 : 1.0;

  VectorXd xopt(d);
  CounterStream xopt_rng(key, Stream::XOpt);
  switch (spec.function_id) {
    case 8:
      for (int i = 0; i < d; ++i) xopt[i] = 0.75 * xopt_rng.uniform(-4.0, 4.0);
      break;
    case 9:
    case 19: {
      const double c = std::max(1.0, std::sqrt(static_cast<double>(d)) / 8.0);
      xopt = data->R.transpose() * VectorXd::Constant(d, 0.5 / c);
      break;
    }
    case 20:
      xopt = 0.5 * kSchwefelOptimum * data->signs;
      break;
    case 21:
    case 22:
      data->peaks = make_peaks(spec.function_id, d, key, data->R);
      xopt = data->R.transpose() * data->peaks.rotated_centers.front();
      break;
    case 24:
      xopt = 0.5 * kLunacekMu0 * data->signs;
      break;
    default:
      for (int i = 0; i < d; ++i) xopt[i] = xopt_rng.uniform(-4.0, 4.0);
  }
  data->xopt = xopt;
  data->x_opt.assign(xopt.data(), xopt.data() + d);

  return ProblemInstance(std::move(data));
}

ProblemInstance::ProblemInstance(std::shared_ptr<const InstanceData> data) : data_(std::move(data)) {}

const ProblemSpec& ProblemInstance::spec() const noexcept { return data_->spec; }
const std::vector<double>& ProblemInstance::x_opt() const noexcept { return data_->x_opt; }
double ProblemInstance::f_opt() const noexcept { return data_->f_opt; }
std::uint64_t ProblemInstance::rotation_seed() const noexcept { return data_->rotation_seed; }
const Eigen::MatrixXd& ProblemInstance::rotation() const noexcept { return data_->R; }
const Eigen::MatrixXd& ProblemInstance::second_rotation() const noexcept { return data_->Q; }
bool ProblemInstance::uses_rotation() const noexcept { return data_->rotated; }

double ProblemInstance::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != data_->spec.dim)
    throw DimensionMismatch("expected point of length " + std::to_string(data_->spec.dim) +
                            ", got " + std::to_string(x.size()));
  const VectorXd v = Eigen::Map<const VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  return data_->core(*data_, v) + data_->f_opt;
}

nlohmann::json ProblemInstance::to_record() const {
  return {{"function_id", data_->spec.function_id},
          {"instance_id", data_->spec.instance_id},
          {"dim", data_->spec.dim},
          {"x_opt", data_->x_opt},
          {"f_opt", data_->f_opt},
          {"rotation_seed", data_->rotation_seed}};
}

ProblemInstance instance_from_record(const nlohmann::json& record) {
  ProblemSpec spec{record.at("function_id").get<int>(), record.at("instance_id").get<int>(),
                   record.at("dim").get<int>()};
  auto inst = make_instance(spec);
  if (record.contains("rotation_seed") &&
      record.at("rotation_seed").get<std::uint64_t>() != inst.rotation_seed())
    throw InvalidConfig("instance record does not match this registry (rotation seed differs)");
  if (record.contains("f_opt") && record.at("f_opt").get<double>() != inst.f_opt())
    throw InvalidConfig("instance record does not match this registry (f_opt differs)");
  return inst;
}

std::vector<int> training_subset() { return {2, 4, 6, 8, 12, 14, 15, 18, 21, 23}; }

std::vector<int> implemented_functions() {
  std::vector<int> ids;
  for (int i = 1; i <= 24; ++i)
    if (is_implemented(i)) ids.push_back(i);
  return ids;
}

bool is_implemented(int function_id) noexcept {
  return function_id >= 1 && function_id <= 24 && registry()[function_id].core != nullptr;
}

std::string function_name(int function_id) {
  if (!is_implemented(function_id))
    throw UnknownFunction("unknown function id f" + std::to_string(function_id));
  return registry()[function_id].name;
}

}  // namespace evobo::suite
