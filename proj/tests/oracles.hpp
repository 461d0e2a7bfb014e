// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's numerical kernels.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace oracle {

/// log N(x; 0, diag(var)) via a dense Cholesky factorization.
inline double dense_gaussian_logpdf(std::span<const double> x, std::span<const double> var) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cov(i, i) = var[i];
    v(i) = x[i];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const Eigen::MatrixXd L = llt.matrixL();
  const double logdet = 2.0 * L.diagonal().array().log().sum();
  const double quad = v.dot(llt.solve(v));
  return -0.5 * quad - 0.5 * logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

/// (tau^2 + nu)^(-alpha) with plain pow.
inline double eigenvalue(double nu, double tau, double alpha) {
  return std::pow(tau * tau + nu, -alpha);
}

/// Kolmogorov survival function Q(x) = 2 sum (-1)^(k-1) exp(-2 k^2 x^2).
inline double kolmogorov_q(double x) {
  if (x < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// One-sample KS p-value (Stephens' small-sample correction).
template <class Cdf>
double ks_pvalue(std::vector<double> xs, Cdf cdf, double* statistic = nullptr) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  if (statistic != nullptr) *statistic = d;
  const double sn = std::sqrt(n);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

/// Cell-centered Darcy system on an n x n grid assembled cell by cell from
/// the four face fluxes, solved densely. bc[side] = {is_dirichlet, value(s)}
/// with side order left, right, bottom, top.
struct Side {
  bool dirichlet;
  double (*value)(double);
};

inline std::vector<double> dense_darcy(int n, double length, const std::vector<double>& kappa,
                                       const std::vector<double>& f_cell, const Side bc[4]) {
  const double h = length / n;
  const int N = n * n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
  auto id = [n](int i, int j) { return i * n + j; };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int c = id(i, j);
      b(c) += f_cell[c] * h * h;
      const int ni[4] = {i - 1, i + 1, i, i};
      const int nj[4] = {j, j, j - 1, j + 1};
      for (int s = 0; s < 4; ++s) {
        if (ni[s] >= 0 && ni[s] < n && nj[s] >= 0 && nj[s] < n) {
          const int o = id(ni[s], nj[s]);
          const double t = 1.0 / (0.5 / kappa[c] + 0.5 / kappa[o]);
          A(c, c) += t;
          A(c, o) -= t;
          continue;
        }
        const double along = (s < 2 ? j + 0.5 : i + 0.5) * h;
        if (bc[s].dirichlet) {
          const double t = kappa[c] / 0.5;
          A(c, c) += t;
          b(c) += t * bc[s].value(along);
        } else {
          b(c) += bc[s].value(along) * h;
        }
      }
    }
  }
  const Eigen::VectorXd x = A.fullPivLu().solve(b);
  return std::vector<double>(x.data(), x.data() + N);
}

/// Welford-free two-pass mean and unbiased variance.
inline std::pair<double, double> two_pass(std::span<const double> xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, xs.size() > 1 ? ss / (xs.size() - 1) : 0.0};
}

}  // namespace oracle
