#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <lapacke.h>

namespace deepesn::oracle {

std::vector<std::complex<double>> lapack_eigenvalues(const Matrix& m) {
  const lapack_int n = static_cast<lapack_int>(m.rows());
  std::vector<double> a(m.data(), m.data() + m.size());  // column-major copy
  std::vector<double> wr(static_cast<std::size_t>(n));
  std::vector<double> wi(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(), wi.data(),
                                        nullptr, 1, nullptr, 1);
  if (info != 0) throw std::runtime_error("dgeev failed");
  std::vector<std::complex<double>> ev;
  for (lapack_int i = 0; i < n; ++i) ev.emplace_back(wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]);
  return ev;
}

double lapack_spectral_radius(const Matrix& m) {
  double r = 0.0;
  for (const auto& z : lapack_eigenvalues(m)) r = std::max(r, std::abs(z));
  return r;
}

std::vector<double> naive_dft_magnitudes(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    long double re = 0.0L;
    long double im = 0.0L;
    for (std::size_t t = 0; t < n; ++t) {
      const long double angle = -2.0L * std::numbers::pi_v<long double> *
                                static_cast<long double>((k * t) % n) / static_cast<long double>(n);
      re += x[t] * std::cos(angle);
      im += x[t] * std::sin(angle);
    }
    out[k] = static_cast<double>(std::sqrt(re * re + im * im));
  }
  return out;
}

Matrix normal_equation_ridge(const Matrix& states, const Matrix& targets, double lambda) {
  Matrix gram = states.transpose() * states;
  gram.diagonal().array() += lambda;
  const Matrix rhs = states.transpose() * targets;
  return gram.ldlt().solve(rhs).transpose();
}

double mso_value(std::span<const double> phis, long t) {
  long double u = 0.0L;
  for (double phi : phis) u += std::sin(static_cast<long double>(phi) * static_cast<long double>(t));
  return static_cast<double>(u);
}

Matrix naive_layered_run(const Matrix& w_in, const std::vector<Matrix>& inter,
                         const std::vector<Matrix>& recurrent, double leak, const Matrix& inputs) {
  const std::size_t layers = recurrent.size();
  const long n = static_cast<long>(w_in.rows());
  const long steps = static_cast<long>(inputs.rows());
  std::vector<std::vector<double>> x(layers, std::vector<double>(static_cast<std::size_t>(n), 0.0));
  Matrix out(steps, static_cast<long>(layers) * n);
  for (long t = 0; t < steps; ++t) {
    for (std::size_t l = 0; l < layers; ++l) {
      std::vector<double> next(static_cast<std::size_t>(n));
      for (long i = 0; i < n; ++i) {
        double drive = 0.0;
        if (l == 0) {
          for (long j = 0; j < w_in.cols(); ++j) drive += w_in(i, j) * inputs(t, j);
        } else {
          for (long j = 0; j < n; ++j) drive += inter[l - 1](i, j) * x[l - 1][static_cast<std::size_t>(j)];
        }
        for (long j = 0; j < n; ++j) drive += recurrent[l](i, j) * x[l][static_cast<std::size_t>(j)];
        next[static_cast<std::size_t>(i)] = (1.0 - leak) * x[l][static_cast<std::size_t>(i)] + leak * drive;
      }
      x[l] = next;
      for (long i = 0; i < n; ++i) out(t, static_cast<long>(l) * n + i) = x[l][static_cast<std::size_t>(i)];
    }
  }
  return out;
}

}  // namespace deepesn::oracle
