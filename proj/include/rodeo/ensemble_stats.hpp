#pragma once
// Streaming mean/variance accumulation of pure-state ensembles on a fixed
// time grid. Workers accumulate into separate instances and the results are
// merged in a fixed order, so the final floating-point sums do not depend on
// the number of workers.

#include <cstddef>
#include <vector>

#include "rodeo/complex_linalg.hpp"

namespace rodeo {

struct DensitySeries {
  std::vector<double> times;
  std::vector<CMatrix> states;
};

// Mean density matrix per grid point plus per-entry standard errors of the
// real and imaginary parts (flattened d*d, row-major).
struct EnsembleResult {
  int dim = 0;
  long n_members = 0;
  std::vector<double> times;
  std::vector<CMatrix> mean;
  std::vector<std::vector<double>> se_re;
  std::vector<std::vector<double>> se_im;
};

class EnsembleStats {
 public:
  void init(int dim, std::size_t n_grid) {
    dim_ = dim;
    n_grid_ = n_grid;
    std::size_t total = n_grid * static_cast<std::size_t>(dim) * dim;
    sum_.assign(total, cplx(0.0));
    re_sq_.assign(total, 0.0);
    im_sq_.assign(total, 0.0);
    weight_ = 0.0;
  }

  int dim() const { return dim_; }
  std::size_t n_grid() const { return n_grid_; }

  // Adds `weight` copies of the projector of psi at grid index k. The weight
  // counts members, so it must be the same total across all k.
  void add_state(std::size_t k, const CVector& psi, double weight = 1.0) {
    const int d = dim_;
    std::size_t base = k * static_cast<std::size_t>(d) * d;
    for (int i = 0; i < d; ++i) {
      cplx pi = psi[static_cast<std::size_t>(i)];
      for (int j = 0; j < d; ++j) {
        cplx e = pi * std::conj(psi[static_cast<std::size_t>(j)]);
        std::size_t idx = base + static_cast<std::size_t>(i) * d + j;
        sum_[idx] += weight * e;
        re_sq_[idx] += weight * e.real() * e.real();
        im_sq_[idx] += weight * e.imag() * e.imag();
      }
    }
    if (k == 0) weight_ += weight;
  }

  void merge(const EnsembleStats& o) {
    for (std::size_t i = 0; i < sum_.size(); ++i) {
      sum_[i] += o.sum_[i];
      re_sq_[i] += o.re_sq_[i];
      im_sq_[i] += o.im_sq_[i];
    }
    weight_ += o.weight_;
  }

  // n_points limits the output grid (used when a run halts early).
  EnsembleResult finalize(const std::vector<double>& times,
                          std::size_t n_points) const {
    EnsembleResult r;
    r.dim = dim_;
    r.n_members = static_cast<long>(weight_ + 0.5);
    const double n = weight_;
    const int d = dim_;
    r.times.assign(times.begin(), times.begin() + static_cast<long>(n_points));
    r.mean.reserve(n_points);
    r.se_re.reserve(n_points);
    r.se_im.reserve(n_points);
    for (std::size_t k = 0; k < n_points; ++k) {
      CMatrix m(d);
      std::vector<double> sre(static_cast<std::size_t>(d) * d, 0.0);
      std::vector<double> sim(static_cast<std::size_t>(d) * d, 0.0);
      std::size_t base = k * static_cast<std::size_t>(d) * d;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          std::size_t idx = base + static_cast<std::size_t>(i) * d + j;
          cplx mean = sum_[idx] / n;
          m(i, j) = mean;
          if (n > 1.5) {
            double var_re = (re_sq_[idx] / n - mean.real() * mean.real()) * n / (n - 1.0);
            double var_im = (im_sq_[idx] / n - mean.imag() * mean.imag()) * n / (n - 1.0);
            sre[static_cast<std::size_t>(i) * d + j] =
                std::sqrt(std::max(0.0, var_re) / n);
            sim[static_cast<std::size_t>(i) * d + j] =
                std::sqrt(std::max(0.0, var_im) / n);
          }
        }
      r.mean.push_back(std::move(m));
      r.se_re.push_back(std::move(sre));
      r.se_im.push_back(std::move(sim));
    }
    return r;
  }

 private:
  int dim_ = 0;
  std::size_t n_grid_ = 0;
  double weight_ = 0.0;
  std::vector<cplx> sum_;
  std::vector<double> re_sq_, im_sq_;
};

}  // namespace rodeo
