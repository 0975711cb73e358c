#ifndef CZQ_HELMHOLTZ_OPERATOR_HPP
#define CZQ_HELMHOLTZ_OPERATOR_HPP

#include <cstdio>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "czq/helmholtz/kernel.hpp"
#include "czq/helmholtz/local_correction.hpp"
#include "czq/parallel.hpp"

namespace czq {

inline constexpr double kBranchTolerance = 1e-12;

struct OperatorOptions {
  int order = 3;
  double eps = kDefaultZetaEps;
  int threads = 0;                 // 0: CZQ_THREADS or hardware
  bool check_branch = true;        // require Im r >= -1e-12 for every pair
  int dense_budget = 10000;        // nodes
};

namespace detail {

inline std::string branch_message(double min_im) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "Im r = %.3e below -1e-12; the complexification leaves the decaying branch", min_im);
  return buf;
}

inline void check_branch(double min_im, const OperatorOptions& opt) {
  if (opt.check_branch && min_im < -kBranchTolerance) throw Error(Errc::branch, branch_message(min_im));
}

struct CorrectionEntry {
  int col;
  cplx weight;
};

// Correction entries of row `node` for the combined coefficients of `ks`.
inline std::vector<CorrectionEntry> row_corrections(const SurfaceChart& chart, const GridSpec& grid, int node,
                                                    const KernelSpec& ks, const OperatorOptions& opt) {
  const cplx ad = ks.double_coef(), as = ks.single_coef();
  CorrectionRequest req{opt.order, as != 0.0, ad != 0.0, opt.eps};
  const LocalCorrection lc = local_correction(chart, grid, node, ks.k, req);
  const Offset at = grid.index_of(node);
  std::vector<CorrectionEntry> out;
  for (std::size_t i = 0; i < lc.offsets.size(); ++i) {
    const int i1 = at[0] + lc.offsets[i][0], i2 = at[1] + lc.offsets[i][1];
    if (!grid.contains(i1, i2)) continue;
    cplx w = 0.0;
    if (req.single) w += as * lc.single_weights[i];
    if (req.dbl) w += ad * lc.double_weights[i];
    out.push_back({grid.linear(i1, i2), w});
  }
  return out;
}

// Fixed lanes keep the summation order independent of buffer alignment, so results
// do not depend on how rows are split across threads.
inline cplx row_dot(const double* re, const double* im, const double* sr, const double* si, int n) {
  constexpr int kLanes = 8;
  double ar[kLanes] = {}, ai[kLanes] = {};
  int j = 0;
  for (; j + kLanes <= n; j += kLanes)
    for (int l = 0; l < kLanes; ++l) {
      ar[l] += re[j + l] * sr[j + l] - im[j + l] * si[j + l];
      ai[l] += re[j + l] * si[j + l] + im[j + l] * sr[j + l];
    }
  for (int l = 0; l < n - j; ++l) {
    ar[l] += re[j + l] * sr[j + l] - im[j + l] * si[j + l];
    ai[l] += re[j + l] * si[j + l] + im[j + l] * sr[j + l];
  }
  double tr = 0.0, ti = 0.0;
  for (int l = 0; l < kLanes; ++l) {
    tr += ar[l];
    ti += ai[l];
  }
  return {tr, ti};
}

}  // namespace detail

// Nystrom discretization of a layer operator on grid nodes. Off-diagonal entries
// are kernel x Jacobian x h1 h2; the local stencil around each row carries the
// zeta corrections, and the combined operator adds I/2.
class DiscretizedLayerOperator {
 public:
  DiscretizedLayerOperator(std::shared_ptr<const SurfaceChart> chart, const GridSpec& grid, const KernelSpec& kernel,
                           const OperatorOptions& opt = {})
      : chart_(std::move(chart)), kernel_(kernel), opt_(opt) {
    kernel_.validate();
    samples_ = sample_surface(*chart_, grid);
    const int n = samples_.size();
    corrections_.resize(n);
    parallel_for(n, opt_.threads,
                 [&](int l) { corrections_[l] = detail::row_corrections(*chart_, grid, l, kernel_, opt_); });
  }

  int size() const { return samples_.size(); }
  const GridSpec& grid() const { return samples_.grid; }
  const KernelSpec& kernel() const { return kernel_; }
  const OperatorOptions& options() const { return opt_; }
  int correction_order() const { return opt_.order; }
  const SurfaceChart& chart() const { return *chart_; }
  const SurfaceSamples& samples() const { return samples_; }
  const std::vector<detail::CorrectionEntry>& corrections(int row) const { return corrections_[row]; }

  std::vector<cplx> apply(std::span<const cplx> sigma) const {
    const int n = size();
    if (static_cast<int>(sigma.size()) != n) throw Error(Errc::domain, "density size does not match the grid");
    std::vector<double> sr(n), si(n);
    for (int j = 0; j < n; ++j) {
      sr[j] = sigma[j].real();
      si[j] = sigma[j].imag();
    }
    std::vector<cplx> out(n);
    std::vector<double> min_im(n);
    const auto rk = detail::row_kernel(samples_, kernel_);
    parallel_chunks(n, opt_.threads, [&](int lo, int hi) {
      std::vector<double> re(n), im(n);
      for (int l = lo; l < hi; ++l) {
        min_im[l] = rk.fill_row(l, re.data(), im.data());
        cplx acc = detail::row_dot(re.data(), im.data(), sr.data(), si.data(), n);
        for (const auto& c : corrections_[l]) acc += c.weight * sigma[c.col];
        out[l] = acc + kernel_.identity_coef() * sigma[l];
      }
    });
    detail::check_branch(*std::min_element(min_im.begin(), min_im.end()), opt_);
    return out;
  }

  Eigen::MatrixXcd dense() const {
    const int n = size();
    if (n > opt_.dense_budget)
      throw Error(Errc::budget, "dense operator with " + std::to_string(n) + " nodes exceeds the budget of " +
                                    std::to_string(opt_.dense_budget));
    Eigen::MatrixXcd a(n, n);
    std::vector<double> min_im(n);
    const auto rk = detail::row_kernel(samples_, kernel_);
    parallel_chunks(n, opt_.threads, [&](int lo, int hi) {
      std::vector<double> re(n), im(n);
      for (int l = lo; l < hi; ++l) {
        min_im[l] = rk.fill_row(l, re.data(), im.data());
        for (int j = 0; j < n; ++j) a(l, j) = cplx(re[j], im[j]);
        for (const auto& c : corrections_[l]) a(l, c.col) += c.weight;
        a(l, l) += kernel_.identity_coef();
      }
    });
    detail::check_branch(*std::min_element(min_im.begin(), min_im.end()), opt_);
    return a;
  }

 private:
  std::shared_ptr<const SurfaceChart> chart_;
  KernelSpec kernel_;
  OperatorOptions opt_;
  SurfaceSamples samples_;
  std::vector<std::vector<detail::CorrectionEntry>> corrections_;
};

inline DiscretizedLayerOperator assemble_combined_field(std::shared_ptr<const SurfaceChart> chart,
                                                        const GridSpec& grid, cplx k, const OperatorOptions& opt = {}) {
  return DiscretizedLayerOperator(std::move(chart), grid, {KernelKind::combined, k}, opt);
}

inline std::vector<cplx> single_layer_eval(std::shared_ptr<const SurfaceChart> chart, const GridSpec& grid,
                                           std::span<const cplx> sigma, cplx k, const OperatorOptions& opt = {}) {
  return DiscretizedLayerOperator(std::move(chart), grid, {KernelKind::single, k}, opt).apply(sigma);
}

inline std::vector<cplx> double_layer_eval(std::shared_ptr<const SurfaceChart> chart, const GridSpec& grid,
                                           std::span<const cplx> sigma, cplx k, const OperatorOptions& opt = {}) {
  return DiscretizedLayerOperator(std::move(chart), grid, {KernelKind::dbl, k}, opt).apply(sigma);
}

// One row of the corrected operator at `node`, without assembling the others.
inline cplx layer_potential_at(const SurfaceChart& chart, const SurfaceSamples& samples, std::span<const cplx> sigma,
                               const KernelSpec& kernel, int node, const OperatorOptions& opt = {}) {
  kernel.validate();
  const int n = samples.size();
  if (static_cast<int>(sigma.size()) != n) throw Error(Errc::domain, "density size does not match the grid");
  std::vector<double> re(n), im(n), sr(n), si(n);
  for (int j = 0; j < n; ++j) {
    sr[j] = sigma[j].real();
    si[j] = sigma[j].imag();
  }
  const double min_im = detail::row_kernel(samples, kernel).fill_row(node, re.data(), im.data());
  detail::check_branch(min_im, opt);
  cplx acc = detail::row_dot(re.data(), im.data(), sr.data(), si.data(), n);
  for (const auto& c : detail::row_corrections(chart, samples.grid, node, kernel, opt)) acc += c.weight * sigma[c.col];
  return acc + kernel.identity_coef() * sigma[node];
}

}  // namespace czq

#endif
