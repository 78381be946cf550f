#include "shapelets/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace shapelets {

namespace {

double median_of(std::vector<double>& scratch) {
  const std::size_t n = scratch.size();
  auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(scratch.begin(), mid, scratch.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(scratch.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

TimeSeries peak_envelope(const TimeSeries& series, Eigen::Index window_samples) {
  const Eigen::Index n = series.length();
  if (window_samples < 1) {
    throw Error(ErrorCode::InvalidArgs, "envelope window must be >= 1");
  }
  if (window_samples > n) {
    throw Error(ErrorCode::WindowTooLarge,
                "envelope window " + std::to_string(window_samples) +
                    " exceeds series length " + std::to_string(n));
  }
  const Eigen::ArrayXd magnitude = series.samples().abs();
  const Eigen::Index left = (window_samples - 1) / 2;
  const Eigen::Index right = window_samples / 2;
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - left);
    const Eigen::Index hi = std::min(n - 1, i + right);
    out[i] = magnitude.segment(lo, hi - lo + 1).maxCoeff();
  }
  return TimeSeries(std::move(out), series.sample_rate_hz());
}

TimeSeries downsample(const TimeSeries& series, Eigen::Index factor) {
  if (factor < 1) {
    throw Error(ErrorCode::InvalidArgs, "downsample factor must be >= 1");
  }
  const Eigen::Index n = series.length();
  const Eigen::Index blocks = (n + factor - 1) / factor;
  Eigen::ArrayXd out(blocks);
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index lo = b * factor;
    const Eigen::Index len = std::min(factor, n - lo);
    out[b] = series.samples().segment(lo, len).maxCoeff();
  }
  return TimeSeries(std::move(out), series.sample_rate_hz() / static_cast<double>(factor));
}

TimeSeries remove_outliers(const TimeSeries& series, Eigen::Index window_samples, double k) {
  if (window_samples < 3 || window_samples % 2 == 0) {
    throw Error(ErrorCode::InvalidArgs, "outlier window must be odd and >= 3");
  }
  if (!(k > 0.0)) {
    throw Error(ErrorCode::InvalidArgs, "outlier threshold k must be positive");
  }
  const Eigen::Index n = series.length();
  const Eigen::Index half = window_samples / 2;
  const Eigen::ArrayXd& x = series.samples();
  Eigen::ArrayXd out = x;
  std::vector<double> scratch;
  scratch.reserve(static_cast<std::size_t>(window_samples));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
    const Eigen::Index hi = std::min(n - 1, i + half);
    scratch.assign(x.data() + lo, x.data() + hi + 1);
    const double med = median_of(scratch);
    for (double& v : scratch) v = std::abs(v - med);
    const double mad = median_of(scratch);
    const double deviation = std::abs(x[i] - med);
    // MAD = 0 degenerates to: any deviation at all is an outlier.
    const double limit = k * 1.4826 * mad;
    if (deviation > limit) out[i] = med;
  }
  return TimeSeries(std::move(out), series.sample_rate_hz());
}

LineFit fit_line(const Eigen::Ref<const Eigen::ArrayXd>& values) {
  const Eigen::Index n = values.size();
  const double nn = static_cast<double>(n);
  const double t_mean = 0.5 * (nn - 1.0);
  const double y_mean = values.mean();
  // sum (t - t_mean)^2 in closed form: n (n^2 - 1) / 12
  const double denom = nn * (nn * nn - 1.0) / 12.0;
  if (denom <= 0.0) return LineFit{y_mean, 0.0};
  double cov = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cov += (static_cast<double>(i) - t_mean) * (values[i] - y_mean);
  }
  const double slope = cov / denom;
  return LineFit{y_mean - slope * t_mean, slope};
}

TimeSeries detrend(const TimeSeries& series) {
  const Eigen::ArrayXd& x = series.samples();
  const LineFit fit = fit_line(x);
  Eigen::ArrayXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[i] = x[i] - (fit.intercept + fit.slope * static_cast<double>(i));
  }
  return TimeSeries(std::move(out), series.sample_rate_hz());
}

Eigen::ArrayXd z_normalize(const Eigen::Ref<const Eigen::ArrayXd>& values) {
  const Eigen::Index n = values.size();
  if (n == 0) return Eigen::ArrayXd();
  const double mean = values.mean();
  const double var = (values - mean).square().sum() / static_cast<double>(n);
  const double sigma = std::sqrt(std::max(var, 0.0));
  if (sigma < kSigmaFloor) return Eigen::ArrayXd::Zero(n);
  return (values - mean) / sigma;
}

}  // namespace shapelets
