#pragma once

#include <Eigen/Dense>

#include "shapelets/types.hpp"

namespace shapelets {

/// Standard deviations below this are treated as zero; z-normalization of
/// such a window yields exact zeros.
inline constexpr double kSigmaFloor = 1e-12;

struct EnvelopeConfig {
  Eigen::Index window_samples = 20;   // one second at the 20 Hz raw rate
  Eigen::Index downsample_factor = 20;
};

/// Centered moving maximum of |x|. The window covers
/// [i - (w-1)/2, i + w/2], truncated at the boundaries, so the output has
/// the same length and rate as the input.
TimeSeries peak_envelope(const TimeSeries& series, Eigen::Index window_samples);

/// Block maxima: output[i] = max of input over [i*factor, (i+1)*factor).
/// A trailing partial block is kept. Block max rather than decimation, so
/// single-sample spikes survive the rate reduction. The sample rate is
/// divided by factor.
TimeSeries downsample(const TimeSeries& series, Eigen::Index factor);

/// Hampel filter: a sample deviating from its window median by more than
/// k * 1.4826 * MAD is replaced by that median. Windows are centered and
/// truncated at the boundaries. A window with MAD = 0 treats any nonzero
/// deviation as an outlier.
TimeSeries remove_outliers(const TimeSeries& series, Eigen::Index window_samples, double k);

/// Subtracts the least-squares straight-line fit. The result has zero mean
/// and zero fitted slope.
TimeSeries detrend(const TimeSeries& series);

/// Mean 0, population standard deviation 1 (divide by length). Inputs with
/// standard deviation below kSigmaFloor map to exact zeros.
Eigen::ArrayXd z_normalize(const Eigen::Ref<const Eigen::ArrayXd>& values);

/// Least-squares line fit y = intercept + slope * i over sample index i.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};
LineFit fit_line(const Eigen::Ref<const Eigen::ArrayXd>& values);

}  // namespace shapelets
