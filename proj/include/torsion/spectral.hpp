#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "torsion/langevin.hpp"
#include "torsion/pendulum.hpp"

namespace torsion {

enum class WindowKind { Hann, Rectangular };

const char* window_name(WindowKind w);
WindowKind window_from_name(const std::string& name);

// Averaged-periodogram PSD, one-sided per Hz on the FFT bin grid
// 0 .. 1/(2 dt). Normalized so white noise of variance s^2 gives a flat
// density of 2 s^2 dt; sum(value) * df recovers the sample variance.
struct PsdEstimate {
  std::vector<double> frequency;  // Hz
  std::vector<double> value;
  int n_segments = 0;
  WindowKind window = WindowKind::Hann;
  double overlap_fraction = 0;
  double dt = 0;
};

// segment_len must be a power of two (radix-2 FFT) and fit in the record;
// the mean of each segment is removed before windowing.
PsdEstimate estimate_psd(const TimeSeries& ts, std::size_t segment_len,
                         double overlap_fraction, WindowKind window);

// Biased (1/N) autocovariance estimate about the record mean for lags
// 0..max_lag; lag 0 equals the sample variance exactly. Requires
// max_lag < length/10. Long records go through an FFT overlap path that is
// numerically equivalent to the direct sum.
std::vector<double> estimate_autocorr(const TimeSeries& ts,
                                      std::size_t max_lag);

struct EnsembleVariance {
  double variance = 0;
  double std_error = 0;  // chi-square standard error of the variance
  int n_records = 0;
};

// Variance across records of the per-record time average over [0, t_measure].
// Requires at least 100 records, each spanning t_measure.
EnsembleVariance ensemble_mean_variance(std::span<const TimeSeries> records,
                                        double t_measure);

struct BandDeviation {
  double f_lo = 0;
  double f_hi = 0;
  int n_bins = 0;
  double estimate_mean = 0;
  double model_mean = 0;
  double rel_deviation = 0;
};

struct ComparisonReport {
  std::vector<BandDeviation> bands;
  double score = 0;  // rms of the band relative deviations
  double max_abs_rel_deviation = 0;
  double tolerance = 0;
  bool pass = false;
};

// Band-averaged comparison of an estimate against a model spectrum (linear
// interpolation onto the estimate grid). Throws if supports are disjoint or
// a band contains no usable bin.
ComparisonReport compare_psd(const PsdEstimate& estimate,
                             const NoiseSpectrum& model,
                             std::span<const std::pair<double, double>> bands,
                             double tolerance);

// Contiguous decade band edges covering [f_lo, f_hi].
std::vector<std::pair<double, double>> decade_bands(double f_lo, double f_hi);

}  // namespace torsion
