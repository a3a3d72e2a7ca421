#include "torsion/spectral.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "torsion/constants.hpp"
#include "torsion/fft.hpp"

namespace torsion {

const char* window_name(WindowKind w) {
  return w == WindowKind::Hann ? "Hann" : "Rectangular";
}

WindowKind window_from_name(const std::string& name) {
  if (name == "Hann" || name == "hann") return WindowKind::Hann;
  if (name == "Rectangular" || name == "rectangular")
    return WindowKind::Rectangular;
  throw std::invalid_argument("unknown window '" + name + "'");
}

PsdEstimate estimate_psd(const TimeSeries& ts, std::size_t segment_len,
                         double overlap_fraction, WindowKind window) {
  ts.validate();
  const std::size_t n = ts.values.size();
  if (!fft::is_power_of_two(segment_len))
    throw std::invalid_argument("segment_len must be a power of two");
  if (segment_len < 4) throw std::invalid_argument("segment_len too small");
  if (segment_len > n)
    throw std::invalid_argument("record too short for segment_len");
  if (!(overlap_fraction >= 0.0) || !(overlap_fraction < 1.0))
    throw std::invalid_argument("overlap_fraction must be in [0, 1)");

  const std::size_t step = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::floor(static_cast<double>(segment_len) *
                        (1.0 - overlap_fraction))));

  std::vector<double> win(segment_len, 1.0);
  if (window == WindowKind::Hann)
    for (std::size_t j = 0; j < segment_len; ++j)
      win[j] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(j) /
                                     static_cast<double>(segment_len)));
  const double window_power =
      std::inner_product(win.begin(), win.end(), win.begin(), 0.0);

  const std::size_t n_bins = segment_len / 2 + 1;
  std::vector<double> accum(n_bins, 0.0);
  std::vector<std::complex<double>> buf(segment_len);

  int n_segments = 0;
  for (std::size_t start = 0; start + segment_len <= n; start += step) {
    double mean = 0;
    for (std::size_t j = 0; j < segment_len; ++j)
      mean += ts.values[start + j];
    mean /= static_cast<double>(segment_len);
    for (std::size_t j = 0; j < segment_len; ++j)
      buf[j] = (ts.values[start + j] - mean) * win[j];
    fft::transform(buf, false);
    for (std::size_t k = 0; k < n_bins; ++k) accum[k] += std::norm(buf[k]);
    ++n_segments;
  }

  PsdEstimate out;
  out.dt = ts.dt;
  out.window = window;
  out.overlap_fraction = overlap_fraction;
  out.n_segments = n_segments;
  out.frequency.resize(n_bins);
  out.value.resize(n_bins);
  const double df =
      1.0 / (static_cast<double>(segment_len) * ts.dt);
  const double scale =
      2.0 * ts.dt / (window_power * static_cast<double>(n_segments));
  for (std::size_t k = 0; k < n_bins; ++k) {
    out.frequency[k] = static_cast<double>(k) * df;
    const bool edge = (k == 0) || (k == n_bins - 1 && segment_len % 2 == 0);
    out.value[k] = accum[k] * (edge ? 0.5 * scale : scale);
  }
  return out;
}

namespace {

std::vector<double> autocorr_direct(const std::vector<double>& y,
                                    std::size_t max_lag) {
  const std::size_t n = y.size();
  std::vector<double> r(max_lag + 1, 0.0);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double s = 0;
    for (std::size_t i = 0; i + lag < n; ++i) s += y[i] * y[i + lag];
    r[lag] = s / static_cast<double>(n);
  }
  return r;
}

// Overlap-add correlation: the record is processed in blocks, each block
// correlated against its L-sample extension with one FFT pair. Equal to the
// direct sum up to rounding.
std::vector<double> autocorr_fft(const std::vector<double>& y,
                                 std::size_t max_lag) {
  const std::size_t n = y.size();
  std::size_t block = 4096;
  while (block < 4 * (max_lag + 1)) block <<= 1;
  std::size_t fft_len = 1;
  while (fft_len < block + max_lag + 1) fft_len <<= 1;

  std::vector<double> r(max_lag + 1, 0.0);
  std::vector<std::complex<double>> a(fft_len), b(fft_len);
  for (std::size_t start = 0; start < n; start += block) {
    const std::size_t len_a = std::min(block, n - start);
    const std::size_t len_b = std::min(block + max_lag, n - start);
    std::fill(a.begin(), a.end(), std::complex<double>(0.0));
    std::fill(b.begin(), b.end(), std::complex<double>(0.0));
    for (std::size_t i = 0; i < len_a; ++i) a[i] = y[start + i];
    for (std::size_t i = 0; i < len_b; ++i) b[i] = y[start + i];
    fft::transform(a, false);
    fft::transform(b, false);
    for (std::size_t i = 0; i < fft_len; ++i) a[i] = std::conj(a[i]) * b[i];
    fft::transform(a, true);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) r[lag] += a[lag].real();
  }
  for (auto& v : r) v /= static_cast<double>(n);
  return r;
}

}  // namespace

std::vector<double> estimate_autocorr(const TimeSeries& ts,
                                      std::size_t max_lag) {
  ts.validate();
  const std::size_t n = ts.values.size();
  if (max_lag >= n / 10)
    throw std::invalid_argument(
        "max_lag too large: need max_lag < length/10 for a stable estimate");
  double mean = 0;
  for (double v : ts.values) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = ts.values[i] - mean;

  const bool small = n * (max_lag + 1) <= (std::size_t{1} << 26);
  return small ? autocorr_direct(y, max_lag) : autocorr_fft(y, max_lag);
}

EnsembleVariance ensemble_mean_variance(std::span<const TimeSeries> records,
                                        double t_measure) {
  if (records.size() < 100)
    throw std::invalid_argument(
        "ensemble_mean_variance: need at least 100 independent records");
  if (!(t_measure > 0))
    throw std::invalid_argument("t_measure must be > 0");

  std::vector<double> means;
  means.reserve(records.size());
  for (const TimeSeries& rec : records) {
    rec.validate();
    const auto n_avg = static_cast<std::size_t>(
        std::max(1.0, std::floor(t_measure / rec.dt + 1e-9)));
    if (rec.values.size() < n_avg)
      throw std::invalid_argument(
          "ensemble_mean_variance: record shorter than t_measure");
    double m = 0;
    for (std::size_t i = 0; i < n_avg; ++i) m += rec.values[i];
    means.push_back(m / static_cast<double>(n_avg));
  }

  const double grand =
      std::accumulate(means.begin(), means.end(), 0.0) /
      static_cast<double>(means.size());
  double ss = 0;
  for (double m : means) ss += (m - grand) * (m - grand);
  EnsembleVariance out;
  out.n_records = static_cast<int>(means.size());
  out.variance = ss / static_cast<double>(means.size() - 1);
  out.std_error =
      out.variance * std::sqrt(2.0 / static_cast<double>(means.size() - 1));
  return out;
}

namespace {

double interp_model(const NoiseSpectrum& model, double f) {
  const auto& xs = model.frequency;
  auto it = std::lower_bound(xs.begin(), xs.end(), f);
  if (it == xs.begin()) return model.value.front();
  if (it == xs.end()) return model.value.back();
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double w = (f - xs[lo]) / (xs[hi] - xs[lo]);
  return model.value[lo] + w * (model.value[hi] - model.value[lo]);
}

}  // namespace

ComparisonReport compare_psd(const PsdEstimate& estimate,
                             const NoiseSpectrum& model,
                             std::span<const std::pair<double, double>> bands,
                             double tolerance) {
  model.validate();
  if (estimate.frequency.empty())
    throw std::invalid_argument("compare_psd: empty estimate");
  if (bands.empty()) throw std::invalid_argument("compare_psd: no bands");
  const double model_lo = model.frequency.front();
  const double model_hi = model.frequency.back();
  if (model_hi < estimate.frequency.front() ||
      model_lo > estimate.frequency.back())
    throw std::invalid_argument("compare_psd: disjoint frequency supports");

  ComparisonReport report;
  report.tolerance = tolerance;
  double sum_sq = 0;
  for (const auto& [lo, hi] : bands) {
    if (!(hi > lo)) throw std::invalid_argument("compare_psd: bad band");
    BandDeviation band;
    band.f_lo = lo;
    band.f_hi = hi;
    double est_sum = 0, model_sum = 0;
    for (std::size_t k = 0; k < estimate.frequency.size(); ++k) {
      const double f = estimate.frequency[k];
      if (f < lo || f >= hi || f < model_lo || f > model_hi) continue;
      est_sum += estimate.value[k];
      model_sum += interp_model(model, f);
      ++band.n_bins;
    }
    if (band.n_bins == 0)
      throw std::invalid_argument(
          "compare_psd: band has no overlapping bins");
    band.estimate_mean = est_sum / band.n_bins;
    band.model_mean = model_sum / band.n_bins;
    if (!(band.model_mean > 0))
      throw std::invalid_argument("compare_psd: model mean is zero in band");
    band.rel_deviation =
        std::abs(band.estimate_mean - band.model_mean) / band.model_mean;
    sum_sq += band.rel_deviation * band.rel_deviation;
    report.max_abs_rel_deviation =
        std::max(report.max_abs_rel_deviation, band.rel_deviation);
    report.bands.push_back(band);
  }
  report.score = std::sqrt(sum_sq / static_cast<double>(report.bands.size()));
  report.pass = report.max_abs_rel_deviation <= tolerance;
  return report;
}

std::vector<std::pair<double, double>> decade_bands(double f_lo, double f_hi) {
  if (!(f_lo > 0) || !(f_hi > f_lo))
    throw std::invalid_argument("decade_bands: need 0 < f_lo < f_hi");
  std::vector<std::pair<double, double>> bands;
  double lo = f_lo;
  while (lo < f_hi) {
    const double hi = std::min(lo * 10.0, f_hi);
    bands.emplace_back(lo, hi);
    lo = hi;
  }
  return bands;
}

}  // namespace torsion
