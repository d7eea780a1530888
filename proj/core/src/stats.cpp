#include "polyfield/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace polyfield {

MeanSe mean_se(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  double s = 0.0;
  for (double x : xs) s += x;
  const double mean = s / static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - mean) * (x - mean);
  const double n = static_cast<double>(xs.size());
  const double var = xs.size() > 1 ? v / (n - 1) : 0.0;
  return {mean, std::sqrt(var / n), static_cast<long>(xs.size())};
}

MeanSe batch_means(const std::vector<double>& xs, int nbatch) {
  if (xs.size() < 4) return mean_se(xs);
  if (nbatch <= 1) nbatch = static_cast<int>(std::sqrt(static_cast<double>(xs.size())));
  nbatch = std::min<int>(nbatch, static_cast<int>(xs.size() / 2));
  const std::size_t per = xs.size() / static_cast<std::size_t>(nbatch);
  std::vector<double> batches;
  batches.reserve(static_cast<std::size_t>(nbatch));
  for (int b = 0; b < nbatch; ++b) {
    double s = 0.0;
    for (std::size_t i = static_cast<std::size_t>(b) * per; i < static_cast<std::size_t>(b + 1) * per; ++i)
      s += xs[i];
    batches.push_back(s / static_cast<double>(per));
  }
  auto ms = mean_se(batches);
  ms.n = static_cast<long>(xs.size());
  return ms;
}

double dispersion(const std::vector<double>& counts) {
  const auto ms = mean_se(counts);
  if (!(ms.mean != 0.0)) throw std::invalid_argument("dispersion of a zero-mean sample");
  double v = 0.0;
  for (double x : counts) v += (x - ms.mean) * (x - ms.mean);
  const double var = v / (static_cast<double>(counts.size()) - 1);
  return var / ms.mean;
}

double ks_statistic(std::vector<double> xs, std::vector<double> ys) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("empty sample");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double nx = static_cast<double>(xs.size()), ny = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double t = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] <= t) ++i;
    while (j < ys.size() && ys[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_threshold(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-std::log(alpha / 2) / 2);
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

double chi_square_two_sample_p(const std::vector<long>& a, const std::vector<long>& b,
                               long min_count) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("histogram size mismatch");
  // pool sparse bins left to right
  std::vector<std::pair<double, double>> bins;
  double ca = 0.0, cb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca += static_cast<double>(a[i]);
    cb += static_cast<double>(b[i]);
    if (ca + cb >= static_cast<double>(min_count)) {
      bins.push_back({ca, cb});
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0) {
    if (bins.empty())
      bins.push_back({ca, cb});
    else {
      bins.back().first += ca;
      bins.back().second += cb;
    }
  }
  if (bins.size() < 2) return 1.0;

  double na = 0.0, nb = 0.0;
  for (const auto& [x, y] : bins) na += x, nb += y;
  const double k1 = std::sqrt(nb / na), k2 = std::sqrt(na / nb);
  double stat = 0.0;
  for (const auto& [x, y] : bins) {
    const double num = k1 * x - k2 * y;
    stat += num * num / (x + y);
  }
  boost::math::chi_squared_distribution<double> dist(static_cast<double>(bins.size() - 1));
  return 1.0 - boost::math::cdf(dist, stat);
}

double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("need matched samples");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace polyfield
