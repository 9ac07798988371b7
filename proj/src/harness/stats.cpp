#include "abeam/harness/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace abeam {

namespace {

// Summing n copies of x and dividing by n need not give back x exactly.
bool constant(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); });
}

}  // namespace

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
  if (constant(xs)) return xs.front();
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

namespace {

double sum_sq_dev(std::span<const double> xs, double m) {
  if (constant(xs)) return 0;
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return s;
}

}  // namespace

double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("needs at least 2 samples");
  return std::sqrt(sum_sq_dev(xs, mean(xs)) / static_cast<double>(xs.size() - 1));
}

double ci95_half_width(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("ci95 needs at least 2 samples");
  const double n = static_cast<double>(xs.size());
  boost::math::students_t dist(n - 1);
  return boost::math::quantile(dist, 0.975) * sample_stddev(xs) / std::sqrt(n);
}

TTestResult t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("t-test needs at least 2 samples per group");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double ma = mean(a), mb = mean(b);
  TTestResult r;
  r.df = static_cast<int>(a.size() + b.size() - 2);
  const double sp2 = (sum_sq_dev(a, ma) + sum_sq_dev(b, mb)) / r.df;
  if (sp2 == 0) {
    if (ma == mb) return r;
    r.degenerate = true;
    r.t = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(sp2 * (1 / na + 1 / nb));
  boost::math::students_t dist(r.df);
  r.p = 2 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  return r;
}

}  // namespace abeam
