#include "srbm/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace srbm {

double ks_threshold(double k) {
  if (!(k > 1.0))
    throw std::invalid_argument("ks_threshold: requires k > 1 (no eps admits recovery)");
  return 0.5 * (1.0 - 1.0 / std::sqrt(k));
}

bool ks_possible(double k, double eps) {
  double t = 1.0 - 2.0 * eps;
  return k * t * t > 1.0;
}

namespace {

// Binomial coefficients by Pascal's triangle, exact in doubles through k=50.
std::vector<double> binomial_row(int k) {
  std::vector<double> row(k + 1, 1.0);
  for (int i = 1; i <= k; ++i)
    for (int j = i - 1; j >= 1; --j) row[j] += row[j - 1];
  return row;
}

double log_binom(int k, int i) {
  return std::lgamma(k + 1.0) - std::lgamma(i + 1.0) - std::lgamma(k - i + 1.0);
}

// Poisson pmf values 0..n_max for the given mean, in linear space via
// log-space terms (safe for large means).
std::vector<double> poisson_pmf(double mean, int n_max) {
  std::vector<double> pmf(n_max + 1);
  if (mean == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  double lmean = std::log(mean);
  for (int i = 0; i <= n_max; ++i)
    pmf[i] = std::exp(-mean + i * lmean - std::lgamma(i + 1.0));
  return pmf;
}

int poisson_truncation(double mean) {
  return (int)std::ceil(mean + 12.0 * std::sqrt(mean) + 30.0);
}

}  // namespace

double majority_fn(int k, double p) {
  if (k < 1) throw std::invalid_argument("majority_fn: requires k >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("majority_fn: p outside [0,1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  if (p == 0.5) return 0.5;

  double sum = 0.0;
  if (k <= 50) {
    std::vector<double> binom = binomial_row(k);
    for (int i = k / 2 + 1; i <= k; ++i)
      sum += binom[i] * std::pow(p, i) * std::pow(1.0 - p, k - i);
    if (k % 2 == 0) sum += 0.5 * binom[k / 2] * std::pow(p, k / 2) * std::pow(1.0 - p, k / 2);
  } else {
    double lp = std::log(p), lq = std::log1p(-p);
    for (int i = k / 2 + 1; i <= k; ++i)
      sum += std::exp(log_binom(k, i) + i * lp + (k - i) * lq);
    if (k % 2 == 0)
      sum += 0.5 * std::exp(log_binom(k, k / 2) + (k / 2) * (lp + lq));
  }
  return std::min(1.0, sum);
}

double majority_fn_poisson(double k, double q) {
  if (!(k > 0)) throw std::invalid_argument("majority_fn_poisson: requires k > 0");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("majority_fn_poisson: q outside [0,1]");
  if (q == 0.5) return 0.5;
  // Race between X ~ Pois(kq) ("yes" votes) and Y ~ Pois(k(1-q)):
  // M = P(X > Y) + 1/2 P(X = Y) = sum_i P(X=i) (P(Y<i) + 1/2 P(Y=i)).
  const int n_max = poisson_truncation(k);
  std::vector<double> px = poisson_pmf(k * q, n_max);
  std::vector<double> py = poisson_pmf(k * (1.0 - q), n_max);
  double sum = 0.0, y_below = 0.0;
  for (int i = 0; i <= n_max; ++i) {
    sum += px[i] * (y_below + 0.5 * py[i]);
    y_below += py[i];
  }
  return std::min(1.0, sum);
}

double majority_derivative(int k, double q) {
  if (k < 1) throw std::invalid_argument("majority_derivative: requires k >= 1");
  if (k % 2 == 1) {
    int h = (k - 1) / 2;
    double binom = 1.0;
    for (int i = 0; i < h; ++i) binom = binom * (k - 1 - i) / (i + 1);  // C(k-1, h)
    return std::pow(q * (1.0 - q), h) * k * binom;
  }
  const double h = 1e-6;
  double lo = std::max(0.0, q - h), hi = std::min(1.0, q + h);
  return (majority_fn(k, hi) - majority_fn(k, lo)) / (hi - lo);
}

namespace {

double majority_any(double k, double q, MajorityModel model) {
  return model == MajorityModel::Regular ? majority_fn((int)std::llround(k), q)
                                         : majority_fn_poisson(k, q);
}

double derivative_any(double k, double q, MajorityModel model) {
  if (model == MajorityModel::Regular) {
    int ki = (int)std::llround(k);
    if (ki % 2 == 1) return majority_derivative(ki, q);
  }
  const double h = 1e-6;
  double lo = std::max(0.0, q - h), hi = std::min(1.0, q + h);
  return (majority_any(k, hi, model) - majority_any(k, lo, model)) / (hi - lo);
}

}  // namespace

EpsStar eps_star(double k, MajorityModel model) {
  if (model == MajorityModel::Regular && std::llround(k) < 3)
    throw std::invalid_argument("eps_star: regular model requires k >= 3");
  if (model == MajorityModel::Poisson && !(k > 1))
    throw std::invalid_argument("eps_star: Poisson model requires k > 1");

  auto ratio = [&](double q) { return majority_any(k, q, model) / q; };

  // Pre-scan guards against drifting into a wrong basin; the tangency
  // geometry puts the maximizer in (1/2, 1).
  const int grid = 1000;
  double best_q = 0.75, best_v = -1.0;
  for (int i = 1; i < grid; ++i) {
    double q = 0.5 + 0.5 * i / grid;
    double v = ratio(q);
    if (v > best_v) {
      best_v = v;
      best_q = q;
    }
  }

  double lo = std::max(0.5, best_q - 1.0 / grid), hi = std::min(1.0, best_q + 1.0 / grid);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = ratio(x1), f2 = ratio(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = ratio(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = ratio(x1);
    }
  }
  double q_star = 0.5 * (lo + hi);

  // Polish on the stationarity residual g(q) = q M'(q) - M(q), which crosses
  // zero downward at the argmax; golden section alone only reaches ~1e-8.
  auto resid = [&](double q) {
    return q * derivative_any(k, q, model) - majority_any(k, q, model);
  };
  double blo = std::max(0.5, q_star - 1e-6), bhi = std::min(1.0 - 1e-15, q_star + 1e-6);
  if (resid(blo) > 0.0 && resid(bhi) < 0.0) {
    for (int it = 0; it < 200 && bhi - blo > 1e-13; ++it) {
      double mid = 0.5 * (blo + bhi);
      (resid(mid) > 0.0 ? blo : bhi) = mid;
    }
    q_star = 0.5 * (blo + bhi);
  }

  double max_ratio = ratio(q_star);
  if (!(max_ratio > 1.0)) throw std::runtime_error("eps_star: no interior maximum above 1");
  EpsStar r;
  r.eps_star = 1.0 - 1.0 / max_ratio;
  r.q_star = q_star;
  r.p_star = q_star / (1.0 - r.eps_star);
  return r;
}

double eps_star_asymptotic(double k) {
  if (!(k >= 3)) throw std::invalid_argument("eps_star_asymptotic: requires k >= 3");
  return 0.5 - 0.5 * std::sqrt(std::log(k) / k);
}

AppendixABound appendix_a_bound(double k, double eps) {
  if (!(k >= 9)) throw std::invalid_argument("appendix_a_bound: requires k >= 9");
  if (!ks_possible(k, eps))
    throw std::invalid_argument("appendix_a_bound: requires k(1-2 eps)^2 > 1");

  const double p = k * std::exp(-k);  // P(Pois(k) = 1)
  const double lam3 = k * (1.0 - p);

  // P(Pois(lam3) >= 3) and E[Pois(lam3) | >= 3] from the first pmf terms.
  std::vector<double> pmf3 = poisson_pmf(lam3, 2);
  double p_lt3 = pmf3[0] + pmf3[1] + pmf3[2];
  double p_ge3 = 1.0 - p_lt3;
  double mean_lt3 = pmf3[1] + 2.0 * pmf3[2];
  double e_ge3 = (lam3 - mean_lt3) / p_ge3;

  // E[Pois(k) | != 1] = (k - P(X=1)) / (1 - P(X=1)).
  double e_ne1 = (k - p) / (1.0 - p);

  double delta = eps <= 1.0 / 3.0 ? 1.0 : (1.0 - 2.0 * eps) * (1.0 - 2.0 * eps) / (eps * eps);
  double core = p * p_ge3 * p_ge3 * (k * p + e_ge3 * e_ne1);
  AppendixABound b;
  b.K = k * k * core;
  b.general = k * k * k * delta * eps * eps * core;
  return b;
}

Window semirandom_window(double k) {
  if (!(k >= 9)) throw std::invalid_argument("semirandom_window: requires k >= 9");
  double K = appendix_a_bound(k, ks_threshold(k) - 1e-3).K;
  double k6 = std::pow(k, 6.0);
  Window w;
  w.eps_hi = ks_threshold(k);
  if (k6 - K <= 1.0) {
    w.eps_lo = 0.5;
    w.empty = true;
    return w;
  }
  w.eps_lo = 0.5 * (1.0 - std::pow(k6 - K, -1.0 / 12.0));
  w.empty = !(w.eps_lo < w.eps_hi);
  return w;
}

std::vector<double> fixed_point_iterates(int k, double eps, int R, MajorityModel model) {
  if (R < 0) throw std::invalid_argument("fixed_point_iterates: requires R >= 0");
  std::vector<double> iterates;
  iterates.reserve(R + 1);
  double p = 1.0;
  iterates.push_back(p);
  for (int r = 0; r < R; ++r) {
    p = majority_any((double)k, p * (1.0 - eps), model);
    iterates.push_back(p);
  }
  return iterates;
}

double greatest_intersection(int k, double eps, MajorityModel model) {
  if (!(eps >= 0.0) || !(eps < 1.0))
    throw std::invalid_argument("greatest_intersection: requires 0 <= eps < 1");
  // Largest q in (0,1] with M_k(q) = q/(1-eps): scan g(q) = M_k(q) - q/(1-eps)
  // downward from q=1 for the first sign change, then bisect.
  auto g = [&](double q) { return majority_any((double)k, q, model) - q / (1.0 - eps); };
  const int grid = 4000;
  double hi = 1.0, ghi = g(1.0);
  if (ghi > 0.0) return 1.0;  // M(1) = 1 > 1/(1-eps) cannot happen for eps >= 0
  for (int i = grid - 1; i >= 1; --i) {
    double q = (double)i / grid;
    double gq = g(q);
    if (gq > 0.0 && ghi <= 0.0) {
      double lo = q;
      for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    hi = q;
    ghi = gq;
  }
  return 0.0;
}

}  // namespace srbm
