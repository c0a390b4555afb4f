#pragma once

#include <vector>

namespace srbm {

// Kesten-Stigum critical noise 1/2 (1 - 1/sqrt(k)); k <= 1 is an error (no
// eps > 0 admits recovery).
double ks_threshold(double k);
bool ks_possible(double k, double eps);

// Majority of k voters each voting yes with probability p:
// P(Binom(k,p) > k/2) + 1/2 P(Binom(k,p) = k/2), by exact summation.
double majority_fn(int k, double p);

// Poisson-race form: P(Pois(kq) > Pois(k(1-q))) + 1/2 P(equal), truncated
// double summation with tails below 1e-12; terms are computed in log space.
double majority_fn_poisson(double k, double q);

// Closed form (q(1-q))^((k-1)/2) k C(k-1, (k-1)/2) for odd k; central
// difference with h = 1e-6 for even k.
double majority_derivative(int k, double q);

enum class MajorityModel { Regular, Poisson };

struct EpsStar {
  double eps_star;
  double q_star;
  double p_star;
};

// Maximizes M_k(q)/q on (0,1]: 1000-point pre-scan plus golden section on
// [1/2, 1] to width 1e-10, then a bisection polish on the stationarity
// residual q M'(q) - M(q) (golden section alone locates an argmax only to
// about sqrt(machine eps)). Returns eps* = 1 - 1/max, q* = argmax,
// p* = q*/(1 - eps*) = M_k(q*).
EpsStar eps_star(double k, MajorityModel model);

// Leading-order law 1/2 - (1/2) sqrt(log k / k).
double eps_star_asymptotic(double k);

struct AppendixABound {
  double general;  // k^3 p delta eps^2 P(Pois(k(1-p)) >= 3)^2 (kp + E[.|>=3] E[.|!=1])
  double K;        // k^2 p P(...)^2 (...): the eps-free form, valid when delta eps^2 >= 1/k
};
// p = P(Pois(k) = 1) = k e^-k; conditional expectations by truncated sums
// with tails below 1e-12. Requires k >= 9.
AppendixABound appendix_a_bound(double k, double eps);

struct Window {
  double eps_lo;
  double eps_hi;
  bool empty;
};
// Interval in which the random model is solvable but the semirandom model is
// not: (k^6 - K(k))^{1/6} < (1-2 eps)^{-2} < k, inverted to eps bounds
// (eps_hi = ks_threshold(k)).
Window semirandom_window(double k);

// Iterates p_0 = 1, p_{t+1} = M_k(p_t (1 - eps)); returns p_0..p_R.
std::vector<double> fixed_point_iterates(int k, double eps, int R, MajorityModel model);

// Greatest q in (0, 1] with M_k(q) = q/(1-eps); 0 when no nontrivial
// intersection exists. Grid scan from 1 downward plus bisection.
double greatest_intersection(int k, double eps, MajorityModel model);

}  // namespace srbm
