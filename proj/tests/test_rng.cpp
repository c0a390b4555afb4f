#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "srbm/rng.hpp"

using srbm::Rng;

TEST_CASE("rng: same seed reproduces the exact sequence") {
  Rng a(12345), b(12345);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng: different seeds diverge immediately") {
  Rng a(1), b(2);
  int agree = 0;
  for (int i = 0; i < 64; ++i) agree += (a.next_u64() == b.next_u64());
  CHECK(agree == 0);
}

TEST_CASE("rng: substreams are independent of parent draw position") {
  // Deriving a stream must not consume or depend on parent state, so the
  // substream is identical whether or not the parent has been advanced.
  Rng parent(99);
  Rng before = parent.stream("child");
  (void)parent.next_u64();
  (void)parent.next_u64();
  Rng after = parent.stream("child");
  for (int i = 0; i < 20; ++i) CHECK(before.next_u64() == after.next_u64());
}

TEST_CASE("rng: distinct labels give distinct streams, stable across types") {
  Rng root(7);
  Rng s1 = root.stream("edges");
  Rng s2 = root.stream("spins");
  Rng s3 = root.stream(uint64_t{0});
  Rng s4 = root.stream(uint64_t{1});
  std::set<uint64_t> firsts;
  firsts.insert(s1.next_u64());
  firsts.insert(s2.next_u64());
  firsts.insert(s3.next_u64());
  firsts.insert(s4.next_u64());
  CHECK(firsts.size() == 4);

  // Nested streams reproduce as well.
  Rng n1 = root.stream("a").stream(3);
  Rng n2 = root.stream("a").stream(3);
  CHECK(n1.next_u64() == n2.next_u64());
}

TEST_CASE("rng: uniform lies in [0,1) and has the right mean and variance") {
  Rng r(2024);
  const int n = 200000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  // mean se = sqrt(1/12/n) ~ 6.5e-4; allow 5 sigma.
  CHECK(std::abs(mean - 0.5) < 4e-3);
  CHECK(std::abs(var - 1.0 / 12.0) < 4e-3);
}

TEST_CASE("rng: fair_spin is unbiased and only returns +1/-1") {
  Rng r(5);
  const int n = 100000;
  long sum = 0;
  for (int i = 0; i < n; ++i) {
    int s = r.fair_spin();
    CHECK((s == 1 || s == -1));
    sum += s;
  }
  CHECK(std::abs(double(sum) / n) < 0.02);
}

TEST_CASE("rng: below(n) covers the full range uniformly") {
  Rng r(42);
  const uint64_t n = 7;
  std::vector<int> counts(n, 0);
  const int trials = 70000;
  for (int i = 0; i < trials; ++i) ++counts[r.below(n)];
  for (uint64_t v = 0; v < n; ++v) {
    double freq = double(counts[v]) / trials;
    CHECK(std::abs(freq - 1.0 / n) < 0.01);
  }
  CHECK(Rng(1).below(0) == 0);
  CHECK(Rng(1).below(1) == 0);
}

TEST_CASE("rng: poisson matches mean and variance, splits large means") {
  Rng r(77);
  for (double mean : {0.5, 3.0, 45.0}) {
    const int n = 60000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
      int x = r.poisson(mean);
      CHECK(x >= 0);
      sum += x;
      sumsq += double(x) * x;
    }
    double m = sum / n;
    double v = sumsq / n - m * m;
    double se = std::sqrt(mean / n);
    CHECK(std::abs(m - mean) < 6 * se);
    CHECK(std::abs(v - mean) < 0.1 * mean + 6 * se);
  }
  CHECK(Rng(1).poisson(0.0) == 0);
  CHECK(Rng(1).poisson(-1.0) == 0);
}

TEST_CASE("rng: geometric_skip has the failure-count law") {
  // P(skip = s) = (1-p)^s p; E = (1-p)/p.
  Rng r(31337);
  const double p = 0.2;
  const int n = 100000;
  double sum = 0;
  long zeros = 0;
  for (int i = 0; i < n; ++i) {
    uint64_t s = r.geometric_skip(p);
    sum += double(s);
    zeros += (s == 0);
  }
  double mean = sum / n;
  CHECK(std::abs(mean - (1 - p) / p) < 0.1);          // E = 4
  CHECK(std::abs(double(zeros) / n - p) < 0.01);      // P(0) = p
  CHECK(Rng(1).geometric_skip(0.0) == UINT64_MAX);    // sentinel: never
  CHECK(Rng(1).geometric_skip(1.0) == 0);             // always hits
  CHECK(Rng(1).geometric_skip(-0.5) == UINT64_MAX);
}

TEST_CASE("rng: bernoulli frequency tracks p") {
  Rng r(11);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += r.bernoulli(0.3);
  CHECK(std::abs(double(hits) / n - 0.3) < 0.01);
}
