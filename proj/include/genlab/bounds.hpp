#pragma once

// Closed-form evaluators for the accuracy lower bound of approximate
// wide-net minimizers, the Rademacher and VC uniform bounds, the
// robustness upper bound, and the sample thresholds used by the sine
// and coprime constructions. Every logarithm is natural.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "genlab/error.hpp"

namespace genlab {

struct BoundTerm {
  std::string name;
  double value = 0.0;
};

struct BoundReport {
  double raw = 0.0;
  double clamped = 0.0;
  std::vector<BoundTerm> terms;  // raw == 1 - sum of term values
};

namespace detail {

inline BoundReport report_from_terms(std::vector<BoundTerm> terms) {
  BoundReport rep;
  double total = 0.0;
  for (const BoundTerm& t : terms) total += t.value;
  rep.raw = 1.0 - total;
  rep.clamped = std::min(1.0, std::max(0.0, rep.raw));
  rep.terms = std::move(terms);
  return rep;
}

}  // namespace detail

struct Th1Inputs {
  int n = 1;
  int W0 = 1;
  double c = 1.0;
  std::uint64_t W = 2;
  std::uint64_t N = 1;
  double delta = 0.05;
  double Lp = 1.0;
  double q = 1.0;
};

inline void validate(const Th1Inputs& in) {
  require(in.n >= 1, "bounds: input dimension must be at least 1");
  require(in.W0 >= 1, "bounds: reference width must be at least 1");
  require(in.c > 0, "bounds: margin constant must be positive");
  require(in.W >= static_cast<std::uint64_t>(in.W0) + 1,
          "bounds: width must be at least W0+1");
  require(in.N >= 1, "bounds: sample count must be positive");
  require(in.delta > 0 && in.delta < 1, "bounds: delta must be in (0,1)");
  require(in.Lp >= 1, "bounds: Lipschitz constant must be at least 1");
  require(in.q >= 1, "bounds: approximation factor must be at least 1");
}

inline BoundReport th1_lower_bound(const Th1Inputs& in) {
  validate(in);
  const double n = in.n;
  const double W = static_cast<double>(in.W);
  const double N = static_cast<double>(in.N);
  const double width_term =
      8.0 * in.q * std::exp(1.0) * in.W0 / (W * in.c);
  const double sampling_term = 8.0 * n * in.Lp * (1.0 + 4.0 * in.W0 / in.c) *
                               (std::sqrt(5.0) + std::sqrt(2.0)) *
                               std::sqrt(std::log(4.0 * n)) / std::sqrt(N);
  const double confidence_term =
      6.0 * std::sqrt(std::log(2.0 / in.delta) / (2.0 * N));
  return detail::report_from_terms({{"width", width_term},
                                    {"sampling", sampling_term},
                                    {"confidence", confidence_term}});
}

inline double rademacher_bound(double Lp, int n, std::uint64_t W, double a,
                               std::uint64_t N) {
  require(Lp >= 1, "rademacher_bound: Lipschitz constant must be at least 1");
  require(n >= 1, "rademacher_bound: dimension must be at least 1");
  require(a > 0, "rademacher_bound: clamp level must be positive");
  require(N >= 1, "rademacher_bound: sample count must be positive");
  const double nn = n;
  return 2.0 * Lp * (nn + 1.0) * (static_cast<double>(W) + 1.0 + a) *
         (std::sqrt(5.0 * std::log(4.0)) +
          std::sqrt(2.0 * std::log(2.0 * nn))) /
         std::sqrt(static_cast<double>(N));
}

inline double layered_rademacher(const std::vector<double>& lipschitz,
                                 const std::vector<double>& norms, int d,
                                 int n, std::uint64_t N) {
  require(d >= 1, "layered_rademacher: depth must be at least 1");
  require(lipschitz.size() == static_cast<std::size_t>(d),
          "layered_rademacher: need one Lipschitz constant per layer");
  require(norms.size() == static_cast<std::size_t>(d) + 1,
          "layered_rademacher: need d+1 norm bounds");
  require(n >= 1, "layered_rademacher: dimension must be at least 1");
  require(N >= 1, "layered_rademacher: sample count must be positive");
  double product = 1.0;
  for (const double L : lipschitz) {
    require(L >= 1, "layered_rademacher: Lipschitz constants must be >= 1");
    product *= L;
  }
  for (const double c : norms) {
    require(c >= 1, "layered_rademacher: norm bounds must be >= 1");
    product *= c;
  }
  const double dd = d;
  const double nn = n;
  return product / std::sqrt(static_cast<double>(N)) *
         (std::sqrt((dd + 3.0) * std::log(4.0)) +
          std::sqrt(2.0 * std::log(2.0 * nn)));
}

inline double vc_uniform_bound(std::uint64_t d, std::uint64_t N,
                               double delta) {
  require(d >= 1, "vc_uniform_bound: dimension must be at least 1");
  require(N >= d, "vc_uniform_bound: need at least d samples");
  require(delta > 0 && delta < 1, "vc_uniform_bound: delta must be in (0,1)");
  const double dd = static_cast<double>(d);
  const double NN = static_cast<double>(N);
  return std::sqrt((8.0 * dd * std::log(2.0 * std::exp(1.0) * NN / dd) +
                    8.0 * std::log(4.0 / delta)) /
                   NN);
}

struct RobustnessInputs {
  int n = 1;
  int W0 = 1;
  std::uint64_t W = 2;
  std::uint64_t N0 = 1;
  double c0 = 0.0;  // clean-margin constant of the reference construction
  double c1 = 0.0;  // mean perturbed margin of the narrow fit
  double delta = 0.05;
  double Lp = 1.0;
};

inline void validate(const RobustnessInputs& in) {
  require(in.n >= 1, "robustness bound: dimension must be at least 1");
  require(in.W0 >= 1, "robustness bound: reference width must be at least 1");
  require(in.W >= static_cast<std::uint64_t>(in.W0) + 1,
          "robustness bound: width must be at least W0+1");
  require(in.N0 >= 1, "robustness bound: sample count must be positive");
  require(in.c0 >= 0, "robustness bound: clean margin must be nonnegative");
  require(in.c1 >= 0, "robustness bound: perturbed margin must be nonnegative");
  require(in.delta > 0 && in.delta < 1,
          "robustness bound: delta must be in (0,1)");
  require(in.Lp >= 1,
          "robustness bound: Lipschitz constant must be at least 1");
}

inline BoundReport robustness_upper_bound(const RobustnessInputs& in) {
  validate(in);
  const double n = in.n;
  const double W0 = in.W0;
  const double W = static_cast<double>(in.W);
  const double N0 = static_cast<double>(in.N0);
  const double margin_term = (in.c0 - 2.0 * in.c1) / (8.0 * in.Lp * W0 * n);
  const double width_term =
      -(4.0 * in.c1 / (in.Lp * W0 * n)) * (W0 / W + 1.0 / W0);
  const double confidence_term =
      -2.0 * std::sqrt(std::log(2.0 / in.delta) / (2.0 * N0));
  const double sampling_term = -4.0 *
                               (std::sqrt(4.0 * std::log(4.0)) +
                                std::sqrt(2.0 * std::log(2.0 * n))) /
                               std::sqrt(N0);
  return detail::report_from_terms({{"margin", margin_term},
                                    {"width_excess", width_term},
                                    {"confidence", confidence_term},
                                    {"sampling", sampling_term}});
}

// Smallest N with failure probability at most delta for the diagonal
// parity construction.
inline std::int64_t sine_sample_threshold(int n, double delta) {
  require(n > 2, "sine_sample_threshold: dimension must exceed 2");
  require(delta > 0 && delta < 1,
          "sine_sample_threshold: delta must be in (0,1)");
  const double value =
      4.0 * std::log(delta / 2.0) / std::log(0.5 + 1.0 / n);
  return static_cast<std::int64_t>(std::ceil(value));
}

inline double coprime_prob_lower(int n, std::uint64_t N) {
  require(n >= 3, "coprime_prob_lower: dimension must be at least 3");
  require(N >= 4, "coprime_prob_lower: need at least 4 draws");
  return 1.0 - std::pow(0.5 + 1.0 / n,
                        static_cast<double>(N) / 4.0 - 1.0);
}

inline double pattern_count_bound(int n, std::uint64_t N) {
  require(n >= 1, "pattern_count_bound: dimension must be at least 1");
  require(N >= 1, "pattern_count_bound: sample count must be positive");
  const double cube = std::ldexp(1.0, n + 1);
  const double sauer = std::pow(
      std::exp(1.0) * static_cast<double>(N) / (n + 1.0), n + 1.0);
  return std::max(cube, sauer);
}

struct Requirements {
  std::uint64_t W_min = 0;
  std::uint64_t N_min = 0;
};

// Width and sample sizes at which the exact-minimizer accuracy bound
// reaches 1 - eps, splitting eps evenly across the three deficit terms.
inline Requirements cor44_requirements(int n, int W0, double c, double Lp,
                                       double eps, double delta) {
  require(n >= 1, "cor44_requirements: dimension must be at least 1");
  require(W0 >= 1, "cor44_requirements: reference width must be at least 1");
  require(c > 0, "cor44_requirements: margin constant must be positive");
  require(Lp >= 1,
          "cor44_requirements: Lipschitz constant must be at least 1");
  require(eps > 0 && eps < 1, "cor44_requirements: eps must be in (0,1)");
  require(delta > 0 && delta < 1,
          "cor44_requirements: delta must be in (0,1)");

  const double w_raw = 24.0 * std::exp(1.0) * W0 / (c * eps);
  require(w_raw < 9e18, "cor44_requirements: width requirement overflows");
  const std::uint64_t W_min =
      std::max<std::uint64_t>(static_cast<std::uint64_t>(std::ceil(w_raw)),
                              static_cast<std::uint64_t>(W0) + 1);

  const double sampling_root = 24.0 * n * Lp * (1.0 + 4.0 * W0 / c) *
                               (std::sqrt(5.0) + std::sqrt(2.0)) *
                               std::sqrt(std::log(4.0 * n)) / eps;
  const double n_sampling = sampling_root * sampling_root;
  const double n_confidence = 162.0 * std::log(2.0 / delta) / (eps * eps);
  const double n_raw = std::max({n_sampling, n_confidence, 1.0});
  require(n_raw < 9e18, "cor44_requirements: sample requirement overflows");
  return {W_min, static_cast<std::uint64_t>(std::ceil(n_raw))};
}

}  // namespace genlab
