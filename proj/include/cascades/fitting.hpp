#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cascades/random.hpp"
#include "json.hpp"

namespace cascades {

enum class Family { lognormal, weibull, powerlaw };

std::string_view to_string(Family f);
Family parse_family(std::string_view name);

struct LognormalParams {
  double mu = 0.0;
  double sigma = 0.0;
};

struct WeibullParams {
  double shape = 0.0;
  double scale = 0.0;
};

// Continuous power law on [xmin, inf). For integer data the density is
// anchored at xmin - 0.5 (see FitResult::discrete).
struct PowerlawParams {
  double alpha = 0.0;
  double xmin = 0.0;
};

using FitParams = std::variant<LognormalParams, WeibullParams, PowerlawParams>;

struct FitResult {
  FitParams params;
  double log_likelihood = 0.0;
  double ks = 0.0;
  std::size_t sample_count = 0;  // samples the fit was computed on
  std::size_t tail_count = 0;    // powerlaw: samples >= xmin; others: all
  bool discrete = false;         // every sample was an integer
  bool degenerate = false;       // no spread in the data; ks/likelihood are NaN
  bool low_confidence = false;   // powerlaw tail smaller than 10 samples
  std::optional<double> p_value;  // bootstrap goodness of fit, when requested

  Family family() const { return static_cast<Family>(params.index()); }

  // Fitted CDF at x; the powerlaw CDF is conditional on the tail.
  double cdf(double x) const;
  // Draws one value from the fitted distribution (tail only for powerlaw).
  double draw(Rng& rng) const;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Weibull profile-likelihood root finding did not settle.
class ConvergenceError : public FitError {
 public:
  ConvergenceError(const std::string& what, double last_shape)
      : FitError(what), last_shape_(last_shape) {}
  double last_shape() const { return last_shape_; }

 private:
  double last_shape_;
};

// MLE of mu and sigma of ln(x); sigma uses the 1/n estimator. Requires >= 2
// samples, all positive.
FitResult fit_lognormal(std::span<const double> samples);

// MLE shape/scale. Requires >= 2 samples, all positive.
FitResult fit_weibull(std::span<const double> samples);

// Clauset-style tail fit: for each candidate xmin (distinct values up to the
// 90th percentile) the MLE alpha is computed and the xmin minimizing the KS
// distance on the tail is kept. Requires >= 10 positive samples.
FitResult fit_powerlaw(std::span<const double> samples);

FitResult fit(Family family, std::span<const double> samples);

// KS distance between the samples and a fitted CDF. With `discrete`, each
// integer k is compared as the interval [k - 0.5, k + 0.5).
double ks_statistic(std::span<const double> sorted_samples, const FitResult& fit);

struct RankedFits {
  std::vector<FitResult> ranked;  // ascending KS, then descending likelihood
  std::vector<std::pair<Family, std::string>> failures;
};

// Fits every family; failures are reported, never thrown.
RankedFits compare_fits(std::span<const double> samples,
                        std::span<const Family> families);

// Parametric bootstrap: share of synthetic refits whose KS is at least the
// observed one. For powerlaw the body below xmin is resampled from the data.
double bootstrap_p_value(std::span<const double> samples, const FitResult& fitted,
                         std::size_t repetitions, Rng& rng);

void to_json(nlohmann::json& j, const FitResult& r);

}  // namespace cascades
