#include "cascades/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cascades {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMinTail = 10;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<double> checked_sorted(std::span<const double> samples,
                                   std::size_t minimum, std::string_view who) {
  if (samples.size() < minimum)
    throw FitError(std::string(who) + ": need at least " + std::to_string(minimum) +
                   " samples, got " + std::to_string(samples.size()));
  for (double x : samples)
    if (!(x > 0.0) || !std::isfinite(x))
      throw FitError(std::string(who) + ": samples must be positive and finite");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

bool all_integral(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(),
                     [](double x) { return x == std::floor(x); });
}

// Largest gap between the empirical CDF of `sorted` and `cdf`, evaluated on
// both sides of every jump. Returns early once the gap exceeds `give_up`.
template <class Cdf>
double ks_sorted(std::span<const double> sorted, const Cdf& cdf, double half_width,
                 double give_up = std::numeric_limits<double>::infinity()) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  const auto gap_at = [&](std::size_t i, std::size_t j) {
    const double v = sorted[i];
    return std::max(std::fabs(static_cast<double>(j) / n - cdf(v + half_width)),
                    std::fabs(static_cast<double>(i) / n - cdf(v - half_width)));
  };
  if (std::isfinite(give_up) && sorted.size() > 256) {
    // A coarse pass over every 64th group rejects most losing candidates cheaply.
    for (std::size_t k = 0; k < sorted.size(); k += 64) {
      const auto [lo, hi] = std::equal_range(sorted.begin(), sorted.end(), sorted[k]);
      d = std::max(d, gap_at(static_cast<std::size_t>(lo - sorted.begin()),
                             static_cast<std::size_t>(hi - sorted.begin())));
      if (d > give_up) return d;
    }
  }
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double v = sorted[i];
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == v) ++j;
    d = std::max(d, gap_at(i, j));
    if (d > give_up) return d;
    i = j;
  }
  return d;
}

double lognormal_cdf(double x, const LognormalParams& p) {
  if (x <= 0.0) return 0.0;
  return 0.5 * std::erfc(-(std::log(x) - p.mu) / (p.sigma * M_SQRT2));
}

double weibull_cdf(double x, const WeibullParams& p) {
  if (x <= 0.0) return 0.0;
  return -std::expm1(-std::pow(x / p.scale, p.shape));
}

double powerlaw_cdf(double x, double alpha, double lower) {
  if (x <= lower) return 0.0;
  return 1.0 - std::pow(x / lower, 1.0 - alpha);
}

double powerlaw_lower(const PowerlawParams& p, bool discrete) {
  return discrete ? p.xmin - 0.5 : p.xmin;
}

std::span<const double> tail_of(std::span<const double> sorted, double xmin) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), xmin);
  return sorted.subspan(static_cast<std::size_t>(it - sorted.begin()));
}

// Log-likelihood of integer tail data when each k is the rounding of a
// continuous power law on [xmin - 0.5, inf): P(k) = F(k + 0.5) - F(k - 0.5).
double interval_log_likelihood(std::span<const double> sorted_tail, double alpha) {
  const double lower = sorted_tail.front() - 0.5;
  double ll = 0.0;
  std::size_t i = 0;
  while (i < sorted_tail.size()) {
    const double k = sorted_tail[i];
    std::size_t j = i;
    while (j < sorted_tail.size() && sorted_tail[j] == k) ++j;
    const double lo = std::pow((k - 0.5) / lower, 1.0 - alpha);
    const double hi = std::pow((k + 0.5) / lower, 1.0 - alpha);
    ll += static_cast<double>(j - i) * std::log(lo - hi);
    i = j;
  }
  return ll;
}

// Golden-section maximization of the interval likelihood in alpha, started
// around the continuous approximation.
double interval_alpha(std::span<const double> sorted_tail, double guess) {
  double a = 1.0 + 1e-9;
  double b = std::max(10.0, 4.0 * guess);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = interval_log_likelihood(sorted_tail, c);
  double fd = interval_log_likelihood(sorted_tail, d);
  for (int iter = 0; iter < 200 && b - a > 1e-10 * b; ++iter) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = interval_log_likelihood(sorted_tail, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = interval_log_likelihood(sorted_tail, d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::lognormal: return "lognormal";
    case Family::weibull: return "weibull";
    case Family::powerlaw: return "powerlaw";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  if (name == "lognormal") return Family::lognormal;
  if (name == "weibull") return Family::weibull;
  if (name == "powerlaw") return Family::powerlaw;
  throw std::invalid_argument("unknown distribution family '" + std::string(name) + "'");
}

double FitResult::cdf(double x) const {
  return std::visit(
      overloaded{
          [&](const LognormalParams& p) { return lognormal_cdf(x, p); },
          [&](const WeibullParams& p) { return weibull_cdf(x, p); },
          [&](const PowerlawParams& p) {
            return powerlaw_cdf(x, p.alpha, powerlaw_lower(p, discrete));
          }},
      params);
}

double FitResult::draw(Rng& rng) const {
  return std::visit(
      overloaded{[&](const LognormalParams& p) {
                   return std::exp(p.mu + p.sigma * standard_normal(rng));
                 },
                 [&](const WeibullParams& p) {
                   return p.scale * std::pow(-std::log(uniform_open01(rng)), 1.0 / p.shape);
                 },
                 [&](const PowerlawParams& p) {
                   return powerlaw_lower(p, discrete) *
                          std::pow(uniform_open01(rng), -1.0 / (p.alpha - 1.0));
                 }},
      params);
}

double ks_statistic(std::span<const double> sorted_samples, const FitResult& fit) {
  std::span<const double> data = sorted_samples;
  if (const auto* p = std::get_if<PowerlawParams>(&fit.params))
    data = tail_of(sorted_samples, p->xmin);
  if (data.empty()) return kNaN;
  return ks_sorted(data, [&](double x) { return fit.cdf(x); },
                   fit.discrete ? 0.5 : 0.0);
}

FitResult fit_lognormal(std::span<const double> samples) {
  const auto sorted = checked_sorted(samples, 2, "lognormal fit");
  const double n = static_cast<double>(sorted.size());
  double mean = 0.0;
  for (double x : sorted) mean += std::log(x);
  mean /= n;
  double ss = 0.0;
  for (double x : sorted) ss += (std::log(x) - mean) * (std::log(x) - mean);

  FitResult r;
  r.params = LognormalParams{mean, std::sqrt(ss / n)};
  r.sample_count = r.tail_count = sorted.size();
  r.discrete = all_integral(sorted);
  if (sorted.front() == sorted.back()) {
    r.params = LognormalParams{std::log(sorted.front()), 0.0};
    r.degenerate = true;
    r.ks = r.log_likelihood = kNaN;
    return r;
  }
  const auto& p = std::get<LognormalParams>(r.params);
  double ll = 0.0;
  for (double x : sorted) {
    const double z = (std::log(x) - p.mu) / p.sigma;
    ll += -std::log(x) - std::log(p.sigma) - 0.5 * std::log(2.0 * M_PI) - 0.5 * z * z;
  }
  r.log_likelihood = ll;
  r.ks = ks_statistic(sorted, r);
  return r;
}

FitResult fit_weibull(std::span<const double> samples) {
  const auto sorted = checked_sorted(samples, 2, "weibull fit");
  FitResult r;
  r.sample_count = r.tail_count = sorted.size();
  r.discrete = all_integral(sorted);
  if (sorted.front() == sorted.back()) {
    r.params = WeibullParams{kNaN, sorted.front()};
    r.degenerate = true;
    r.ks = r.log_likelihood = kNaN;
    return r;
  }

  const double n = static_cast<double>(sorted.size());
  std::vector<double> logs(sorted.size());
  std::transform(sorted.begin(), sorted.end(), logs.begin(),
                 [](double x) { return std::log(x); });
  const double log_max = logs.back();
  const double mean_log = std::accumulate(logs.begin(), logs.end(), 0.0) / n;

  // Profile score g(k) = sum x^k ln x / sum x^k - 1/k - mean(ln x); increasing
  // in k with a single root. x^k is rescaled by max(x)^k for stability.
  auto score = [&](double k, double* slope) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double lx : logs) {
      const double w = std::exp(k * (lx - log_max));
      s0 += w;
      s1 += w * lx;
      s2 += w * lx * lx;
    }
    const double mean1 = s1 / s0;
    if (slope) *slope = s2 / s0 - mean1 * mean1 + 1.0 / (k * k);
    return mean1 - 1.0 / k - mean_log;
  };

  double lo = 1.0, hi = 1.0;
  while (score(lo, nullptr) > 0.0 && lo > 1e-8) lo /= 2.0;
  while (score(hi, nullptr) < 0.0 && hi < 1e8) hi *= 2.0;
  if (score(lo, nullptr) > 0.0 || score(hi, nullptr) < 0.0)
    throw ConvergenceError("weibull fit: could not bracket the shape", lo);

  double k = 0.5 * (lo + hi);
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    double slope = 0.0;
    const double g = score(k, &slope);
    if (g > 0.0) hi = k; else lo = k;
    double next = k - g / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - k) <= 1e-12 * k) {
      k = next;
      converged = true;
      break;
    }
    k = next;
  }
  if (!converged)
    throw ConvergenceError("weibull fit: shape did not converge in 200 iterations", k);

  double sum_w = 0.0;
  for (double lx : logs) sum_w += std::exp(k * (lx - log_max));
  const double scale = std::exp(log_max + std::log(sum_w / n) / k);
  r.params = WeibullParams{k, scale};

  double ll = 0.0;
  for (double lx : logs) {
    const double z = lx - std::log(scale);
    ll += std::log(k) - std::log(scale) + (k - 1.0) * z - std::exp(k * z);
  }
  r.log_likelihood = ll;
  r.ks = ks_statistic(sorted, r);
  return r;
}

FitResult fit_powerlaw(std::span<const double> samples) {
  const auto sorted = checked_sorted(samples, kMinTail, "powerlaw fit");
  const std::size_t n = sorted.size();
  FitResult r;
  r.sample_count = n;
  r.discrete = all_integral(sorted);
  const double offset = r.discrete ? 0.5 : 0.0;

  std::vector<double> suffix_log(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix_log[i] = suffix_log[i + 1] + std::log(sorted[i]);

  const double cutoff = sorted[static_cast<std::size_t>(0.9 * static_cast<double>(n - 1))];
  double best_ks = std::numeric_limits<double>::infinity();
  std::size_t best_start = n;
  double best_alpha = kNaN;
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < n && sorted[i] <= cutoff;) {
    starts.push_back(i);
    const double xmin = sorted[i];
    while (i < n && sorted[i] == xmin) ++i;
  }
  const auto candidate_ks = [&](std::size_t i, double bound, double& alpha) {
    const double lower = sorted[i] - offset;
    const std::size_t m = n - i;
    const double log_sum = suffix_log[i] - static_cast<double>(m) * std::log(lower);
    if (log_sum <= 0.0) return std::numeric_limits<double>::infinity();
    alpha = 1.0 + static_cast<double>(m) / log_sum;
    if (r.discrete) alpha = interval_alpha(std::span<const double>(sorted).subspan(i), alpha);
    const double a = alpha;
    return ks_sorted(
        std::span<const double>(sorted).subspan(i),
        [&](double x) { return powerlaw_cdf(x, a, lower); }, offset, bound);
  };
  // A coarse pass over every 32nd candidate gives an upper bound on the best
  // KS; the full pass then abandons any candidate that exceeds it.
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < starts.size(); k += 32) {
    double alpha = kNaN;
    bound = std::min(bound, candidate_ks(starts[k], bound, alpha));
  }
  for (std::size_t i : starts) {
    double alpha = kNaN;
    const double ks = candidate_ks(i, std::min(bound, best_ks), alpha);
    if (ks <= bound && ks < best_ks) {
      best_ks = ks;
      best_start = i;
      best_alpha = alpha;
    }
  }

  if (best_start == n || sorted.front() == sorted.back()) {
    r.params = PowerlawParams{kNaN, sorted.front()};
    r.degenerate = true;
    r.ks = r.log_likelihood = kNaN;
    r.tail_count = n;
    return r;
  }

  const double xmin = sorted[best_start];
  const double lower = xmin - offset;
  const std::size_t m = n - best_start;
  r.params = PowerlawParams{best_alpha, xmin};
  r.tail_count = m;
  r.low_confidence = m < kMinTail;
  r.ks = best_ks;
  if (r.discrete) {
    r.log_likelihood =
        interval_log_likelihood(std::span<const double>(sorted).subspan(best_start), best_alpha);
  } else {
    const double log_sum = suffix_log[best_start] - static_cast<double>(m) * std::log(lower);
    r.log_likelihood = static_cast<double>(m) * (std::log(best_alpha - 1.0) - std::log(lower)) -
                       best_alpha * log_sum;
  }
  return r;
}

FitResult fit(Family family, std::span<const double> samples) {
  switch (family) {
    case Family::lognormal: return fit_lognormal(samples);
    case Family::weibull: return fit_weibull(samples);
    case Family::powerlaw: return fit_powerlaw(samples);
  }
  throw std::invalid_argument("unknown family");
}

RankedFits compare_fits(std::span<const double> samples,
                        std::span<const Family> families) {
  RankedFits out;
  for (Family f : families) {
    try {
      out.ranked.push_back(fit(f, samples));
    } catch (const FitError& e) {
      out.failures.emplace_back(f, e.what());
    }
  }
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const FitResult& a, const FitResult& b) {
                     if (a.degenerate != b.degenerate) return !a.degenerate;
                     if (a.degenerate) return false;
                     if (a.ks != b.ks) return a.ks < b.ks;
                     return a.log_likelihood > b.log_likelihood;
                   });
  return out;
}

double bootstrap_p_value(std::span<const double> samples, const FitResult& fitted,
                         std::size_t repetitions, Rng& rng) {
  if (fitted.degenerate || repetitions == 0) return kNaN;
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  std::span<const double> body;
  if (const auto* p = std::get_if<PowerlawParams>(&fitted.params)) {
    const auto tail = tail_of(sorted, p->xmin);
    body = std::span<const double>(sorted).first(n - tail.size());
  }
  const double tail_share = static_cast<double>(n - body.size()) / static_cast<double>(n);

  std::size_t at_least = 0;
  std::vector<double> synthetic(n);
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    for (auto& x : synthetic) {
      if (!body.empty() && !bernoulli(rng, tail_share)) {
        x = body[uniform_index(rng, body.size())];
        continue;
      }
      x = fitted.draw(rng);
      if (fitted.discrete) x = std::max(1.0, std::floor(x + 0.5));
    }
    try {
      const auto refit = fit(fitted.family(), synthetic);
      if (!refit.degenerate && refit.ks >= fitted.ks) ++at_least;
    } catch (const FitError&) {
    }
  }
  return static_cast<double>(at_least) / static_cast<double>(repetitions);
}

void to_json(nlohmann::json& j, const FitResult& r) {
  nlohmann::json params = std::visit(
      overloaded{[](const LognormalParams& p) {
                   return nlohmann::json{{"mu", p.mu}, {"sigma", p.sigma}};
                 },
                 [](const WeibullParams& p) {
                   return nlohmann::json{{"shape", p.shape}, {"scale", p.scale}};
                 },
                 [](const PowerlawParams& p) {
                   return nlohmann::json{{"alpha", p.alpha}, {"xmin", p.xmin}};
                 }},
      r.params);
  j = nlohmann::json{{"family", to_string(r.family())},
                     {"params", std::move(params)},
                     {"log_likelihood", r.log_likelihood},
                     {"ks", r.ks},
                     {"samples", r.sample_count},
                     {"tail_samples", r.tail_count},
                     {"discrete", r.discrete},
                     {"degenerate", r.degenerate},
                     {"low_confidence", r.low_confidence}};
  if (r.p_value) j["p_value"] = *r.p_value;
}

}  // namespace cascades
