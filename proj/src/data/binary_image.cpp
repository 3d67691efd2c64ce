#include "evplane/data/binary_image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace evplane::data {
namespace {

constexpr std::uint64_t kAnalyticSeed = 0x42494E494D47ULL;  // fixed MC stream for datasets
constexpr long kAnalyticSamples = 1'000'000;

// log(sum_i exp(-2 c_i ln(lambda))) for integer counts c_i.
template <typename Counts>
double log_sum_lambda_pow(const Counts& counts, double log_lambda) {
  double top = -std::numeric_limits<double>::infinity();
  for (auto c : counts) top = std::max(top, -2.0 * static_cast<double>(c) * log_lambda);
  double sum = 0.0;
  for (auto c : counts) sum += std::exp(-2.0 * static_cast<double>(c) * log_lambda - top);
  return top + std::log(sum);
}

std::vector<double> binomial_pmf(int n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k)
    pmf[static_cast<std::size_t>(k)] =
        std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                 (k ? k * std::log(p) : 0.0) + (n - k ? (n - k) * std::log1p(-p) : 0.0));
  return pmf;
}

// E[log sum_i lambda^(-2 C_i)] for independent C_i with the given pmfs.
double expected_log_sum(const std::vector<std::vector<double>>& pmfs, double log_lambda) {
  const std::size_t m = pmfs.size();
  std::vector<int> counts(m, 0);
  double total = 0.0;
  while (true) {
    double prob = 1.0;
    for (std::size_t i = 0; i < m; ++i) prob *= pmfs[i][static_cast<std::size_t>(counts[i])];
    if (prob > 0.0) total += prob * log_sum_lambda_pow(counts, log_lambda);
    std::size_t i = 0;
    for (; i < m; ++i) {
      if (++counts[i] < static_cast<int>(pmfs[i].size())) break;
      counts[i] = 0;
    }
    if (i == m) break;
  }
  return total;
}

KlValue exact_kl(const BinaryImageSpec& spec) {
  const int d = spec.side;
  if (d > 6) throw ResourceError("exact binary-image KL is limited to side <= 6");
  const double p = spec.flip_prob;
  const double log_lambda = std::log(spec.lambda());

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(d), binomial_pmf(d, p));
  rows[0] = binomial_pmf(d, 1.0 - p);

  // Column sum: one active-row pixel ~ Bern(1-p) plus Bin(d-1, p).
  const auto rest = binomial_pmf(d - 1, p);
  std::vector<double> col(static_cast<std::size_t>(d) + 1, 0.0);
  for (int k = 0; k < d; ++k) {
    col[static_cast<std::size_t>(k)] += p * rest[static_cast<std::size_t>(k)];
    col[static_cast<std::size_t>(k) + 1] += (1.0 - p) * rest[static_cast<std::size_t>(k)];
  }
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(d), col);

  const double nats = expected_log_sum(rows, log_lambda) - expected_log_sum(cols, log_lambda);
  return {nats_to_bits(nats), 0.0};
}

// Draws one image of class `label` into `pixels` (row-major).
template <typename Rng>
void draw_image(const BinaryImageSpec& spec, int label, Rng& rng, double* pixels) {
  const int d = spec.side;
  std::uniform_int_distribution<int> pick(0, d - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int active = pick(rng);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const bool on = label == 0 ? i == active : j == active;
      const bool flip = unif(rng) < spec.flip_prob;
      pixels[i * d + j] = (on != flip) ? 1.0 : 0.0;
    }
}

KlValue monte_carlo_kl(const BinaryImageSpec& spec, const MonteCarloKl& mc) {
  if (mc.samples < 2) throw DomainError("Monte Carlo KL needs at least two samples");
  std::mt19937_64 rng(mc.seed);
  std::vector<double> pixels(static_cast<std::size_t>(spec.pixels()));
  double mean = 0.0, m2 = 0.0;
  for (long s = 0; s < mc.samples; ++s) {
    draw_image(spec, 0, rng, pixels.data());
    const double phi = binary_image_llr(pixels, spec);
    const double delta = phi - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (phi - mean);
  }
  const double var = m2 / static_cast<double>(mc.samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(mc.samples))};
}

}  // namespace

void BinaryImageSpec::validate() const {
  if (side < 2) throw DomainError("binary image side must be at least 2");
  if (!(flip_prob > 0.0 && flip_prob < 1.0)) throw DomainError("flip probability must lie in (0, 1)");
}

LabeledDataset gen_binary_image(const BinaryImageSpec& spec, int samples_per_class,
                                std::uint64_t seed) {
  spec.validate();
  if (samples_per_class < 1) throw DomainError("samples_per_class must be at least 1");
  std::mt19937_64 rng(seed);
  const Eigen::Index n = 2 * static_cast<Eigen::Index>(samples_per_class);
  LabeledDataset out;
  out.features.resize(n, spec.pixels());
  out.labels.resize(static_cast<std::size_t>(n));
  out.class_count = 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    draw_image(spec, label, rng, out.features.row(i).data());
    out.labels[static_cast<std::size_t>(i)] = label;
  }
  out.analytic_divergence =
      spec.side <= 6 ? binary_image_analytic_kl(spec, ExactKl{}).bits
                     : binary_image_analytic_kl(spec, MonteCarloKl{kAnalyticSamples, kAnalyticSeed}).bits;
  return out;
}

double binary_image_llr(std::span<const double> pixels, const BinaryImageSpec& spec) {
  const int d = spec.side;
  if (static_cast<int>(pixels.size()) != d * d)
    throw DomainError("image has " + std::to_string(pixels.size()) + " pixels, expected " +
                      std::to_string(d * d));
  std::vector<int> row_sums(static_cast<std::size_t>(d), 0), col_sums(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double v = pixels[static_cast<std::size_t>(i * d + j)];
      if (v != 0.0 && v != 1.0) throw DomainError("binary image entry is neither 0 nor 1");
      if (v == 1.0) {
        ++row_sums[static_cast<std::size_t>(i)];
        ++col_sums[static_cast<std::size_t>(j)];
      }
    }
  const double log_lambda = std::log(spec.lambda());
  return nats_to_bits(log_sum_lambda_pow(row_sums, log_lambda) -
                      log_sum_lambda_pow(col_sums, log_lambda));
}

KlValue binary_image_analytic_kl(const BinaryImageSpec& spec, const KlMethod& method) {
  spec.validate();
  if (spec.flip_prob == 0.5) return {0.0, 0.0};
  if (std::holds_alternative<ExactKl>(method)) return exact_kl(spec);
  return monte_carlo_kl(spec, std::get<MonteCarloKl>(method));
}

}  // namespace evplane::data
