// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Runs are written under $TMPDIR/evplane_acceptance.
#include "../support/bridge.hpp"
#include "../support/gradcheck.hpp"
#include "../support/oracles.hpp"
#include "../support/reeval.hpp"

#include "evplane/data/binary_image.hpp"
#include "evplane/data/gaussian.hpp"
#include "evplane/divergence/class_conditional.hpp"
#include "evplane/harness/experiment.hpp"
#include "evplane/plane/envelope.hpp"
#include "evplane/plane/voting.hpp"
#include "evplane/snn/support.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

using namespace evplane;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kGaussianKlBits = 0.5 / 0.6931471805599453;  // 0.5 nats
constexpr double kGaussianKlTol = 0.07;
constexpr double kEnvelopeTol = 0.03;
constexpr double kExactVsExhaustiveTol = 1e-9;
constexpr double kBinaryImagePaperBits = 26.6;
constexpr double kMcStandardErrors = 3.0;
constexpr long kMcSamples = 1'000'000;
constexpr double kKnnVsOracleBits = 2.5;
constexpr double kRegionTolBits = 3.0;
constexpr double kMinPThetaBits = 4.0;
constexpr double kDThetaLow = 5.0, kDThetaHigh = 10.0;
constexpr double kDenseAccuracy = 0.99;
constexpr double kDpiTolBits = 3.0;
constexpr double kVoteSigmas = 3.0;
constexpr int kVoteGroups = 10000;
constexpr double kLifTol = 1e-12;
constexpr std::int64_t kSupportBoundTau5 = 1364;
constexpr double kSnnAccuracy = 0.95;
constexpr double kGradTol = 1e-4;
constexpr int kGradInstances = 25;
constexpr double kSoftmaxTol = 1e-12;
constexpr double kNoiseStabilityBits = 0.1;
constexpr double kMnistAccuracy = 0.95;
constexpr double kMnistRegionTolBits = 12.0;

constexpr double kBudget1 = 30, kBudget2 = 120, kBudget3 = 180, kBudget4 = 180, kBudget6 = 10,
                 kBudget7 = 600, kBudget8 = 30, kBudgetMnist = 900;

struct Outcome {
  bool pass = true;
  std::string detail;
};

const fs::path kWork = fs::temp_directory_path() / "evplane_acceptance";

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Trained runs shared by criteria 2, 4, 5 and 7.
std::vector<harness::RunResult> gaussian_runs, binary_runs;

harness::RunResult run_config(const std::string& name, std::uint64_t seed) {
  harness::RunOverrides o;
  o.seed = seed;
  o.output_dir = (kWork / (name + "_seed" + std::to_string(seed))).string();
  return harness::run_experiment(harness::load_config(std::string(EVPLANE_CONFIG_DIR) + "/" + name + ".cfg", o));
}

Outcome gaussian_recovery() {
  data::GaussianSpec spec;
  spec.dimension = 4;
  spec.mean_shift = 1.0;
  spec.samples_per_class = 10000;
  const auto ds = data::gen_gaussian_pair(spec, 101);
  divergence::KnnEstimatorConfig cfg;
  cfg.seed = 102;
  const auto res = divergence::class_conditional_divergence(
      divergence::ClassConditionalBundle::from_dataset(ds), cfg);
  const double est = res.per_class[0].bits;
  return {std::abs(est - kGaussianKlBits) <= kGaussianKlTol,
          fmt("D(P0||P1) = %.4f bits at k = %d, target %.4f +- %.2f", est, res.k_used,
              kGaussianKlBits, kGaussianKlTol)};
}

Outcome np_convergence() {
  const auto run = run_config("gaussian_dense", 1);
  gaussian_runs = {run};
  const auto& last = run.trajectory.back();
  const double a = last.alpha[0], b = last.beta[0];
  const double bayes = plane::bayes_error(1.0);
  const double to_env = plane::distance_to_envelope(a, b, 1.0);
  const double to_bayes = std::hypot(a - bayes, b - bayes);
  return {to_env <= kEnvelopeTol && to_bayes <= kEnvelopeTol,
          fmt("(alpha, beta) = (%.4f, %.4f); distance to envelope %.4f, to Bayes point %.4f (%.4f)",
              a, b, to_env, to_bayes, bayes)};
}

Outcome binary_image_chain() {
  Outcome out;
  double worst = 0.0;
  for (int d = 2; d <= 3; ++d)
    for (double p : {0.1, 0.25, 0.4}) {
      const double exact = data::binary_image_analytic_kl({d, p}, data::ExactKl{}).bits;
      worst = std::max(worst, std::abs(exact - oracle::binary_image_kl_exhaustive(d, p)));
    }
  const bool a = worst <= kExactVsExhaustiveTol;

  const auto mc = data::binary_image_analytic_kl({8, 0.1}, data::MonteCarloKl{kMcSamples, 103});
  const bool b = std::abs(mc.bits - kBinaryImagePaperBits) <= kMcStandardErrors * mc.standard_error;

  const auto ds = data::gen_binary_image({8, 0.1}, 10000, 104);
  divergence::KnnEstimatorConfig cfg;
  cfg.seed = 105;
  const auto knn = divergence::class_conditional_divergence(
      divergence::ClassConditionalBundle::from_dataset(ds), cfg);
  const bool c = std::abs(knn.bits - mc.bits) <= kKnnVsOracleBits;

  out.pass = a && b && c;
  out.detail = fmt("(a) %s max |exact - exhaustive| = %.2e; (b) %s MC = %.4f +- %.4f bits vs %.1f; "
                   "(c) %s kNN = %.3f bits at k = %d vs MC %.3f",
                   a ? "ok" : "FAIL", worst, b ? "ok" : "FAIL", mc.bits, mc.standard_error,
                   kBinaryImagePaperBits, c ? "ok" : "FAIL", knn.bits, knn.k_used, mc.bits);
  return out;
}

Outcome evidence_error_trajectory() {
  Outcome out;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    binary_runs.push_back(run_config("binary_image_dense", seed));
    const auto& r = binary_runs.back();
    const auto& last = r.trajectory.back();
    const auto& first = r.trajectory.at(1);
    const auto status = plane::region_check({last.p_theta_bits, last.d_theta_bits, last.epoch, {}, {}},
                                            {r.dinp_bits}, kRegionTolBits);
    const bool ok = last.test_acc >= kDenseAccuracy && status == plane::RegionStatus::inside &&
                    last.p_theta_bits >= kMinPThetaBits && last.d_theta_bits > first.d_theta_bits &&
                    last.d_theta_bits >= kDThetaLow && last.d_theta_bits <= kDThetaHigh;
    out.pass = out.pass && ok;
    detail += fmt("%sseed %d: acc %.4f, (D, P) = (%.2f, %.2f) %s, D epoch 1 = %.2f",
                  detail.empty() ? "" : "; ", static_cast<int>(seed), last.test_acc,
                  last.d_theta_bits, last.p_theta_bits, plane::to_string(status), first.d_theta_bits);
  }
  out.detail = detail;
  return out;
}

Outcome dpi() {
  Outcome out;
  int checked = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto* runs : {&gaussian_runs, &binary_runs})
    for (const auto& r : *runs) {
      if (!r.dinp_estimate_bits) {
        out.pass = false;
        continue;
      }
      for (const auto& rec : r.trajectory) {
        ++checked;
        const double slack = rec.d_theta_bits - *r.dinp_estimate_bits;
        worst = std::max(worst, slack);
        if (slack > kDpiTolBits) out.pass = false;
      }
    }
  if (checked == 0) out.pass = false;
  out.detail = fmt("%d epochs checked, max D_theta - D_inp estimate = %.3f bits (tol %.1f)", checked,
                   worst, kDpiTolBits);
  return out;
}

// Rows hold the class the stub predicts; class c gets the wrong label on a
// fraction p of its rows.
Outcome majority_voting() {
  Outcome out;
  std::string detail;
  for (double p : {0.1, 0.3, 0.7}) {
    data::LabeledDataset ds;
    ds.class_count = 2;
    const int rows = 1000, wrong = static_cast<int>(std::lround(p * rows));
    ds.features.resize(2 * rows, 1);
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < rows; ++i) {
        ds.features(c * rows + i, 0) = i < wrong ? 1 - c : c;
        ds.labels.push_back(c);
      }
    const plane::Classifier stub = [](const MatrixXd& x) {
      Labels out(static_cast<std::size_t>(x.rows()));
      for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = static_cast<int>(x(i, 0));
      return out;
    };
    const auto curve = plane::majority_vote_error_curve(stub, ds, {3}, kVoteGroups, 106);
    const double empirical = curve[0].rates.alpha[0];
    const double expected = plane::binary_majority_analytic(p);
    const double sigma = std::sqrt(expected * (1 - expected) / kVoteGroups);
    bool ok = std::abs(empirical - expected) <= kVoteSigmas * sigma;
    if (p == 0.7) ok = ok && empirical > p;
    out.pass = out.pass && ok;
    detail += fmt("%sp = %.1f: %.4f vs %.4f (sigma %.4f)", detail.empty() ? "" : "; ", p, empirical,
                  expected, sigma);
  }
  out.detail = detail;
  return out;
}

Outcome snn_dynamics() {
  std::mt19937_64 rng(107);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const auto net = bridge::random_network({3, 5, 4, 2}, rng, 1.5);
    snn::SNNConfig cfg;
    cfg.leak = 0.9;
    cfg.threshold = 0.8;
    std::bernoulli_distribution coin(0.5);
    std::vector<MatrixXd> spikes;
    for (int t = 0; t < 5; ++t) {
      MatrixXd s(3, 3);
      for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = coin(rng);
      spikes.push_back(s);
    }
    const auto trace = snn::lif_forward<double>(net, spikes, cfg);
    const auto layers = bridge::layers_of(net);
    for (Eigen::Index i = 0; i < 3; ++i) {
      std::vector<oracle::Vec> in;
      for (const auto& s : spikes) in.push_back(bridge::row_of(s, i));
      const auto ref = oracle::lif_unrolled(layers, in, cfg.leak, cfg.threshold);
      for (std::size_t l = 0; l < layers.size(); ++l)
        for (std::size_t t = 0; t < 5; ++t)
          for (std::size_t n = 0; n < ref.u[l][t].size(); ++n)
            worst = std::max(worst, std::abs(trace.potential[l][t](i, static_cast<Eigen::Index>(n)) - ref.u[l][t][n]));
    }
  }
  std::size_t largest = 0;
  std::uniform_real_distribution<double> w(-3.0, 3.0), eta(0.05, 0.99);
  for (int rep = 0; rep < 50; ++rep)
    largest = std::max(largest, snn::enumerate_reachable_potentials(w(rng), 1.0, eta(rng), 5).size());
  const bool bound_ok = snn::membrane_support_bound(5) == kSupportBoundTau5 &&
                        static_cast<std::int64_t>(largest) <= kSupportBoundTau5;

  const auto run = run_config("binary_image_snn", 1);
  const auto& last = run.trajectory.back();
  const auto& first = run.trajectory.at(1);
  const bool train_ok = last.test_acc > kSnnAccuracy && last.d_theta_bits > first.d_theta_bits;
  return {worst <= kLifTol && bound_ok && train_ok,
          fmt("max |U - unrolled| = %.1e; largest support %zu <= %lld; SNN acc %.4f, D epoch 1 %.2f -> final %.2f",
              worst, largest, static_cast<long long>(kSupportBoundTau5), last.test_acc,
              first.d_theta_bits, last.d_theta_bits)};
}

Outcome gradient_suites() {
  std::mt19937_64 rng(108);
  double dense = 0.0, spiking = 0.0;
  for (int i = 0; i < kGradInstances; ++i) dense = std::max(dense, gradcheck::dense_instance(rng));
  for (int i = 0; i < kGradInstances; ++i) spiking = std::max(spiking, gradcheck::snn_instance(rng));
  return {dense < kGradTol && spiking < kGradTol,
          fmt("%d instances each; max relative error dense %.2e, SNN %.2e", kGradInstances, dense, spiking)};
}

Outcome null_consistency_check() {
  Outcome out;
  std::string detail;
  std::mt19937_64 rng(109);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 3; ++rep) {
    MatrixXd x(300 + 100 * rep, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    divergence::KnnEstimatorConfig cfg;
    cfg.seed = 110 + static_cast<std::uint64_t>(rep);
    cfg.null_splits = 5;
    const int k1 = divergence::select_k_null_consistency(x, cfg);
    const int k2 = divergence::select_k_null_consistency(x, cfg);
    const auto ref = reeval::null_bias(x, cfg.candidate_ks, cfg.null_splits, cfg.seed);
    out.pass = out.pass && k1 == k2 && k1 == ref.k;
    detail += fmt("%sk = %d / %d, re-evaluated %d", detail.empty() ? "" : "; ", k1, k2, ref.k);
  }
  out.detail = detail;
  return out;
}

Outcome projection_invariance() {
  std::mt19937_64 rng(111);
  std::normal_distribution<double> normal(0.0, 4.0);
  MatrixXd z(1000, 5);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = normal(rng);
  const MatrixXd u = divergence::project_logits(z);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const auto direct = oracle::softmax(bridge::row_of(z, i));
    double denom = 1.0;
    for (Eigen::Index j = 0; j < u.cols(); ++j) denom += std::exp(u(i, j));
    for (Eigen::Index j = 0; j < u.cols(); ++j)
      worst = std::max(worst, std::abs(std::exp(u(i, j)) / denom - direct[static_cast<std::size_t>(j)]));
    worst = std::max(worst, std::abs(1.0 / denom - direct.back()));
  }
  return {worst <= kSoftmaxTol, fmt("max |softmax error| = %.2e over 1000 vectors", worst)};
}

Outcome noise_stability() {
  const auto ds = data::gen_binary_image({8, 0.1}, 5000, 112);
  divergence::KnnEstimatorConfig cfg;
  cfg.seed = 113;
  const auto sweep = divergence::noise_sweep(divergence::ClassConditionalBundle::from_dataset(ds),
                                             {1e-6, 1e-4}, cfg);
  const double gap = std::abs(sweep[0].bits - sweep[1].bits);
  return {gap < kNoiseStabilityBits, fmt("D(1e-6) = %.4f, D(1e-4) = %.4f bits at k = %d, gap %.4f",
                                         sweep[0].bits, sweep[1].bits, sweep[0].k_used, gap)};
}

std::optional<Outcome> mnist_smoke() {
  const char* dir = std::getenv("EVPLANE_MNIST_DIR");
  if (!dir) return std::nullopt;
  harness::RunOverrides o;
  o.output_dir = (kWork / "mnist_dense").string();
  auto cfg = harness::load_config(std::string(EVPLANE_CONFIG_DIR) + "/mnist_dense.cfg", o);
  const std::string base(dir);
  cfg.dataset.mnist_train_images = base + "/train-images-idx3-ubyte";
  cfg.dataset.mnist_train_labels = base + "/train-labels-idx1-ubyte";
  cfg.dataset.mnist_test_images = base + "/t10k-images-idx3-ubyte";
  cfg.dataset.mnist_test_labels = base + "/t10k-labels-idx1-ubyte";
  const auto r = harness::run_experiment(cfg);
  const auto& last = r.trajectory.back();
  const auto status = plane::region_check({last.p_theta_bits, last.d_theta_bits, last.epoch, {}, {}},
                                          {r.dinp_bits}, kMnistRegionTolBits);
  return Outcome{last.test_acc >= kMnistAccuracy && status == plane::RegionStatus::inside,
                 fmt("acc %.4f, (D, P) = (%.2f, %.2f) %s", last.test_acc, last.d_theta_bits,
                     last.p_theta_bits, plane::to_string(status))};
}

bool report(const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = budget_s <= 0 || secs <= budget_s;
  const bool pass = out.pass && in_time;
  std::string timing = fmt("%.1f s", secs);
  if (budget_s > 0) timing += fmt(" of %.0f s%s", budget_s, in_time ? "" : " OVER BUDGET");
  std::printf("%s %s: %s [%s]\n", pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str(), timing.c_str());
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main() {
  fs::create_directories(kWork);
  bool all = true;
  all &= report("1 gaussian analytic recovery", kBudget1, gaussian_recovery);
  all &= report("2 NP convergence", kBudget2, np_convergence);
  all &= report("3 binary image oracle chain", kBudget3, binary_image_chain);
  all &= report("4 evidence-error trajectory", kBudget4, evidence_error_trajectory);
  all &= report("5 DPI at estimator tolerance", 0, dpi);
  all &= report("6 majority voting", kBudget6, majority_voting);
  all &= report("7 SNN dynamics and bound", kBudget7, snn_dynamics);
  all &= report("8 gradient suites", kBudget8, gradient_suites);
  all &= report("9 null-consistency k selection", 0, null_consistency_check);
  all &= report("10 projection invariance", 0, projection_invariance);
  all &= report("11 noise stability", 0, noise_stability);
  if (std::getenv("EVPLANE_MNIST_DIR"))
    all &= report("mnist smoke", kBudgetMnist, [] { return *mnist_smoke(); });
  else
    std::printf("SKIP mnist smoke: EVPLANE_MNIST_DIR not set\n");
  return all ? 0 : 1;
}
