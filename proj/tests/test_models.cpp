#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "daml/error.hpp"
#include "daml/models/fixed_models.hpp"
#include "daml/models/negbin.hpp"
#include "daml/models/tgmm.hpp"
#include "daml/models/transforms.hpp"
#include "daml/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace daml;
namespace tf = daml::transforms;

namespace {

constexpr double kFdStep = 1e-5;
constexpr double kGradRtol = 1e-4;
constexpr double kGradAtol = 1e-7;

using test::chi2_critical;
using test::nb_pmf;
using test::trunc_cdf;

std::shared_ptr<PanelDataset> feature_panel(std::size_t sites, std::size_t periods, std::size_t feats,
                                            std::uint64_t seed) {
  auto p = std::make_shared<PanelDataset>(sites, periods, feats);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n;
  std::poisson_distribution<int> pois(3.0);
  for (double& v : p->features) v = 0.5 * n(gen);
  for (double& v : p->counts) v = pois(gen);
  return p;
}

void check_grad(GenerativeModel& model, std::span<const double> y, std::size_t t) {
  Vector grad(model.num_params());
  const double lp = model.logpdf_grad(y, t, grad);
  CHECK(lp == doctest::Approx(model.logpdf(y, t)).epsilon(1e-12));
  const Vector phi(model.params().begin(), model.params().end());
  auto f = [&](const Vector& x) {
    auto m = model.clone();
    m->set_params(x);
    return m->logpdf(y, t);
  };
  const Vector fd = test::central_diff(f, phi, kFdStep);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    INFO("param " << i << " analytic " << grad[i] << " fd " << fd[i]);
    CHECK(test::close_rel(grad[i], fd[i], kGradRtol, kGradAtol));
  }
}

}  // namespace

TEST_CASE("transforms") {
  CHECK(tf::softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(tf::sigmoid(0.0) == 0.5);
  CHECK(tf::softplus_inverse(tf::softplus(1.7)) == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(tf::softplus_inverse(tf::softplus(-20.0)) == doctest::Approx(-20.0).epsilon(1e-9));
  CHECK(tf::softplus(800.0) == 800.0);
  CHECK(tf::logit(tf::sigmoid(0.3)) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(tf::softplus_grad(0.7) == doctest::Approx(tf::sigmoid(0.7)));
  Vector out(3);
  tf::softmax(Vector{0, 0, 0}, out);
  for (double v : out) CHECK(v == doctest::Approx(1.0 / 3.0));
  CHECK(tf::log_sum_exp(Vector{1000, 1000}) == doctest::Approx(1000 + std::log(2.0)));
  CHECK(tf::log_normal_cdf(0.0) == doctest::Approx(std::log(0.5)));
  CHECK(tf::log_normal_cdf(-3.0) == doctest::Approx(std::log(0.5 * std::erfc(3.0 / std::sqrt(2.0)))).epsilon(1e-12));
  // Mills-ratio asymptote: log Phi(-a) ~ -a^2/2 - log(a sqrt(2 pi)) - 1/a^2 + 5/(2 a^4).
  const double a = 40.0;
  const double tail = -0.5 * a * a - std::log(a * std::sqrt(2.0 * std::numbers::pi)) - 1.0 / (a * a) + 2.5 / std::pow(a, 4);
  CHECK(tf::log_normal_cdf(-a) == doctest::Approx(tail).epsilon(1e-11));
  CHECK(tf::log_normal_cdf(10.0) == doctest::Approx(-7.619853e-24).epsilon(1e-5));
}

TEST_CASE("raw-parameter defaults") {
  TruncGaussMixture m(2, 3);
  m.set_params(Vector(m.num_params(), 0.0));
  const TgmmParams p = m.constrained();
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t l = 0; l < 3; ++l) CHECK(p.pi(s, l) == doctest::Approx(1.0 / 3.0));
  }
  CHECK(p.sigma[0] == doctest::Approx(0.2 + std::log(2.0)));
  NegBinMixedEffects nb(feature_panel(2, 3, 1, 1));
  nb.set_params(Vector(nb.num_params(), 0.0));
  const NegBinParams q = nb.constrained();
  CHECK(q.q == 0.5);
  CHECK(q.sigma0 == doctest::Approx(0.6931).epsilon(1e-4));
  CHECK(q.rho == 0.0);
}

TEST_CASE("TGMM parameter layout") {
  TruncGaussMixture m(3, 2);
  CHECK(m.num_params() == 2 + 2 + 6);
  const auto blocks = m.param_blocks();
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[0].name == "mu_raw");
  CHECK(blocks[1].offset == 2);
  CHECK(blocks[2].rows == 3);
  CHECK(blocks[2].cols == 2);
  CHECK_THROWS_AS(m.set_params(Vector(3, 0.0)), ValidationError);
  Vector bad(m.num_params(), 0.0);
  bad[1] = std::nan("");
  CHECK_THROWS_AS(m.set_params(bad), ValidationError);
}

TEST_CASE("TGMM logpdf: single component at the mode") {
  TruncGaussMixture m(1, 1);
  TgmmParams p{{1.0}, {1.0}, Matrix(1, 1, 1.0)};
  m.set_constrained(p);
  const double expect = std::log(0.398942 / 0.841345);
  CHECK(m.logpdf(Vector{1.0}, 0) == doctest::Approx(expect).epsilon(1e-5));
  CHECK(expect == doctest::Approx(-0.7462).epsilon(1e-4));
  CHECK(TruncGaussMixture::log_trunc_normal(1.0, 1.0, 1.0) == doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("TGMM logpdf: mixture of identical components collapses") {
  TruncGaussMixture one(1, 1), three(1, 3);
  one.set_constrained({{4.0}, {1.5}, Matrix(1, 1, 1.0)});
  three.set_constrained({{4.0, 4.0, 4.0}, {1.5, 1.5, 1.5}, Matrix(1, 3, 1.0 / 3.0)});
  for (double y : {0.0, 0.5, 4.0, 9.0}) {
    CHECK(three.logpdf(Vector{y}, 0) == doctest::Approx(one.logpdf(Vector{y}, 0)).epsilon(1e-12));
  }
}

TEST_CASE("TGMM logpdf factorizes over sites") {
  Matrix pi(2, 2);
  pi.data = {0.3, 0.7, 0.9, 0.1};
  TruncGaussMixture pair(2, 2), a(1, 2), b(1, 2);
  pair.set_constrained({{2.0, 8.0}, {1.0, 3.0}, pi});
  Matrix pa(1, 2), pb(1, 2);
  pa.data = {0.3, 0.7};
  pb.data = {0.9, 0.1};
  a.set_constrained({{2.0, 8.0}, {1.0, 3.0}, pa});
  b.set_constrained({{2.0, 8.0}, {1.0, 3.0}, pb});
  CHECK(pair.logpdf(Vector{1.5, 6.0}, 0) ==
        doctest::Approx(a.logpdf(Vector{1.5}, 0) + b.logpdf(Vector{6.0}, 0)).epsilon(1e-12));
}

TEST_CASE("TGMM gradient matches finite differences on 50 random cases") {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> yd(0.0, 15.0);
  for (int c = 0; c < 50; ++c) {
    const std::size_t sites = 1 + c % 4, comps = 1 + c % 3;
    TruncGaussMixture m(sites, comps);
    Vector phi(m.num_params());
    for (double& v : phi) v = n(gen);
    for (std::size_t l = 0; l < comps; ++l) phi[l] = 1.0 + 3.0 * std::abs(n(gen));
    m.set_params(phi);
    Vector y(sites);
    for (double& v : y) v = yd(gen);
    if (c % 5 == 0) y[0] = 0.0;
    INFO("case " << c);
    check_grad(m, y, 0);
  }
}

TEST_CASE("TGMM sampler: truncated-normal mean") {
  TruncGaussMixture m(1, 1);
  m.set_constrained({{1.0}, {1.0}, Matrix(1, 1, 1.0)});
  Rng rng = make_rng(31);
  const Matrix draws = m.sample(0, rng, 100000);
  double mean = 0.0;
  for (double v : draws.data) {
    CHECK_FALSE(v < 0.0);
    mean += v;
  }
  mean /= 100000.0;
  const double z = test::normal_cdf(1.0);  // 1 - Phi(-mu/sigma)
  const double oracle = 1.0 + test::normal_pdf(-1.0) / z;
  CHECK(oracle == doctest::Approx(1.2876).epsilon(1e-4));
  CHECK(std::abs(mean - oracle) <= 0.01);
}

TEST_CASE("TGMM sampler: narrow component and degenerate weights") {
  // sigma = 0.2 sits on the floor; a very negative raw value approaches it.
  TruncGaussMixture narrow(1, 1);
  narrow.set_params(Vector{tf::softplus_inverse(100.0), -30.0, 0.0});
  Rng rng = make_rng(32);
  for (double v : narrow.sample(0, rng, 5000).data) {
    CHECK(v >= 99.0);
    CHECK(v <= 101.0);
  }
  TruncGaussMixture two(1, 2);
  Vector phi(two.num_params());
  phi[0] = tf::softplus_inverse(5.0);
  phi[1] = tf::softplus_inverse(100.0);
  phi[2] = phi[3] = 0.0;
  phi[4] = 50.0;
  phi[5] = -50.0;
  two.set_params(phi);
  for (double v : two.sample(0, rng, 5000).data) CHECK(v < 50.0);
}

TEST_CASE("TGMM sampler passes a chi-squared goodness-of-fit test") {
  Matrix pi(2, 2);
  pi.data = {0.3, 0.7, 0.8, 0.2};
  TruncGaussMixture m(2, 2);
  const Vector mu = {1.5, 9.0}, sigma = {2.0, 1.5};
  m.set_constrained({mu, sigma, pi});
  Rng rng = make_rng(33);
  const std::size_t n = 20000, bins = 20;
  const Matrix draws = m.sample(0, rng, n);
  for (std::size_t s = 0; s < 2; ++s) {
    auto cdf = [&](double y) { return pi(s, 0) * trunc_cdf(y, mu[0], sigma[0]) + pi(s, 1) * trunc_cdf(y, mu[1], sigma[1]); };
    // Equiprobable bin edges by bisection on the oracle CDF.
    std::vector<double> edges;
    for (std::size_t b = 1; b < bins; ++b) {
      const double target = static_cast<double>(b) / bins;
      double lo = 0.0, hi = 50.0;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < target ? lo : hi) = mid;
      }
      edges.push_back(0.5 * (lo + hi));
    }
    std::vector<double> observed(bins, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = draws(i, s);
      observed[std::upper_bound(edges.begin(), edges.end(), v) - edges.begin()] += 1.0;
    }
    const double expected = static_cast<double>(n) / bins;
    double chi2 = 0.0;
    for (double o : observed) chi2 += (o - expected) * (o - expected) / expected;
    INFO("site " << s << " chi2 " << chi2);
    CHECK(chi2 < chi2_critical(bins - 1));
  }
}

TEST_CASE("NB log-pmf special cases") {
  const double lh = std::log(0.5);
  CHECK(NegBinMixedEffects::log_pmf(0, 1.0, lh, lh) == doctest::Approx(lh));
  CHECK(NegBinMixedEffects::log_pmf(3, 1.0, lh, lh) == doctest::Approx(4.0 * lh));
  CHECK(NegBinMixedEffects::log_pmf(0, 2.0, std::log(1.0 - 1e-12), std::log(1e-12)) ==
        doctest::Approx(0.0).epsilon(1e-9));
  double total = 0.0;
  for (int y = 0; y < 400; ++y) total += std::exp(NegBinMixedEffects::log_pmf(y, 2.5, std::log(0.3), std::log(0.7)));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

namespace {

NegBinMixedEffects simple_nb(double mean, double q, std::size_t sites = 1) {
  auto panel = std::make_shared<PanelDataset>(sites, 4, 0);
  NegBinMixedEffects m(panel);
  NegBinParams p;
  p.beta0 = std::log(mean);
  p.b0.assign(sites, 0.0);
  p.b1.assign(sites, 0.0);
  p.q = q;
  m.set_constrained(p);
  return m;
}

}  // namespace

TEST_CASE("NB logpdf uses the configured mean and q") {
  NegBinMixedEffects m = simple_nb(1.0, 0.5);
  CHECK(m.logpdf(Vector{0}, 0) == doctest::Approx(std::log(0.5)));
  CHECK(m.logpdf(Vector{3}, 2) == doctest::Approx(4.0 * std::log(0.5)));
  NegBinMixedEffects sure = simple_nb(1.0, 1.0 - 1e-9);
  CHECK(sure.logpdf(Vector{0}, 0) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK_THROWS_AS(m.logpdf(Vector{1.5}, 0), ValidationError);
  CHECK_THROWS_AS(m.logpdf(Vector{1}, 4), ValidationError);
}

TEST_CASE("NB sampler moments") {
  NegBinMixedEffects m = simple_nb(2.0, 0.5);
  Rng rng = make_rng(41);
  const std::size_t n = 100000;
  const Matrix d = m.sample(0, rng, n);
  double mean = 0.0;
  for (double v : d.data) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : d.data) {
    const double c = v - mean;
    m2 += c * c;
    m4 += c * c * c * c;
  }
  const double var = m2 / (n - 1);
  m4 /= n;
  const double mean_oracle = 2.0 * 0.5 / 0.5, var_oracle = 2.0 * 0.5 / 0.25;
  CHECK(std::abs(mean - mean_oracle) <= 0.05);
  CHECK(std::abs(var - var_oracle) <= 0.2);
  CHECK(std::abs(mean - mean_oracle) <= 3.0 * std::sqrt(var / n));
  CHECK(std::abs(var - var_oracle) <= 3.0 * std::sqrt((m4 - var * var) / n));
}

TEST_CASE("NB sampler: q near one gives almost only zeros") {
  NegBinMixedEffects m = simple_nb(2.0, 0.999);
  Rng rng = make_rng(42);
  int zeros = 0;
  for (double v : m.sample(0, rng, 10000).data) zeros += v == 0.0 ? 1 : 0;
  CHECK(zeros > 9900);
}

TEST_CASE("NB sampler passes a chi-squared goodness-of-fit test") {
  const double r = 3.0, q = 0.4;
  NegBinMixedEffects m = simple_nb(r, q);
  Rng rng = make_rng(43);
  const std::size_t n = 20000;
  const Matrix d = m.sample(0, rng, n);
  // Bins 0..B-1 plus a merged tail; B chosen so every bin expects >= 5.
  std::vector<double> expected;
  double mass = 0.0;
  for (int y = 0;; ++y) {
    const double e = n * nb_pmf(y, r, q);
    if (e < 5.0 || n * (1.0 - mass - nb_pmf(y, r, q)) < 5.0) break;
    expected.push_back(e);
    mass += nb_pmf(y, r, q);
  }
  const std::size_t bins = expected.size();
  expected.push_back(n * (1.0 - mass));
  std::vector<double> observed(bins + 1, 0.0);
  for (double v : d.data) observed[std::min(static_cast<std::size_t>(v), bins)] += 1.0;
  double chi2 = 0.0;
  for (std::size_t b = 0; b <= bins; ++b) chi2 += (observed[b] - expected[b]) * (observed[b] - expected[b]) / expected[b];
  INFO("chi2 " << chi2 << " bins " << bins + 1);
  CHECK(chi2 < chi2_critical(bins));
}

TEST_CASE("NB prior: value at the origin and factorization") {
  const std::size_t sites = 4;
  NegBinMixedEffects m = simple_nb(1.0, 0.5, sites);
  NegBinParams p = m.constrained();
  p.sigma0 = p.sigma1 = 1.0;
  p.rho = 0.0;
  m.set_constrained(p);
  CHECK(m.logprior() == doctest::Approx(sites * std::log(1.0 / (2.0 * std::numbers::pi))));

  // rho = 0: two independent univariate normals per site.
  p.b0 = {0.3, -1.0, 0.2, 0.0};
  p.b1 = {0.1, 0.5, -0.4, 2.0};
  p.sigma0 = 1.5;
  p.sigma1 = 0.7;
  m.set_constrained(p);
  double expect = 0.0;
  for (std::size_t s = 0; s < sites; ++s) {
    expect += -0.5 * std::log(2 * std::numbers::pi) - std::log(1.5) - 0.5 * std::pow(p.b0[s] / 1.5, 2);
    expect += -0.5 * std::log(2 * std::numbers::pi) - std::log(0.7) - 0.5 * std::pow(p.b1[s] / 0.7, 2);
  }
  CHECK(m.logprior() == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("NB prior: general bivariate normal density and quadratic scaling") {
  const std::size_t sites = 3;
  NegBinMixedEffects m = simple_nb(1.0, 0.5, sites);
  NegBinParams p = m.constrained();
  p.b0 = {0.4, -0.2, 1.1};
  p.b1 = {-0.3, 0.6, 0.2};
  p.sigma0 = 1.2;
  p.sigma1 = 0.8;
  p.rho = 0.35;
  m.set_constrained(p);
  // Direct 2x2 covariance inverse.
  const double c00 = 1.44, c11 = 0.64, c01 = 0.35 * 1.2 * 0.8;
  const double det = c00 * c11 - c01 * c01;
  double expect = 0.0;
  for (std::size_t s = 0; s < sites; ++s) {
    const double a = p.b0[s], b = p.b1[s];
    const double quad = (c11 * a * a - 2 * c01 * a * b + c00 * b * b) / det;
    expect += -std::log(2 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * quad;
  }
  CHECK(m.logprior() == doctest::Approx(expect).epsilon(1e-12));

  p.sigma0 = p.sigma1 = 1.0;
  p.rho = 0.0;
  m.set_constrained(p);
  const double base = m.logprior();
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < sites; ++s) sum_sq += p.b0[s] * p.b0[s] + p.b1[s] * p.b1[s];
  for (double& v : p.b0) v *= 2.0;
  for (double& v : p.b1) v *= 2.0;
  m.set_constrained(p);
  CHECK(base - m.logprior() == doctest::Approx(1.5 * sum_sq).epsilon(1e-12));
}

TEST_CASE("NB gradient and prior gradient match finite differences on 50 random cases") {
  std::mt19937_64 gen(51);
  std::normal_distribution<double> n;
  std::poisson_distribution<int> pois(4.0);
  for (int c = 0; c < 50; ++c) {
    const std::size_t sites = 1 + c % 3, feats = c % 3, periods = 6;
    auto panel = feature_panel(sites, periods, feats, 100 + c);
    NegBinMixedEffects m(panel);
    Vector phi(m.num_params());
    for (double& v : phi) v = 0.4 * n(gen);
    phi[0] = 1.0 + 0.3 * n(gen);
    m.set_params(phi);
    Vector y(sites);
    for (double& v : y) v = pois(gen);
    INFO("case " << c);
    check_grad(m, y, c % periods);

    Vector grad(m.num_params());
    const double lp = m.logprior_grad(grad);
    CHECK(lp == doctest::Approx(m.logprior()).epsilon(1e-12));
    auto f = [&](const Vector& x) {
      NegBinMixedEffects copy(panel);
      copy.set_params(x);
      return copy.logprior();
    };
    const Vector fd = test::central_diff(f, phi, kFdStep);
    for (std::size_t i = 0; i < phi.size(); ++i) CHECK(test::close_rel(grad[i], fd[i], kGradRtol, kGradAtol));
  }
}

TEST_CASE("NB gradient for a weight on an all-zero feature is zero") {
  auto panel = feature_panel(2, 5, 2, 7);
  for (std::size_t i = 1; i < panel->features.size(); i += 2) panel->features[i] = 0.0;
  NegBinMixedEffects m(panel);
  Vector phi(m.num_params(), 0.1);
  m.set_params(phi);
  Vector grad(m.num_params());
  m.logpdf_grad(Vector{2, 5}, 3, grad);
  CHECK(grad[2] == 0.0);
  CHECK(grad[1] != 0.0);
}

TEST_CASE("fixed models") {
  QuantizedGaussian qg({10.0, 0.0}, 2.0);
  Rng rng = make_rng(61);
  const Matrix d = qg.sample(0, rng, 2000);
  for (double v : d.data) {
    CHECK(v >= 0.0);
    CHECK(v == std::floor(v));
  }
  CHECK(qg.logpdf(Vector{10, 0}, 0) ==
        doctest::Approx(std::log(test::normal_cdf(0.25) - test::normal_cdf(-0.25)) + std::log(test::normal_cdf(0.25))));
  CHECK(qg.logpdf(Vector{10.5, 0}, 0) == -std::numeric_limits<double>::infinity());

  auto panel = std::make_shared<PanelDataset>(2, 2);
  panel->counts = {1, 2, 3, 4};
  PointMass pm(panel);
  CHECK(pm.logpdf(Vector{3, 4}, 1) == 0.0);
  CHECK(pm.logpdf(Vector{3, 5}, 1) == -std::numeric_limits<double>::infinity());
  const Matrix pd = pm.sample(1, rng, 3);
  for (std::size_t m = 0; m < 3; ++m) CHECK(pd(m, 1) == 4.0);

  AbcDemoModel abc;
  Vector y(9);
  AbcDemoModel::draw(rng, y);
  CHECK(y[0] == 7.0);
  CHECK((y[3] == 0.0 || y[3] == 10.0));
  CHECK((y[8] == 0.0 || y[8] == 80.0));
  CHECK(abc.logpdf(Vector{7, 7, 7, 10, 0, 10, 0, 0, 80}, 0) ==
        doctest::Approx(2 * std::log(0.65) + std::log(0.35) + 2 * std::log(0.9) + std::log(0.1)));
}

TEST_CASE("TGMM density integrates to one") {
  TruncGaussMixture m(1, 2);
  Matrix pi(1, 2);
  pi.data = {0.35, 0.65};
  m.set_constrained({{3.0, 60.0}, {4.0, 9.0}, pi});
  // Composite Simpson on [0, 200].
  const std::size_t n = 200000;
  const double h = 200.0 / n;
  double total = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    total += w * std::exp(m.logpdf(Vector{h * static_cast<double>(i)}, 0));
  }
  total *= h / 3.0;
  CHECK(std::abs(total - 1.0) <= 1e-6);
}

TEST_CASE("NB pmf sums to one") {
  for (auto [mean, q] : {std::pair{3.0, 0.4}, std::pair{1.5, 0.3}, std::pair{40.0, 0.7}}) {
    NegBinMixedEffects m = simple_nb(mean, q);
    const double mu = mean * (1 - q) / q, sd = std::sqrt(mean * (1 - q) / (q * q));
    const int y_max = static_cast<int>(std::ceil(mu + 20.0 * sd));
    double total = 0.0;
    for (int y = 0; y <= y_max; ++y) total += std::exp(m.logpdf(Vector{static_cast<double>(y)}, 0));
    INFO("mean " << mean << " q " << q);
    CHECK(total >= 1.0 - 1e-8);
    CHECK(total <= 1.0 + 1e-10);
  }
  // A very skewed case still agrees pointwise with the closed form.
  NegBinMixedEffects skewed = simple_nb(0.2, 0.05);
  for (double y : {0.0, 1.0, 17.0, 300.0}) {
    CHECK(skewed.logpdf(Vector{y}, 0) == doctest::Approx(std::log(nb_pmf(y, 0.2, 0.05))).epsilon(1e-10));
  }
}

TEST_CASE("adding a constant to a row of mixture logits leaves the density unchanged") {
  TruncGaussMixture m(2, 3);
  Vector phi = {1.0, 2.0, 3.0, 0.1, -0.4, 0.5, 0.2, -1.0, 0.7, 0.3, 0.0, -0.6};
  REQUIRE(phi.size() == m.num_params());
  m.set_params(phi);
  const Vector y = {2.0, 7.0};
  const double before = m.logpdf(y, 0);
  for (std::size_t l = 0; l < 3; ++l) phi[6 + l] += 2.5;  // site 0 logits
  m.set_params(phi);
  CHECK(m.logpdf(y, 0) == doctest::Approx(before).epsilon(1e-14));
}

TEST_CASE("scores have zero mean under the model") {
  auto check_zero_mean = [](const GenerativeModel& model, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    const std::size_t n = 100000, p = model.num_params();
    const Matrix draws = model.sample(1, rng, n);
    Vector sum(p, 0.0), sum2(p, 0.0), g(p);
    for (std::size_t i = 0; i < n; ++i) {
      model.logpdf_grad(draws.row(i), 1, g);
      for (std::size_t j = 0; j < p; ++j) {
        sum[j] += g[j];
        sum2[j] += g[j] * g[j];
      }
    }
    for (std::size_t j = 0; j < p; ++j) {
      const double mean = sum[j] / n;
      const double se = std::sqrt((sum2[j] / n - mean * mean) / n);
      INFO(model.family() << " param " << j << " mean " << mean << " se " << se);
      CHECK(std::abs(mean) <= 3.0 * se + 1e-12);
    }
  };
  TruncGaussMixture tg(2, 2);
  tg.set_params(Vector{1.5, 2.5, 0.3, -0.2, 0.4, -0.1, 0.0, 0.8});
  check_zero_mean(tg, 61);
  auto panel = feature_panel(2, 4, 1, 62);
  NegBinMixedEffects nb(panel);
  Vector phi(nb.num_params());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = 0.1 * static_cast<double>(i % 4);
  phi[0] = 1.0;
  nb.set_params(phi);
  check_zero_mean(nb, 63);
}
