#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dafd/engine.hpp"
#include "dafd/experiments.hpp"

using namespace dafd;

namespace {

constexpr std::size_t kN = 4096;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

struct Rational {
  std::vector<cplx> poles;  // kernel parameters b_k
  std::vector<cplx> weights;
  cplx at(cplx z) const {
    cplx sum = 0.0;
    for (std::size_t k = 0; k < poles.size(); ++k) sum += weights[k] / (1.0 - std::conj(poles[k]) * z);
    return sum;
  }
};

Rational random_rational(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  Rational r;
  for (int k = 0; k < 3; ++k) {
    r.poles.push_back(std::polar(0.9 * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng)));
    r.weights.emplace_back(g(rng), g(rng));
  }
  return r;
}

EngineConfig terms(std::size_t n) {
  EngineConfig c;
  c.max_terms = n;
  return c;
}

double max_spectrum_gap(const BoundarySignal& f, const std::vector<cplx>& expected) {
  double gap = 0.0;
  for (std::size_t m = 0; m < f.size(); ++m) {
    const cplx want = m < expected.size() ? expected[m] : cplx(0.0);
    gap = std::max(gap, std::abs(f.spectrum()[m] - want));
  }
  return gap;
}

}  // namespace

TEST(Objective, Examples) {
  const DiscParameter b(0.3, -0.5);
  EXPECT_NEAR(objective(normalized_kernel(b, kN), b), 1.0, 1e-12);
  const DiscParameter a(0.4, 0.2);
  const double r2 = std::norm(a.value());
  EXPECT_NEAR(objective(BoundarySignal::monomial(1, kN), a), (1.0 - r2) * r2, 1e-15);
  EXPECT_NEAR(objective(BoundarySignal::constant(1.0, kN), DiscParameter(0.0, 0.0)), 1.0, 1e-15);
}

TEST(Objective, EqualsSquaredKernelCoefficient) {
  const auto f = example2_signal(kN);
  const DiscParameter a(-0.2, 0.45);
  EXPECT_NEAR(objective(f, a), std::norm(inner_product(f, normalized_kernel(a, kN))), 1e-10 * objective(f, a));
}

TEST(GridSelect, NormalizedKernelPeak) {
  const DiscParameter b(0.55, -0.15);
  const auto sel = grid_select(normalized_kernel(b, kN), EngineConfig{});
  ASSERT_TRUE(sel.has_value());
  EXPECT_GE(sel->objective, 0.99);
  EXPECT_FALSE(sel->refined);
  const double dr = 0.995 / 64.0;
  const double dtheta = 2.0 * std::numbers::pi / 256.0;
  EXPECT_LE(std::abs(sel->a.value() - b.value()), std::hypot(dr, dtheta));
}

TEST(GridSelect, ConstantPicksOrigin) {
  const auto sel = grid_select(BoundarySignal::constant(2.0, kN), EngineConfig{});
  ASSERT_TRUE(sel.has_value());
  EXPECT_EQ(sel->a.value(), cplx(0.0));
}

TEST(GridSelect, IdentityTieBreaksToAngleZero) {
  const auto sel = grid_select(BoundarySignal::monomial(1, kN), EngineConfig{});
  ASSERT_TRUE(sel.has_value());
  EXPECT_EQ(sel->a.value().imag(), 0.0);
  // Nearest admissible radius j / 64 * 0.995 to 1/sqrt(2).
  const double step = 0.995 / 64.0;
  const double nearest = std::round(kInvSqrt2 / step) * step;
  EXPECT_NEAR(sel->a.value().real(), nearest, 1e-15);
}

TEST(GridSelect, ZeroSignalHasNoSelection) {
  EXPECT_FALSE(grid_select(BoundarySignal::zero(kN), EngineConfig{}).has_value());
}

TEST(GridSelect, MatchesExhaustiveScanOnCoarseGrid) {
  EngineConfig config;
  config.grid_radii = 16;
  config.grid_angles = 32;
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Rational r = random_rational(rng);
    const auto f = kernel_combination(r.poles, r.weights, kN);
    // Oracle: closed-form rational values on the same polar grid.
    std::vector<double> values(16 * 32);
    for (std::size_t i = 0; i < 32; ++i) {
      for (std::size_t j = 0; j < 16; ++j) {
        const double rad = static_cast<double>(j) / 16.0 * config.r_max;
        const cplx a = std::polar(rad, 2.0 * std::numbers::pi * static_cast<double>(i) / 32.0);
        values[i * 16 + j] = (1.0 - rad * rad) * std::norm(r.at(a));
      }
    }
    const double best = *std::max_element(values.begin(), values.end());
    std::size_t pick = 0;
    while (values[pick] < best * (1.0 - 1e-12)) ++pick;  // angle-major order
    const double rad = static_cast<double>(pick % 16) / 16.0 * config.r_max;
    const cplx expected = std::polar(rad, 2.0 * std::numbers::pi * static_cast<double>(pick / 16) / 32.0);
    const auto sel = grid_select(f, config);
    ASSERT_TRUE(sel.has_value());
    EXPECT_NEAR(std::abs(sel->a.value() - expected), 0.0, 1e-14) << "trial " << trial;
  }
}

TEST(GridSelect, IndependentOfThreadCount) {
  const auto f = example2_signal(kN);
  EngineConfig one, many;
  one.threads = 1;
  many.threads = 4;
  EXPECT_EQ(grid_select(f, one)->a, grid_select(f, many)->a);
}

TEST(Refine, ConstantConvergesToOrigin) {
  const auto sel = refine_stationary(BoundarySignal::constant(1.0, kN), DiscParameter(0.1, 0.1), {});
  EXPECT_TRUE(sel.refined);
  EXPECT_LE(std::abs(sel.a.value()), 1e-9);
}

TEST(Refine, IdentityReachesCriticalCircle) {
  const auto sel = refine_stationary(BoundarySignal::monomial(1, kN), DiscParameter(0.7, 0.0), {});
  EXPECT_TRUE(sel.refined);
  EXPECT_NEAR(sel.a.modulus(), kInvSqrt2, 1e-9);
}

TEST(Refine, KernelPeakFromGridSeed) {
  const DiscParameter b(0.2, 0.2);
  const auto f = normalized_kernel(b, kN);
  const auto seed = grid_select(f, {});
  const auto sel = refine_stationary(f, seed->a, {});
  EXPECT_TRUE(sel.refined);
  EXPECT_LE(std::abs(sel.a.value() - b.value()), 1e-9);
  EXPECT_GE(sel.objective, seed->objective * (1.0 - 1e-14));
  EXPECT_LE(sel.stationarity_residual, 1e-9 * f.norm());
}

TEST(CoreStep, Examples) {
  const DiscParameter b(0.35, -0.4);
  const auto eb = normalized_kernel(b, kN);
  EXPECT_LE(core_step(eb, b, inner_product(eb, eb)).remainder.norm(), 1e-12);

  const DiscParameter origin(0.0, 0.0);
  const auto z = BoundarySignal::monomial(1, kN);
  const auto one = core_step(z, origin, 0.0).remainder;
  EXPECT_LE(max_spectrum_gap(one, {1.0}), 1e-14);
  const auto shifted = core_step(BoundarySignal::monomial(2, kN), origin, 0.0).remainder;
  EXPECT_LE(max_spectrum_gap(shifted, {0.0, 1.0}), 1e-14);
}

TEST(CoreStep, LeakageVanishesForAnyParameter) {
  const auto f = example2_signal(kN);
  const DiscParameter a(0.1, 0.3);
  const auto step = core_step(f, a, inner_product(f, normalized_kernel(a, kN)));
  EXPECT_LE(step.leakage, 1e-10 * f.norm2());
}

TEST(DoubleStep, WorkedExample) {
  const DiscParameter a(kInvSqrt2, 0.0);
  const auto z = BoundarySignal::monomial(1, kN);
  const cplx c = inner_product(z, normalized_kernel(a, kN));
  EXPECT_NEAR(std::abs(c - 0.5), 0.0, 1e-14);
  const auto step = double_step(z, a, c);
  EXPECT_LE(max_spectrum_gap(step.remainder, {-std::sqrt(2.0) / 2.0, 0.5}), 1e-12);
  EXPECT_NEAR(step.remainder.norm2(), 0.75, 1e-12);
  EXPECT_TRUE(step.warnings.empty());
}

TEST(DoubleStep, NonStationaryParameterLeaks) {
  const DiscParameter a(0.3, 0.0);
  const auto z = BoundarySignal::monomial(1, kN);
  const auto step = double_step(z, a, inner_product(z, normalized_kernel(a, kN)));
  EXPECT_GT(step.leakage, EngineConfig{}.leak_tol * z.norm2());
  ASSERT_FALSE(step.warnings.empty());
  EXPECT_TRUE(step.warnings.front().starts_with("leakage"));
}

TEST(DoubleStep, KernelIsRemovedExactly) {
  const DiscParameter b(-0.6, 0.25);
  const auto eb = normalized_kernel(b, kN);
  EXPECT_LE(double_step(eb, b, 1.0).remainder.norm(), 1e-12);
}

TEST(RunAfd, SingleKernelIsExact) {
  const DiscParameter b(0.45, 0.3);
  for (const auto mode : {Mode::Core, Mode::Double}) {
    const auto d = run_afd(normalized_kernel(b, kN), mode, terms(5));
    ASSERT_EQ(d.terms.size(), 1u);
    EXPECT_TRUE(d.exact);
    EXPECT_LE(std::abs(d.terms[0].a.value() - b.value()), 1e-9);
    EXPECT_NEAR(std::abs(d.terms[0].c), 1.0, 1e-12);
    EXPECT_LE(d.terms[0].residual_energy_after, 1e-16);
  }
}

TEST(RunAfd, IdentityDoubleOneTerm) {
  const auto d = run_afd(BoundarySignal::monomial(1, kN), Mode::Double, terms(1));
  ASSERT_EQ(d.terms.size(), 1u);
  EXPECT_NEAR(d.terms[0].a.modulus(), kInvSqrt2, 1e-9);
  EXPECT_NEAR(std::abs(d.terms[0].c), 0.5, 1e-12);
  EXPECT_NEAR(d.terms[0].residual_energy_after, 0.75, 1e-12);
}

TEST(RunAfd, ExampleTwoDoubleBeatsCore) {
  const auto f = example2_signal(kN);
  const auto dd = run_afd(f, Mode::Double, terms(8));
  const auto dc = run_afd(f, Mode::Core, terms(8));
  ASSERT_EQ(dd.terms.size(), 8u);
  for (std::size_t k = 1; k < dd.terms.size(); ++k) {
    EXPECT_LT(dd.terms[k].residual_energy_after, dd.terms[k - 1].residual_energy_after);
  }
  EXPECT_LT(dd.terms[7].residual_energy_after, dc.terms[7].residual_energy_after);
}

TEST(RunAfd, RejectsOtherModes) {
  EXPECT_THROW((void)run_afd(example2_signal(kN), Mode::MonoComponent, terms(2)), ContractError);
}

TEST(RunAfd, EnergyDecreasesStrictlyOnExampleOne) {
  const auto f = project_real(example1_samples(kN)).analytic;
  for (const auto mode : {Mode::Core, Mode::Double}) {
    const auto d = run_afd(f, mode, terms(12));
    double previous = f.norm2();
    for (const auto& t : d.terms) {
      EXPECT_LT(t.residual_energy_after, previous);
      previous = t.residual_energy_after;
    }
  }
}

TEST(RunAfd, DoubleParametersAreRefinedStationary) {
  const auto f = project_real(example1_samples(kN)).analytic;
  const auto d = run_afd(f, Mode::Double, terms(10));
  const auto remainders = replay_remainders(f, d);
  for (std::size_t k = 0; k < d.terms.size(); ++k) {
    const auto& g = remainders[k];
    const DiscParameter a = d.terms[k].a;
    const cplx h = -std::conj(a.value()) * eval_disc(g, a) + a.defect() * eval_deriv_disc(g, a, 1);
    EXPECT_LE(std::abs(h), 1e-9 * g.norm()) << "term " << k + 1;
  }
}

TEST(MonoComponent, ConstantIsOneTerm) {
  const auto d = run_mono_component(BoundarySignal::constant(cplx(0.3, -0.2), kN), terms(5));
  ASSERT_EQ(d.terms.size(), 1u);
  EXPECT_EQ(d.terms[0].a.value(), cplx(0.0));
  EXPECT_NEAR(std::abs(d.terms[0].c - cplx(0.3, -0.2)), 0.0, 1e-13);
  EXPECT_TRUE(d.exact);
}

TEST(MonoComponent, IdentityIsExactInTwoTerms) {
  const auto d = run_mono_component(BoundarySignal::monomial(1, kN), terms(5));
  ASSERT_EQ(d.terms.size(), 2u);
  EXPECT_EQ(d.terms[0].a.value(), cplx(0.0));
  EXPECT_LE(std::abs(d.terms[1].a.value()), 1e-9);
  EXPECT_NEAR(std::abs(d.terms[1].c), 1.0, 1e-12);
  EXPECT_TRUE(d.exact);
}

TEST(MonoComponent, BasisCarriesTheOriginFactor) {
  const auto f = example2_signal(kN);
  const auto d = run_mono_component(f, terms(4));
  ASSERT_EQ(d.terms.size(), 4u);
  const auto basis = decomposition_basis(d, 4, kN);
  const auto z = unit_circle(kN);
  const auto e2 = normalized_kernel_samples(d.terms[1].a, kN);
  const auto e3 = normalized_kernel_samples(d.terms[2].a, kN);
  const auto phi2 = moebius_samples(d.terms[1].a, kN);
  for (std::size_t j = 0; j < kN; j += 31) {
    EXPECT_NEAR(std::abs(basis[0].samples()[j] - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(basis[1].samples()[j] - z[j] * e2[j]), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(basis[2].samples()[j] - z[j] * e3[j] * phi2[j] * phi2[j]), 0.0, 1e-12);
  }
}

TEST(HigherOrder, ConditionExamples) {
  EXPECT_EQ(higher_order_condition(BoundarySignal::constant(1.0, kN), DiscParameter(0.0, 0.0), 1), cplx(0.0));
  const DiscParameter a(0.3, 0.4);
  const double r2 = std::norm(a.value());
  EXPECT_NEAR(std::abs(higher_order_condition(BoundarySignal::monomial(2, kN), a, 2) - (1.0 - 3.0 * r2)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(higher_order_condition(BoundarySignal::monomial(1, kN), a, 1) - (1.0 - 2.0 * r2)), 0.0, 1e-14);
}

TEST(HigherOrder, ConditionOneIsStationarity) {
  const auto f = example2_signal(kN);
  const DiscParameter a(0.1, -0.2);
  const cplx h = -std::conj(a.value()) * eval_disc(f, a) + a.defect() * eval_deriv_disc(f, a, 1);
  EXPECT_NEAR(std::abs(higher_order_condition(f, a, 1) - h), 0.0, 1e-13);
}

TEST(HigherOrder, RootsMatchClosedForms) {
  const std::vector<int> one{1}, two{2};
  const auto r1 = find_condition_root(BoundarySignal::monomial(1, kN), DiscParameter(0.5, 0.1), one);
  EXPECT_TRUE(r1.converged);
  EXPECT_NEAR(r1.a.modulus(), kInvSqrt2, 1e-8);
  const auto r2 = find_condition_root(BoundarySignal::monomial(2, kN), DiscParameter(0.5, 0.1), two);
  EXPECT_TRUE(r2.converged);
  EXPECT_NEAR(r2.a.modulus(), 1.0 / std::sqrt(3.0), 1e-8);
}

TEST(HigherOrder, SquareHasNoCommonRootOfOrdersOneAndTwo) {
  // Order 1 vanishes on |a| = sqrt(2/3), order 2 on |a| = 1/sqrt(3).
  const auto report = scan_common_root(BoundarySignal::monomial(2, kN), 2);
  EXPECT_FALSE(report.found);
  EXPECT_GT(report.best.residual, 1e-3);
}

TEST(HigherOrder, OrderOneStepIsBitIdenticalToDoubleStep) {
  const DiscParameter a(kInvSqrt2, 0.0);
  const auto z = BoundarySignal::monomial(1, kN);
  const auto ho = higher_order_step(z, a, 1);
  const auto dbl = double_step(z, a, inner_product(z, normalized_kernel(a, kN)));
  ASSERT_EQ(ho.remainder.size(), dbl.remainder.size());
  for (std::size_t j = 0; j < kN; ++j) {
    EXPECT_EQ(ho.remainder.samples()[j], dbl.remainder.samples()[j]);
    EXPECT_EQ(ho.remainder.spectrum()[j], dbl.remainder.spectrum()[j]);
  }
  EXPECT_EQ(ho.leakage, dbl.leakage);
}

TEST(HigherOrder, StepRefusesWhenConditionsFail) {
  EXPECT_THROW((void)higher_order_step(BoundarySignal::monomial(1, kN), DiscParameter(0.3, 0.0), 1),
               ContractError);
  EXPECT_THROW((void)higher_order_step(BoundarySignal::monomial(2, kN),
                                       DiscParameter(1.0 / std::sqrt(3.0), 0.0), 2),
               ContractError);
}

TEST(HigherOrder, KernelIsRemovedForAnyOrder) {
  const DiscParameter b(0.2, -0.5);
  const auto eb = normalized_kernel(b, kN);
  for (int k = 1; k <= 3; ++k) {
    const auto step = higher_order_step(eb, b, k);
    EXPECT_LE(step.remainder.norm(), 1e-10) << k;
  }
}

TEST(HigherOrder, RunStopsWithoutAdmissibleRoot) {
  const auto d = run_higher_order(example2_signal(kN), 2, terms(4));
  EXPECT_LT(d.terms.size(), 4u);
  ASSERT_FALSE(d.diagnostics.empty());
  EXPECT_EQ(d.diagnostics.back().kind, "stop");
}

TEST(PartialSum, Examples) {
  const auto d = run_afd(example2_signal(kN), Mode::Double, terms(6));
  EXPECT_EQ(partial_sum(d, 0).norm2(), 0.0);
  const DiscParameter b(0.5, 0.5);
  const auto eb = normalized_kernel(b, kN);
  const auto one = run_afd(eb, Mode::Double, terms(1));
  EXPECT_LE((partial_sum(one, 1) - eb).norm(), 1e-10);
  EXPECT_THROW((void)partial_sum(d, 7), ContractError);
}

TEST(PartialSum, ResidualMatchesLastTermEnergy) {
  const auto f = example2_signal(kN);
  const auto d = run_afd(f, Mode::Double, terms(10));
  const double direct = (f - partial_sum(d, d.terms.size())).norm2();
  EXPECT_NEAR(direct, d.final_residual_energy(), 1e-8 * f.norm2());
}

TEST(Identities, CoefficientIdentityAgainstBasis) {
  const auto f = example2_signal(kN);
  for (const auto mode : {Mode::Core, Mode::Double}) {
    const auto d = run_afd(f, mode, terms(8));
    const auto params = d.parameters();
    const BasisMode basis = mode == Mode::Core ? BasisMode::TM : BasisMode::DTM;
    for (std::size_t k = 1; k <= d.terms.size(); ++k) {
      const cplx direct = inner_product(f, basis_eval({params, basis, k}, kN));
      EXPECT_LE(std::abs(direct - d.terms[k - 1].c), 1e-8 * std::max(1.0, std::abs(direct))) << k;
    }
  }
}

TEST(Identities, StandardRemainderIsReducedRemainderTimesBlaschke) {
  const auto f = project_real(example1_samples(kN)).analytic;
  const auto d = run_afd(f, Mode::Double, terms(8));
  const auto reduced = replay_remainders(f, d);
  std::vector<cplx> blaschke(kN, cplx(1.0));
  for (std::size_t k = 1; k <= d.terms.size(); ++k) {
    const auto standard = f - partial_sum(d, k - 1);
    double gap = 0.0;
    for (std::size_t j = 0; j < kN; ++j) {
      gap = std::max(gap, std::abs(standard.samples()[j] - reduced[k - 1].samples()[j] * blaschke[j]));
    }
    EXPECT_LE(gap, 1e-8 * f.norm()) << k;
    const auto phi = moebius_samples(d.terms[k - 1].a, kN);
    for (std::size_t j = 0; j < kN; ++j) blaschke[j] *= phi[j] * phi[j];
  }
}

TEST(Identities, ScalingKeepsParametersAndScalesCoefficients) {
  const auto f = example2_signal(kN);
  const cplx s(-1.7, 0.4);
  for (const auto mode : {Mode::Core, Mode::Double}) {
    const auto d = run_afd(f, mode, terms(6));
    const auto ds = run_afd(f.scaled(s), mode, terms(6));
    ASSERT_EQ(d.terms.size(), ds.terms.size());
    for (std::size_t k = 0; k < d.terms.size(); ++k) {
      EXPECT_LE(std::abs(d.terms[k].a.value() - ds.terms[k].a.value()), 1e-9) << k;
      EXPECT_LE(std::abs(s * d.terms[k].c - ds.terms[k].c), 1e-8 * std::abs(s)) << k;
    }
  }
}

TEST(Modes, ParseAndName) {
  EXPECT_EQ(parse_mode("core"), std::make_pair(Mode::Core, 1));
  EXPECT_EQ(parse_mode("double"), std::make_pair(Mode::Double, 1));
  EXPECT_EQ(parse_mode("mono"), std::make_pair(Mode::MonoComponent, 1));
  EXPECT_EQ(parse_mode("ho:3"), std::make_pair(Mode::HigherOrder, 3));
  EXPECT_EQ(mode_name(Mode::HigherOrder, 3), "ho:3");
  EXPECT_THROW((void)parse_mode("ho:0"), ContractError);
  EXPECT_THROW((void)parse_mode("triple"), ContractError);
}

TEST(Modes, FactorPowers) {
  EXPECT_EQ(factor_powers(Mode::Core, 1, 3), (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(factor_powers(Mode::Double, 1, 3), (std::vector<int>{2, 2, 2}));
  EXPECT_EQ(factor_powers(Mode::MonoComponent, 1, 3), (std::vector<int>{1, 2, 2}));
  EXPECT_EQ(factor_powers(Mode::HigherOrder, 2, 2), (std::vector<int>{3, 3}));
}

TEST(Decompose, DeterministicAcrossRuns) {
  const auto f = project_real(example1_samples(kN)).analytic;
  const auto a = decompose(f, Mode::Double, 1, terms(8));
  const auto b = decompose(f, Mode::Double, 1, terms(8));
  EXPECT_EQ(a.terms, b.terms);
  EXPECT_EQ(a.diagnostics, b.diagnostics);
}
