#include <cmath>
#include <map>
#include <stdexcept>

#include "doctest.h"
#include "dokl/agent.hpp"
#include "dokl/errors.hpp"
#include "helpers.hpp"

using dokl::AgentState;
using dokl::HyperParams;
using dokl::Sample;
using testutil::expansion1d;
using testutil::vec1;

namespace {

// Fixture behind the hand-derived trace checks: one atom at 0.1 with weight
// 0.6, squared loss, absolute proximity, two dual owners.
AgentState trace_state() {
  AgentState s;
  s.id = 0;
  s.f = expansion1d(0.5, {0.1}, {0.6});
  s.loss.family = dokl::LossFamily::SquaredError;
  s.prox.family = dokl::ProximityFamily::AbsoluteDifference;
  s.out_duals = {{1, 0.3}, {2, 0.05}};
  return s;
}

HyperParams trace_hp() {
  HyperParams hp;
  hp.eta = 0.05;
  hp.lambda = 0.01;
  hp.epsilon_override = 0.0;
  return hp;
}

}  // namespace

TEST_CASE("hyper-parameter budget accessors") {
  HyperParams hp;
  hp.eta = 0.01;
  hp.parsimony = 8.0;
  CHECK(hp.epsilon() == doctest::Approx(8e-4).epsilon(1e-15));
  CHECK(hp.alpha() == doctest::Approx(0.08).epsilon(1e-15));
  hp.epsilon_override = 5e-3;  // override beats parsimony
  CHECK(hp.epsilon() == 5e-3);

  HyperParams unset;
  CHECK_THROWS_AS(unset.epsilon(), std::invalid_argument);

  HyperParams bad;
  bad.parsimony = 1.0;
  bad.eta = 0.0;
  CHECK_THROWS_AS(dokl::validate(bad), std::invalid_argument);
  bad.eta = 2.0;
  bad.lambda = 0.5;  // eta * lambda >= 1
  CHECK_THROWS_AS(dokl::validate(bad), std::invalid_argument);
  bad.lambda = 1e-3;
  bad.radius_RB = 0.0;
  CHECK_THROWS_AS(dokl::validate(bad), std::invalid_argument);
}

TEST_CASE("uncompressed primal step matches the hand trace") {
  const AgentState s = trace_state();
  const HyperParams hp = trace_hp();
  const Sample sample{vec1(0.4), 1.0};
  const std::map<int, double> evals{{1, 0.2}, {2, -0.1}};

  CHECK(dokl::evaluate(s.f, sample.x) ==
        doctest::Approx(0.5011621268467632).epsilon(1e-15));

  const dokl::KernelExpansion tilde =
      dokl::primal_uncompressed(s, sample, evals, hp);
  REQUIRE(tilde.order() == 2);
  CHECK(tilde.w[0] == doctest::Approx(0.5997).epsilon(1e-15));
  CHECK(tilde.D(0, 1) == 0.4);
  CHECK(tilde.w[1] ==
        doctest::Approx(0.007441893657661841).epsilon(1e-13));
  CHECK(dokl::evaluate(tilde, vec1(0.25)) ==
        doctest::Approx(0.5804261214521045).epsilon(1e-13));
}

TEST_CASE("functional update equals the parametric recursion") {
  // Building (1 - eta lambda) f - eta coef k(x, .) by explicit expansion
  // arithmetic must reproduce primal_uncompressed exactly.
  const AgentState s = trace_state();
  const HyperParams hp = trace_hp();
  const Sample sample{vec1(0.4), 1.0};
  const std::map<int, double> evals{{1, 0.2}, {2, -0.1}};

  const double fx = dokl::evaluate(s.f, sample.x);
  double coef = dokl::loss_deriv(s.loss, fx, sample.y);
  coef += 0.3 * dokl::proximity_deriv_first(s.prox, fx, 0.2);
  coef += 0.05 * dokl::proximity_deriv_first(s.prox, fx, -0.1);
  const auto manual = dokl::append_atom(
      dokl::scale_weights(s.f, 1.0 - hp.eta * hp.lambda), sample.x,
      -hp.eta * coef);

  const auto tilde = dokl::primal_uncompressed(s, sample, evals, hp);
  CHECK(dokl::hilbert_norm(dokl::difference(tilde, manual)) <= 1e-14);
}

TEST_CASE("missing neighbor evaluation is a protocol error") {
  const AgentState s = trace_state();
  const Sample sample{vec1(0.4), 1.0};
  const std::map<int, double> missing{{1, 0.2}};  // neighbor 2 absent
  CHECK_THROWS_AS(dokl::primal_uncompressed(s, sample, missing, trace_hp()),
                  dokl::ProtocolError);
  CHECK_THROWS_AS(
      dokl::dual_step(s, sample, missing, {{1, 0.1}, {2, 0.1}}, trace_hp()),
      dokl::ProtocolError);
}

TEST_CASE("full primal step compresses within budget and projects") {
  AgentState s = trace_state();
  const Sample sample{vec1(0.4), 1.0};
  const std::map<int, double> evals{{1, 0.2}, {2, -0.1}};
  HyperParams hp = trace_hp();
  hp.epsilon_override = 1e-3;

  dokl::PrimalDiagnostics diag;
  const AgentState next = dokl::primal_step(s, sample, evals, hp, &diag);
  CHECK(diag.compression_error <= hp.epsilon() + 1e-8);
  CHECK(next.out_duals == s.out_duals);  // duals carried through untouched

  // A tiny ball forces the projection to land exactly on the radius.
  hp.radius_RB = 0.1;
  const AgentState clipped = dokl::primal_step(s, sample, evals, hp);
  CHECK(dokl::hilbert_norm(clipped.f) == doctest::Approx(0.1).epsilon(1e-10));
}

TEST_CASE("dual ascent matches the hand trace and floors at zero") {
  AgentState s;
  s.id = 3;
  s.f = expansion1d(0.5, {}, {});
  s.prox.family = dokl::ProximityFamily::AbsoluteDifference;
  s.out_duals = {{1, 0.7}};

  HyperParams hp;
  hp.eta = 0.1;
  hp.delta = 1e-3;
  hp.nu = 0.05;
  hp.parsimony = 0.0;

  const Sample sample{vec1(0.0), 0.0};
  // f(x) = 0 against neighbor value -0.3: h = 0.3, gamma = 0.1.
  const auto next =
      dokl::dual_step(s, sample, {{1, -0.3}}, {{1, 0.1}}, hp);
  const double expected =
      0.7 * (1.0 - 1e-3 * 0.1 * 0.1) + 0.1 * (0.3 - 0.1 + 0.05);
  CHECK(next.at(1) == doctest::Approx(expected).epsilon(1e-15));

  // Deep feasibility drives the update negative; the floor catches it.
  const auto floored =
      dokl::dual_step(s, sample, {{1, -0.3}}, {{1, 100.0}}, hp);
  CHECK(floored.at(1) == 0.0);

  // Zero duals stay zero while constraints hold strictly.
  s.out_duals = {{1, 0.0}};
  const auto still =
      dokl::dual_step(s, sample, {{1, -0.3}}, {{1, 0.5}}, hp);
  CHECK(still.at(1) == 0.0);
}

TEST_CASE("bandwidth adaptation") {
  // Frozen three-atom value.
  const auto f = expansion1d(0.4, {0.0, 0.3, 1.0}, {1.0, 1.0, 1.0});
  CHECK(dokl::adapt_bandwidth(f).bandwidth ==
        doctest::Approx(0.5462758501799327).epsilon(1e-13));

  // Two atoms: the new bandwidth is exactly their distance, independent of
  // the current sigma.
  for (double sigma : {0.05, 0.4, 3.0}) {
    const auto two = expansion1d(sigma, {0.2, 0.9}, {1.0, -2.0});
    CHECK(dokl::adapt_bandwidth(two).bandwidth ==
          doctest::Approx(0.7).epsilon(1e-12));
  }

  // Degenerate dictionaries leave the spec untouched.
  const auto one = expansion1d(0.4, {0.2}, {1.0});
  CHECK(dokl::adapt_bandwidth(one).bandwidth == 0.4);
  const auto dup = expansion1d(0.4, {0.2, 0.2}, {1.0, 1.0});
  CHECK(dokl::adapt_bandwidth(dup).bandwidth == 0.4);
}

TEST_CASE("tightening constant") {
  dokl::TheoryConstants c;
  c.V = 2.0;
  c.R_B = 1.5;
  c.C = 2.0;
  c.X = 1.0;
  c.lambda = 1e-3;
  c.xi = 0.25;
  c.L_h = 1.0;
  c.E = 2.0;
  c.K1 = 0.5;
  c.delta = 1e-5;
  CHECK(dokl::compute_nu(c, 10000.0, 0.05) ==
        doctest::Approx(93.29546501291838).epsilon(1e-13));

  // nu decays toward the alpha floor as T grows.
  const double far = dokl::compute_nu(c, 1e12, 0.05);
  CHECK(far < 1.0);
  CHECK(far > 4.0 * c.V * c.R_B * 0.05 - 1e-12);

  c.xi = 0.0;
  CHECK_THROWS_AS(dokl::compute_nu(c, 10000.0, 0.05), std::invalid_argument);
}
