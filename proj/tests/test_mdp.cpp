#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "drsim/mdp.hpp"

using namespace drsim;

namespace {

UtilityParams test_params() {
  return make_utility_params(1.5591, 1.2492, 0.12, 10.77, 0.99);
}

}  // namespace

TEST_CASE("window shifts on ordinary days and freezes on event days") {
  UtilityParams params = test_params();
  State s{{3.0, 2.0, 1.0}, 0, 1.0};
  ConsumptionWindow next = transition_window(s, 4.5, params.a_hat);
  CHECK(next == ConsumptionWindow{4.5, 3.0, 2.0});

  s.dr_flag = 1;
  next = transition_window(s, 4.5, params.a_hat);
  CHECK(next == s.window);
}

TEST_CASE("transition validates the action range") {
  UtilityParams params = test_params();
  State s{{1.0, 1.0}, 0, 1.0};
  CHECK_THROWS_AS(transition_window(s, -0.1, params.a_hat), std::domain_error);
  CHECK_THROWS_AS(transition_window(s, params.a_hat + 0.1, params.a_hat),
                  std::domain_error);
  CHECK_NOTHROW(transition_window(s, params.a_hat, params.a_hat));
}

TEST_CASE("rebate pays only the event-day shortfall") {
  DrProgram program;
  program.x = 1;
  program.y = 3;
  program.rebate_price = 0.5;
  program.method = BaselineMethod::HighXofY;
  std::vector<double> window{3.0, 2.0, 1.0};

  // baseline is 3; consuming 2 earns 0.5 per kWh below it
  CHECK(rebate(window, 1, 2.0, program) == doctest::Approx(0.5));
  CHECK(rebate(window, 1, 3.5, program) == doctest::Approx(0.0));
  CHECK(rebate(window, 0, 2.0, program) == doctest::Approx(0.0));
}

TEST_CASE("immediate payoff is net utility plus rebate") {
  UtilityParams params = test_params();
  DrProgram program;
  program.x = 1;
  program.y = 2;
  program.rebate_price = 0.12;
  program.method = BaselineMethod::HighXofY;

  State s{{3.0, 2.0}, 1, 1.0};
  double expected = net_utility(1.5, 1.0, params) + 0.12 * (3.0 - 1.5);
  CHECK(immediate_payoff(s, 1.5, program, params) == doctest::Approx(expected));

  s.dr_flag = 0;
  CHECK(immediate_payoff(s, 1.5, program, params) ==
        doctest::Approx(net_utility(1.5, 1.0, params)));
}

TEST_CASE("event chain arithmetic") {
  DrChain chain{0.2, 0.4};
  CHECK(chain.stationary_dr_fraction() == doctest::Approx(0.25));
  CHECK(dr_transition_prob(0, 1, chain) == doctest::Approx(0.2));
  CHECK(dr_transition_prob(0, 0, chain) == doctest::Approx(0.8));
  CHECK(dr_transition_prob(1, 1, chain) == doctest::Approx(0.4));
  CHECK(dr_transition_prob(1, 0, chain) == doctest::Approx(0.6));
  CHECK_THROWS_AS(dr_transition_prob(2, 0, chain), std::invalid_argument);
}

TEST_CASE("validation of the state pieces") {
  CHECK_NOTHROW(validate_chain(DrChain{0.0, 1.0}));
  CHECK_THROWS_AS(validate_chain(DrChain{-0.1, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(validate_chain(DrChain{0.2, 1.1}), std::invalid_argument);

  CHECK_THROWS_AS(validate_horizon(Horizon{0}), std::invalid_argument);
  CHECK_NOTHROW(validate_horizon(Horizon{1}));

  State good{{1.0, 2.0}, 0, 1.0};
  CHECK_NOTHROW(validate_state(good));
  State bad_flag{{1.0, 2.0}, 2, 1.0};
  CHECK_THROWS_AS(validate_state(bad_flag), std::invalid_argument);
  State bad_window{{}, 0, 1.0};
  CHECK_THROWS_AS(validate_state(bad_window), std::invalid_argument);
  State bad_z{{1.0}, 0, 0.0};
  CHECK_THROWS_AS(validate_state(bad_z), std::invalid_argument);
}

TEST_CASE("z set validation") {
  CHECK_NOTHROW(validate_z_set(ZSet{{0.5, 1.0, 1.5}, {0.2, 0.5, 0.3}}));
  CHECK_THROWS_AS(validate_z_set(ZSet{{1.0, 0.5}, {0.5, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_z_set(ZSet{{0.5, 1.0}, {0.6, 0.6}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_z_set(ZSet{{0.5}, {0.5, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_z_set(ZSet{{}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_z_set(ZSet{{0.0, 1.0}, {0.5, 0.5}}), std::invalid_argument);
}
