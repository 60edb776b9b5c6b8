#include "fqlsni/fql_agent.hpp"

#include <gtest/gtest.h>

#include <array>
#include <vector>

#include "fqlsni/errors.hpp"

namespace fqlsni {
namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

GTEST_TEST(FqlAgentTest, ExplorationIsUniform) {
  const auto q = RuleQTable::zeros(5, 3);
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(5);
  FqlHyperParams hp;
  Rng rng(123);
  std::array<int, 3> counts{};
  const int draws = 10000;
  for (int n = 0; n < draws / 5; ++n) {
    for (auto a : select_actions(w, q, 0.0, hp, rng)) ++counts[static_cast<std::size_t>(a)];
  }
  // Binomial std for p = 1/3 over 10⁴ draws is about 47; allow 5 sigma.
  for (int c : counts) EXPECT_NEAR(c, draws / 3.0, 240.0);
}

GTEST_TEST(FqlAgentTest, GreedyAfterExploration) {
  RuleQTable q = RuleQTable::zeros(1, 3);
  q.q.row(0) << 0.5, -1.0, 0.2;
  FqlHyperParams hp;
  hp.epsilon = 0.0;
  Rng rng(1);
  EXPECT_EQ(select_actions(vec({1.0}), q, 10.0, hp, rng)[0], 0);
}

GTEST_TEST(FqlAgentTest, EpsilonNonArgmaxRate) {
  RuleQTable q = RuleQTable::zeros(1, 3);
  q.q.row(0) << 0.5, -1.0, 0.2;
  FqlHyperParams hp;
  Rng rng(77);
  const int draws = 100000;
  int off = 0;
  for (int n = 0; n < draws; ++n) off += select_actions(vec({1.0}), q, 10.0, hp, rng)[0] != 0;
  // Expected 0.01·2/3·10⁵ ≈ 667 with std ≈ 26.
  EXPECT_NEAR(off, 0.01 * 2.0 / 3.0 * draws, 130.0);
}

GTEST_TEST(FqlAgentTest, UnfiredRulesKeepGreedyChoice) {
  RuleQTable q = RuleQTable::zeros(2, 3);
  q.q.row(1) << 0.0, 0.0, 1.0;
  FqlHyperParams hp;
  Rng rng(5);
  for (int n = 0; n < 100; ++n) EXPECT_EQ(select_actions(vec({1.0, 0.0}), q, 0.0, hp, rng)[1], 2);
}

GTEST_TEST(FqlAgentTest, GreedyTieBreak) {
  EXPECT_EQ(greedy_action(Eigen::RowVector3d(0, 0, 0)), 0);
  EXPECT_EQ(greedy_action(Eigen::RowVector3d(0, 0, 0), 1), 1);
  EXPECT_EQ(greedy_action(Eigen::RowVector3d(0, -1, 0), 1), 0);
  EXPECT_EQ(greedy_action(Eigen::RowVector3d(0.1, 0.3, 0.3)), 1);
}

GTEST_TEST(FqlAgentTest, GlobalActionExamples) {
  const auto set = ActionSet::gamma_rates();
  EXPECT_EQ(set.neutral, 1);
  const std::vector<Eigen::Index> one{2};
  EXPECT_DOUBLE_EQ(global_action(vec({0.4}), set, one), 20.0);
  const std::vector<Eigen::Index> two{0, 2};
  EXPECT_DOUBLE_EQ(global_action(vec({1.0, 1.0}), set, two), 0.0);
  EXPECT_DOUBLE_EQ(global_action(vec({1.0, 3.0}), vec({-20.0, 0.0})), -5.0);
}

GTEST_TEST(FqlAgentTest, QOfStateActionExamples) {
  RuleQTable q = RuleQTable::zeros(2, 3);
  const std::vector<Eigen::Index> chosen{0, 2};
  EXPECT_EQ(q_of_state_action(vec({0.5, 0.5}), q, chosen), 0.0);
  q.q(0, 0) = 0.7;
  EXPECT_DOUBLE_EQ(q_of_state_action(vec({1.0, 0.0}), q, chosen), 0.7);
  q.q(0, 0) = 1.0;
  q.q(1, 2) = 3.0;
  EXPECT_DOUBLE_EQ(q_of_state_action(vec({0.5, 0.5}), q, chosen), 2.0);
}

GTEST_TEST(FqlAgentTest, MaxQExamples) {
  RuleQTable q = RuleQTable::zeros(2, 3);
  EXPECT_EQ(max_q_of_state(vec({1.0, 1.0}), q), 0.0);
  q.q.row(0) << 0.1, 0.4, -2.0;
  q.q.row(1) << -1.0, -0.5, -0.2;
  EXPECT_DOUBLE_EQ(max_q_of_state(vec({1.0, 0.0}), q), 0.4);
  EXPECT_DOUBLE_EQ(max_q_of_state(vec({0.25, 0.75}), q), (0.25 * 0.4 + 0.75 * -0.2));
}

GTEST_TEST(FqlAgentTest, RewardExamples) {
  EXPECT_DOUBLE_EQ(reward(0.0, 1.0), 0.5);
  EXPECT_EQ(reward(0.8, 0.8), 0.0);
  EXPECT_EQ(reward(-0.8, 0.8), 0.0);
  EXPECT_DOUBLE_EQ(reward(2.0, 0.0), 1.0 / 3.0 - 1.0);
  EXPECT_DOUBLE_EQ(reward(9.0, 0.0), reward(2.0, 0.0));
}

GTEST_TEST(FqlAgentTest, RewardBoundedAndSigned) {
  Rng rng(4);
  std::uniform_real_distribution<double> e(-3.0, 3.0);
  for (int n = 0; n < 10000; ++n) {
    const double a = e(rng), b = e(rng);
    const double r = reward(a, b);
    EXPECT_GT(r, -1.0);
    EXPECT_LT(r, 1.0);
    const double ca = std::min(std::abs(a), 2.0), cb = std::min(std::abs(b), 2.0);
    if (ca < cb) {
      EXPECT_GT(r, 0.0);
    }
    if (ca > cb) {
      EXPECT_LT(r, 0.0);
    }
  }
}

GTEST_TEST(FqlAgentTest, UpdateSingleRule) {
  const auto q = RuleQTable::zeros(1, 3);
  const std::vector<Eigen::Index> chosen{2};
  const auto out = update(q, vec({1.0}), vec({1.0}), chosen, 1.0, FqlHyperParams{});
  EXPECT_DOUBLE_EQ(out.q(0, 2), 0.1);
  EXPECT_EQ(out.q(0, 0), 0.0);
  EXPECT_EQ(out.q(0, 1), 0.0);
}

GTEST_TEST(FqlAgentTest, UpdateZeroRewardAtZeroIsFixedPoint) {
  const auto q = RuleQTable::zeros(5, 3);
  const std::vector<Eigen::Index> chosen{0, 1, 2, 1, 0};
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(5, 0.3);
  EXPECT_EQ(update(q, w, w, chosen, 0.0, FqlHyperParams{}).q, q.q);
}

GTEST_TEST(FqlAgentTest, UpdateDistributesByFiringStrength) {
  const auto q = RuleQTable::zeros(2, 3);
  const std::vector<Eigen::Index> chosen{1, 1};
  const auto out = update(q, vec({0.25, 0.75}), vec({0.25, 0.75}), chosen, 0.4, FqlHyperParams{});
  EXPECT_DOUBLE_EQ(out.q(1, 1), 3.0 * out.q(0, 1));
  EXPECT_DOUBLE_EQ(out.q(0, 1) + out.q(1, 1), 0.1 * 0.4);
}

GTEST_TEST(FqlAgentTest, UpdateMatchesHandOracleAndIsSparse) {
  Rng rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0), wd(0.0, 1.0);
  std::uniform_int_distribution<int> a(0, 2);
  FqlHyperParams hp;
  for (int n = 0; n < 500; ++n) {
    RuleQTable q = RuleQTable::zeros(5, 3);
    for (Eigen::Index i = 0; i < 5; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) q.q(i, j) = u(rng);
    Eigen::VectorXd w(5), wn(5);
    for (Eigen::Index i = 0; i < 5; ++i) {
      w[i] = wd(rng) < 0.3 ? 0.0 : wd(rng);
      wn[i] = wd(rng) + 1e-3;
    }
    w[2] += 1e-3;
    std::vector<Eigen::Index> chosen(5);
    for (auto& c : chosen) c = a(rng);
    const double r = u(rng);

    double qsa = 0.0, qmax = 0.0;
    for (Eigen::Index i = 0; i < 5; ++i) {
      qsa += w[i] * q.q(i, chosen[static_cast<std::size_t>(i)]);
      qmax += wn[i] * q.q.row(i).maxCoeff();
    }
    qsa /= w.sum();
    qmax /= wn.sum();
    const double dq = r + hp.sigma * qmax - qsa;

    const auto out = update(q, w, wn, chosen, r, hp);
    for (Eigen::Index i = 0; i < 5; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) {
        const bool touched = w[i] > 0.0 && j == chosen[static_cast<std::size_t>(i)];
        if (touched) {
          EXPECT_NEAR(out.q(i, j) - q.q(i, j), hp.eta * dq * w[i] / w.sum(), 1e-14);
        } else {
          EXPECT_EQ(out.q(i, j), q.q(i, j));
        }
      }
    }
  }
}

GTEST_TEST(FqlAgentTest, DiscountedReturn) {
  EXPECT_EQ(discounted_return({}, 0.7), 0.0);
  const std::vector<double> one{0.3};
  EXPECT_EQ(discounted_return(one, 0.7), 0.3);
  const std::vector<double> three{1.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(discounted_return(three, 0.5), 1.75);
}

GTEST_TEST(FqlAgentTest, ApplyGainUpdate) {
  const SniGains g{5.0, 0.1, 6.0};
  const auto same = apply_gain_update({5.0, 0.1, 2.0}, {}, 0.01);
  EXPECT_EQ(same.gamma, 5.0);
  EXPECT_EQ(same.tau, 0.1);
  EXPECT_EQ(same.beta, 6.0);

  const auto up = apply_gain_update(g, {20.0, 0.0}, 0.01);
  EXPECT_DOUBLE_EQ(up.gamma, 5.2);
  EXPECT_DOUBLE_EQ(up.beta, 6.2);

  const auto top = apply_gain_update({100.0, 1.0, 101.0}, {20.0, 0.002}, 0.01);
  EXPECT_EQ(top.gamma, 100.0);
  EXPECT_EQ(top.tau, 1.0);
  const auto bottom = apply_gain_update({0.1, 1e-3, 1.1}, {-20.0, -0.002}, 0.01);
  EXPECT_EQ(bottom.gamma, 0.1);
  EXPECT_EQ(bottom.tau, 1e-3);
}

GTEST_TEST(FqlAgentTest, HyperParamsValidate) {
  EXPECT_NO_THROW(FqlHyperParams{}.validate());
  FqlHyperParams hp;
  hp.sigma = 1.0;
  EXPECT_THROW(hp.validate(), ConfigError);
  hp = {};
  hp.epsilon = 1.5;
  EXPECT_THROW(hp.validate(), ConfigError);
  hp = {};
  hp.eta = -0.1;
  EXPECT_THROW(hp.validate(), ConfigError);
}

GTEST_TEST(FqlAgentTest, AgentIsDeterministicPerSeedAndStream) {
  auto run = [](std::uint64_t seed, std::uint64_t stream) {
    FqlHyperParams hp;
    hp.seed = seed;
    FqlAgent agent(RuleBase::standard_five(), ActionSet::gamma_rates(), hp, stream);
    std::vector<double> out;
    for (int k = 0; k < 300; ++k) {
      const double e = std::sin(0.05 * k);
      const auto w = agent.rules().fire(e);
      agent.learn(w, reward(e, std::sin(0.05 * (k - 1))));
      out.push_back(agent.act(w, 0.01 * k));
    }
    return std::make_pair(out, agent.table().q);
  };
  const auto a = run(42, 1);
  const auto b = run(42, 1);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_NE(a.first, run(42, 2).first);
  EXPECT_NE(a.first, run(43, 1).first);
}

GTEST_TEST(FqlAgentTest, LearnBeforeActIsNoOp) {
  FqlAgent agent(RuleBase::standard_five(), ActionSet::tau_rates(), FqlHyperParams{}, 0);
  agent.learn(agent.rules().fire(0.0), 1.0);
  EXPECT_TRUE(agent.table().q.isZero());
}

}  // namespace
}  // namespace fqlsni
