/******************************************************************************
 * Copyright 2026 The idrem Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#include "idrem/drem.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace idrem {
namespace {

Vec V3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

TEST(DremBank, Validation) {
  EXPECT_NO_THROW(DremBank(V3(1, 1, 1), V3(1, 2, 3)));
  EXPECT_THROW(DremBank(V3(1, 1, 1), V3(1, 2, 2)), ConfigError);
  EXPECT_THROW(DremBank(V3(1, 0, 1), V3(1, 2, 3)), ConfigError);
  EXPECT_THROW(DremBank(V3(1, 1, 1), V3(1, -2, 3)), ConfigError);
  EXPECT_THROW(DremBank(V3(1, 1, 1), Vec::Ones(2)), ConfigError);
  EXPECT_THROW(DremBank(Vec(0), Vec(0)), ConfigError);
}

TEST(DremBank, UnitDefaults) {
  const DremBank b = DremBank::unit(3);
  EXPECT_EQ(b.alpha(), Vec::Ones(3));
  EXPECT_EQ(b.beta(), V3(1, 2, 3));
}

TEST(BankDerivatives, ZeroInZeroOut) {
  const DremBank bank = DremBank::unit(3);
  const DremBankState d = bank_derivatives(bank, DremBankState::zero(3, 2, 2), Vec::Zero(2), Vec::Zero(4));
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(d.y_f[i], Vec::Zero(2));
    EXPECT_EQ(d.phi_f[i], Vec::Zero(4));
  }
}

TEST(BankDerivatives, DcGainIsAlphaOverBeta) {
  const DremBank bank((Vec(1) << 1.0).finished(), (Vec(1) << 2.0).finished());
  const Vec c = Vec::Constant(1, 3.0);
  auto f = [&](double, const Vec& s) {
    DremBankState st{{s.head(1)}, {s.tail(2)}};
    const DremBankState d = bank_derivatives(bank, st, c, Vec::Constant(2, 3.0));
    Vec out(3);
    out << d.y_f[0], d.phi_f[0];
    return out;
  };
  const Vec s = oracle::rk4(f, Vec::Zero(3), 0.0, 1e-3, 20000);
  EXPECT_LT((s - Vec::Constant(3, 1.5)).norm(), 1e-9);
}

TEST(BankDerivatives, DistinctPolesGiveDistinctCopies) {
  const DremBank bank = DremBank::unit(3);
  const Vec y = Vec::Ones(2);
  auto f = [&](double, const Vec& s) {
    DremBankState st = DremBankState::zero(3, 1, 1);
    for (int i = 0; i < 3; ++i) st.y_f[i] = s.segment(i, 1);
    const DremBankState d = bank_derivatives(bank, st, Vec::Ones(1), y);
    return V3(d.y_f[0](0), d.y_f[1](0), d.y_f[2](0));
  };
  const Vec s = oracle::rk4(f, Vec::Zero(3), 0.0, 1e-3, 500);
  EXPECT_NEAR(s(0), 1 - std::exp(-0.5), 1e-10);
  EXPECT_NEAR(s(1), (1 - std::exp(-1.0)) / 2, 1e-10);
  EXPECT_NEAR(s(2), (1 - std::exp(-1.5)) / 3, 1e-10);
}

TEST(BankDerivatives, ChannelCountMismatch) {
  EXPECT_THROW(bank_derivatives(DremBank::unit(3), DremBankState::zero(2, 2, 2), Vec::Zero(2), Vec::Zero(4)),
               DimensionError);
}

TEST(Extend, ZeroInZeroOut) {
  const ExtendedRegression e = extend(Vec::Zero(2), Vec::Zero(4), DremBankState::zero(3, 2, 2));
  EXPECT_EQ(e.Y_f, Mat::Zero(4, 2));
  EXPECT_EQ(e.Phi_f, Mat::Zero(4, 4));
}

TEST(Extend, RowOrder) {
  DremBankState s = DremBankState::zero(1, 1, 1);
  s.y_f[0] = Vec::Constant(1, 7.0);
  s.phi_f[0] = (Vec(2) << 3, 4).finished();
  const ExtendedRegression e = extend(Vec::Constant(1, 5.0), (Vec(2) << 1, 2).finished(), s);
  EXPECT_EQ(e.Phi_f, (Mat(2, 2) << 1, 2, 3, 4).finished());
  EXPECT_EQ(e.Y_f, (Mat(2, 1) << 5, 7).finished());
}

TEST(Extend, ChannelCountMismatch) {
  EXPECT_THROW(extend(Vec::Zero(2), Vec::Zero(4), DremBankState::zero(2, 2, 2)), DimensionError);
}

// A consistent regression y = theta^T phi_f filtered through the bank stays
// consistent row by row, for any input signal.
TEST(Extend, RowsStayConsistentThroughFilters) {
  oracle::Rng rng(8);
  const Mat theta = rng.matrix(4, 2);
  const DremBank bank = DremBank::unit(3);
  auto phi_of = [](double t) {
    return (Vec(4) << std::sin(t), std::cos(2 * t), 1.0, std::sin(3 * t + 1)).finished();
  };
  auto pack = [](const DremBankState& s) {
    Vec v(18);
    for (int i = 0; i < 3; ++i) v.segment(6 * i, 6) << s.y_f[i], s.phi_f[i];
    return v;
  };
  auto unpack = [](const Vec& v) {
    DremBankState s = DremBankState::zero(3, 2, 2);
    for (int i = 0; i < 3; ++i) {
      s.y_f[i] = v.segment(6 * i, 2);
      s.phi_f[i] = v.segment(6 * i + 2, 4);
    }
    return s;
  };
  auto f = [&](double t, const Vec& v) {
    const Vec phi = phi_of(t);
    return pack(bank_derivatives(bank, unpack(v), theta.transpose() * phi, phi));
  };
  const double t_end = 3.0;
  const Vec v = oracle::rk4(f, Vec::Zero(18), 0.0, 1e-3, 3000);
  const Vec phi = phi_of(t_end);
  const ExtendedRegression e = extend(theta.transpose() * phi, phi, unpack(v));
  EXPECT_LT((e.Y_f - e.Phi_f * theta).norm(), 1e-12);
}

TEST(Mix, IdentityRegressor) {
  oracle::Rng rng(9);
  const Mat Y_f = rng.matrix(4, 2);
  const MixedRegression r = mix(Y_f, Mat::Identity(4, 4));
  EXPECT_DOUBLE_EQ(r.omega, 1.0);
  EXPECT_TRUE(r.Y.isApprox(Y_f));
}

TEST(Mix, DecouplesExactRegression) {
  oracle::Rng rng(10);
  const Mat Phi = rng.matrix(4, 4);
  const Mat theta = rng.matrix(4, 2);
  const MixedRegression r = mix(Phi * theta, Phi);
  EXPECT_LE((r.Y - r.omega * theta).norm(), 1e-9 * r.Y.norm());
}

TEST(Mix, SingularRegressorGivesZeroOmega) {
  oracle::Rng rng(11);
  Mat Phi = rng.matrix(4, 4);
  Phi.row(2) = Phi.row(1);
  const MixedRegression r = mix(rng.matrix(4, 2), Phi);
  EXPECT_NEAR(r.omega, 0.0, 1e-15);
  EXPECT_TRUE(r.Y.allFinite());
}

TEST(Mix, ExactnessProperty) {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + trial % 4;
    const int m = 1 + trial % 2;
    const Mat Phi = rng.matrix(k, k, 2.0);
    const Mat theta = rng.matrix(k, m, 3.0);
    const MixedRegression r = mix(Phi * theta, Phi);
    EXPECT_LE((r.Y - r.omega * theta).norm(), 1e-9 * (1 + theta.norm()) * (1 + std::pow(Phi.norm(), k)));
  }
}

TEST(Monitor, NeverExcitedOnZero) {
  ExcitationMonitor mon;
  for (int k = 0; k < 1000; ++k) mon.step(0.0, k * 1e-3, 1e-3);
  EXPECT_FALSE(mon.report().excited);
  EXPECT_FALSE(mon.t0().has_value());
  EXPECT_EQ(mon.report().accumulated, 0.0);
}

TEST(Monitor, ConstantIntegratesToSquareTimesWindow) {
  const double c = 2e-3, dt = 1e-3;
  ExcitationMonitor mon(1e-10, 1e-5, 1.0);
  // omega switches on at t = 0.5
  for (int k = 0; k <= 3000; ++k) {
    const double t = k * dt;
    mon.step(t >= 0.5 - 1e-12 ? c : 0.0, t, dt);
  }
  ASSERT_TRUE(mon.t0().has_value());
  EXPECT_NEAR(*mon.t0(), 0.5, 1e-12);
  EXPECT_NEAR(mon.report().accumulated, c * c * 1.0, 1e-15);
  EXPECT_FALSE(mon.report().excited);  // 4e-6 < 1e-5

  ExcitationMonitor hi(1e-10, 4e-6 * (1 - 1e-9), 1.0);
  for (int k = 0; k <= 3000; ++k) hi.step(k * dt >= 0.5 - 1e-12 ? c : 0.0, k * dt, dt);
  EXPECT_TRUE(hi.report().excited);
}

TEST(Monitor, AccumulationNondecreasing) {
  ExcitationMonitor mon;
  double prev = 0.0;
  for (int k = 0; k < 5000; ++k) {
    const double t = k * 1e-3;
    const auto rep = mon.step(std::sin(7 * t) * 1e-3, t, 1e-3);
    EXPECT_GE(rep.accumulated, prev);
    prev = rep.accumulated;
  }
}

TEST(Monitor, RejectsBadStep) {
  ExcitationMonitor mon;
  EXPECT_THROW(mon.step(1.0, 0.0, 0.0), DomainError);
  EXPECT_THROW(ExcitationMonitor(1e-10, 0.0), ConfigError);
}

}  // namespace
}  // namespace idrem
