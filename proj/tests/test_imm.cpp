#include <cmath>

#include "doctest.h"
#include "mmest/imm.hpp"
#include "mmest/random.hpp"

using namespace mmest;

namespace {

Matrix paper_transition() {
  Matrix p(2, 2);
  p << 0.75, 0.25, 0.25, 0.75;
  return p;
}

ModelSet paper_set() {
  return make_model_set({cv_model(1, 1, 1), ca_model(1, 1, 1)},
                        paper_transition());
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

GaussianState fused_prior(const ModelSet& set) {
  return GaussianState(Vector::Zero(set.fused_dim),
                       Matrix::Identity(set.fused_dim, set.fused_dim), 0,
                       StateTag::filtered);
}

ModelSet scalar_pair_set() {
  Matrix A(1, 1), B(1, 1), H(1, 1), Q(1, 1), R(1, 1);
  A << 1.0;
  B << 1.0;
  H << 1.0;
  Q << 0.5;
  R << 1.0;
  auto m1 = make_model(A, B, H, Q, R, "m1");
  A << 0.5;
  Q << 2.0;
  R << 0.8;
  auto m2 = make_model(A, B, H, Q, R, "m2");
  Matrix p(2, 2);
  p << 0.9, 0.1, 0.2, 0.8;
  return make_model_set({m1, m2}, p);
}

}  // namespace

TEST_CASE("predict_mode_probabilities") {
  SUBCASE("identity transition keeps mu") {
    const Vector mu = vec2(0.3, 0.7);
    CHECK(predict_mode_probabilities(Matrix::Identity(2, 2), mu) == mu);
  }
  SUBCASE("paper transition from a pure state") {
    const Vector out =
        predict_mode_probabilities(paper_transition(), vec2(1.0, 0.0));
    CHECK(out(0) == 0.75);
    CHECK(out(1) == 0.25);
  }
  SUBCASE("identical rows forget the prior in one step") {
    Matrix p(2, 2);
    p << 0.3, 0.7, 0.3, 0.7;
    for (auto mu : {vec2(1.0, 0.0), vec2(0.2, 0.8), vec2(0.5, 0.5)}) {
      const Vector out = predict_mode_probabilities(p, mu);
      CHECK(out(0) == doctest::Approx(0.3).epsilon(1e-15));
      CHECK(out(1) == doctest::Approx(0.7).epsilon(1e-15));
    }
  }
}

TEST_CASE("mixing_weights") {
  SUBCASE("identity transition gives identity weights") {
    const MixingWeights w =
        mixing_weights(Matrix::Identity(2, 2), vec2(0.3, 0.7));
    CHECK(w.w == Matrix::Identity(2, 2));
    CHECK(w.mu_pred == vec2(0.3, 0.7));
  }
  SUBCASE("paper transition from uniform mu") {
    const MixingWeights w = mixing_weights(paper_transition(), vec2(0.5, 0.5));
    CHECK(w.mu_pred == vec2(0.5, 0.5));
    CHECK(w.w(0, 0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(w.w(1, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(w.w(0, 1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(w.w(1, 1) == doctest::Approx(0.75).epsilon(1e-15));
  }
  SUBCASE("pure state column") {
    const MixingWeights w = mixing_weights(paper_transition(), vec2(1.0, 0.0));
    CHECK(w.w(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w.w(1, 0) == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("guarded column when the predicted probability vanishes") {
    Matrix p(2, 2);
    p << 0.0, 1.0, 0.0, 1.0;  // nothing transitions into model 0
    const MixingWeights w = mixing_weights(p, vec2(0.4, 0.6));
    CHECK(w.mu_pred(0) == 0.0);
    // column 0 falls back to a sane conditional distribution
    CHECK(w.w.col(0).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.w.col(1).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("columns always sum to one") {
    SplitMix64 rng(61);
    for (int rep = 0; rep < 50; ++rep) {
      Matrix p(2, 2);
      const double a = rng.next_uniform();
      const double b = rng.next_uniform();
      p << a, 1.0 - a, b, 1.0 - b;
      const double m = rng.next_uniform();
      const MixingWeights w = mixing_weights(p, vec2(m, 1.0 - m));
      for (Index i = 0; i < 2; ++i) {
        CHECK(std::abs(w.w.col(i).sum() - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("mix_estimates") {
  const ModelSet set = scalar_pair_set();

  SUBCASE("identity weights return the bank states") {
    BankState bank;
    Vector m0(1), m1(1);
    m0 << 0.4;
    m1 << -1.2;
    Matrix c0(1, 1), c1(1, 1);
    c0 << 0.9;
    c1 << 2.0;
    bank.per_model = {GaussianState(m0, c0, 3, StateTag::filtered),
                      GaussianState(m1, c1, 3, StateTag::filtered)};
    bank.mu = vec2(0.5, 0.5);
    bank.time_index = 3;
    MixingWeights w{Matrix::Identity(2, 2), vec2(0.5, 0.5)};
    const auto mixed = mix_estimates(set, bank, w);
    CHECK(mixed[0].mean == m0);
    CHECK(mixed[0].cov == c0);
    CHECK(mixed[1].mean == m1);
    CHECK(mixed[1].cov == c1);
  }

  SUBCASE("identical estimates mix to themselves") {
    BankState bank;
    Vector m(1);
    m << 0.7;
    Matrix c(1, 1);
    c << 1.3;
    bank.per_model = {GaussianState(m, c, 0, StateTag::filtered),
                      GaussianState(m, c, 0, StateTag::filtered)};
    bank.mu = vec2(0.5, 0.5);
    Matrix wm(2, 2);
    wm << 0.6, 0.3, 0.4, 0.7;
    MixingWeights w{wm, vec2(0.5, 0.5)};
    const auto mixed = mix_estimates(set, bank, w);
    for (const auto& state : mixed) {
      CHECK(state.mean(0) == doctest::Approx(0.7).epsilon(1e-15));
      CHECK(state.cov(0, 0) == doctest::Approx(1.3).epsilon(1e-15));
    }
  }

  SUBCASE("hand-evaluated spread") {
    BankState bank;
    Vector m0(1), m1(1);
    m0 << 0.0;
    m1 << 2.0;
    Matrix c(1, 1);
    c << 1.0;
    bank.per_model = {GaussianState(m0, c, 0, StateTag::filtered),
                      GaussianState(m1, c, 0, StateTag::filtered)};
    bank.mu = vec2(0.5, 0.5);
    Matrix wm(2, 2);
    wm << 0.5, 0.5, 0.5, 0.5;
    MixingWeights w{wm, vec2(0.5, 0.5)};
    const auto mixed = mix_estimates(set, bank, w);
    for (const auto& state : mixed) {
      CHECK(state.mean(0) == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(state.cov(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("imm_step with one model is exactly a Kalman filter") {
  const ModelSet set =
      make_model_set({ca_model(1, 1, 1)}, Matrix::Ones(1, 1));
  Vector mu1(1);
  mu1 << 1.0;
  BankState bank = amm_init(set, fused_prior(set), mu1);
  GaussianState kf = bank.per_model[0];
  GaussianStream noise(19);
  for (int k = 0; k < 60; ++k) {
    Vector y(1);
    y << static_cast<double>(k) + noise.next();
    const ImmStepResult res = imm_step(set, bank, y);
    bank = res.bank;
    kf = update(set.models[0], predict(set.models[0], kf), y);
    CHECK(bank.per_model[0].mean == kf.mean);
    CHECK(bank.per_model[0].cov == kf.cov);
    CHECK(res.fused.state.mean == kf.mean);
    CHECK(res.fused.state.cov == kf.cov);
    CHECK(bank.mu(0) == 1.0);
    CHECK(res.mu_pred(0) == 1.0);
  }
}

TEST_CASE("imm_step with identity transition equals amm_step") {
  const ModelSet set = make_model_set({cv_model(1, 1, 1), ca_model(1, 1, 1)},
                                      Matrix::Identity(2, 2));
  BankState imm_bank = amm_init(set, fused_prior(set), vec2(0.5, 0.5));
  BankState amm_bank = imm_bank;
  GaussianStream noise(23);
  for (int k = 0; k < 40; ++k) {
    Vector y(1);
    y << 0.3 * static_cast<double>(k) + noise.next();
    const ImmStepResult ir = imm_step(set, imm_bank, y);
    const AmmStepResult ar = amm_step(set, amm_bank, y);
    imm_bank = ir.bank;
    amm_bank = ar.bank;
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(imm_bank.per_model[i].mean == amm_bank.per_model[i].mean);
      CHECK(imm_bank.per_model[i].cov == amm_bank.per_model[i].cov);
    }
    CHECK(imm_bank.mu == amm_bank.mu);
  }
}

TEST_CASE("imm_step keeps probability invariants on the CV/CA scenario") {
  const ModelSet set = paper_set();
  BankState bank = amm_init(set, fused_prior(set), vec2(0.5, 0.5));
  GaussianStream noise(29);
  for (int k = 0; k < 120; ++k) {
    const Vector mu_before = bank.mu;
    Vector y(1);
    y << 2.0 * noise.next();
    const ImmStepResult res = imm_step(set, bank, y);
    bank = res.bank;
    CHECK(std::abs(bank.mu.sum() - 1.0) <= 1e-12);
    CHECK(bank.mu.minCoeff() >= tol::probability_floor);
    // with all transition entries >= 0.25 the predicted probabilities
    // cannot collapse
    for (Index i = 0; i < 2; ++i) {
      CHECK(res.mu_pred(i) >= 0.25 * mu_before.minCoeff());
    }
    CHECK(is_psd_within_floor(res.fused.state.cov,
                              psd_floor_for(res.fused.state.cov)));
  }
}

TEST_CASE("three-model bank with mixed state dimensions keeps all invariants") {
  // 1-state random walk, 2-state CV, 3-state CA; shared scalar measurement
  Matrix A(1, 1), B(1, 1), H(1, 1), Q(1, 1), R(1, 1);
  A << 1.0;
  B << 1.0;
  H << 1.0;
  Q << 0.8;
  R << 1.0;
  const StateSpaceModel walk = make_model(A, B, H, Q, R, "walk");
  Matrix p(3, 3);
  p << 0.8, 0.1, 0.1, 0.15, 0.7, 0.15, 0.1, 0.2, 0.7;
  const ModelSet set =
      make_model_set({walk, cv_model(1, 1, 1), ca_model(1, 1, 1)}, p, 0.5);
  CHECK(set.fused_dim == 3);
  CHECK(set.lifts[0].rows() == 3);
  CHECK(set.lifts[0].cols() == 1);

  Vector mu0(3);
  mu0 << 0.2, 0.3, 0.5;
  BankState imm_bank = amm_init(set, fused_prior(set), mu0);
  BankState amm_bank = imm_bank;
  CHECK(imm_bank.per_model[0].dim() == 1);
  CHECK(imm_bank.per_model[1].dim() == 2);
  CHECK(imm_bank.per_model[2].dim() == 3);

  GaussianStream noise(31);
  for (int k = 0; k < 80; ++k) {
    const MixingWeights weights = mixing_weights(set.transition, imm_bank.mu);
    for (Index i = 0; i < 3; ++i) {
      CHECK(std::abs(weights.w.col(i).sum() - 1.0) <= 1e-12);
    }
    Vector y(1);
    y << 0.2 * static_cast<double>(k) + 2.0 * noise.next();
    const ImmStepResult ir = imm_step(set, imm_bank, y);
    const AmmStepResult ar = amm_step(set, amm_bank, y);
    imm_bank = ir.bank;
    amm_bank = ar.bank;
    for (const auto* bank : {&imm_bank, &amm_bank}) {
      CHECK(std::abs(bank->mu.sum() - 1.0) <= 1e-12);
      CHECK(bank->mu.minCoeff() >= tol::probability_floor);
    }
    for (const auto* fused : {&ir.fused, &ar.fused}) {
      CHECK(fused->state.dim() == 3);
      CHECK(is_psd_within_floor(fused->state.cov,
                                psd_floor_for(fused->state.cov)));
    }
  }
}

TEST_CASE("one step from the uniform start stays well-formed") {
  const ModelSet set = paper_set();
  const BankState bank = amm_init(set, fused_prior(set), vec2(0.5, 0.5));
  Vector y(1);
  y << 0.4;
  const ImmStepResult res = imm_step(set, bank, y);
  CHECK(std::abs(res.bank.mu.sum() - 1.0) <= 1e-12);
  CHECK(res.bank.mu.minCoeff() > 0.0);
  CHECK(res.bank.mu.maxCoeff() < 1.0);
  CHECK(res.fused.per_model_log_likelihood.size() == 2);
}
