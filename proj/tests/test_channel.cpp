#include "surfsim/channel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace surfsim;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix2cd bloch(const Eigen::Vector3d& n) {
  Eigen::Matrix2cd rho = 0.5 * Eigen::Matrix2cd::Identity();
  for (int k = 0; k < 3; ++k) rho += 0.5 * n(k) * pauli_matrix(k + 1);
  return rho;
}

double trace_distance(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// Apply the 4-index superoperator to a density matrix by summation.
Eigen::Matrix2cd superop_apply(const Tensor& e, const Eigen::Matrix2cd& rho) {
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int jp = 0; jp < 2; ++jp)
        for (int ip = 0; ip < 2; ++ip) out(i, ip) += e.at({i, j, jp, ip}) * rho(j, jp);
  return out;
}

}  // namespace

TEST(Channel, AmplitudeDampingLimits) {
  const Channel id_like = Channel::amplitude_damping(0.0);
  Eigen::Matrix2cd rho;
  rho << 0.3, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.7;
  EXPECT_NEAR((id_like.apply(rho) - rho).norm(), 0.0, 1e-14);

  const Channel full = Channel::amplitude_damping(1.0);
  Eigen::Matrix2cd zero_state = Eigen::Matrix2cd::Zero();
  zero_state(0, 0) = 1.0;
  EXPECT_NEAR((full.apply(rho) - zero_state).norm(), 0.0, 1e-14);
}

TEST(Channel, SystematicRotationChi) {
  const double theta = 0.3;
  const Channel sr = Channel::systematic_rotation(theta);
  const Eigen::Matrix4cd chi = sr.chi_matrix();
  EXPECT_NEAR(chi(0, 0).real(), std::cos(theta) * std::cos(theta), 1e-12);
  EXPECT_NEAR(chi(3, 3).real(), std::sin(theta) * std::sin(theta), 1e-12);
  // chi_IZ = i sin(theta) cos(theta); Hermiticity fixes chi_ZI = conj(chi_IZ).
  EXPECT_NEAR(chi(0, 3).imag(), std::sin(theta) * std::cos(theta), 1e-12);
  EXPECT_NEAR(std::abs(chi(0, 3) - std::conj(chi(3, 0))), 0.0, 1e-12);
  EXPECT_NEAR(chi(0, 3).real(), 0.0, 1e-12);
}

TEST(Channel, ParameterDomains) {
  EXPECT_THROW(Channel::amplitude_damping(-0.1), std::invalid_argument);
  EXPECT_THROW(Channel::amplitude_damping(1.1), std::invalid_argument);
  EXPECT_THROW(Channel::systematic_rotation(-0.1), std::invalid_argument);
  EXPECT_THROW(Channel::systematic_rotation(kPi), std::invalid_argument);
  EXPECT_THROW(Channel::depolarizing(1.5), std::invalid_argument);
}

TEST(Channel, SuperoperatorIdentity) {
  const Channel id = Channel::identity();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int jp = 0; jp < 2; ++jp)
        for (int ip = 0; ip < 2; ++ip) {
          const double expected = (i == j && jp == ip) ? 1.0 : 0.0;
          EXPECT_NEAR(std::abs(id.superoperator().at({i, j, jp, ip}) - expected), 0.0,
                      1e-14);
        }
}

TEST(Channel, DepolarizingOnZero) {
  const double eps = 0.3;
  const Channel dp = Channel::depolarizing(eps);
  Eigen::Matrix2cd zero = Eigen::Matrix2cd::Zero();
  zero(0, 0) = 1.0;
  const Eigen::Matrix2cd out = superop_apply(dp.superoperator(), zero);
  EXPECT_NEAR(out(0, 0).real(), 1.0 - 2.0 * eps / 3.0, 1e-12);
  EXPECT_NEAR(out(1, 1).real(), 2.0 * eps / 3.0, 1e-12);
  EXPECT_NEAR(std::abs(out(0, 1)), 0.0, 1e-12);
}

TEST(Channel, AmplitudeDampingOnOne) {
  const Channel ad = Channel::amplitude_damping(0.5);
  Eigen::Matrix2cd one = Eigen::Matrix2cd::Zero();
  one(1, 1) = 1.0;
  const Eigen::Matrix2cd out = superop_apply(ad.superoperator(), one);
  EXPECT_NEAR(out(0, 0).real(), 0.5, 1e-12);
  EXPECT_NEAR(out(1, 1).real(), 0.5, 1e-12);
}

TEST(Channel, ChiMatrixExamples) {
  const Eigen::Matrix4cd chi_id = Channel::identity().chi_matrix();
  EXPECT_NEAR(std::abs(chi_id(0, 0) - 1.0), 0.0, 1e-13);
  EXPECT_NEAR(chi_id.cwiseAbs().sum(), 1.0, 1e-12);

  const double eps = 0.2;
  const Eigen::Matrix4cd chi_dp = Channel::depolarizing(eps).chi_matrix();
  EXPECT_NEAR(chi_dp(0, 0).real(), 1.0 - eps, 1e-12);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(chi_dp(k, k).real(), eps / 3.0, 1e-12);

  const Eigen::Matrix4cd chi_ad = Channel::amplitude_damping(0.4).chi_matrix();
  EXPECT_GT(std::abs(chi_ad(0, 3)), 1e-3);
  EXPECT_NEAR(std::abs(chi_ad(0, 3) - std::conj(chi_ad(3, 0))), 0.0, 1e-12);
}

TEST(Channel, ChiRoundTripsWithSuperoperator) {
  // All representations interconvert losslessly.
  for (const Channel& c : {Channel::amplitude_damping(0.37),
                           Channel::systematic_rotation(0.21 * kPi),
                           Channel::depolarizing(0.12)}) {
    const Eigen::Matrix4cd chi = c.chi_matrix();
    // Rebuild the superoperator from chi and compare entrywise.
    Tensor rebuilt({2, 2, 2, 2});
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            for (int jp = 0; jp < 2; ++jp)
              for (int ip = 0; ip < 2; ++ip)
                rebuilt.at({i, j, jp, ip}) +=
                    chi(m, n) * pauli_matrix(m)(i, j) * pauli_matrix(n)(jp, ip);
    double err = 0.0;
    for (std::int64_t k = 0; k < rebuilt.size(); ++k)
      err = std::max(err, std::abs(rebuilt[k] - c.superoperator()[k]));
    EXPECT_LT(err, 1e-12);

    // chi is Hermitian, PSD, unit trace.
    EXPECT_NEAR((chi - chi.adjoint()).norm(), 0.0, 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(chi, Eigen::EigenvaluesOnly);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12);
    EXPECT_NEAR(chi.trace().real(), 1.0, 1e-12);
  }
}

TEST(Channel, ComposeSuperoperators) {
  const Channel a = Channel::amplitude_damping(0.3);
  const Channel b = Channel::systematic_rotation(0.1 * kPi);
  const Tensor comp = compose_superoperators(b.superoperator(), a.superoperator());
  Eigen::Matrix2cd rho;
  rho << 0.6, cplx(0.2, -0.1), cplx(0.2, 0.1), 0.4;
  const Eigen::Matrix2cd via_comp = superop_apply(comp, rho);
  const Eigen::Matrix2cd direct = b.apply(a.apply(rho));
  EXPECT_NEAR((via_comp - direct).norm(), 0.0, 1e-13);
}

TEST(Channel, TwirlExamples) {
  const double eps = 0.17;
  const Channel dp = Channel::depolarizing(eps);
  const Channel dp_twirl = dp.pauli_twirl();
  EXPECT_NEAR((dp_twirl.chi_matrix() - dp.chi_matrix()).norm(), 0.0, 1e-12);

  const double theta = 0.15;
  const Channel sr_twirl = Channel::systematic_rotation(theta).pauli_twirl();
  const auto p = sr_twirl.pauli_probs();
  EXPECT_NEAR(p[0], std::cos(theta) * std::cos(theta), 1e-12);
  EXPECT_NEAR(p[3], std::sin(theta) * std::sin(theta), 1e-12);
  EXPECT_NEAR(p[1] + p[2], 0.0, 1e-12);

  const Channel id_twirl = Channel::identity().pauli_twirl();
  EXPECT_NEAR(std::abs(id_twirl.chi_matrix()(0, 0) - 1.0), 0.0, 1e-12);
}

TEST(Channel, TwirlIsIdempotentAndKeepsDiagonal) {
  for (const Channel& c : {Channel::amplitude_damping(0.45),
                           Channel::systematic_rotation(0.32 * kPi)}) {
    const Channel t1 = c.pauli_twirl();
    const Channel t2 = t1.pauli_twirl();
    EXPECT_NEAR((t1.chi_matrix() - t2.chi_matrix()).norm(), 0.0, 1e-12);
    for (int k = 0; k < 4; ++k)
      EXPECT_NEAR(t1.chi_matrix()(k, k).real(), c.chi_matrix()(k, k).real(), 1e-12);
  }
}

TEST(Channel, HonestApproxFixedPoints) {
  const double eps = 0.21;
  const Channel dp = Channel::depolarizing(eps);
  EXPECT_NEAR((dp.honest_pauli_approx().chi_matrix() - dp.chi_matrix()).norm(), 0.0,
              1e-8);
  const Channel id = Channel::identity();
  EXPECT_NEAR(std::abs(id.honest_pauli_approx().chi_matrix()(0, 0) - 1.0), 0.0, 1e-8);
}

TEST(Channel, HonestApproxOfRotationIsNoisierThanTwirl) {
  for (double theta : {0.01 * kPi, 0.05 * kPi, 0.1 * kPi}) {
    const Channel sr = Channel::systematic_rotation(theta);
    const auto hpa = sr.honest_pauli_approx().pauli_probs();
    const double twirl_pz = std::sin(theta) * std::sin(theta);
    EXPECT_GT(hpa[3], twirl_pz * 1.5);
    // Trace-distance honesty pins the Z-flip weight at sin(theta).
    EXPECT_NEAR(hpa[3], std::sin(theta), 1e-6);
    // Sampled constraints leave a sub-1e-5 residue on the X/Y weights.
    EXPECT_NEAR(hpa[1] + hpa[2], 0.0, 1e-5);
  }
}

TEST(Channel, HonestApproxSatisfiesSampledHonesty) {
  for (const Channel& c : {Channel::amplitude_damping(0.4),
                           Channel::systematic_rotation(0.07 * kPi),
                           Channel::depolarizing(0.15)}) {
    const Channel h = c.honest_pauli_approx();
    EXPECT_TRUE(h.is_pauli(1e-9));
    const auto p = h.pauli_probs();
    double sum = 0.0;
    for (double v : p) {
      EXPECT_GE(v, -1e-10);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    for (const auto& n : hpa_bloch_sample()) {
      const Eigen::Matrix2cd rho = bloch(n);
      const double d_exact = trace_distance(c.apply(rho), rho);
      const double d_approx = trace_distance(h.apply(rho), rho);
      EXPECT_GE(d_approx - d_exact, -1e-10);
    }
  }
}

TEST(Channel, HonestApproxOfAmplitudeDamping) {
  const double gamma = 0.3;
  const auto p = Channel::amplitude_damping(gamma).honest_pauli_approx().pauli_probs();
  // The |1> input forces px + py >= gamma (the twirl only reaches gamma/2).
  EXPECT_GE(p[1] + p[2], gamma - 1e-9);
}

TEST(Channel, ProcessMatrixConvention) {
  const Eigen::Matrix4d c_id = channel_process_matrix(Channel::identity());
  Eigen::Matrix4d expected = Eigen::Matrix4d::Identity();
  expected(2, 2) = -1.0;
  EXPECT_NEAR((c_id - expected).norm(), 0.0, 1e-12);

  // Pauli-X unitary: diag(1, 1, 1, -1) with the Bell-convention Y sign.
  const Channel x = Channel::from_kraus({pauli_matrix(1)}, "x");
  const Eigen::Matrix4d cx = channel_process_matrix(x);
  Eigen::Matrix4d ex = Eigen::Matrix4d::Zero();
  ex.diagonal() << 1, 1, 1, -1;
  EXPECT_NEAR((cx - ex).norm(), 0.0, 1e-12);
}

TEST(Channel, CommutesWithZFlag) {
  EXPECT_TRUE(Channel::systematic_rotation(0.2).commutes_with_z());
  EXPECT_TRUE(Channel::systematic_rotation(0.2).pauli_twirl().commutes_with_z());
  EXPECT_FALSE(Channel::amplitude_damping(0.2).commutes_with_z());
  EXPECT_FALSE(Channel::depolarizing(0.2).commutes_with_z());
  EXPECT_TRUE(Channel::identity().commutes_with_z());
}

TEST(Channel, TracePreservationGuard) {
  std::vector<Eigen::Matrix2cd> bad = {0.5 * Eigen::Matrix2cd::Identity()};
  EXPECT_THROW(Channel::from_kraus(bad, "bad"), std::invalid_argument);
}
