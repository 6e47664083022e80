#include "surfsim/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace surfsim {

namespace {

constexpr double kFeasTol = 1e-12;

Eigen::Matrix2cd make_pauli(int i) {
  const cplx I(0.0, 1.0);
  Eigen::Matrix2cd m;
  switch (i) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -I, I, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli_matrix: index must be 0..3");
  }
  return m;
}

double trace_norm_2x2(const Eigen::Matrix2cd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h, Eigen::EigenvaluesOnly);
  return std::abs(es.eigenvalues()(0)) + std::abs(es.eigenvalues()(1));
}

Eigen::Matrix2cd bloch_state(const Eigen::Vector3d& n) {
  Eigen::Matrix2cd rho = 0.5 * Eigen::Matrix2cd::Identity();
  for (int k = 0; k < 3; ++k) rho += 0.5 * n(k) * pauli_matrix(k + 1);
  return rho;
}

// Trace distance moved by a Pauli channel with flip probabilities
// (px, py, pz) on the pure input with Bloch vector n.
double pauli_moved_distance(double px, double py, double pz, const Eigen::Vector3d& n) {
  const double u = py + pz, v = px + pz, w = px + py;
  return std::sqrt(u * u * n(0) * n(0) + v * v * n(1) * n(1) + w * w * n(2) * n(2));
}

// Primal active-set solver for  min 1/2 x'Gx + b'x  s.t.  A x >= c,
// G positive definite, dimension 3, started from a feasible point.
Eigen::Vector3d solve_qp3(const Eigen::Matrix3d& G, const Eigen::Vector3d& b,
                          const Eigen::MatrixXd& A, const Eigen::VectorXd& c,
                          Eigen::Vector3d x) {
  const int m = static_cast<int>(A.rows());
  std::vector<int> active;
  for (int i = 0; i < m; ++i)
    if (A.row(i) * x - c(i) < kFeasTol) active.push_back(i);
  if (active.size() > 3) active.resize(3);

  for (int iter = 0; iter < 200; ++iter) {
    const int na = static_cast<int>(active.size());
    Eigen::MatrixXd kkt(3 + na, 3 + na);
    kkt.setZero();
    kkt.topLeftCorner(3, 3) = G;
    Eigen::VectorXd rhs(3 + na);
    rhs.head(3) = -b;
    for (int j = 0; j < na; ++j) {
      kkt.block(0, 3 + j, 3, 1) = -A.row(active[static_cast<std::size_t>(j)]).transpose();
      kkt.block(3 + j, 0, 1, 3) = A.row(active[static_cast<std::size_t>(j)]);
      rhs(3 + j) = c(active[static_cast<std::size_t>(j)]);
    }
    Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    Eigen::Vector3d xs = sol.head(3);
    Eigen::VectorXd lambda = sol.tail(na);

    if ((xs - x).norm() < 1e-13) {
      int drop = -1;
      double lmin = -1e-11;
      for (int j = 0; j < na; ++j) {
        if (lambda(j) < lmin) {
          lmin = lambda(j);
          drop = j;
        }
      }
      if (drop < 0) return xs;
      active.erase(active.begin() + drop);
      continue;
    }

    // Longest step toward xs that keeps inactive constraints satisfied.
    double alpha = 1.0;
    int blocking = -1;
    const Eigen::Vector3d d = xs - x;
    for (int i = 0; i < m; ++i) {
      bool is_active = false;
      for (int j : active)
        if (j == i) is_active = true;
      if (is_active) continue;
      const double ad = A.row(i) * d;
      if (ad < -1e-15) {
        const double slack = A.row(i) * x - c(i);
        const double a = slack / (-ad);
        if (a < alpha) {
          alpha = a;
          blocking = i;
        }
      }
    }
    x += std::max(0.0, alpha) * d;
    if (blocking >= 0 && static_cast<int>(active.size()) < 3)
      active.push_back(blocking);
    else if (blocking < 0 && alpha >= 1.0)
      continue;  // full step; multipliers examined next round
  }
  return x;
}

}  // namespace

const Eigen::Matrix2cd& pauli_matrix(int i) {
  static const Eigen::Matrix2cd mats[4] = {make_pauli(0), make_pauli(1), make_pauli(2),
                                           make_pauli(3)};
  if (i < 0 || i > 3) throw std::invalid_argument("pauli_matrix: index must be 0..3");
  return mats[static_cast<std::size_t>(i)];
}

void Channel::finalize() {
  // Trace preservation: sum K^dag K = I.
  Eigen::Matrix2cd tp = Eigen::Matrix2cd::Zero();
  for (const auto& k : kraus_) tp += k.adjoint() * k;
  if ((tp - Eigen::Matrix2cd::Identity()).norm() > 1e-10)
    throw std::invalid_argument("Channel: Kraus operators are not trace preserving");

  superop_ = Tensor({2, 2, 2, 2});
  for (const auto& k : kraus_) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int jp = 0; jp < 2; ++jp)
          for (int ip = 0; ip < 2; ++ip)
            superop_.at({i, j, jp, ip}) += k(i, j) * std::conj(k(ip, jp));
  }

  // chi_ab = 1/4 sum conj(P_a)_{ij} conj(P_b)_{j'i'} E_{i j j' i'}.
  chi_.setZero();
  for (int a = 0; a < 4; ++a) {
    for (int bI = 0; bI < 4; ++bI) {
      cplx acc = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int jp = 0; jp < 2; ++jp)
            for (int ip = 0; ip < 2; ++ip)
              acc += std::conj(pauli_matrix(a)(i, j)) * std::conj(pauli_matrix(bI)(jp, ip)) *
                     superop_.at({i, j, jp, ip});
      chi_(a, bI) = 0.25 * acc;
    }
  }
}

Channel Channel::from_kraus(std::vector<Eigen::Matrix2cd> kraus, std::string name) {
  Channel c;
  c.kraus_ = std::move(kraus);
  c.name_ = std::move(name);
  c.finalize();
  return c;
}

Channel Channel::identity() {
  return from_kraus({Eigen::Matrix2cd::Identity()}, "identity");
}

Channel Channel::amplitude_damping(double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("amplitude_damping: gamma must lie in [0, 1]");
  Eigen::Matrix2cd k0, k1;
  k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
  k1 << 0, std::sqrt(gamma), 0, 0;
  return from_kraus({k0, k1}, "amplitude_damping");
}

Channel Channel::systematic_rotation(double theta) {
  if (theta < 0.0 || theta >= std::numbers::pi)
    throw std::invalid_argument("systematic_rotation: theta must lie in [0, pi)");
  const cplx I(0.0, 1.0);
  Eigen::Matrix2cd k;
  k << std::exp(-I * theta), 0, 0, std::exp(I * theta);
  return from_kraus({k}, "systematic_rotation");
}

Channel Channel::depolarizing(double epsilon) {
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::invalid_argument("depolarizing: epsilon must lie in [0, 1]");
  return from_pauli_probs({1.0 - epsilon, epsilon / 3.0, epsilon / 3.0, epsilon / 3.0},
                          "depolarizing");
}

Channel Channel::from_pauli_probs(const std::array<double, 4>& p, std::string name) {
  double sum = 0.0;
  for (double v : p) {
    if (v < -1e-12) throw std::invalid_argument("from_pauli_probs: negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("from_pauli_probs: probabilities must sum to 1");
  std::vector<Eigen::Matrix2cd> kraus;
  for (int i = 0; i < 4; ++i) {
    const double v = std::max(0.0, p[static_cast<std::size_t>(i)]) / sum;
    if (v > 0.0) kraus.push_back(std::sqrt(v) * pauli_matrix(i));
  }
  return from_kraus(std::move(kraus), std::move(name));
}

Eigen::Matrix2cd Channel::apply(const Eigen::Matrix2cd& rho) const {
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (const auto& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

bool Channel::commutes_with_z() const {
  for (const auto& k : kraus_)
    if (std::abs(k(0, 1)) > 1e-12 || std::abs(k(1, 0)) > 1e-12) return false;
  return true;
}

bool Channel::is_pauli(double tol) const {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j && std::abs(chi_(i, j)) > tol) return false;
  return true;
}

std::array<double, 4> Channel::pauli_probs() const {
  std::array<double, 4> p{};
  for (int i = 0; i < 4; ++i) p[static_cast<std::size_t>(i)] = chi_(i, i).real();
  return p;
}

Channel Channel::pauli_twirl() const {
  std::array<double, 4> p = pauli_probs();
  double sum = 0.0;
  for (double& v : p) {
    v = std::max(0.0, v);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return from_pauli_probs(p, name_ + "+pta");
}

const std::vector<Eigen::Vector3d>& hpa_bloch_sample() {
  static const std::vector<Eigen::Vector3d> sample = [] {
    std::vector<Eigen::Vector3d> pts;
    constexpr int kSpiral = 200;
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < kSpiral; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / kSpiral;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden_angle * k;
      pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    }
    for (int axis = 0; axis < 3; ++axis)
      for (int sgn : {+1, -1}) {
        Eigen::Vector3d v = Eigen::Vector3d::Zero();
        v(axis) = sgn;
        pts.push_back(v);
      }
    return pts;
  }();
  return sample;
}

Channel Channel::honest_pauli_approx() const {
  const auto& sample = hpa_bloch_sample();
  const int m = static_cast<int>(sample.size());

  // Per-input trace distances of the exact channel.
  Eigen::VectorXd d(m);
  for (int i = 0; i < m; ++i) {
    const Eigen::Matrix2cd rho = bloch_state(sample[static_cast<std::size_t>(i)]);
    d(i) = 0.5 * trace_norm_2x2(apply(rho) - rho);
  }

  // Quadratic objective ||C(p) - C_exact||_F^2 with C(p) affine in p.
  const Eigen::Matrix4d ce = channel_process_matrix(*this);
  const Eigen::Matrix4d c_id = channel_process_matrix(Channel::identity());
  Eigen::Matrix<double, 16, 3> M;
  for (int k = 0; k < 3; ++k) {
    const Eigen::Matrix4d ck =
        channel_process_matrix(Channel::from_kraus({pauli_matrix(k + 1)}, "p"));
    const Eigen::Matrix4d diff = ck - c_id;
    M.col(k) = Eigen::Map<const Eigen::VectorXd>(diff.data(), 16);
  }
  const Eigen::VectorXd c0 = Eigen::Map<const Eigen::VectorXd>(c_id.data(), 16);
  const Eigen::VectorXd cev = Eigen::Map<const Eigen::VectorXd>(ce.data(), 16);
  const Eigen::Matrix3d G = 2.0 * (M.transpose() * M);
  const Eigen::Vector3d b = 2.0 * M.transpose() * (c0 - cev);

  auto feasible = [&](const Eigen::Vector3d& p) {
    if (p.minCoeff() < -kFeasTol || p.sum() > 1.0 + kFeasTol) return false;
    for (int i = 0; i < m; ++i) {
      if (pauli_moved_distance(p(0), p(1), p(2), sample[static_cast<std::size_t>(i)]) <
          d(i) - 1e-11)
        return false;
    }
    return true;
  };

  const double dm = d.maxCoeff();
  const std::array<double, 4> tw = pauli_twirl().pauli_probs();
  std::vector<Eigen::Vector3d> starts = {
      {tw[1], tw[2], tw[3]},
      {dm / 2, dm / 2, dm / 2},
      {0, 0, dm},
      {dm, 0, 0},
      {0, dm, 0},
      {dm, dm, dm},
      {dm / 2, dm / 2, std::min(1.0 - dm, dm)},
  };
  Eigen::Vector3d p;
  bool found = false;
  for (const auto& s : starts) {
    if (s.minCoeff() >= 0 && s.sum() <= 1.0 && feasible(s)) {
      p = s;
      found = true;
      break;
    }
  }
  if (!found)
    throw std::runtime_error("honest_pauli_approx: no feasible Pauli channel found");

  // Convex-concave iteration: the honesty constraints f_n(p) >= d_n^2 have
  // convex f_n, so linearizing at a feasible point gives a conservative QP
  // whose solution stays feasible; repeat to convergence.
  for (int ccp = 0; ccp < 60; ++ccp) {
    std::vector<Eigen::RowVector3d> arows;
    std::vector<double> crows;
    for (int i = 0; i < m; ++i) {
      const auto& n = sample[static_cast<std::size_t>(i)];
      const double u = p(1) + p(2), v = p(0) + p(2), w = p(0) + p(1);
      const double nx2 = n(0) * n(0), ny2 = n(1) * n(1), nz2 = n(2) * n(2);
      const double f = u * u * nx2 + v * v * ny2 + w * w * nz2;
      // grad wrt (px, py, pz)
      Eigen::Vector3d g;
      g(0) = 2.0 * (v * ny2 + w * nz2);
      g(1) = 2.0 * (u * nx2 + w * nz2);
      g(2) = 2.0 * (u * nx2 + v * ny2);
      if (g.norm() < 1e-14) continue;  // vacuous at d = 0
      const double rhs = d(i) * d(i) - f + g.dot(p);
      const double scale = g.norm();
      arows.emplace_back(g.transpose() / scale);
      crows.push_back(rhs / scale);
    }
    arows.emplace_back(1, 0, 0);
    crows.push_back(0);
    arows.emplace_back(0, 1, 0);
    crows.push_back(0);
    arows.emplace_back(0, 0, 1);
    crows.push_back(0);
    arows.push_back(Eigen::RowVector3d(-1, -1, -1).normalized());
    crows.push_back(-1.0 / std::sqrt(3.0));

    const int rows = static_cast<int>(arows.size());
    Eigen::MatrixXd A(rows, 3);
    Eigen::VectorXd c(rows);
    for (int i = 0; i < rows; ++i) {
      A.row(i) = arows[static_cast<std::size_t>(i)];
      c(i) = crows[static_cast<std::size_t>(i)];
    }

    const Eigen::Vector3d next = solve_qp3(G, b, A, c, p);
    const double step = (next - p).norm();
    p = next;
    if (step < 1e-13) break;
  }

  std::array<double, 4> probs{};
  for (int k = 0; k < 3; ++k) probs[static_cast<std::size_t>(k + 1)] = std::max(0.0, p(k));
  probs[0] = 1.0 - probs[1] - probs[2] - probs[3];
  if (probs[0] < -1e-9)
    throw std::runtime_error("honest_pauli_approx: infeasible probability vector");
  probs[0] = std::max(0.0, probs[0]);
  return from_pauli_probs(probs, name_ + "+hpa");
}

Eigen::Matrix4d channel_process_matrix(const Channel& c) {
  const Tensor& e = c.superoperator();
  Eigen::Matrix4d out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      // C_ij = 1/2 sum_{a b b' a'} E_{a b b' a'} (P_i)_{a' a} (P_j)_{b' b}
      cplx acc = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int bq = 0; bq < 2; ++bq)
          for (int bp = 0; bp < 2; ++bp)
            for (int ap = 0; ap < 2; ++ap)
              acc += e.at({a, bq, bp, ap}) * pauli_matrix(i)(ap, a) * pauli_matrix(j)(bp, bq);
      out(i, j) = 0.5 * acc.real();
    }
  }
  return out;
}

Tensor compose_superoperators(const Tensor& b_after, const Tensor& a_first) {
  // (B o A)_{i j j' i'} = sum_{k k'} B_{i k k' i'} A_{k j j' k'}
  Tensor t = contract(b_after, a_first, {{1, 0}, {2, 3}});
  // result indices: (i, i', j, j') -> (i, j, j', i')
  return permute(t, {0, 2, 3, 1});
}

}  // namespace surfsim
