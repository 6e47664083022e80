#include "surfsim/ec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace surfsim {

namespace {

constexpr double kProbTol = 1e-6;

// u = t + sign*v with both values in mantissa/log form.
LogValue log_add(const LogValue& t, const LogValue& v, double sign) {
  if (v.is_zero()) return t;
  if (t.is_zero()) return LogValue{sign * v.mantissa, v.log_scale};
  const double base = std::max(t.log_scale, v.log_scale);
  const cplx m = t.mantissa * std::exp(t.log_scale - base) +
                 sign * v.mantissa * std::exp(v.log_scale - base);
  return LogValue{m, base};
}

const std::array<Eigen::Matrix4cd, 16>& pauli_kron() {
  static const std::array<Eigen::Matrix4cd, 16> k = [] {
    std::array<Eigen::Matrix4cd, 16> out;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        Eigen::Matrix4cd m;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            m.block<2, 2>(2 * i, 2 * j) = pauli_matrix(a)(i, j) * pauli_matrix(b);
        out[static_cast<std::size_t>(4 * a + b)] = m;
      }
    return out;
  }();
  return k;
}

// Trace distance between (E (x) I)(psi psi^dag) and psi psi^dag for the
// channel with Pauli transfer matrix R (first-qubit action).
double displacement(const Eigen::Matrix4d& r_transfer, const Eigen::Vector4cd& psi) {
  const Eigen::Matrix4cd m = psi * psi.adjoint();
  Eigen::Matrix4d coeff;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      coeff(a, b) = (pauli_kron()[static_cast<std::size_t>(4 * a + b)] * m).trace().real();
  const Eigen::Matrix4d delta = (r_transfer - Eigen::Matrix4d::Identity()) * coeff;
  Eigen::Matrix4cd dm = Eigen::Matrix4cd::Zero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      dm += 0.25 * delta(a, b) * pauli_kron()[static_cast<std::size_t>(4 * a + b)];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(dm, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Eigen::Vector4cd state_from_params(const Eigen::Matrix<double, 6, 1>& x) {
  const double c1 = std::cos(x(0)), s1 = std::sin(x(0));
  const double c2 = std::cos(x(1)), s2 = std::sin(x(1));
  const double c3 = std::cos(x(2)), s3 = std::sin(x(2));
  const cplx e1 = std::exp(cplx(0, x(3)));
  const cplx e2 = std::exp(cplx(0, x(4)));
  const cplx e3 = std::exp(cplx(0, x(5)));
  Eigen::Vector4cd psi;
  psi << c1, e1 * s1 * c2, e2 * s1 * s2 * c3, e3 * s1 * s2 * s3;
  return psi;
}

// Nelder-Mead minimization of f over R^6; deterministic for a fixed start.
template <typename F>
double nelder_mead_min(const F& f, Eigen::Matrix<double, 6, 1> x0, double tol,
                       int max_iter) {
  constexpr int n = 6;
  std::vector<Eigen::Matrix<double, 6, 1>> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i + 1)](i) += 0.35;
  for (int i = 0; i <= n; ++i) fs[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);

  for (int it = 0; it < max_iter; ++it) {
    std::vector<int> ord(n + 1);
    for (int i = 0; i <= n; ++i) ord[static_cast<std::size_t>(i)] = i;
    std::sort(ord.begin(), ord.end(),
              [&](int a, int b) { return fs[static_cast<std::size_t>(a)] < fs[static_cast<std::size_t>(b)]; });
    std::vector<Eigen::Matrix<double, 6, 1>> xs2;
    std::vector<double> fs2;
    for (int i = 0; i <= n; ++i) {
      xs2.push_back(xs[static_cast<std::size_t>(ord[static_cast<std::size_t>(i)])]);
      fs2.push_back(fs[static_cast<std::size_t>(ord[static_cast<std::size_t>(i)])]);
    }
    xs = std::move(xs2);
    fs = std::move(fs2);

    if (std::abs(fs[n] - fs[0]) < tol &&
        (xs[n] - xs[0]).cwiseAbs().maxCoeff() < tol)
      break;

    Eigen::Matrix<double, 6, 1> centroid = Eigen::Matrix<double, 6, 1>::Zero();
    for (int i = 0; i < n; ++i) centroid += xs[static_cast<std::size_t>(i)];
    centroid /= n;

    const Eigen::Matrix<double, 6, 1> xr = centroid + (centroid - xs[n]);
    const double fr = f(xr);
    if (fr < fs[0]) {
      const Eigen::Matrix<double, 6, 1> xe = centroid + 2.0 * (centroid - xs[n]);
      const double fe = f(xe);
      if (fe < fr) {
        xs[n] = xe;
        fs[n] = fe;
      } else {
        xs[n] = xr;
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      xs[n] = xr;
      fs[n] = fr;
    } else {
      const Eigen::Matrix<double, 6, 1> xc = centroid + 0.5 * (xs[n] - centroid);
      const double fc = f(xc);
      if (fc < fs[n]) {
        xs[n] = xc;
        fs[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          xs[static_cast<std::size_t>(i)] = xs[0] + 0.5 * (xs[static_cast<std::size_t>(i)] - xs[0]);
          fs[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
        }
      }
    }
  }
  double best = fs[0];
  for (int i = 1; i <= n; ++i) best = std::min(best, fs[static_cast<std::size_t>(i)]);
  return best;
}

Eigen::Matrix4d transfer_from_process(const Eigen::Matrix4d& c) {
  Eigen::Matrix4d r = c;
  r.col(2) *= -1.0;  // Bell-convention sign on the Y column
  return r;
}

// Closed form for Pauli channels; nullopt when the matrix is not Pauli.
std::optional<double> pauli_diamond(const Eigen::Matrix4d& r) {
  constexpr double tol = 1e-11;
  for (int j = 1; j < 4; ++j)
    if (std::abs(r(0, j)) > tol || std::abs(r(j, 0)) > tol) return std::nullopt;
  for (int i = 1; i < 4; ++i)
    for (int j = 1; j < 4; ++j)
      if (i != j && std::abs(r(i, j)) > tol) return std::nullopt;
  const double lx = r(1, 1), ly = r(2, 2), lz = r(3, 3);
  const double qi = (1 + lx + ly + lz) / 4, qx = (1 + lx - ly - lz) / 4;
  const double qy = (1 - lx + ly - lz) / 4, qz = (1 - lx - ly + lz) / 4;
  if (qi < -1e-9 || qx < -1e-9 || qy < -1e-9 || qz < -1e-9) return std::nullopt;
  return std::clamp(1.0 - qi, 0.0, 2.0);
}

}  // namespace

Eigen::Matrix4d identity_process_matrix() {
  Eigen::Matrix4d c = Eigen::Matrix4d::Identity();
  c(2, 2) = -1.0;
  return c;
}

Eigen::Matrix4d compose_with_logical(const Eigen::Matrix4d& c, int correction) {
  Eigen::Matrix4d out = c;
  if (correction != 0) {
    for (int i = 1; i < 4; ++i)
      if (i != correction) out.row(i) *= -1.0;
  }
  return out;
}

double process_2norm_distance(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b) {
  return (a - b).norm();
}

int decode_correction(const Eigen::Matrix4d& c) {
  if (std::abs(c(0, 0)) < 1e-300)
    throw std::invalid_argument("decode_correction: unnormalizable process matrix");
  const Eigen::Matrix4d cn = c / c(0, 0);  // rescaling never changes the argmin
  const Eigen::Matrix4d id = identity_process_matrix();
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int d = 0; d < 4; ++d) {
    const double dist = process_2norm_distance(compose_with_logical(cn, d), id);
    if (dist < best_d - 1e-15) {
      best_d = dist;
      best = d;
    }
  }
  return best;
}

double diamond_from_identity(const Eigen::Matrix4d& c) {
  const Eigen::Matrix4d r = transfer_from_process(c);
  if (auto fast = pauli_diamond(r)) return *fast;

  auto neg = [&](const Eigen::Matrix<double, 6, 1>& x) {
    return -displacement(r, state_from_params(x));
  };

  double best = 0.0;
  RngStream rng(0x51ab5eedULL);
  for (int start = 0; start < 32; ++start) {
    Eigen::Matrix<double, 6, 1> x0;
    if (start == 0) {
      x0 << std::numbers::pi / 4, std::numbers::pi / 2, std::numbers::pi / 2, 0, 0, 0;
    } else if (start == 1) {
      x0 << std::numbers::pi / 4, 0, 0, 0, 0, 0;
    } else {
      for (int k = 0; k < 3; ++k) x0(k) = rng.uniform() * std::numbers::pi;
      for (int k = 3; k < 6; ++k) x0(k) = rng.uniform() * 2.0 * std::numbers::pi;
    }
    best = std::max(best, -nelder_mead_min(neg, x0, 1e-9, 600));
  }
  return best;
}

double diamond_from_identity_grid(const Eigen::Matrix4d& c, int points_per_axis) {
  const Eigen::Matrix4d r = transfer_from_process(c);
  auto neg = [&](const Eigen::Matrix<double, 6, 1>& x) {
    return -displacement(r, state_from_params(x));
  };
  double best = 0.0;
  Eigen::Matrix<double, 6, 1> best_x = Eigen::Matrix<double, 6, 1>::Zero();
  const int na = points_per_axis;
  for (int i1 = 0; i1 < na; ++i1)
    for (int i2 = 0; i2 < na; ++i2)
      for (int i3 = 0; i3 < na; ++i3)
        for (int p1 = 0; p1 < na; ++p1)
          for (int p2 = 0; p2 < na; ++p2)
            for (int p3 = 0; p3 < na; ++p3) {
              Eigen::Matrix<double, 6, 1> x;
              x << (i1 + 0.5) * std::numbers::pi / na, (i2 + 0.5) * std::numbers::pi / na,
                  (i3 + 0.5) * std::numbers::pi / na, p1 * 2.0 * std::numbers::pi / na,
                  p2 * 2.0 * std::numbers::pi / na, p3 * 2.0 * std::numbers::pi / na;
              const double v = displacement(r, state_from_params(x));
              if (v > best) {
                best = v;
                best_x = x;
              }
            }
  return -nelder_mead_min(neg, best_x, 1e-10, 800);
}

namespace {

struct SamplerContext {
  const CodeLayout* layout;
  const ContractionConfig* cfg;
  const std::vector<std::vector<int>>* strip_checks;
  const std::vector<Boundary>* rpool;
  LogValue base_norm;
  bool fast_z;
};

LogValue window_value_impl(const SamplerContext& ctx, const DensityNetwork& net,
                           TracedCache& cache, const Boundary& left, int strip,
                           const Check& ch, const ColumnEngine& engine) {
  // Insert the bare check operator (a Pauli string) on the ket side of the
  // check's qubits; Tr(A rho) then closes against the pristine pool.
  const CodeLayout& layout = *ctx.layout;
  const Eigen::Matrix2cd& op =
      (ch.kind == CheckKind::X) ? pauli_matrix(1) : pauli_matrix(3);
  // The window always spans both strip columns: chains from earlier checks
  // in this strip may already cross the (c, c+1) cut, and the right pool
  // beyond the window is pristine by construction.
  const int last_col = std::min(strip + 1, layout.length() - 1);
  Boundary wb = left;
  for (int c = strip; c <= last_col; ++c) {
    std::vector<KeyedTensor> column = cache.column(c);
    for (int q : ch.qubits) {
      if (layout.col_of(q) != c) continue;
      const int r = layout.row_of(q);
      SiteTensor s = net.site(r, c);
      Tensor m({2, 2});
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m.at({i, j}) = op(i, j);
      s.t = contract(m, s.t, {{1, 0}});
      column[static_cast<std::size_t>(r)] = trace_site(s, false);
    }
    engine.absorb(wb, std::move(column));
    last_col = c;
  }
  return engine.close_scalar(wb, (*ctx.rpool)[static_cast<std::size_t>(last_col) + 1]);
}

struct PassOutput {
  Syndrome syndrome;
  double log_prob = 0.0;
  LogValue norm;
};

PassOutput run_sampling(const SamplerContext& ctx, DensityNetwork& net, RngStream* rng,
                        const Syndrome* forced) {
  const CodeLayout& layout = *ctx.layout;
  const int l = layout.length();
  ColumnEngine engine(net, *ctx.cfg);
  TracedCache cache(net, false);

  PassOutput res;
  res.syndrome.outcomes.assign(layout.checks().size(), 1);
  res.norm = ctx.base_norm;
  Boundary left = engine.edge();

  for (int strip = 0; strip < l; ++strip) {
    for (int k : (*ctx.strip_checks)[static_cast<std::size_t>(strip)]) {
      const Check& ch = layout.checks()[static_cast<std::size_t>(k)];
      if (ctx.fast_z && ch.kind == CheckKind::Z) {
        res.syndrome.outcomes[static_cast<std::size_t>(k)] = 1;
        continue;  // outcome +1 with probability 1; projector acts trivially
      }
      const LogValue v = window_value_impl(ctx, net, cache, left, strip, ch, engine);
      const double ratio = LogValue::real_ratio(v, res.norm);
      const double q = 0.5 * (1.0 + ratio);
      if (q < -kProbTol || q > 1.0 + kProbTol)
        throw std::logic_error("sample_syndrome: conditional probability out of range");
      const double qc = std::clamp(q, 0.0, 1.0);

      int outcome;
      if (forced) {
        outcome = forced->outcomes[static_cast<std::size_t>(k)];
        const double p = outcome > 0 ? qc : 1.0 - qc;
        if (p <= 0.0)
          throw std::logic_error("sample_syndrome: forced outcome has zero probability");
        res.log_prob += std::log(p);
      } else {
        outcome = (rng->uniform() < qc) ? +1 : -1;
        res.log_prob += std::log(outcome > 0 ? qc : 1.0 - qc);
      }
      res.syndrome.outcomes[static_cast<std::size_t>(k)] = outcome;
      net.apply_check_chain(layout, k, outcome);
      res.norm = log_add(res.norm, v, outcome > 0 ? 1.0 : -1.0);
    }
    engine.absorb(left, cache.column(strip));
  }
  return res;
}

std::vector<std::vector<int>> strips_of(const CodeLayout& layout) {
  std::vector<std::vector<int>> strips(static_cast<std::size_t>(layout.length()));
  for (std::size_t k = 0; k < layout.checks().size(); ++k)
    strips[static_cast<std::size_t>(layout.checks()[k].strip)].push_back(
        static_cast<int>(k));
  return strips;
}

std::vector<Boundary> build_rpool(const DensityNetwork& net, const ContractionConfig& cfg) {
  const int l = net.length();
  ColumnEngine engine(net, cfg);
  TracedCache cache(net, false);
  std::vector<Boundary> rpool(static_cast<std::size_t>(l) + 1);
  rpool[static_cast<std::size_t>(l)] = engine.edge();
  for (int c = l - 1; c >= 0; --c) {
    Boundary b = rpool[static_cast<std::size_t>(c) + 1];
    engine.absorb(b, cache.column(c));
    rpool[static_cast<std::size_t>(c)] = std::move(b);
  }
  return rpool;
}

}  // namespace

SampleOutcome sample_syndrome(DensityNetwork& net, const CodeLayout& layout,
                              const ContractionConfig& cfg, RngStream* rng,
                              const Syndrome* forced) {
  const std::vector<std::vector<int>> strips = strips_of(layout);
  const std::vector<Boundary> rpool = build_rpool(net, cfg);
  ColumnEngine engine(net, cfg);
  SamplerContext ctx;
  ctx.layout = &layout;
  ctx.cfg = &cfg;
  ctx.strip_checks = &strips;
  ctx.rpool = &rpool;
  ctx.base_norm = engine.close_scalar(engine.edge(), rpool[0]);
  ctx.fast_z = false;  // callers decide; the standalone path measures everything
  const PassOutput out = run_sampling(ctx, net, rng, forced);
  return SampleOutcome{out.syndrome, out.log_prob, out.norm};
}

EcRunner::EcRunner(const CodeLayout& layout, const Channel& channel, ContractionConfig cfg)
    : layout_(&layout), channel_(channel), cfg_(cfg) {
  fast_z_ = channel.commutes_with_z();
  template_net_ = DensityNetwork::build_bell(layout);
  template_net_.apply_noise(channel);

  strip_checks_ = strips_of(layout);

  // Pristine right environments (ancilla traced), shared by all trials.
  rpool_ = build_rpool(template_net_, cfg_);
  ColumnEngine engine(template_net_, cfg_);
  base_norm_ = engine.close_scalar(engine.edge(), rpool_[0]);
  if (base_norm_.is_zero())
    throw std::logic_error("EcRunner: noisy network has zero trace");
}

EcRunner::PassResult EcRunner::sample_pass(DensityNetwork& net, RngStream* rng,
                                           const Syndrome* forced,
                                           bool /*with_boundaries*/) const {
  SamplerContext ctx;
  ctx.layout = layout_;
  ctx.cfg = &cfg_;
  ctx.strip_checks = &strip_checks_;
  ctx.rpool = &rpool_;
  ctx.base_norm = base_norm_;
  ctx.fast_z = fast_z_;
  const PassOutput out = run_sampling(ctx, net, rng, forced);
  PassResult res;
  res.syndrome = out.syndrome;
  res.log_prob = out.log_prob;
  res.norm = out.norm;
  return res;
}

ProcessMatrix EcRunner::process_matrix(const DensityNetwork& net, const Syndrome& s) const {
  return surfsim::logical_process_matrix(net, *layout_, s, cfg_);
}

ProcessMatrix logical_process_matrix(const DensityNetwork& net, const CodeLayout& layout_ref,
                                     const Syndrome& s, const ContractionConfig& cfg_ref) {
  const int w = layout_ref.width();
  const int l = layout_ref.length();
  const PauliString ts = layout_ref.recovery_pauli(s);

  // Conjugation signs of T_s against the logical representatives.
  auto logical_rep = [&](int i) {
    PauliString p(layout_ref.n_qubits());
    if (i == 1 || i == 2) p.mul(layout_ref.logical_x());
    if (i == 2 || i == 3) p.mul(layout_ref.logical_z());
    return p;
  };
  double sign[4] = {1.0, 1.0, 1.0, 1.0};
  for (int i = 1; i < 4; ++i)
    sign[i] = ts.commutes_with(logical_rep(i)) ? 1.0 : -1.0;

  ColumnEngine engine(net, cfg_ref);

  // Column specs with optional per-site ket insertions.
  TracedCache plain_cache(const_cast<DensityNetwork&>(net), true);
  auto column_with_ops = [&](int c, bool xbar, bool zbar) {
    std::vector<KeyedTensor> col = plain_cache.column(c);
    for (int r = 0; r < w; ++r) {
      Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
      bool touched = false;
      if (zbar && c == 0) {
        m = pauli_matrix(3) * m;
        touched = true;
      }
      if (xbar && r == w - 1) {
        m = pauli_matrix(1) * m;
        touched = true;
      }
      if (!touched) continue;
      SiteTensor sc = net.site(r, c);
      Tensor op({2, 2});
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) op.at({i, j}) = m(i, j);
      sc.t = contract(op, sc.t, {{1, 0}});
      col[static_cast<std::size_t>(r)] = trace_site(sc, true);
    }
    return col;
  };

  struct AncValue {
    Eigen::Matrix2cd m;
    double log = 0.0;
  };
  auto sweep = [&](bool xbar) {
    // Right environments of columns 1..L-1 with the X-bar insertion when
    // requested, then two closes against column-0 variants.
    Boundary rb = engine.edge();
    for (int c = l - 1; c >= 1; --c) engine.absorb(rb, column_with_ops(c, xbar, false));

    std::array<AncValue, 2> out;  // [without Z-bar, with Z-bar]
    for (int zi = 0; zi < 2; ++zi) {
      Boundary lb = engine.edge();
      engine.absorb(lb, column_with_ops(0, xbar, zi == 1));
      auto [t, logs] = engine.close(lb, rb);
      if (t.rank() != 2)
        throw std::logic_error("process_matrix: expected open ancilla pair");
      Eigen::Matrix2cd m;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) m(a, b) = t.at({a, b});
      out[static_cast<std::size_t>(zi)] = {m, logs};
    }
    return out;
  };

  const auto plain = sweep(false);
  const auto flipped = sweep(true);

  // A_i as 2x2 ancilla matrices; A_Y carries the i from Y = i X Z.
  std::array<AncValue, 4> amat = {plain[0], flipped[0], flipped[1], plain[1]};
  amat[2].m *= cplx(0.0, 1.0);
  for (int i = 1; i < 4; ++i) amat[static_cast<std::size_t>(i)].m *= sign[i];

  const double c00 = amat[0].m.trace().real();
  if (std::abs(c00) < 1e-300)
    throw std::logic_error("process_matrix: zero normalization for sampled syndrome");

  ProcessMatrix pm;
  for (int i = 0; i < 4; ++i) {
    const double rel = std::exp(amat[static_cast<std::size_t>(i)].log - amat[0].log);
    for (int j = 0; j < 4; ++j) {
      const cplx tr = (pauli_matrix(j) * amat[static_cast<std::size_t>(i)].m).trace();
      const cplx val = tr * rel / c00;
      if (std::abs(val.imag()) > 1e-7)
        throw std::logic_error("process_matrix: non-real entry");
      pm.c(i, j) = val.real();
    }
  }
  pm.log_norm = amat[0].log + std::log(std::abs(c00));
  return pm;
}

RoundResult EcRunner::run_trial(std::uint64_t trial_seed) const {
  RngStream rng(trial_seed);
  DensityNetwork net = template_net_;
  PassResult pass = sample_pass(net, &rng, nullptr, true);

  RoundResult out;
  out.syndrome = std::move(pass.syndrome);
  out.log_probability = pass.log_prob;
  out.raw = process_matrix(net, out.syndrome);
  out.correction = decode_correction(out.raw.c);
  out.decoded.c = compose_with_logical(out.raw.c, out.correction);
  out.decoded.log_norm = out.raw.log_norm;
  out.error_2norm = process_2norm_distance(out.decoded.c, identity_process_matrix());
  out.error_diamond = diamond_from_identity(out.decoded.c);
  return out;
}

RoundResult EcRunner::run_forced(const Syndrome& s) const {
  DensityNetwork net = template_net_;
  PassResult pass = sample_pass(net, nullptr, &s, true);

  RoundResult out;
  out.syndrome = pass.syndrome;
  out.log_probability = pass.log_prob;
  out.raw = process_matrix(net, out.syndrome);
  out.correction = decode_correction(out.raw.c);
  out.decoded.c = compose_with_logical(out.raw.c, out.correction);
  out.decoded.log_norm = out.raw.log_norm;
  out.error_2norm = process_2norm_distance(out.decoded.c, identity_process_matrix());
  out.error_diamond = diamond_from_identity(out.decoded.c);
  return out;
}

Syndrome EcRunner::sample_only(std::uint64_t trial_seed, double* log_probability) const {
  RngStream rng(trial_seed);
  DensityNetwork net = template_net_;
  PassResult pass = sample_pass(net, &rng, nullptr, false);
  if (log_probability) *log_probability = pass.log_prob;
  return pass.syndrome;
}

double EcRunner::forced_syndrome_log_probability(const Syndrome& s) const {
  DensityNetwork net = template_net_;
  for (std::size_t k = 0; k < layout_->checks().size(); ++k)
    net.apply_check_chain(*layout_, static_cast<int>(k),
                          s.outcomes[static_cast<std::size_t>(k)]);
  ColumnEngine engine(net, cfg_);
  TracedCache cache(net, false);
  Boundary b = engine.edge();
  for (int c = 0; c < layout_->length(); ++c) engine.absorb(b, cache.column(c));
  const LogValue t = engine.close_scalar(b, engine.edge());
  // Applied chains are I +- A = 2 P, so divide by 2^{#checks}.
  return t.log_abs() - base_norm_.log_abs() -
         static_cast<double>(layout_->checks().size()) * std::log(2.0);
}

}  // namespace surfsim
