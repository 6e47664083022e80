#include "surfsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace surfsim {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Run fn(trial) for trial in [0, n) over a worker pool.
template <typename Fn>
void parallel_for_trials(int n, int threads, const Fn& fn) {
  const int nt = std::min(resolve_threads(threads), std::max(1, n));
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          next.store(n);
          break;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::string engine_name(Engine e) {
  return e == Engine::Exact ? "exact" : "boundary_mps";
}

Engine engine_from_name(const std::string& s) {
  if (s == "exact") return Engine::Exact;
  if (s == "boundary_mps") return Engine::BoundaryMps;
  throw std::invalid_argument("unknown engine: " + s);
}

}  // namespace

Channel make_channel(const ChannelSpec& spec) {
  Channel base = [&] {
    if (spec.kind == "amplitude_damping") return Channel::amplitude_damping(spec.param);
    if (spec.kind == "systematic_rotation") return Channel::systematic_rotation(spec.param);
    if (spec.kind == "depolarizing") return Channel::depolarizing(spec.param);
    throw std::invalid_argument("unknown channel kind: " + spec.kind);
  }();
  if (spec.approx == "exact") return base;
  if (spec.approx == "pta") return base.pauli_twirl();
  if (spec.approx == "hpa") return base.honest_pauli_approx();
  throw std::invalid_argument("unknown approximation tag: " + spec.approx);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig cfg;
  cfg.w = j.at("W").get<int>();
  cfg.l = j.at("L").get<int>();
  const auto& ch = j.at("channel");
  cfg.channel_kind = ch.at("kind").get<std::string>();
  if (ch.contains("params"))
    cfg.params = ch.at("params").get<std::vector<double>>();
  else
    cfg.params = {ch.at("param").get<double>()};
  cfg.approx = ch.value("approx", std::string("exact"));
  cfg.engine = engine_from_name(j.value("engine", std::string("exact")));
  cfg.chi = j.value("chi", 8);
  cfg.svd_floor = j.value("svd_floor", 1e-14);
  cfg.samples = j.at("samples").get<int>();
  cfg.seed = j.value("seed", std::uint64_t{1});
  cfg.threads = j.value("threads", 0);
  cfg.out_path = j.value("out", std::string());
  cfg.run_id = j.value("run_id", std::string());
  if (cfg.samples < 1) throw std::invalid_argument("config: samples must be >= 1");
  for (double p : cfg.params) {
    ChannelSpec probe{cfg.channel_kind, p, "exact"};
    (void)make_channel(probe);  // validates the parameter domain
  }
  return cfg;
}

std::string ExperimentConfig::to_json_text() const {
  nlohmann::json j;
  j["W"] = w;
  j["L"] = l;
  j["channel"] = {{"kind", channel_kind}, {"params", params}, {"approx", approx}};
  j["engine"] = engine_name(engine);
  j["chi"] = chi;
  j["svd_floor"] = svd_floor;
  j["samples"] = samples;
  j["seed"] = seed;
  j["threads"] = threads;
  j["out"] = out_path;
  j["run_id"] = run_id.empty() ? derived_run_id() : run_id;
  return j.dump(2);
}

std::string ExperimentConfig::derived_run_id() const {
  std::uint64_t h = seed;
  std::ostringstream key;
  key << w << 'x' << l << ':' << channel_kind << ':' << approx << ':'
      << engine_name(engine) << ':' << chi << ':' << samples;
  for (double p : params) key << ':' << p;
  for (char c : key.str()) h = splitmix(h ^ static_cast<std::uint64_t>(c));
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::uint64_t derive_trial_seed(std::uint64_t master, int point_index, int trial) {
  std::uint64_t h = splitmix(master ^ (0x100000001b3ULL * (static_cast<std::uint64_t>(point_index) + 1)));
  h = splitmix(h ^ (0xd6e8feb86659fd93ULL + static_cast<std::uint64_t>(trial)));
  return h;
}

PointSummary run_point(const CodeLayout& layout, const Channel& channel,
                       const ContractionConfig& cfg, int samples,
                       std::uint64_t master_seed, int point_index, int threads,
                       std::vector<TrialRecord>* records) {
  const EcRunner runner(layout, channel, cfg);
  std::vector<double> diamonds(static_cast<std::size_t>(samples));
  std::vector<double> err2s(static_cast<std::size_t>(samples));
  if (records) records->resize(static_cast<std::size_t>(samples));

  parallel_for_trials(samples, threads, [&](int i) {
    const auto t0 = std::chrono::steady_clock::now();
    const RoundResult r = runner.run_trial(derive_trial_seed(master_seed, point_index, i));
    const auto t1 = std::chrono::steady_clock::now();
    diamonds[static_cast<std::size_t>(i)] = r.error_diamond;
    err2s[static_cast<std::size_t>(i)] = r.error_2norm;
    if (records) {
      TrialRecord& rec = (*records)[static_cast<std::size_t>(i)];
      rec.trial = i;
      rec.syndrome_hex = r.syndrome.to_hex();
      rec.correction = r.correction;
      rec.err2 = r.error_2norm;
      rec.errdiamond = r.error_diamond;
      rec.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
  });

  PointSummary s;
  s.samples = samples;
  double sum = 0.0, sum2 = 0.0, sume = 0.0;
  for (int i = 0; i < samples; ++i) {
    sum += diamonds[static_cast<std::size_t>(i)];
    sum2 += diamonds[static_cast<std::size_t>(i)] * diamonds[static_cast<std::size_t>(i)];
    sume += err2s[static_cast<std::size_t>(i)];
  }
  s.mean_diamond = sum / samples;
  s.mean_err2 = sume / samples;
  const double var = std::max(0.0, sum2 / samples - s.mean_diamond * s.mean_diamond);
  s.stderr_diamond = std::sqrt(var / std::max(1, samples - 1));
  return s;
}

std::vector<Syndrome> sample_point_syndromes(const CodeLayout& layout,
                                             const Channel& channel,
                                             const ContractionConfig& cfg, int samples,
                                             std::uint64_t master_seed, int point_index,
                                             int threads) {
  const EcRunner runner(layout, channel, cfg);
  std::vector<Syndrome> out(static_cast<std::size_t>(samples));
  parallel_for_trials(samples, threads, [&](int i) {
    out[static_cast<std::size_t>(i)] =
        runner.sample_only(derive_trial_seed(master_seed, point_index, i));
  });
  return out;
}

void write_csv_header(std::ostream& os) {
  os << "run_id,W,L,channel,param,approx,engine,chi,trial,syndrome_hex,correction,"
        "err2,errdiamond,ms\n";
}

void write_csv_record(std::ostream& os, const ExperimentConfig& cfg,
                      const TrialRecord& rec) {
  static const char* corr[4] = {"I", "X", "Y", "Z"};
  os << (cfg.run_id.empty() ? cfg.derived_run_id() : cfg.run_id) << ',' << cfg.w << ','
     << cfg.l << ',' << cfg.channel_kind << ',' << std::setprecision(12) << rec.param
     << ',' << cfg.approx << ',' << engine_name(cfg.engine) << ','
     << (cfg.engine == Engine::BoundaryMps ? cfg.chi : 0) << ',' << rec.trial << ','
     << rec.syndrome_hex << ',' << corr[rec.correction] << ',' << std::setprecision(12)
     << rec.err2 << ',' << rec.errdiamond << ',' << std::fixed << std::setprecision(3)
     << rec.ms << '\n';
  os.unsetf(std::ios::fixed);
}

std::vector<PointSummary> run_experiment(const ExperimentConfig& cfg) {
  const CodeLayout layout = CodeLayout::build(cfg.w, cfg.l);
  ContractionConfig ccfg;
  ccfg.engine = cfg.engine;
  ccfg.chi = cfg.chi;
  ccfg.svd_floor = cfg.svd_floor;

  std::ofstream csv;
  if (!cfg.out_path.empty()) {
    csv.open(cfg.out_path);
    if (!csv) throw std::runtime_error("cannot open output file: " + cfg.out_path);
    write_csv_header(csv);
  }

  std::vector<PointSummary> summaries;
  for (std::size_t p = 0; p < cfg.params.size(); ++p) {
    const Channel channel =
        make_channel(ChannelSpec{cfg.channel_kind, cfg.params[p], cfg.approx});
    std::vector<TrialRecord> records;
    PointSummary s = run_point(layout, channel, ccfg, cfg.samples, cfg.seed,
                               static_cast<int>(p), cfg.threads,
                               csv.is_open() ? &records : nullptr);
    s.param = cfg.params[p];
    if (csv.is_open()) {
      for (auto& rec : records) {
        rec.param = cfg.params[p];
        write_csv_record(csv, cfg, rec);
      }
      csv.flush();
    }
    summaries.push_back(s);
  }

  if (!cfg.out_path.empty()) {
    nlohmann::json manifest;
    manifest["config"] = nlohmann::json::parse(cfg.to_json_text());
    manifest["version"] = kVersion;
    auto pts = nlohmann::json::array();
    for (const auto& s : summaries)
      pts.push_back({{"param", s.param},
                     {"samples", s.samples},
                     {"mean_errdiamond", s.mean_diamond},
                     {"stderr_errdiamond", s.stderr_diamond},
                     {"mean_err2", s.mean_err2}});
    manifest["points"] = std::move(pts);
    std::ofstream mf(cfg.out_path + ".manifest.json");
    mf << manifest.dump(2) << '\n';
  }
  return summaries;
}

ThresholdEstimate estimate_threshold(const std::vector<SizeCurve>& curves) {
  if (curves.size() < 2)
    throw std::invalid_argument("estimate_threshold: need at least two lattice sizes");
  for (const auto& c : curves)
    if (c.points.size() < 3)
      throw std::invalid_argument("estimate_threshold: need at least three sweep points");

  std::vector<SizeCurve> sorted = curves;
  std::sort(sorted.begin(), sorted.end(),
            [](const SizeCurve& a, const SizeCurve& b) { return a.distance() < b.distance(); });

  double min_param = sorted[0].points.front().param;
  double max_param = sorted[0].points.back().param;
  double spacing = 0.0;
  for (std::size_t k = 1; k < sorted[0].points.size(); ++k)
    spacing = std::max(spacing,
                       sorted[0].points[k].param - sorted[0].points[k - 1].param);

  struct Crossing {
    double x;
    double sigma;
  };
  std::vector<Crossing> crossings;
  bool any_above = false, any_below = false, inconsistent = false;

  for (std::size_t a = 0; a < sorted.size(); ++a) {
    for (std::size_t b = a + 1; b < sorted.size(); ++b) {
      const auto& small = sorted[a];
      const auto& large = sorted[b];
      if (small.points.size() != large.points.size())
        throw std::invalid_argument("estimate_threshold: mismatched sweeps");
      std::vector<Crossing> pair_cross;
      for (std::size_t k = 0; k + 1 < small.points.size(); ++k) {
        if (std::abs(small.points[k].param - large.points[k].param) > 1e-12)
          throw std::invalid_argument("estimate_threshold: mismatched sweep values");
        const double d0 = small.points[k].mean - large.points[k].mean;
        const double d1 = small.points[k + 1].mean - large.points[k + 1].mean;
        if (d0 > 0.0 && d1 <= 0.0) {  // below-threshold ordering flips here
          const double x0 = small.points[k].param, x1 = small.points[k + 1].param;
          const double t = d0 / (d0 - d1);
          const double x = x0 + t * (x1 - x0);
          const double slope = (d1 - d0) / (x1 - x0);
          const double se = std::sqrt(
              small.points[k].stderr_ * small.points[k].stderr_ +
              large.points[k].stderr_ * large.points[k].stderr_ +
              small.points[k + 1].stderr_ * small.points[k + 1].stderr_ +
              large.points[k + 1].stderr_ * large.points[k + 1].stderr_) /
              2.0;
          pair_cross.push_back({x, std::abs(slope) > 1e-300 ? se / std::abs(slope)
                                                            : spacing});
        }
      }
      const double dfirst = small.points.front().mean - large.points.front().mean;
      const double dlast = small.points.back().mean - large.points.back().mean;
      if (pair_cross.empty()) {
        if (dfirst > 0.0 && dlast > 0.0)
          any_above = true;  // ordered as below threshold across the sweep
        else if (dfirst <= 0.0 && dlast <= 0.0)
          any_below = true;
        else
          inconsistent = true;
      } else if (pair_cross.size() > 1) {
        inconsistent = true;
      } else {
        crossings.push_back(pair_cross.front());
      }
    }
  }

  ThresholdEstimate est;
  const std::size_t npairs = sorted.size() * (sorted.size() - 1) / 2;
  if (inconsistent || (crossings.size() != npairs && !crossings.empty())) {
    est.message = "no clear transition";
    return est;
  }
  if (crossings.empty()) {
    if (any_above && !any_below) {
      est.message = "crossing above swept range";
      est.value = max_param;
    } else if (any_below && !any_above) {
      est.message = "crossing below swept range";
      est.value = min_param;
    } else {
      est.message = "no clear transition";
    }
    return est;
  }

  double lo = crossings[0].x, hi = crossings[0].x, sum = 0.0, sig = 0.0;
  for (const auto& cr : crossings) {
    lo = std::min(lo, cr.x);
    hi = std::max(hi, cr.x);
    sum += cr.x;
    sig = std::max(sig, cr.sigma);
  }
  const double spread = hi - lo;
  if (spread > spacing + 3.0 * sig) {
    est.message = "no clear transition";
    return est;
  }
  est.found = true;
  est.value = sum / static_cast<double>(crossings.size());
  est.uncertainty = 0.5 * spacing + sig + 0.5 * spread;
  for (const auto& cr : crossings) est.pair_crossings.push_back(cr.x);
  return est;
}

std::vector<SizeCurve> curves_from_csv_files(const std::vector<std::string>& paths) {
  struct Acc {
    double sum = 0.0, sum2 = 0.0;
    std::int64_t n = 0;
  };
  std::map<std::pair<int, int>, std::map<double, Acc>> grouped;

  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) continue;  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() < 14) continue;
      const int w = std::stoi(cells[1]);
      const int l = std::stoi(cells[2]);
      const double param = std::stod(cells[4]);
      const double errd = std::stod(cells[12]);
      Acc& a = grouped[{w, l}][param];
      a.sum += errd;
      a.sum2 += errd * errd;
      ++a.n;
    }
  }

  std::vector<SizeCurve> curves;
  for (const auto& [size, by_param] : grouped) {
    SizeCurve c;
    c.w = size.first;
    c.l = size.second;
    for (const auto& [param, acc] : by_param) {
      CurvePoint p;
      p.param = param;
      p.mean = acc.sum / static_cast<double>(acc.n);
      const double var =
          std::max(0.0, acc.sum2 / static_cast<double>(acc.n) - p.mean * p.mean);
      p.stderr_ = std::sqrt(var / std::max<std::int64_t>(1, acc.n - 1));
      c.points.push_back(p);
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

}  // namespace surfsim
