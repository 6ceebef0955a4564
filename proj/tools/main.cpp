#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "l2track/ams_sketch.hpp"
#include "l2track/bench.hpp"
#include "l2track/count_sketch.hpp"
#include "l2track/epsnet.hpp"
#include "l2track/frequency_oracle.hpp"
#include "l2track/frobenius.hpp"
#include "l2track/median_tracker.hpp"
#include "l2track/report_io.hpp"
#include "l2track/stream.hpp"
#include "l2track/tracking.hpp"

namespace {

using namespace l2track;

// Exit codes: 0 ok, 2 invalid flags, 3 runtime failure.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
    }
  }

  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// ---------------------------------------------------------------------------
// Shared flag bundles

struct StreamFlags {
  std::string family;
  u64 m = 0;
  u64 n = 0;
  double alpha = 0.0;
  u64 ell = 0;
  std::string path;
  CLI::Option* m_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* ell_opt = nullptr;
  CLI::Option* path_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--family", family,
                    "stream family: distinct|uniform|zipf|ams_hard|cs_hard|file")
        ->required();
    m_opt = cmd->add_option("--m", m, "stream length");
    n_opt = cmd->add_option("--n", n, "universe size");
    alpha_opt = cmd->add_option("--alpha", alpha, "zipf exponent");
    ell_opt = cmd->add_option("--ell", ell, "hard-instance blocks/checkpoints");
    path_opt = cmd->add_option("--path", path, "stream file path");
  }

  bool is_random() const { return family == "uniform" || family == "zipf"; }
  bool is_hard() const { return family == "ams_hard" || family == "cs_hard"; }

  StreamSpec spec(double eps, bool eps_given, u64 seed) const {
    StreamSpec s;
    s.seed = seed;
    auto need = [&](const CLI::Option* opt, const char* flag) {
      if (!opt || opt->count() == 0)
        throw UsageError(std::string("--family ") + family + " requires " + flag);
    };
    if (family == "distinct") {
      s.family = StreamSpec::Family::kDistinct;
      need(m_opt, "--m");
      s.m = m;
    } else if (family == "uniform") {
      s.family = StreamSpec::Family::kUniform;
      need(m_opt, "--m");
      need(n_opt, "--n");
      s.m = m;
      s.n = n;
    } else if (family == "zipf") {
      s.family = StreamSpec::Family::kZipf;
      need(m_opt, "--m");
      need(n_opt, "--n");
      need(alpha_opt, "--alpha");
      s.m = m;
      s.n = n;
      s.alpha = alpha;
    } else if (family == "ams_hard" || family == "cs_hard") {
      s.family = family == "ams_hard" ? StreamSpec::Family::kAmsHard
                                      : StreamSpec::Family::kCsHardBlocks;
      need(ell_opt, "--ell");
      if (!eps_given) throw UsageError(std::string("--family ") + family + " requires --eps");
      s.ell = ell;
      s.eps = eps;
    } else if (family == "file") {
      s.family = StreamSpec::Family::kFile;
      need(path_opt, "--path");
      s.path = path;
    } else {
      throw UsageError("unknown stream family: " + family);
    }
    return s;
  }
};

Stream build_stream(const StreamSpec& spec) {
  if (spec.family == StreamSpec::Family::kFile) return spec.build();  // IO errors are runtime
  try {
    return spec.build();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());  // bad generator parameters are flag errors
  }
}

u64 require_seed(const CLI::Option* seed_opt, u64 seed, const char* why) {
  if (seed_opt->count() == 0)
    throw UsageError(std::string("--seed is required (") + why +
                     "); refusing to default to entropy");
  return seed;
}

AmsSketch::SignMode parse_sign_mode(const std::string& name) {
  if (name == "kwise") return AmsSketch::SignMode::kPerRowHash;
  if (name == "independent") return AmsSketch::SignMode::kIndependent;
  throw UsageError("--ams-signs must be kwise or independent");
}

// ---------------------------------------------------------------------------
// track

struct TrackFlags {
  StreamFlags stream;
  std::string est;
  std::string mode;
  std::string policy;
  std::string ams_signs = "kwise";
  u64 k = 0;
  u64 r = 0;
  double eps = 0.0;
  double delta = 0.0;
  u64 trials = 1;
  u64 seed = 0;
  unsigned threads = 1;
  bool trace = false;
  std::string out = "-";
  CLI::Option* k_opt = nullptr;
  CLI::Option* r_opt = nullptr;
  CLI::Option* eps_opt = nullptr;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

u64 derive_sketch_rows(const TrackFlags& f) {
  if (f.k_opt->count() > 0) return f.k;
  if (f.eps_opt->count() > 0 && f.delta_opt->count() > 0)
    return static_cast<u64>(std::ceil(2.0 / (f.eps * f.eps * f.delta)));
  throw UsageError("--est cs/ams needs --k, or --eps together with --delta");
}

u64 derive_median_rows(const TrackFlags& f) {
  if (f.k_opt->count() > 0) return f.k;
  if (f.eps_opt->count() > 0) return static_cast<u64>(std::ceil(8.0 / (f.eps * f.eps)));
  throw UsageError("--est median needs --k or --eps");
}

u64 derive_replicas(const TrackFlags& f) {
  if (f.r_opt->count() > 0) {
    if (f.r < 1 || f.r % 2 == 0) throw UsageError("--r must be odd and >= 1");
    return f.r;
  }
  if (f.delta_opt->count() > 0) return default_replicas(f.delta);
  throw UsageError("--est median needs --r or --delta");
}

int cmd_track(const TrackFlags& f) {
  const bool needs_seed = f.est != "oracle" || f.stream.is_random();
  const u64 seed =
      needs_seed ? require_seed(f.seed_opt, f.seed, "randomized estimator or stream") : f.seed;

  const StreamSpec spec = f.stream.spec(f.eps, f.eps_opt->count() > 0, seed);
  if (f.trials < 1) throw UsageError("--trials must be >= 1");

  TrackMode mode;
  if (f.mode == "weak")
    mode = TrackMode::kWeak;
  else if (f.mode == "strong")
    mode = TrackMode::kStrong;
  else
    throw UsageError("--mode must be weak or strong");

  std::string policy_name = f.policy;
  if (policy_name.empty()) policy_name = f.stream.is_hard() ? "checkpoints" : "every-step";

  const Stream stream = build_stream(spec);
  if (stream.length == 0) throw std::runtime_error("stream is empty; nothing to track");

  EvalPolicy policy;
  if (policy_name == "every-step") {
    policy = EvalPolicy::every_step();
  } else if (policy_name == "dyadic") {
    policy = EvalPolicy::dyadic();
  } else if (policy_name == "checkpoints") {
    if (stream.checkpoints.empty())
      throw UsageError("--policy checkpoints requires a hard-instance family");
    policy = EvalPolicy::at_times(stream.checkpoints);
  } else {
    throw UsageError("--policy must be every-step, dyadic, or checkpoints");
  }

  const bool want_traces = f.trace || policy.kind != EvalPolicy::Kind::kEveryStep;
  const double threshold =
      f.eps_opt->count() > 0 ? f.eps : std::numeric_limits<double>::infinity();

  // Streams of 2^62 items or more can push a counter past the 64-bit guard;
  // switch to 128-bit counters there.
  const bool wide = stream.length >= (u64{1} << 62);

  auto run = [&](auto&& factory) {
    return failure_probability(stream, factory, threshold, mode, f.trials, seed, policy,
                               f.threads, want_traces);
  };

  FailureStats stats;
  if (f.est == "oracle") {
    stats = run([](u64) { return FrequencyOracle(); });
  } else if (f.est == "cs") {
    const u64 k = derive_sketch_rows(f);
    if (wide)
      stats = run([k](u64 s) { return CountSketch<i128>(k, s); });
    else
      stats = run([k](u64 s) { return CountSketch<i64>(k, s); });
  } else if (f.est == "ams") {
    const u64 k = derive_sketch_rows(f);
    const AmsSketch::SignMode sign_mode = parse_sign_mode(f.ams_signs);
    stats = run([k, sign_mode](u64 s) { return AmsSketch(k, s, sign_mode); });
  } else if (f.est == "median") {
    const u64 k = derive_median_rows(f);
    const u64 r = derive_replicas(f);
    if (wide)
      stats = run([k, r](u64 s) { return MedianTracker<i128>(k, r, s); });
    else
      stats = run([k, r](u64 s) { return MedianTracker<i64>(k, r, s); });
  } else {
    throw UsageError("unknown estimator: " + f.est);
  }

  Output out(f.out);
  std::ostream& os = out.stream();
  os << kCsvHeader << '\n';
  os << "t,estimate,truth,normalized_error\n";
  for (u64 i = 0; i < stats.trials; ++i) {
    os << "# trial " << i << " sup_error=" << format_double(stats.sup_errors[i])
       << " argmax_t=" << stats.argmax_ts[i] << '\n';
    if (i < stats.reports.size())
      for (const TracePoint& p : stats.reports[i].trace)
        os << p.t << ',' << format_double(p.estimate) << ',' << format_double(p.truth) << ','
           << format_double(p.normalized_error) << '\n';
  }
  const u64 worst = stats.worst_trial();
  os << summary_json(mode, stats.sup_errors[worst], stats.argmax_ts[worst], stats.trials,
                     stats.failures)
     << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// gen

struct GenFlags {
  StreamFlags stream;
  double eps = 0.0;
  u64 seed = 0;
  std::string out = "-";
  CLI::Option* eps_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

int cmd_gen(const GenFlags& f) {
  const u64 seed = f.stream.is_random()
                       ? require_seed(f.seed_opt, f.seed, "randomized stream family")
                       : f.seed;
  const StreamSpec spec = f.stream.spec(f.eps, f.eps_opt->count() > 0, seed);
  const Stream stream = build_stream(spec);
  Output out(f.out);
  write_stream(stream, out.stream());
  return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchFlags {
  std::vector<std::string> ests;
  std::vector<double> eps;
  double delta = 0.0;
  u64 k = 0;
  u64 r = 0;
  std::string ams_signs = "kwise";
  u64 warmup = 3;
  u64 batches = 10;
  u64 batch_size = 1'000'000;
  u64 universe = u64{1} << 20;
  u64 seed = 0;
  std::string out = "-";
  CLI::Option* k_opt = nullptr;
  CLI::Option* r_opt = nullptr;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

int cmd_bench(const BenchFlags& f) {
  if (f.warmup < 3) throw UsageError("--warmup must be >= 3");
  if (f.batches < 10) throw UsageError("--batches must be >= 10");
  if (f.batch_size < 1'000'000) throw UsageError("--batch-size must be >= 1000000");
  const u64 seed = require_seed(f.seed_opt, f.seed, "randomized sketches");
  const AmsSketch::SignMode sign_mode = parse_sign_mode(f.ams_signs);

  std::vector<double> eps_grid = f.eps;
  if (eps_grid.empty()) {
    if (f.k_opt->count() == 0) throw UsageError("bench needs --eps values or --k");
    eps_grid.push_back(0.0);
  }

  auto rows_for = [&](const std::string& est, double eps) -> u64 {
    if (f.k_opt->count() > 0) return f.k;
    if (!(eps > 0.0)) throw UsageError("bench needs --k when --eps is absent");
    if (est == "median") return static_cast<u64>(std::ceil(8.0 / (eps * eps)));
    if (f.delta_opt->count() == 0) throw UsageError("--est cs/ams needs --delta to derive k");
    return static_cast<u64>(std::ceil(2.0 / (eps * eps * f.delta)));
  };

  auto replicas = [&]() -> u64 {
    if (f.r_opt->count() > 0) {
      if (f.r < 1 || f.r % 2 == 0) throw UsageError("--r must be odd and >= 1");
      return f.r;
    }
    if (f.delta_opt->count() == 0) throw UsageError("--est median needs --r or --delta");
    return default_replicas(f.delta);
  };

  BenchConfig config;
  config.warmup_batches = f.warmup;
  config.timed_batches = f.batches;
  config.batch_size = f.batch_size;
  config.universe = f.universe;
  config.seed = seed;

  std::vector<BenchResult> results;
  u64 lane = 0;
  for (const std::string& est : f.ests) {
    for (double eps : eps_grid) {
      const u64 sketch_seed = detail::derive_seed(seed, lane++);
      if (est == "cs") {
        const u64 k = rows_for(est, eps);
        results.push_back(
            bench_estimator("cs", k, 1, eps, config, [&] { return CountSketch<>(k, sketch_seed); }));
      } else if (est == "ams") {
        const u64 k = rows_for(est, eps);
        results.push_back(bench_estimator("ams", k, 1, eps, config,
                                          [&] { return AmsSketch(k, sketch_seed, sign_mode); }));
      } else if (est == "median") {
        const u64 k = rows_for(est, eps);
        const u64 r = replicas();
        results.push_back(bench_estimator("median", k, r, eps, config,
                                          [&] { return MedianTracker<>(k, r, sketch_seed); }));
      } else {
        throw UsageError("unknown bench estimator: " + est);
      }
    }
  }

  Output out(f.out);
  std::ostream& os = out.stream();
  os << kCsvHeader << '\n';
  os << "estimator,k,r,eps,ns_per_update,ops_per_update\n";
  for (const BenchResult& r : results)
    os << r.estimator << ',' << r.k << ',' << r.r << ',' << format_double(r.eps) << ','
       << format_double(r.ns_per_update) << ',' << r.ops_per_update << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// frobenius

struct FrobeniusFlags {
  u64 dim = 0;
  u64 k = 0;
  u64 trials = 10000;
  std::string dist = "uniform";
  std::vector<double> deltas;
  u64 seed = 0;
  unsigned threads = 1;
  std::string out = "-";
  CLI::Option* seed_opt = nullptr;
};

int cmd_frobenius(const FrobeniusFlags& f) {
  if (f.dim < 1) throw UsageError("--dim must be >= 1");
  if (f.k < 1) throw UsageError("--k must be >= 1");
  if (f.trials < 1) throw UsageError("--trials must be >= 1");
  if (f.dist != "uniform") throw UsageError("--dist supports only: uniform");
  const u64 seed = require_seed(f.seed_opt, f.seed, "random vector and assignments");
  const std::vector<double> deltas =
      f.deltas.empty() ? std::vector<double>{0.1, 0.5} : f.deltas;
  for (double delta : deltas)
    if (!(delta > 0.0) || !(delta < 1.0)) throw UsageError("--delta must be in (0,1)");

  std::mt19937_64 gen(detail::derive_seed(seed, 0xffffffffULL));
  std::vector<double> x(f.dim);
  for (double& v : x) v = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  double norm_sq = 0.0;
  for (double v : x) norm_sq += v * v;

  const FrobeniusStats stats = frobenius_stat(x, f.k, f.trials, seed, f.threads);

  nlohmann::ordered_json j;
  j["dim"] = f.dim;
  j["k"] = f.k;
  j["trials"] = f.trials;
  j["norm_sq"] = norm_sq;
  j["mean_f2"] = stats.mean_f2;
  j["exact_mean"] = frobenius_mean_exact(x, f.k);
  j["mean_bound"] = norm_sq * norm_sq / static_cast<double>(f.k);
  j["tails"] = nlohmann::ordered_json::array();
  for (double delta : deltas) {
    const double theta = std::sqrt(2.0) * norm_sq / std::sqrt(delta * static_cast<double>(f.k));
    nlohmann::ordered_json tail;
    tail["delta"] = delta;
    tail["theta"] = theta;
    tail["fraction"] = stats.tail_fraction(theta);
    tail["bound"] = delta / 2.0;
    j["tails"].push_back(tail);
  }

  Output out(f.out);
  out.stream() << j.dump() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// epsnet

struct EpsnetFlags {
  StreamFlags stream;
  double eps_rel = 0.0;
  double eps_abs = 0.0;
  double stream_eps = 0.0;
  u64 seed = 0;
  std::string out = "-";
  CLI::Option* eps_rel_opt = nullptr;
  CLI::Option* eps_abs_opt = nullptr;
  CLI::Option* stream_eps_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

int cmd_epsnet(const EpsnetFlags& f) {
  const bool has_rel = f.eps_rel_opt->count() > 0;
  const bool has_abs = f.eps_abs_opt->count() > 0;
  if (has_rel == has_abs) throw UsageError("epsnet needs exactly one of --eps-rel or --eps-abs");
  const u64 seed = f.stream.is_random()
                       ? require_seed(f.seed_opt, f.seed, "randomized stream family")
                       : f.seed;
  const StreamSpec spec = f.stream.spec(f.stream_eps, f.stream_eps_opt->count() > 0, seed);
  const Stream stream = build_stream(spec);

  EpsNet net;
  try {
    net = has_rel ? greedy_net_relative(stream, f.eps_rel) : greedy_net(stream, f.eps_abs);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const NetCheck check = verify_net(stream, net);

  nlohmann::ordered_json j;
  j["eps"] = net.eps;
  j["size"] = net.members.size();
  j["bound"] = net.size_bound();
  j["covered"] = check.covered;
  j["max_min_distance"] = check.max_min_distance;

  Output out(f.out);
  out.stream() << j.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CountSketch/AMS l2-norm tracking experiments"};
  app.require_subcommand(1);

  TrackFlags track;
  CLI::App* track_cmd = app.add_subcommand("track", "run tracking trials and report errors");
  track.stream.attach(track_cmd);
  track_cmd->add_option("--est", track.est, "estimator: cs|ams|median|oracle")->required();
  track_cmd->add_option("--mode", track.mode, "tracking mode: weak|strong")->required();
  track_cmd->add_option("--policy", track.policy,
                        "evaluation policy: every-step|dyadic|checkpoints");
  track.k_opt = track_cmd->add_option("--k", track.k, "sketch rows");
  track.r_opt = track_cmd->add_option("--r", track.r, "median replicas (odd)");
  track.eps_opt = track_cmd->add_option("--eps", track.eps, "accuracy parameter");
  track.delta_opt = track_cmd->add_option("--delta", track.delta, "failure probability");
  track_cmd->add_option("--trials", track.trials, "Monte Carlo trials");
  track.seed_opt = track_cmd->add_option("--seed", track.seed, "base random seed");
  track_cmd->add_option("--threads", track.threads, "worker threads");
  track_cmd->add_flag("--trace", track.trace, "emit trace rows for every-step runs");
  track_cmd->add_option("--out", track.out, "output path or -");
  track_cmd->add_option("--ams-signs", track.ams_signs, "ams sign source: kwise|independent");

  GenFlags gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a stream file");
  gen.stream.attach(gen_cmd);
  gen.eps_opt = gen_cmd->add_option("--eps", gen.eps, "hard-instance accuracy parameter");
  gen.seed_opt = gen_cmd->add_option("--seed", gen.seed, "random seed");
  gen_cmd->add_option("--out", gen.out, "output path or -");

  BenchFlags bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "update-time microbenchmark");
  bench_cmd->add_option("--est", bench.ests, "estimators: cs|ams|median")
      ->required()
      ->delimiter(',');
  bench_cmd->add_option("--eps", bench.eps, "accuracy grid")->delimiter(',');
  bench.delta_opt = bench_cmd->add_option("--delta", bench.delta, "failure probability");
  bench.k_opt = bench_cmd->add_option("--k", bench.k, "fixed sketch rows");
  bench.r_opt = bench_cmd->add_option("--r", bench.r, "median replicas (odd)");
  bench_cmd->add_option("--warmup", bench.warmup, "warm-up batches (>= 3)");
  bench_cmd->add_option("--batches", bench.batches, "timed batches (>= 10)");
  bench_cmd->add_option("--batch-size", bench.batch_size, "updates per batch (>= 1e6)");
  bench_cmd->add_option("--universe", bench.universe, "item universe for updates");
  bench.seed_opt = bench_cmd->add_option("--seed", bench.seed, "base random seed");
  bench_cmd->add_option("--out", bench.out, "output path or -");
  bench_cmd->add_option("--ams-signs", bench.ams_signs, "ams sign source: kwise|independent");

  FrobeniusFlags frob;
  CLI::App* frob_cmd = app.add_subcommand("frobenius", "collision-matrix Frobenius statistic");
  frob_cmd->add_option("--dim", frob.dim, "vector dimension")->required();
  frob_cmd->add_option("--k", frob.k, "bucket count")->required();
  frob_cmd->add_option("--trials", frob.trials, "Monte Carlo trials");
  frob_cmd->add_option("--dist", frob.dist, "vector distribution (uniform)");
  frob_cmd->add_option("--delta", frob.deltas, "tail probabilities")->delimiter(',');
  frob.seed_opt = frob_cmd->add_option("--seed", frob.seed, "base random seed");
  frob_cmd->add_option("--threads", frob.threads, "worker threads");
  frob_cmd->add_option("--out", frob.out, "output path or -");

  EpsnetFlags epsnet;
  CLI::App* eps_cmd = app.add_subcommand("epsnet", "greedy prefix epsilon-net");
  epsnet.stream.attach(eps_cmd);
  epsnet.eps_rel_opt =
      eps_cmd->add_option("--eps-rel", epsnet.eps_rel, "radius relative to the final norm");
  epsnet.eps_abs_opt = eps_cmd->add_option("--eps-abs", epsnet.eps_abs, "absolute radius");
  epsnet.stream_eps_opt =
      eps_cmd->add_option("--eps", epsnet.stream_eps, "hard-instance accuracy parameter");
  epsnet.seed_opt = eps_cmd->add_option("--seed", epsnet.seed, "random seed");
  eps_cmd->add_option("--out", epsnet.out, "output path or -");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*track_cmd) return cmd_track(track);
    if (*gen_cmd) return cmd_gen(gen);
    if (*bench_cmd) return cmd_bench(bench);
    if (*frob_cmd) return cmd_frobenius(frob);
    if (*eps_cmd) return cmd_epsnet(epsnet);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
