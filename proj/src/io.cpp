#include "rulcast/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rulcast/wire.hpp"

namespace rulcast {

using nlohmann::json;

namespace {

std::string fmt_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void ingest_error(const std::string& path, std::size_t line,
                               const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

ObservationSeries ingest_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open observations file: " + path);

  struct Row {
    std::int64_t cycle;
    double length;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = line;
    if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream ss(s);
    std::string c1, c2, extra;
    if (!(ss >> c1)) continue;  // blank or comment-only
    if (!(ss >> c2)) ingest_error(path, line_no, "expected two columns");
    if (ss >> extra) ingest_error(path, line_no, "unexpected third column '" + extra + "'");

    char* end = nullptr;
    const double cyc = std::strtod(c1.c_str(), &end);
    const bool cyc_ok = end && *end == '\0';
    end = nullptr;
    const double len = std::strtod(c2.c_str(), &end);
    const bool len_ok = end && *end == '\0';
    if (!cyc_ok || !len_ok) {
      if (!saw_data) continue;  // header row
      ingest_error(path, line_no, "non-numeric row");
    }
    saw_data = true;
    if (!(cyc >= 0) || cyc != std::floor(cyc) || cyc > 9.0e18)
      ingest_error(path, line_no, "cycle must be a non-negative integer");
    if (!(len > 0.0) || !std::isfinite(len))
      ingest_error(path, line_no, "crack length must be positive");
    rows.push_back({static_cast<std::int64_t>(cyc), len, line_no});
  }
  if (rows.size() < 2)
    throw std::runtime_error(path + ": need at least 2 observation rows, got " +
                             std::to_string(rows.size()));

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.cycle < b.cycle; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].cycle == rows[i - 1].cycle)
      throw std::runtime_error(path + ": duplicate cycle " +
                               std::to_string(rows[i].cycle) + " at lines " +
                               std::to_string(rows[i - 1].line) + " and " +
                               std::to_string(rows[i].line));

  ObservationSeries obs;
  obs.cycles.reserve(rows.size());
  obs.lengths_mm.reserve(rows.size());
  for (const auto& r : rows) {
    obs.cycles.push_back(r.cycle);
    obs.lengths_mm.push_back(r.length);
  }
  validate_observations(obs);
  return obs;
}

void write_observations(const std::string& path, const ObservationSeries& obs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write observations file: " + path);
  out << "# cycle\tcrack_length_mm\n";
  for (std::size_t i = 0; i < obs.size(); ++i)
    out << obs.cycles[i] << '\t' << fmt_g17(obs.lengths_mm[i]) << '\n';
}

ObservationSeries synth_data(const ModelParams& truth, const GrowthLaw& law,
                             std::size_t n_points, std::int64_t cycle_span,
                             std::uint64_t seed) {
  if (n_points < 2) throw std::invalid_argument("synth_data: need at least 2 points");
  if (cycle_span < static_cast<std::int64_t>(n_points) - 1)
    throw std::invalid_argument("synth_data: cycle_span too small for n_points");
  // sigma = 0 is allowed here (noise-free generation); the trajectory itself
  // never depends on sigma.
  if (!std::isfinite(truth.sigma) || truth.sigma < 0.0)
    throw std::invalid_argument("synth_data: sigma must be >= 0");
  std::vector<std::int64_t> cycles(n_points);
  for (std::size_t i = 0; i < n_points; ++i)
    cycles[i] = static_cast<std::int64_t>(std::llround(
        static_cast<double>(cycle_span) * static_cast<double>(i) /
        static_cast<double>(n_points - 1)));
  const ModelParams shape{truth.log10_alpha, truth.beta, 1.0};
  const auto traj = predict_crack(shape, law, cycles);
  RngStream rng(stream_key({seed, stage::kSynth}));
  ObservationSeries obs;
  obs.cycles = std::move(cycles);
  obs.lengths_mm.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double noisy = traj.lengths_mm[i] + truth.sigma * rng.normal();
    obs.lengths_mm[i] = std::max(noisy, 1e-6);
  }
  return obs;
}

namespace {

// Nelder-Mead on f(l, b); standard reflection/expansion/contraction/shrink.
struct Simplex2Result {
  double x[2];
  double f;
  int evals;
};

template <typename F>
Simplex2Result nelder_mead_2d(const F& f, double x0, double y0, double step_x,
                              double step_y, int max_iters, double ftol) {
  struct Vertex {
    double x[2];
    double f;
  };
  Vertex v[3] = {{{x0, y0}, 0}, {{x0 + step_x, y0}, 0}, {{x0, y0 + step_y}, 0}};
  int evals = 0;
  for (auto& vi : v) {
    vi.f = f(vi.x[0], vi.x[1]);
    ++evals;
  }
  const auto by_f = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  for (int it = 0; it < max_iters; ++it) {
    std::sort(v, v + 3, by_f);
    if (v[2].f - v[0].f <= ftol * (std::abs(v[0].f) + ftol)) break;
    const double cx = 0.5 * (v[0].x[0] + v[1].x[0]);
    const double cy = 0.5 * (v[0].x[1] + v[1].x[1]);
    const double rx = cx + (cx - v[2].x[0]);
    const double ry = cy + (cy - v[2].x[1]);
    const double fr = f(rx, ry);
    ++evals;
    if (fr < v[0].f) {
      const double ex = cx + 2.0 * (cx - v[2].x[0]);
      const double ey = cy + 2.0 * (cy - v[2].x[1]);
      const double fe = f(ex, ey);
      ++evals;
      if (fe < fr)
        v[2] = {{ex, ey}, fe};
      else
        v[2] = {{rx, ry}, fr};
    } else if (fr < v[1].f) {
      v[2] = {{rx, ry}, fr};
    } else {
      const double kx = cx + 0.5 * (v[2].x[0] - cx);
      const double ky = cy + 0.5 * (v[2].x[1] - cy);
      const double fk = f(kx, ky);
      ++evals;
      if (fk < v[2].f) {
        v[2] = {{kx, ky}, fk};
      } else {
        for (int i = 1; i < 3; ++i) {
          v[i].x[0] = v[0].x[0] + 0.5 * (v[i].x[0] - v[0].x[0]);
          v[i].x[1] = v[0].x[1] + 0.5 * (v[i].x[1] - v[0].x[1]);
          v[i].f = f(v[i].x[0], v[i].x[1]);
          ++evals;
        }
      }
    }
  }
  std::sort(v, v + 3, by_f);
  return {{v[0].x[0], v[0].x[1]}, v[0].f, evals};
}

}  // namespace

FitOptions default_fit_init(const ObservationSeries& obs, const GrowthLaw& law) {
  FitOptions opt;
  // Exponential-growth slope between the first and last points; crude but a
  // serviceable simplex start anywhere in the parameter box.
  const double a_first = std::max(obs.lengths_mm.front(), 1e-6);
  const double a_last = std::max(obs.lengths_mm.back(), a_first * 1.0001);
  const double span = static_cast<double>(obs.cycles.back() - obs.cycles.front());
  const double alpha = std::log(a_last / a_first) / std::max(span, 1.0);
  opt.init_log10_alpha = std::log10(std::max(alpha, 1e-12));
  opt.init_beta = 1.0;
  (void)law;
  return opt;
}

FitResult least_squares_fit(const ObservationSeries& obs, const GrowthLaw& law,
                            const FitOptions& opt) {
  validate_observations(obs);
  const auto objective = [&](double l, double b) {
    ModelParams p{l, b, 1.0};
    const auto traj = predict_crack(p, law, obs.cycles);
    return sum_squares(obs.lengths_mm, traj.lengths_mm);
  };

  FitResult res;
  double x = opt.init_log10_alpha, y = opt.init_beta;
  double best = objective(x, y);
  res.evals = 1;
  double step_x = 0.5, step_y = 0.25;
  bool improved_last = true;
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    const auto nm = nelder_mead_2d(objective, x, y, step_x, step_y, opt.max_iters, opt.ftol);
    res.evals += nm.evals;
    improved_last = nm.f < best * (1.0 - 1e-12) || nm.f < best - 1e-30;
    if (nm.f <= best) {
      best = nm.f;
      x = nm.x[0];
      y = nm.x[1];
    }
    step_x *= 0.25;
    step_y *= 0.25;
  }
  res.converged = !improved_last || best <= opt.ftol;
  res.ss = best;
  res.params.log10_alpha = x;
  res.params.beta = y;
  res.params.sigma =
      std::max(std::sqrt(best / static_cast<double>(obs.size())), 1e-9);
  return res;
}

// ---- run configuration ------------------------------------------------------

namespace {

json cost_to_json(const EvalCost& c) {
  const char* mode = c.mode == EvalCost::Mode::kBusy   ? "busy"
                     : c.mode == EvalCost::Mode::kWait ? "wait"
                                                       : "none";
  return json{{"mode", mode}, {"micros", c.micros}};
}

EvalCost cost_from_json(const json& j) {
  EvalCost c;
  const std::string mode = j.value("mode", "none");
  if (mode == "busy")
    c.mode = EvalCost::Mode::kBusy;
  else if (mode == "wait")
    c.mode = EvalCost::Mode::kWait;
  else if (mode == "none")
    c.mode = EvalCost::Mode::kNone;
  else
    throw std::runtime_error("config: eval_cost.mode must be none|busy|wait");
  c.micros = j.value("micros", 0.0);
  return c;
}

}  // namespace

RunConfig default_run_config() { return RunConfig{}; }

std::string run_config_to_json_text(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["law"] = {{"a0_mm", cfg.law.a0_mm},
              {"a_fail_mm", cfg.law.a_fail_mm},
              {"cycle_step", cfg.law.cycle_step}};
  j["prior"] = {{"log10_alpha", {cfg.prior.log10_alpha.lo, cfg.prior.log10_alpha.hi}},
                {"beta", {cfg.prior.beta.lo, cfg.prior.beta.hi}},
                {"sigma_sq_inv_gamma", {cfg.prior.sigma_sq_shape, cfg.prior.sigma_sq_scale}}};
  j["mcmc"] = {{"n_samples", cfg.mcmc.n_samples},
               {"n_burn", cfg.mcmc.n_burn},
               {"thin", cfg.mcmc.thin},
               {"adapt_start", cfg.mcmc.adapt_start},
               {"adapt_scale", cfg.mcmc.adapt_scale},
               {"cov_jitter", cfg.mcmc.cov_jitter},
               {"init_cov", {cfg.mcmc.init_cov.m00, cfg.mcmc.init_cov.m01,
                             cfg.mcmc.init_cov.m11}}};
  if (cfg.mcmc_init)
    j["mcmc"]["init"] = {cfg.mcmc_init->log10_alpha, cfg.mcmc_init->beta,
                         cfg.mcmc_init->sigma};
  j["smc"] = {{"n_particles", cfg.smc.n_particles},
              {"n_mcmc", cfg.smc.n_mcmc},
              {"ess_target_frac", cfg.smc.ess_target_frac},
              {"resample_threshold_frac", cfg.smc.resample_threshold_frac},
              {"phi_bisect_tol", cfg.smc.phi_bisect_tol},
              {"adapt_scale", cfg.smc.adapt_scale},
              {"cov_jitter", cfg.smc.cov_jitter}};
  j["executor"] = {{"mode", cfg.exec_mode},
                   {"workers", cfg.workers},
                   {"n_threads", cfg.n_threads},
                   {"batch_size", cfg.batch_size},
                   {"retry_max_attempts", cfg.retry.max_attempts},
                   {"retry_backoff_ms", cfg.retry.backoff_base_ms},
                   {"request_timeout_s", cfg.request_timeout_s},
                   {"worker_concurrency", cfg.worker_concurrency}};
  j["rul"] = {{"checkpoints", cfg.rul_checkpoints},
              {"band_grid_points", cfg.band_grid_points},
              {"horizon_multiple", cfg.horizon_multiple}};
  j["eval_cost"] = cost_to_json(cfg.cost);
  json grid = json::array();
  for (const auto& c : cfg.bench_grid)
    grid.push_back({{"mode", bench_mode_name(c.mode)},
                    {"n_threads", c.n_threads},
                    {"batch_size", c.batch_size},
                    {"n_workers", c.n_workers}});
  j["bench"] = {{"grid", grid}, {"repetitions", cfg.bench_repetitions}};
  return j.dump(2);
}

RunConfig run_config_from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::runtime_error("config: malformed JSON");
  RunConfig cfg;
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("law")) {
    const auto& l = j.at("law");
    cfg.law.a0_mm = l.value("a0_mm", cfg.law.a0_mm);
    cfg.law.a_fail_mm = l.value("a_fail_mm", cfg.law.a_fail_mm);
    cfg.law.cycle_step = l.value("cycle_step", cfg.law.cycle_step);
  }
  if (j.contains("prior")) {
    const auto& p = j.at("prior");
    if (p.contains("log10_alpha")) {
      cfg.prior.log10_alpha.lo = p.at("log10_alpha").at(0).get<double>();
      cfg.prior.log10_alpha.hi = p.at("log10_alpha").at(1).get<double>();
    }
    if (p.contains("beta")) {
      cfg.prior.beta.lo = p.at("beta").at(0).get<double>();
      cfg.prior.beta.hi = p.at("beta").at(1).get<double>();
    }
    if (p.contains("sigma_sq_inv_gamma")) {
      cfg.prior.sigma_sq_shape = p.at("sigma_sq_inv_gamma").at(0).get<double>();
      cfg.prior.sigma_sq_scale = p.at("sigma_sq_inv_gamma").at(1).get<double>();
    }
  }
  if (j.contains("mcmc")) {
    const auto& m = j.at("mcmc");
    cfg.mcmc.n_samples = m.value("n_samples", cfg.mcmc.n_samples);
    cfg.mcmc.n_burn = m.value("n_burn", cfg.mcmc.n_burn);
    cfg.mcmc.thin = m.value("thin", cfg.mcmc.thin);
    cfg.mcmc.adapt_start = m.value("adapt_start", cfg.mcmc.adapt_start);
    cfg.mcmc.adapt_scale = m.value("adapt_scale", cfg.mcmc.adapt_scale);
    cfg.mcmc.cov_jitter = m.value("cov_jitter", cfg.mcmc.cov_jitter);
    if (m.contains("init_cov")) {
      cfg.mcmc.init_cov.m00 = m.at("init_cov").at(0).get<double>();
      cfg.mcmc.init_cov.m01 = m.at("init_cov").at(1).get<double>();
      cfg.mcmc.init_cov.m11 = m.at("init_cov").at(2).get<double>();
    }
    if (m.contains("init")) {
      ModelParams init;
      init.log10_alpha = m.at("init").at(0).get<double>();
      init.beta = m.at("init").at(1).get<double>();
      init.sigma = m.at("init").at(2).get<double>();
      cfg.mcmc_init = init;
    }
  }
  if (j.contains("smc")) {
    const auto& s = j.at("smc");
    cfg.smc.n_particles = s.value("n_particles", cfg.smc.n_particles);
    cfg.smc.n_mcmc = s.value("n_mcmc", cfg.smc.n_mcmc);
    cfg.smc.ess_target_frac = s.value("ess_target_frac", cfg.smc.ess_target_frac);
    cfg.smc.resample_threshold_frac =
        s.value("resample_threshold_frac", cfg.smc.resample_threshold_frac);
    cfg.smc.phi_bisect_tol = s.value("phi_bisect_tol", cfg.smc.phi_bisect_tol);
    cfg.smc.adapt_scale = s.value("adapt_scale", cfg.smc.adapt_scale);
    cfg.smc.cov_jitter = s.value("cov_jitter", cfg.smc.cov_jitter);
  }
  if (j.contains("executor")) {
    const auto& e = j.at("executor");
    cfg.exec_mode = e.value("mode", cfg.exec_mode);
    cfg.workers = e.value("workers", cfg.workers);
    cfg.n_threads = e.value("n_threads", cfg.n_threads);
    cfg.batch_size = e.value("batch_size", cfg.batch_size);
    cfg.retry.max_attempts = e.value("retry_max_attempts", cfg.retry.max_attempts);
    cfg.retry.backoff_base_ms = e.value("retry_backoff_ms", cfg.retry.backoff_base_ms);
    cfg.request_timeout_s = e.value("request_timeout_s", cfg.request_timeout_s);
    cfg.worker_concurrency = e.value("worker_concurrency", cfg.worker_concurrency);
  }
  if (j.contains("rul")) {
    const auto& r = j.at("rul");
    cfg.rul_checkpoints =
        r.value("checkpoints", cfg.rul_checkpoints);
    cfg.band_grid_points = r.value("band_grid_points", cfg.band_grid_points);
    cfg.horizon_multiple = r.value("horizon_multiple", cfg.horizon_multiple);
  }
  if (j.contains("eval_cost")) cfg.cost = cost_from_json(j.at("eval_cost"));
  if (j.contains("bench")) {
    const auto& b = j.at("bench");
    cfg.bench_repetitions = b.value("repetitions", cfg.bench_repetitions);
    if (b.contains("grid")) {
      for (const auto& g : b.at("grid")) {
        BenchCell cell;
        cell.mode = bench_mode_from_name(g.value("mode", "serial"));
        cell.n_threads = g.value("n_threads", 1);
        cell.batch_size = g.value("batch_size", std::size_t{1});
        cell.n_workers = g.value("n_workers", 0);
        cfg.bench_grid.push_back(cell);
      }
    }
  }
  // Seed fan-out: sampler seeds follow the master seed unless set explicitly.
  cfg.mcmc.seed = cfg.seed;
  cfg.smc.seed = cfg.seed;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  if (path.empty()) return default_run_config();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_json_text(ss.str());
}

// ---- run records --------------------------------------------------------------

namespace {

json draws_to_json(const PosteriorSamples& s) {
  std::vector<double> l, b, sg;
  l.reserve(s.draws.size());
  b.reserve(s.draws.size());
  sg.reserve(s.draws.size());
  for (const auto& d : s.draws) {
    l.push_back(d.log10_alpha);
    b.push_back(d.beta);
    sg.push_back(d.sigma);
  }
  return json{{"count", s.draws.size()},
              {"log10_alpha", wire::encode_f64(l)},
              {"beta", wire::encode_f64(b)},
              {"sigma", wire::encode_f64(sg)}};
}

PosteriorSamples draws_from_json(const json& j) {
  PosteriorSamples s;
  const auto l = wire::decode_f64(j.at("log10_alpha").get<std::string>());
  const auto b = wire::decode_f64(j.at("beta").get<std::string>());
  const auto sg = wire::decode_f64(j.at("sigma").get<std::string>());
  if (l.size() != b.size() || l.size() != sg.size())
    throw std::runtime_error("run record: draw arrays disagree in length");
  s.draws.resize(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) s.draws[i] = {l[i], b[i], sg[i]};
  return s;
}

}  // namespace

void write_run_record(const std::string& dir, const RunRecord& rec) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  json j;
  j["run_id"] = rec.run_id;
  j["command"] = rec.command;
  j["seed"] = rec.seed;
  j["dataset_digest"] = rec.dataset_digest;
  j["dataset_path"] = rec.dataset_path;
  j["config"] = json::parse(rec.config_json);
  j["sampler"] = rec.samples.sampler == SamplerTag::kSmc ? "smc" : "mcmc";
  j["acceptance_rate"] = rec.samples.acceptance_rate;
  j["draws"] = draws_to_json(rec.samples);
  j["timings"] = {{"wall_ms", rec.wall_ms}, {"mutate_ms", rec.mutate_ms}};
  if (!rec.schedule.empty()) {
    json sched = json::array();
    for (const auto& d : rec.schedule)
      sched.push_back({{"step", d.step},
                       {"phi", d.phi},
                       {"ess", d.ess_after_reweight},
                       {"resampled", d.resampled},
                       {"accept_rate", d.accept_rate},
                       {"mutate_ms", d.mutate_ms}});
    j["schedule"] = sched;
  }
  if (!rec.window_accept.empty()) j["window_accept"] = rec.window_accept;

  std::ofstream rj(fs::path(dir) / "record.json");
  if (!rj) throw std::runtime_error("cannot write record.json in " + dir);
  rj << j.dump(2) << '\n';

  std::ofstream dt(fs::path(dir) / "draws.tsv");
  dt << "log10_alpha\tbeta\tsigma\n";
  for (const auto& d : rec.samples.draws)
    dt << fmt_g17(d.log10_alpha) << '\t' << fmt_g17(d.beta) << '\t' << fmt_g17(d.sigma)
       << '\n';

  if (!rec.samples.draws.empty()) {
    const auto s = summarize(rec.samples.draws);
    std::ofstream st(fs::path(dir) / "summary.tsv");
    st << "param\tmean\tsd\tcorr_log10_alpha\tcorr_beta\tcorr_sigma\n";
    const char* names[3] = {"log10_alpha", "beta", "sigma"};
    for (int i = 0; i < 3; ++i) {
      st << names[i] << '\t' << fmt_g17(s.mean[i]) << '\t' << fmt_g17(s.sd[i]);
      for (int k = 0; k < 3; ++k) st << '\t' << fmt_g17(s.corr[i][k]);
      st << '\n';
    }
  }

  std::ofstream sc(fs::path(dir) / "schedule.tsv");
  if (!rec.schedule.empty()) {
    sc << "step\tphi\tess\tresampled\taccept_rate\tmutate_ms\n";
    for (const auto& d : rec.schedule)
      sc << d.step << '\t' << fmt_g17(d.phi) << '\t' << fmt_g17(d.ess_after_reweight)
         << '\t' << (d.resampled ? 1 : 0) << '\t' << fmt_g17(d.accept_rate) << '\t'
         << fmt_g17(d.mutate_ms) << '\n';
  } else {
    sc << "window\taccept_rate\n";
    for (std::size_t i = 0; i < rec.window_accept.size(); ++i)
      sc << (i + 1) * 1000 << '\t' << fmt_g17(rec.window_accept[i]) << '\n';
  }
}

RunRecord load_run_record(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream in(fs::path(dir) / "record.json");
  if (!in) throw std::runtime_error("cannot open " + dir + "/record.json");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw std::runtime_error(dir + "/record.json: malformed JSON");

  RunRecord rec;
  rec.run_id = j.value("run_id", "");
  rec.command = j.value("command", "");
  rec.seed = j.value("seed", std::uint64_t{0});
  rec.dataset_digest = j.value("dataset_digest", "");
  rec.dataset_path = j.value("dataset_path", "");
  rec.config_json = j.at("config").dump();
  rec.samples = draws_from_json(j.at("draws"));
  rec.samples.sampler = j.value("sampler", "mcmc") == "smc" ? SamplerTag::kSmc
                                                            : SamplerTag::kMcmc;
  rec.samples.acceptance_rate = j.value("acceptance_rate", 0.0);
  rec.samples.seed = rec.seed;
  if (j.contains("timings")) {
    rec.wall_ms = j.at("timings").value("wall_ms", 0.0);
    rec.mutate_ms = j.at("timings").value("mutate_ms", 0.0);
  }
  if (j.contains("schedule")) {
    for (const auto& d : j.at("schedule")) {
      SmcStepDiag diag;
      diag.step = d.value("step", std::int64_t{0});
      diag.phi = d.value("phi", 0.0);
      diag.ess_after_reweight = d.value("ess", 0.0);
      diag.resampled = d.value("resampled", false);
      diag.accept_rate = d.value("accept_rate", 0.0);
      diag.mutate_ms = d.value("mutate_ms", 0.0);
      rec.schedule.push_back(diag);
    }
  }
  if (j.contains("window_accept"))
    rec.window_accept = j.at("window_accept").get<std::vector<double>>();
  return rec;
}

void write_band_tsv(const std::string& path, const PredictiveBand& band) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "cycle\tlower\tmedian\tupper\n";
  for (std::size_t i = 0; i < band.cycles.size(); ++i)
    out << band.cycles[i] << '\t' << fmt_g17(band.lower[i]) << '\t'
        << fmt_g17(band.median[i]) << '\t' << fmt_g17(band.upper[i]) << '\n';
}

void write_rul_tsv(const std::string& path, const std::vector<RulDistribution>& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "current_cycle\tq05\tq25\tq50\tq75\tq95\tcensored\tn\n";
  for (const auto& r : series)
    out << r.current_cycle << '\t' << fmt_g17(r.q05) << '\t' << fmt_g17(r.q25) << '\t'
        << fmt_g17(r.q50) << '\t' << fmt_g17(r.q75) << '\t' << fmt_g17(r.q95) << '\t'
        << r.censored << '\t' << r.rul_samples.size() << '\n';
}

void write_bench_report(const std::string& dir, const SpeedupReport& report) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / "bench.tsv");
  if (!out) throw std::runtime_error("cannot write bench.tsv in " + dir);
  out << "mode\tn_threads\tbatch_size\tn_workers\treps\twall_ms\tmutate_ms\tspeedup\terror\n";
  for (const auto& r : report.rows)
    out << bench_mode_name(r.cell.mode) << '\t' << r.cell.n_threads << '\t'
        << r.cell.batch_size << '\t' << r.cell.n_workers << '\t' << r.repetitions << '\t'
        << fmt_g17(r.wall_ms_median) << '\t' << fmt_g17(r.mutate_ms_median) << '\t'
        << fmt_g17(r.speedup) << '\t' << (r.error.empty() ? "-" : r.error) << '\n';

  json j;
  j["baseline_wall_ms"] = report.baseline_wall_ms;
  j["baseline_n_samples"] = report.baseline_n_samples;
  j["smc_model_evals"] = report.smc_model_evals;
  j["repetitions"] = report.repetitions;
  j["notes"] = report.notes;
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"mode", bench_mode_name(r.cell.mode)},
                    {"n_threads", r.cell.n_threads},
                    {"batch_size", r.cell.batch_size},
                    {"n_workers", r.cell.n_workers},
                    {"repetitions", r.repetitions},
                    {"wall_ms", r.wall_ms_median},
                    {"mutate_ms", r.mutate_ms_median},
                    {"speedup", r.speedup},
                    {"error", r.error}});
  j["rows"] = rows;
  std::ofstream bj(fs::path(dir) / "bench.json");
  bj << j.dump(2) << '\n';
}

}  // namespace rulcast
