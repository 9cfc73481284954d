#include "rulcast/worker.hpp"

#include <stdexcept>

#include <httplib.h>

#include "rulcast/mutation.hpp"
#include "rulcast/wire.hpp"

namespace rulcast {

WorkerServer::WorkerServer(const CrackPosterior& problem, WorkerOptions opt)
    : problem_(problem), opt_(std::move(opt)) {
  digest_ = wire::digest_hex(
      wire::problem_digest(problem_.observations(), problem_.law(), problem_.prior()));
  server_ = std::make_unique<httplib::Server>();
  if (opt_.concurrency > 0) {
    const int n = opt_.concurrency;
    server_->new_task_queue = [n] { return new httplib::ThreadPool(n); };
  }
  install_routes();
}

WorkerServer::~WorkerServer() { stop(); }

namespace {

void reply_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(std::string("{\"error\":\"") + message + "\"}", "application/json");
}

}  // namespace

void WorkerServer::install_routes() {
  server_->Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    wire::HealthResponse h;
    h.status = "ok";
    h.dataset_digest = digest_;
    h.n_obs = problem_.observations().size();
    res.set_content(wire::to_json(h), "application/json");
  });

  server_->Post("/v1/model-eval", [this](const httplib::Request& req,
                                         httplib::Response& res) {
    try {
      const auto r = wire::model_eval_request_from_json(req.body);
      if (r.dataset_digest != digest_) {
        reply_error(res, 409, "dataset digest mismatch");
        return;
      }
      const std::size_t k = r.log10_alpha.size();
      if (k == 0) {
        reply_error(res, 400, "empty batch");
        return;
      }
      std::vector<ModelParams> params(k);
      for (std::size_t i = 0; i < k; ++i) {
        params[i].log10_alpha = r.log10_alpha[i];
        params[i].beta = r.beta[i];
        params[i].sigma = 1.0;  // predictions do not involve sigma
      }
      wire::ModelEvalResponse out;
      out.job_id = r.job_id;
      out.n_points = problem_.observations().size();
      out.predictions.resize(k * out.n_points);
      problem_.predictions_batch(params, out.predictions.data());
      res.set_content(wire::to_json(out), "application/json");
    } catch (const std::exception& e) {
      reply_error(res, 400, e.what());
    }
  });

  server_->Post("/v1/mutate", [this](const httplib::Request& req,
                                     httplib::Response& res) {
    try {
      const auto r = wire::mutate_request_from_json(req.body);
      if (r.dataset_digest != digest_) {
        reply_error(res, 409, "dataset digest mismatch");
        return;
      }
      const std::size_t k = r.ids.size();
      std::vector<Particle> block(k);
      for (std::size_t i = 0; i < k; ++i) {
        block[i].params = {r.log10_alpha[i], r.beta[i], r.sigma[i]};
        block[i].id = r.ids[i];
      }
      MutationContext ctx;
      ctx.phi = r.phi;
      ctx.n_mcmc = r.n_mcmc;
      ctx.proposal_cov = r.proposal_cov;
      // master_seed/step_index are not needed worker-side: the coordinator
      // ships fully derived stream keys.
      MutationStats stats;
      std::vector<std::int64_t> accepts(k, 0);
      const StatBatchFn fn = [this](std::span<const ModelParams> batch,
                                    std::span<double> out) {
        problem_.sufficient_stat_batch(batch, out);
      };
      mutate_block(block, r.stream_keys, ctx, problem_, fn, stats, accepts.data());
      wire::MutateResponse out;
      out.job_id = r.job_id;
      out.log10_alpha.resize(k);
      out.beta.resize(k);
      out.sigma.resize(k);
      out.log_like.resize(k);
      out.accept_counts = std::move(accepts);
      for (std::size_t i = 0; i < k; ++i) {
        out.log10_alpha[i] = block[i].params.log10_alpha;
        out.beta[i] = block[i].params.beta;
        out.sigma[i] = block[i].params.sigma;
        out.log_like[i] = block[i].log_like;
      }
      res.set_content(wire::to_json(out), "application/json");
    } catch (const std::exception& e) {
      reply_error(res, 400, e.what());
    }
  });
}

int WorkerServer::bind() {
  if (opt_.port == 0) {
    port_ = server_->bind_to_any_port(opt_.host);
  } else {
    if (!server_->bind_to_port(opt_.host, opt_.port))
      throw std::runtime_error("worker: failed to bind " + opt_.host + ":" +
                               std::to_string(opt_.port));
    port_ = opt_.port;
  }
  if (port_ <= 0) throw std::runtime_error("worker: failed to bind any port");
  return port_;
}

void WorkerServer::run() {
  if (port_ < 0) bind();
  server_->listen_after_bind();
}

int WorkerServer::start_async() {
  const int p = bind();
  listener_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return p;
}

void WorkerServer::stop() {
  if (server_) server_->stop();
  if (listener_.joinable()) listener_.join();
}

}  // namespace rulcast
