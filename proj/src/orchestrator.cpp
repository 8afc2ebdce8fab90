// Copyright 2026 The CBO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cbo/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>
#include <utility>

#include "cbo/benchmarks.hpp"
#include "cbo/coupling.hpp"
#include "cbo/error.hpp"
#include "cbo/gp.hpp"
#include "cbo/tpe.hpp"

namespace cbo {
namespace {

enum Stream : std::uint64_t { kPropose = 1, kFitAlpha = 2, kFitBeta = 3, kPool = 4 };

Rng step_rng(std::uint64_t seed, std::size_t step, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

std::uint64_t request_id(std::size_t iter, Fidelity f) {
  return 2 * static_cast<std::uint64_t>(iter) + (f == Fidelity::kPost ? 1 : 0);
}

Observation evaluate_at(Evaluator& evaluator, const RunConfig& cfg, std::size_t iter, Fidelity f,
                        const Configuration& config) {
  Observation obs;
  obs.iter = iter;
  obs.fidelity = f;
  obs.config = config;
  obs.request_id = request_id(iter, f);
  EvalOutcome out;
  try {
    out = evaluator.evaluate(make_request(obs.request_id, f, config, cfg.space));
  } catch (const std::exception& e) {
    out.status = EvalStatus::kEvalError;
    out.diagnostics = e.what();
  }
  obs.status = out.status;
  obs.duration_ms = out.duration_ms;
  obs.diagnostics = out.diagnostics;
  if (obs.status != EvalStatus::kOk) return obs;
  for (const auto& [name, value] : out.metrics) {
    if (!std::isfinite(value)) {
      obs.status = EvalStatus::kEvalError;
      obs.diagnostics = "non-finite metric '" + name + "'";
      return obs;
    }
  }
  try {
    obs.fom = effective_fom(out.metrics, cfg.fom);
    obs.metrics = std::move(out.metrics);
  } catch (const MetricError& e) {
    obs.status = EvalStatus::kEvalError;
    obs.diagnostics = e.what();
  }
  return obs;
}

struct Candidate {
  double primary = 0.0;
  double secondary = 0.0;
};

// Argmax over (primary, secondary); the first candidate wins exact ties.
std::size_t argmax(const std::vector<Candidate>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const auto& a = scores[i];
    const auto& b = scores[best];
    if (a.primary > b.primary || (a.primary == b.primary && a.secondary > b.secondary)) best = i;
  }
  return best;
}

double variance_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

std::shared_ptr<Evaluator> resolve_evaluator(const RunConfig& cfg) {
  if (cfg.evaluator) return cfg.evaluator;
  return make_evaluator(cfg.binding, 0.0, cfg.seed);
}

// Owns GP^alpha for one run. The full hyperparameter search is repeated only once the cheap data
// has grown by a fifth since the last search; otherwise the previous hyperparameters are reused.
class AlphaModelCache {
 public:
  std::shared_ptr<const GpModel> get(const std::vector<Observation>& cheap, const RunConfig& cfg,
                                     std::size_t step) {
    if (cheap.empty()) return nullptr;
    if (model_ && model_->size() == cheap.size()) return model_;
    Points x;
    std::vector<double> y;
    for (const auto& o : cheap) {
      x.push_back(encode(o.config, cfg.space));
      y.push_back(o.fom.effective);
    }
    const bool search = !hyper_ || cheap.size() * 5 >= searched_n_ * 6;
    if (search) {
      Rng rng = step_rng(cfg.seed, step, kFitAlpha);
      model_ = std::make_shared<const GpModel>(fit_gp(std::move(x), std::move(y), true, rng));
      hyper_ = model_->hyper();
      searched_n_ = cheap.size();
    } else {
      KernelHyper h = *hyper_;
      double mean = 0.0;
      for (double v : y) mean += v;
      h.prior_mean = mean / static_cast<double>(y.size());
      model_ = std::make_shared<const GpModel>(GpModel::build(std::move(x), std::move(y), h));
    }
    return model_;
  }

 private:
  std::shared_ptr<const GpModel> model_;
  std::optional<KernelHyper> hyper_;
  std::size_t searched_n_ = 0;
};

class CoupledRun {
 public:
  explicit CoupledRun(const RunConfig& cfg)
      : cfg_(cfg),
        evaluator_(resolve_evaluator(cfg)),
        schedule_(build_schedule(cfg.n_pre, cfg.interval, cfg.n_post)),
        steps_(schedule_.size()),
        pre_(steps_ + 1),
        post_(steps_ + 1),
        alpha_models_(steps_ + 1),
        alpha_posted_(steps_ + 1, false),
        announced_(steps_ + 1),
        rho_(steps_ + 1, 0.0),
        visible_from_(steps_ + 1, steps_ + 1) {
    std::size_t next = steps_ + 1;
    for (std::size_t s = steps_; s >= 1; --s) {
      visible_from_[s] = next;
      if (kind(s) != StepKind::kAlpha) next = s;
    }
  }

  RunResult run() {
    const auto start = std::chrono::steady_clock::now();
    if (cfg_.asynchronous) {
      std::thread beta([this] { guarded([this] { beta_agent(); }); });
      guarded([this] { alpha_agent(); });
      beta.join();
      if (error_) std::rethrow_exception(error_);
    } else {
      run_sequential();
    }
    RunResult result;
    result.method = Method::kCoupled;
    for (std::size_t s = 1; s <= steps_; ++s) {
      if (pre_[s]) result.history.push_back(*pre_[s]);
      if (post_[s]) result.history.push_back(*post_[s]);
      if (kind(s) != StepKind::kAlpha) result.rho_trace.push_back(rho_[s]);
    }
    finalize_result(result);
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  }

 private:
  StepKind kind(std::size_t s) const { return schedule_[s - 1]; }

  template <class F>
  void guarded(F&& body) {
    try {
      body();
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
      cv_.notify_all();
    }
  }

  template <class Pred>
  void wait_for(std::unique_lock<std::mutex>& lock, Pred pred) {
    cv_.wait(lock, [&] { return error_ || pred(); });
    if (error_) throw RunAbortedError("run stopped by the other loop");
  }

  void run_sequential() {
    for (std::size_t s = 1; s <= steps_; ++s) {
      if (kind(s) == StepKind::kAlpha) {
        pre_[s] = alpha_iteration(s);
        continue;
      }
      alpha_models_[s] = alpha_cache_.get(cheap_before(s), cfg_, s);
      const Configuration config = propose_beta(s, alpha_models_[s]);
      post_[s] = evaluate_at(*evaluator_, cfg_, s, Fidelity::kPost, config);
      if (kind(s) == StepKind::kBeta)
        pre_[s] = evaluate_at(*evaluator_, cfg_, s, Fidelity::kPre, config);
      check_abort(s);
    }
  }

  // Single owner of GP^alpha and of every cheap evaluation.
  void alpha_agent() {
    for (std::size_t s = 1; s <= steps_; ++s) {
      if (kind(s) == StepKind::kAlpha) {
        {
          std::unique_lock lock(mutex_);
          wait_for(lock, [&] { return expensive_visible_ready(s); });
        }
        Observation obs = alpha_iteration(s);
        std::lock_guard lock(mutex_);
        pre_[s] = std::move(obs);
        cv_.notify_all();
        continue;
      }
      auto model = alpha_cache_.get(cheap_before(s), cfg_, s);
      Configuration config;
      {
        std::unique_lock lock(mutex_);
        alpha_models_[s] = std::move(model);
        alpha_posted_[s] = true;
        cv_.notify_all();
        if (kind(s) == StepKind::kBetaOnly) continue;
        wait_for(lock, [&] { return announced_[s].has_value(); });
        config = *announced_[s];
      }
      Observation obs = evaluate_at(*evaluator_, cfg_, s, Fidelity::kPre, config);
      std::lock_guard lock(mutex_);
      pre_[s] = std::move(obs);
      cv_.notify_all();
    }
  }

  // Single owner of GP^beta and of every expensive evaluation.
  void beta_agent() {
    for (std::size_t s = 1; s <= steps_; ++s) {
      if (kind(s) == StepKind::kAlpha) continue;
      std::shared_ptr<const GpModel> alpha_model;
      {
        std::unique_lock lock(mutex_);
        wait_for(lock, [&] { return alpha_posted_[s]; });
        alpha_model = alpha_models_[s];
      }
      const Configuration config = propose_beta(s, alpha_model);
      {
        std::lock_guard lock(mutex_);
        announced_[s] = config;
        cv_.notify_all();
      }
      Observation obs = evaluate_at(*evaluator_, cfg_, s, Fidelity::kPost, config);
      {
        std::lock_guard lock(mutex_);
        post_[s] = std::move(obs);
        cv_.notify_all();
      }
      check_abort(s);
    }
  }

  // Caller holds the lock.
  bool expensive_visible_ready(std::size_t s) const {
    for (std::size_t b = 1; b < s; ++b)
      if (kind(b) != StepKind::kAlpha && visible_from_[b] <= s && !post_[b]) return false;
    return true;
  }

  std::vector<Observation> cheap_before(std::size_t s) const {
    std::lock_guard lock(mutex_);
    std::vector<Observation> out;
    for (std::size_t b = 1; b < s; ++b)
      if (pre_[b] && pre_[b]->ok()) out.push_back(*pre_[b]);
    return out;
  }

  struct ExpensiveView {
    std::vector<Observation> expensive;
    std::vector<CoObservation> pairs;
  };

  // Expensive results whose step is visible from `s`, plus their ok co-observations.
  ExpensiveView expensive_visible(std::size_t s) const {
    std::lock_guard lock(mutex_);
    ExpensiveView view;
    for (std::size_t b = 1; b < s; ++b) {
      if (visible_from_[b] > s || !post_[b] || !post_[b]->ok()) continue;
      view.expensive.push_back(*post_[b]);
      if (pre_[b] && pre_[b]->ok())
        view.pairs.push_back({encode(post_[b]->config, cfg_.space), pre_[b]->fom.effective,
                              post_[b]->fom.effective});
    }
    return view;
  }

  Observation alpha_iteration(std::size_t s) {
    Rng rng = step_rng(cfg_.seed, s, kPropose);
    if (s <= cfg_.n_init)
      return evaluate_at(*evaluator_, cfg_, s, Fidelity::kPre, sample_uniform(cfg_.space, rng));
    std::vector<ScoredConfig> history;
    for (const auto& o : cheap_before(s)) history.push_back({o.config, o.fom.effective});
    // Expensive results join the cheap history shifted by the mean cheap-expensive gap.
    const ExpensiveView view = expensive_visible(s);
    double offset = 0.0;
    for (const auto& p : view.pairs) offset += p.cheap - p.expensive;
    if (!view.pairs.empty()) offset /= static_cast<double>(view.pairs.size());
    for (const auto& o : view.expensive) history.push_back({o.config, o.fom.effective + offset});
    const Configuration config =
        propose_next(history, cfg_.gamma_alpha, cfg_.n_candidates, cfg_.space, rng);
    return evaluate_at(*evaluator_, cfg_, s, Fidelity::kPre, config);
  }

  Configuration propose_beta(std::size_t s, const std::shared_ptr<const GpModel>& alpha_model) {
    Rng rng = step_rng(cfg_.seed, s, kPool);
    const ExpensiveView view = expensive_visible(s);
    const std::vector<Observation> cheap = cheap_before(s);
    if (s <= cfg_.n_init || (cheap.empty() && view.expensive.empty()))
      return sample_uniform(cfg_.space, rng);

    std::vector<ScoredConfig> history;
    for (const auto& o : cheap) history.push_back({o.config, o.fom.effective});
    std::vector<Configuration> pool =
        sample_good_density(history, cfg_.gamma_beta, cfg_.beta_pool_size, cfg_.space, rng);

    if (view.expensive.empty()) {
      // No incumbent yet: rank by the cheap posterior mean.
      std::vector<Candidate> scores;
      for (const auto& c : pool) scores.push_back({alpha_model->posterior(encode(c, cfg_.space)).mean, 0.0});
      rho_[s] = estimate_rho(view.pairs);
      return pool[argmax(scores)];
    }

    const Incumbent inc = incumbent(view.expensive);
    pool.push_back(inc.config);
    const Eigen::VectorXd center = encode(inc.config, cfg_.space);
    std::normal_distribution<double> noise(0.0, cfg_.beta_perturbation_sigma);
    for (std::size_t i = 0; i < cfg_.beta_perturbations; ++i) {
      Eigen::VectorXd u = center;
      for (Eigen::Index d = 0; d < u.size(); ++d) u[d] = std::clamp(u[d] + noise(rng), 0.0, 1.0);
      pool.push_back(decode(u, cfg_.space));
    }

    Points xb;
    std::vector<double> yb;
    for (const auto& o : view.expensive) {
      xb.push_back(encode(o.config, cfg_.space));
      yb.push_back(o.fom.effective);
    }
    FitOptions options;
    if (alpha_model) {
      std::vector<double> ya(alpha_model->targets().begin(), alpha_model->targets().end());
      options.scale_hint = variance_of(ya);
    }
    Rng fit_rng = step_rng(cfg_.seed, s, kFitBeta);
    GpModel gp_beta = fit_gp(std::move(xb), std::move(yb), true, fit_rng, options);

    std::optional<CoupledGp> coupled;
    if (alpha_model) {
      coupled = CoupledGp::build(*alpha_model, gp_beta, estimate_rho(view.pairs), view.pairs);
      rho_[s] = coupled->rho();
    }
    std::vector<Candidate> scores;
    for (const auto& c : pool) {
      const Eigen::VectorXd x = encode(c, cfg_.space);
      const Posterior p = coupled ? coupled->predict_expensive(x) : gp_beta.posterior(x);
      scores.push_back({expected_improvement(p.mean, p.variance, inc.effective), p.mean});
    }
    return pool[argmax(scores)];
  }

  void check_abort(std::size_t s) {
    std::size_t failed = 0;
    {
      std::lock_guard lock(mutex_);
      for (std::size_t b = 1; b <= s; ++b)
        if (post_[b] && !post_[b]->ok()) ++failed;
    }
    const std::size_t budget = cfg_.expensive_budget();
    if (2 * failed > budget)
      throw RunAbortedError("aborted: " + std::to_string(failed) + " of " + std::to_string(budget) +
                            " expensive evaluations failed");
  }

  const RunConfig& cfg_;
  std::shared_ptr<Evaluator> evaluator_;
  std::vector<StepKind> schedule_;
  std::size_t steps_;

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::exception_ptr error_;
  std::vector<std::optional<Observation>> pre_;
  std::vector<std::optional<Observation>> post_;
  std::vector<std::shared_ptr<const GpModel>> alpha_models_;
  std::vector<bool> alpha_posted_;
  std::vector<std::optional<Configuration>> announced_;
  std::vector<double> rho_;
  std::vector<std::size_t> visible_from_;

  AlphaModelCache alpha_cache_;
};

// Cheap-only TPE shared by both baselines. Iterations are 1..n_pre.
std::vector<Observation> cheap_only_phase(const RunConfig& cfg, Evaluator& evaluator) {
  std::vector<Observation> out;
  std::vector<ScoredConfig> history;
  for (std::size_t s = 1; s <= cfg.n_pre; ++s) {
    Rng rng = step_rng(cfg.seed, s, kPropose);
    const Configuration config =
        s <= cfg.n_init ? sample_uniform(cfg.space, rng)
                        : propose_next(history, cfg.gamma_beta, cfg.n_candidates, cfg.space, rng);
    out.push_back(evaluate_at(evaluator, cfg, s, Fidelity::kPre, config));
    if (out.back().ok()) history.push_back({config, out.back().fom.effective});
  }
  return out;
}

// Ok cheap observations by descending effective FOM; ties keep the earlier one first.
std::vector<const Observation*> ranked_ok(const std::vector<Observation>& obs) {
  std::vector<const Observation*> out;
  for (const auto& o : obs)
    if (o.ok()) out.push_back(&o);
  std::stable_sort(out.begin(), out.end(), [](const Observation* a, const Observation* b) {
    return a->fom.effective > b->fom.effective;
  });
  return out;
}

}  // namespace

std::shared_ptr<Evaluator> make_evaluator(const EvaluatorBinding& binding, double speed_factor,
                                          std::uint64_t latency_seed) {
  if (!binding.builtin.empty())
    return std::make_shared<BuiltinEvaluator>(builtin_benchmark(binding.builtin),
                                              LatencyModel::circuit_flow(speed_factor),
                                              latency_seed);
  if (!binding.command.empty())
    return std::make_shared<SubprocessEvaluator>(binding.command, binding.timeout_pre_s,
                                                 binding.timeout_post_s, binding.max_concurrent);
  throw ConfigError("evaluator: neither a builtin name nor a command is set");
}

std::size_t RunConfig::expensive_budget() const {
  if (n_post) return *n_post;
  return interval == 0 ? 0 : n_pre / interval;
}

void RunConfig::validate() const {
  if (space.size() == 0) throw ConfigError("space: no parameters");
  if (interval < 1) throw ConfigError("run.interval: must be >= 1");
  const std::size_t steps = std::max(n_pre, expensive_budget());
  if (steps == 0) throw ConfigError("run: no evaluations scheduled");
  if (n_init > steps) throw ConfigError("run.n_init: exceeds the number of iterations");
  if (n_pre > 0 && n_init > n_pre) throw ConfigError("run.n_init: exceeds run.n_pre");
  if (!(gamma_alpha > 0.0 && gamma_alpha < 1.0)) throw ConfigError("run.gamma_alpha: must be in (0, 1)");
  if (!(gamma_beta > 0.0 && gamma_beta < 1.0)) throw ConfigError("run.gamma_beta: must be in (0, 1)");
  if (n_candidates == 0) throw ConfigError("run.n_candidates: must be >= 1");
  if (beta_pool_size == 0) throw ConfigError("run.beta_pool_size: must be >= 1");
  if (!(beta_perturbation_sigma > 0.0)) throw ConfigError("run.beta_perturbation_sigma: must be > 0");
  fom.validate();
  if (!evaluator && binding.builtin.empty() && binding.command.empty())
    throw ConfigError("evaluator: neither a builtin name nor a command is set");
}

Incumbent incumbent(std::span<const Observation> history) {
  std::optional<Incumbent> best;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const Observation& o = history[i];
    if (o.fidelity != Fidelity::kPost || !o.ok()) continue;
    if (!best || o.fom.effective > best->effective) best = Incumbent{o.config, o.fom.effective, i};
  }
  if (!best) throw NoIncumbentError("no ok expensive observation");
  return *best;
}

const char* to_string(Method m) {
  switch (m) {
    case Method::kCoupled: return "coupled";
    case Method::kPlain: return "plain";
    case Method::kFusion: return "fusion";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "coupled") return Method::kCoupled;
  if (s == "plain") return Method::kPlain;
  if (s == "fusion") return Method::kFusion;
  throw ConfigError("unknown method '" + s + "' (expected coupled, plain or fusion)");
}

std::vector<StepKind> build_schedule(std::size_t n_pre, std::size_t interval,
                                     std::optional<std::size_t> n_post) {
  if (interval < 1) throw ConfigError("interval must be >= 1");
  std::vector<StepKind> out(n_pre, StepKind::kAlpha);
  if (!n_post) {
    for (std::size_t i = interval; i <= n_pre; i += interval) out[i - 1] = StepKind::kBeta;
    return out;
  }
  const std::size_t k_post = *n_post;
  if (k_post > n_pre) {
    std::fill(out.begin(), out.end(), StepKind::kBeta);
    out.resize(k_post, StepKind::kBetaOnly);
    return out;
  }
  for (std::size_t k = 1; k <= k_post; ++k) out[(k * n_pre + k_post - 1) / k_post - 1] = StepKind::kBeta;
  return out;
}

void finalize_result(RunResult& result) {
  result.best_pre_trace.clear();
  result.best_post_trace.clear();
  result.n_pre_evaluated = result.n_post_evaluated = result.n_post_failed = 0;
  std::optional<double> best_pre, best_post;
  for (std::size_t i = 0; i < result.history.size(); ++i) {
    Observation& o = result.history[i];
    o.index = i;
    auto& best = o.fidelity == Fidelity::kPre ? best_pre : best_post;
    if (o.ok() && (!best || o.fom.effective > *best)) best = o.fom.effective;
    if (o.fidelity == Fidelity::kPre) {
      ++result.n_pre_evaluated;
      result.best_pre_trace.push_back(best);
    } else {
      ++result.n_post_evaluated;
      if (!o.ok()) ++result.n_post_failed;
      result.best_post_trace.push_back(best);
    }
  }
  result.best.reset();
  try {
    result.best = incumbent(result.history);
  } catch (const NoIncumbentError&) {
  }
}

RunResult run_coupled(const RunConfig& cfg) {
  cfg.validate();
  CoupledRun run(cfg);
  return run.run();
}

RunResult run_plain_baseline(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.n_pre == 0) throw ConfigError("run.n_pre: the plain baseline needs cheap iterations");
  const auto start = std::chrono::steady_clock::now();
  auto evaluator = resolve_evaluator(cfg);
  RunResult result;
  result.method = Method::kPlain;
  result.history = cheap_only_phase(cfg, *evaluator);
  const auto ranked = ranked_ok(result.history);
  if (ranked.empty()) throw RunAbortedError("aborted: every cheap evaluation failed");
  const Configuration best = ranked.front()->config;
  result.history.push_back(evaluate_at(*evaluator, cfg, cfg.n_pre + 1, Fidelity::kPost, best));
  finalize_result(result);
  if (result.n_post_failed > 0) throw RunAbortedError("aborted: the single expensive evaluation failed");
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

RunResult run_fusion_baseline(const RunConfig& cfg, std::size_t n_train) {
  cfg.validate();
  if (n_train == 0) throw ConfigError("fusion: n_train must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  auto evaluator = resolve_evaluator(cfg);
  RunResult result;
  result.method = Method::kFusion;
  result.history = cheap_only_phase(cfg, *evaluator);

  std::vector<Configuration> train;
  for (const Observation* o : ranked_ok(result.history)) {
    if (train.size() == n_train) break;
    if (std::find(train.begin(), train.end(), o->config) == train.end()) train.push_back(o->config);
  }
  Rng fill_rng = step_rng(cfg.seed, 0, kPool);
  while (train.size() < n_train) {
    Configuration c = sample_uniform(cfg.space, fill_rng);
    if (std::find(train.begin(), train.end(), c) == train.end()) train.push_back(std::move(c));
  }

  std::size_t iter = cfg.n_pre;
  std::size_t failed = 0;
  auto record = [&](const Configuration& c) {
    result.history.push_back(evaluate_at(*evaluator, cfg, ++iter, Fidelity::kPost, c));
    if (!result.history.back().ok() && ++failed > n_train)
      throw RunAbortedError("aborted: too many failed expensive evaluations");
  };
  for (const auto& c : train) record(c);

  for (std::size_t k = 0; k < n_train; ++k) {
    Points x;
    std::vector<double> y;
    for (const auto& o : result.history) {
      if (o.fidelity != Fidelity::kPost || !o.ok()) continue;
      x.push_back(encode(o.config, cfg.space));
      y.push_back(o.fom.effective);
    }
    Rng rng = step_rng(cfg.seed, iter + 1, kPool);
    std::vector<Configuration> pool;
    for (std::size_t i = 0; i < cfg.beta_pool_size; ++i) pool.push_back(sample_uniform(cfg.space, rng));
    if (x.empty()) {
      record(pool.front());
      continue;
    }
    const double best = *std::max_element(y.begin(), y.end());
    Rng fit_rng = step_rng(cfg.seed, iter + 1, kFitBeta);
    const GpModel gp = fit_gp(std::move(x), std::move(y), true, fit_rng);
    std::vector<Candidate> scores;
    for (const auto& c : pool) {
      const Posterior p = gp.posterior(encode(c, cfg.space));
      scores.push_back({expected_improvement(p.mean, p.variance, best), p.mean});
    }
    record(pool[argmax(scores)]);
  }
  finalize_result(result);
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

RunResult run_method(const RunConfig& cfg, Method method, std::size_t n_train) {
  switch (method) {
    case Method::kCoupled: return run_coupled(cfg);
    case Method::kPlain: return run_plain_baseline(cfg);
    case Method::kFusion: return run_fusion_baseline(cfg, n_train == 0 ? cfg.expensive_budget() : n_train);
  }
  throw ConfigError("unknown method");
}

}  // namespace cbo
