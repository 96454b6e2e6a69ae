#include "dokl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "dokl/errors.hpp"
#include "dokl/komp.hpp"
#include "dokl/rng.hpp"

namespace dokl {

FieldSource::FieldSource(FieldModel model, std::uint64_t T_horizon)
    : model_(std::move(model)), horizon_(T_horizon) {
  if (horizon_ == 0) {
    throw std::invalid_argument("FieldSource: horizon must be positive");
  }
}

int FieldSource::agents() const {
  return static_cast<int>(model_.mean.size());
}

bool FieldSource::round_samples(std::uint64_t r,
                                std::vector<Sample>& out) const {
  const FieldRound round = sample_round(model_, r + 1);
  const double x =
      static_cast<double>(r + 1) / static_cast<double>(horizon_);
  const int V = agents();
  out.resize(static_cast<std::size_t>(V));
  for (int i = 0; i < V; ++i) {
    out[static_cast<std::size_t>(i)].x = Eigen::VectorXd::Constant(1, x);
    out[static_cast<std::size_t>(i)].y = round.y[i];
  }
  return true;
}

CsvSource::CsvSource(NodeTable table, CsvMode mode, std::uint64_t seed)
    : table_(std::move(table)), mode_(mode), seed_(seed) {}

int CsvSource::agents() const {
  return static_cast<int>(table_.samples.size());
}

bool CsvSource::round_samples(std::uint64_t r,
                              std::vector<Sample>& out) const {
  const int V = agents();
  out.resize(static_cast<std::size_t>(V));
  for (int i = 0; i < V; ++i) {
    const auto& rows = table_.samples[static_cast<std::size_t>(i)];
    if (mode_ == CsvMode::Sequential) {
      if (r >= rows.size()) return false;
      out[static_cast<std::size_t>(i)] = rows[r];
    } else {
      const CounterRng rng(seed_, StreamKind::DataDraw,
                           static_cast<std::uint64_t>(i), r);
      const auto idx = static_cast<std::size_t>(rng.uniform(0) *
                                                static_cast<double>(rows.size()));
      out[static_cast<std::size_t>(i)] = rows[std::min(idx, rows.size() - 1)];
    }
  }
  return true;
}

std::vector<AgentState> make_agents(const Topology& topo,
                                    const KernelSpec& spec,
                                    const LossSpec& loss,
                                    const ProximitySpec& prox) {
  std::vector<AgentState> agents(static_cast<std::size_t>(topo.V));
  for (int i = 0; i < topo.V; ++i) {
    auto& a = agents[static_cast<std::size_t>(i)];
    a.id = i;
    a.f.spec = spec;
    a.f.D.resize(0, 0);
    a.f.w.resize(0);
    a.loss = loss;
    a.prox = prox;
    for (int j : topo.adjacency[static_cast<std::size_t>(i)]) {
      a.out_duals[j] =
          topo.duals[static_cast<std::size_t>(topo.directed_index(i, j))];
    }
  }
  return agents;
}

Topology single_agent_topology() {
  Topology t;
  t.V = 1;
  t.adjacency.assign(1, {});
  t.edge_offset.assign(1, 0);
  return t;
}

namespace {

enum class Mode { PrimalDual, Penalty, Rbf };

// Round-major, agent-minor flattening of a multi-agent feed into a
// single-agent stream of V * T samples.
class PooledSource : public DataSource {
 public:
  PooledSource(const DataSource& base) : base_(base) {}
  int agents() const override { return 1; }
  Eigen::Index feature_dim() const override { return base_.feature_dim(); }
  bool round_samples(std::uint64_t r, std::vector<Sample>& out) const override {
    const auto V = static_cast<std::uint64_t>(base_.agents());
    std::vector<Sample> all;
    if (!base_.round_samples(r / V, all)) return false;
    out.assign(1, all[static_cast<std::size_t>(r % V)]);
    return true;
  }

 private:
  const DataSource& base_;
};

struct RbfPlan {
  Eigen::MatrixXd D;     // fixed dictionary
  Eigen::MatrixXd gram;  // unjittered K_DD (ball projection norms)
  Eigen::LDLT<Eigen::MatrixXd> solver;  // K_DD + jitter I
};

void validate_run(const Topology& topo, const std::vector<AgentState>& agents,
                  const DataSource& source, const HyperParams& hp) {
  validate(hp);
  if (static_cast<int>(agents.size()) != topo.V) {
    throw std::invalid_argument("run: expected " + std::to_string(topo.V) +
                                " agents, got " +
                                std::to_string(agents.size()));
  }
  if (source.agents() != topo.V) {
    throw std::invalid_argument("run: data source serves " +
                                std::to_string(source.agents()) +
                                " agents, topology has " +
                                std::to_string(topo.V));
  }
  for (int i = 0; i < topo.V; ++i) {
    const auto& a = agents[static_cast<std::size_t>(i)];
    if (a.id != i) {
      throw std::invalid_argument("run: agent " + std::to_string(i) +
                                  " carries id " + std::to_string(a.id));
    }
    const auto& nb = topo.adjacency[static_cast<std::size_t>(i)];
    if (a.out_duals.size() != nb.size()) {
      throw std::invalid_argument("run: agent " + std::to_string(i) +
                                  " dual count does not match its degree");
    }
    for (int j : nb) {
      if (!a.out_duals.contains(j)) {
        throw std::invalid_argument("run: agent " + std::to_string(i) +
                                    " is missing the dual toward " +
                                    std::to_string(j));
      }
    }
  }
}

// One agent's full update for the round; pure given the snapshot.
struct AgentUpdate {
  KernelExpansion f;
  std::map<int, double> duals;
  double compression_error = 0.0;
};

AgentUpdate update_agent(const Topology& topo, const AgentState& state,
                         const Sample& sample,
                         const std::map<int, double>& evals,
                         const HyperParams& hp, Mode mode,
                         const RbfPlan* rbf, bool track_compression) {
  AgentUpdate out;

  // Dual ascent reads the same round-t snapshot the primal step uses.
  if (mode == Mode::Penalty) {
    out.duals = state.out_duals;  // pinned
  } else {
    std::map<int, double> gamma;
    for (const auto& [j, mu] : state.out_duals) {
      (void)mu;
      gamma[j] = topo.gamma[static_cast<std::size_t>(
          topo.directed_index(state.id, j))];
    }
    out.duals = dual_step(state, sample, evals, gamma, hp);
  }

  if (mode == Mode::Rbf) {
    // Weights-only recursion on the fixed span: shrink, then add the new
    // gradient atom through its least-squares projection onto the span.
    if (rbf->D.cols() == 0) {
      out.f = state.f;
      return out;
    }
    const double fx = evaluate(state.f, sample.x);
    double coef = loss_deriv(state.loss, fx, sample.y);
    for (const auto& [j, mu] : state.out_duals) {
      coef += mu * proximity_deriv_first(state.prox, fx, evals.at(j));
    }
    const Eigen::VectorXd kx = kernel_vector(state.f.spec, rbf->D, sample.x);
    Eigen::VectorXd w = (1.0 - hp.eta * hp.lambda) * state.f.w -
                        hp.eta * coef * rbf->solver.solve(kx);
    const double norm2 = w.dot(rbf->gram * w);
    if (norm2 > hp.radius_RB * hp.radius_RB) {
      w *= hp.radius_RB / std::sqrt(norm2);
    }
    out.f = {state.f.spec, rbf->D, std::move(w)};
    return out;
  }

  PrimalDiagnostics diag;
  const AgentState next = primal_step(state, sample, evals, hp,
                                      track_compression ? &diag : nullptr);
  out.f = next.f;
  out.compression_error = diag.compression_error;
  return out;
}

RunResult engine(const Topology& topo, std::vector<AgentState> agents,
                 const DataSource& source, const HyperParams& hp,
                 std::uint64_t T, Mode mode, double penalty_c,
                 const Eigen::MatrixXd* fixed_dict,
                 const RunOptions& options) {
  validate_run(topo, agents, source, hp);
  const int V = topo.V;
  const int E2 = topo.directed_edge_count();

  RbfPlan rbf;
  if (mode == Mode::Rbf) {
    if (hp.adapt_bandwidth) {
      throw std::invalid_argument(
          "rbf baseline requires a fixed bandwidth (adapt_bandwidth off)");
    }
    rbf.D = *fixed_dict;
    if (rbf.D.cols() > 0) {
      rbf.gram = kernel_matrix(agents[0].f.spec, rbf.D, rbf.D);
      Eigen::MatrixXd Kj = rbf.gram;
      Kj.diagonal().array() += std::max(hp.komp_jitter, 1e-10);
      rbf.solver.compute(Kj);
      if (rbf.solver.info() != Eigen::Success) {
        throw NumericError("rbf baseline: fixed-span Gram factorization failed");
      }
      for (auto& a : agents) {
        a.f.D = rbf.D;
        a.f.w = Eigen::VectorXd::Zero(rbf.D.cols());
      }
    }
  }
  if (mode == Mode::Penalty) {
    if (penalty_c < 0.0) {
      throw std::invalid_argument("penalty coefficient must be >= 0");
    }
    for (auto& a : agents) {
      for (auto& [j, mu] : a.out_duals) {
        (void)j;
        mu = penalty_c;
      }
    }
  }

  RunResult result;
  result.metrics.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(T, 1u << 20)));

  double loss_sum = 0.0;
  double mean_slack_sum = 0.0;
  Eigen::VectorXd edge_slack_sum = Eigen::VectorXd::Zero(E2);

  std::vector<Sample> samples;
  std::vector<double> fx(static_cast<std::size_t>(V));
  std::vector<std::map<int, double>> evals(static_cast<std::size_t>(V));
  std::vector<AgentUpdate> updates(static_cast<std::size_t>(V));

  const unsigned hw = std::thread::hardware_concurrency();
  const int threads =
      options.parallel
          ? std::max(1, options.threads > 0 ? options.threads
                                            : static_cast<int>(std::min(hw, 4u)))
          : 1;

  for (std::uint64_t r = 0; r < T; ++r) {
    if (!source.round_samples(r, samples)) {
      result.early_stop = true;
      result.warning = "data source exhausted at round " +
                       std::to_string(r + 1) + " of " + std::to_string(T);
      break;
    }

    // Exchange: every agent's own evaluation plus f_j(x_i) per directed
    // edge, all on round-start functions. 2|E| values cross the network.
    for (int i = 0; i < V; ++i) {
      fx[static_cast<std::size_t>(i)] = evaluate(
          agents[static_cast<std::size_t>(i)].f,
          samples[static_cast<std::size_t>(i)].x);
    }
    for (int i = 0; i < V; ++i) {
      auto& row = evals[static_cast<std::size_t>(i)];
      row.clear();
      for (int j : topo.adjacency[static_cast<std::size_t>(i)]) {
        row[j] = evaluate(agents[static_cast<std::size_t>(j)].f,
                          samples[static_cast<std::size_t>(i)].x);
        ++result.exchange_evaluations;
      }
    }

    // Metrics row from the snapshot, fixed agent-then-neighbor order.
    RoundMetrics m;
    m.t = r + 1;
    for (int i = 0; i < V; ++i) {
      const auto& a = agents[static_cast<std::size_t>(i)];
      m.global_loss += loss(a.loss, fx[static_cast<std::size_t>(i)],
                            samples[static_cast<std::size_t>(i)].y);
      m.total_model_order += a.f.order();
      m.max_model_order = std::max(m.max_model_order,
                                   static_cast<long long>(a.f.order()));
    }
    m.edge_slack.resize(E2);
    double dual_sq = 0.0;
    for (int i = 0; i < V; ++i) {
      const auto& a = agents[static_cast<std::size_t>(i)];
      for (int j : topo.adjacency[static_cast<std::size_t>(i)]) {
        const int e = topo.directed_index(i, j);
        const double h = proximity(a.prox, fx[static_cast<std::size_t>(i)],
                                   evals[static_cast<std::size_t>(i)].at(j));
        m.edge_slack[e] = h - topo.gamma[static_cast<std::size_t>(e)];
        dual_sq += a.out_duals.at(j) * a.out_duals.at(j);
      }
    }
    m.dual_norm = std::sqrt(dual_sq);
    loss_sum += m.global_loss;
    m.avg_loss = loss_sum / static_cast<double>(m.t);
    if (E2 > 0) {
      edge_slack_sum += m.edge_slack;
      m.avg_edge_slack = edge_slack_sum / static_cast<double>(m.t);
      m.max_violation = m.edge_slack.maxCoeff();
      mean_slack_sum += m.edge_slack.mean();
      m.avg_violation = mean_slack_sum / static_cast<double>(m.t);
      m.mean_violation_pos = m.edge_slack.cwiseMax(0.0).mean();
    } else {
      m.avg_edge_slack.resize(0);
    }
    if (!std::isfinite(m.global_loss) || !std::isfinite(m.dual_norm)) {
      throw NumericError("run: non-finite metrics at round " +
                         std::to_string(m.t));
    }
    result.metrics.push_back(std::move(m));
    if (options.record_bandwidths) {
      Eigen::VectorXd bw(V);
      for (int i = 0; i < V; ++i) {
        bw[i] = agents[static_cast<std::size_t>(i)].f.spec.bandwidth;
      }
      result.bandwidths.push_back(std::move(bw));
    }

    // Updates: independent per agent given the snapshot; worker threads
    // write disjoint slots, so scheduling cannot reorder any reduction.
    auto work = [&](int begin, int end, std::exception_ptr& err) {
      try {
        for (int i = begin; i < end; ++i) {
          updates[static_cast<std::size_t>(i)] = update_agent(
              topo, agents[static_cast<std::size_t>(i)],
              samples[static_cast<std::size_t>(i)],
              evals[static_cast<std::size_t>(i)], hp, mode, &rbf,
              options.track_compression_error);
        }
      } catch (...) {
        err = std::current_exception();
      }
    };
    if (threads == 1 || V == 1) {
      std::exception_ptr err;
      work(0, V, err);
      if (err) std::rethrow_exception(err);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errs(static_cast<std::size_t>(threads));
      const int chunk = (V + threads - 1) / threads;
      for (int k = 0; k < threads; ++k) {
        const int begin = k * chunk;
        const int end = std::min(V, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(work, begin, end,
                          std::ref(errs[static_cast<std::size_t>(k)]));
      }
      for (auto& th : pool) th.join();
      for (const auto& err : errs) {
        if (err) std::rethrow_exception(err);
      }
    }

    for (int i = 0; i < V; ++i) {
      auto& a = agents[static_cast<std::size_t>(i)];
      auto& u = updates[static_cast<std::size_t>(i)];
      a.f = std::move(u.f);
      a.out_duals = std::move(u.duals);
      result.max_compression_error =
          std::max(result.max_compression_error, u.compression_error);
    }
    ++result.rounds_completed;
  }

  result.final_states = std::move(agents);
  return result;
}

}  // namespace

RunResult run_primal_dual(const Topology& topo, std::vector<AgentState> agents,
                          const DataSource& source, const HyperParams& hp,
                          std::uint64_t T, const RunOptions& options) {
  return engine(topo, std::move(agents), source, hp, T, Mode::PrimalDual, 0.0,
                nullptr, options);
}

RunResult run_penalty(const Topology& topo, std::vector<AgentState> agents,
                      const DataSource& source, const HyperParams& hp,
                      std::uint64_t T, double penalty_c,
                      const RunOptions& options) {
  return engine(topo, std::move(agents), source, hp, T, Mode::Penalty,
                penalty_c, nullptr, options);
}

RunResult run_rbf(const Topology& topo, std::vector<AgentState> agents,
                  const DataSource& source, const HyperParams& hp,
                  std::uint64_t T, const Eigen::MatrixXd& fixed_dictionary,
                  const RunOptions& options) {
  return engine(topo, std::move(agents), source, hp, T, Mode::Rbf, 0.0,
                &fixed_dictionary, options);
}

RunResult run_centralized(const DataSource& source, const HyperParams& hp,
                          std::uint64_t T, const KernelSpec& spec,
                          const LossSpec& loss, const RunOptions& options) {
  const Topology topo = single_agent_topology();
  std::vector<AgentState> agents =
      make_agents(topo, spec, loss, ProximitySpec{});
  const PooledSource pooled(source);
  const auto V = static_cast<std::uint64_t>(source.agents());
  return engine(topo, std::move(agents), pooled, hp, V * T, Mode::PrimalDual,
                0.0, nullptr, options);
}

ModelOrderBoundReport check_model_order_bound(
    const std::vector<RoundMetrics>& history, double alpha, int p, double C,
    double L_h, double E_directed) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("check_model_order_bound: alpha must be > 0");
  }
  if (p < 1 || history.empty()) {
    throw std::invalid_argument(
        "check_model_order_bound: need p >= 1 and a non-empty history");
  }
  ModelOrderBoundReport report;
  bool finite = true;
  const std::size_t half = history.size() / 2;
  for (std::size_t k = 0; k < history.size(); ++k) {
    const auto& m = history[k];
    const double M = static_cast<double>(m.max_model_order);
    if (!std::isfinite(M) || !std::isfinite(m.dual_norm)) finite = false;
    // dual_norm bounds max_j mu_ij from above, giving a valid envelope.
    const double R = C + L_h * E_directed * m.dual_norm;
    const double ratio =
        M / std::pow(R / alpha, 2.0 * static_cast<double>(p));
    report.beta = std::max(report.beta, ratio);
    if (k >= half) {
      report.beta_second_half = std::max(report.beta_second_half, ratio);
    }
  }
  report.ok = finite && std::isfinite(report.beta) &&
              report.beta_second_half * 2.0 >= report.beta;
  return report;
}

}  // namespace dokl
