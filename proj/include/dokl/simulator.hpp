#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dokl/agent.hpp"
#include "dokl/datagen.hpp"
#include "dokl/topology.hpp"

namespace dokl {

// Per-round observation feed. round_samples fills one sample per agent for
// round r (0-based) and returns false when the feed is exhausted, which the
// engine reports as an early stop. Implementations must be pure in
// (agent, round) so parallel scheduling cannot change what anyone sees.
class DataSource {
 public:
  virtual ~DataSource() = default;
  virtual int agents() const = 0;
  virtual Eigen::Index feature_dim() const = 0;
  virtual bool round_samples(std::uint64_t r, std::vector<Sample>& out) const = 0;
};

// Synthetic field feed: all agents observe at the shared scalar feature
// t / T_horizon (the normalized 1-based round index), agent i's target is
// component i of the field observation at that round. The field phase uses
// the raw integer round index.
class FieldSource : public DataSource {
 public:
  FieldSource(FieldModel model, std::uint64_t T_horizon);
  int agents() const override;
  Eigen::Index feature_dim() const override { return 1; }
  bool round_samples(std::uint64_t r, std::vector<Sample>& out) const override;
  const FieldModel& model() const { return model_; }

 private:
  FieldModel model_;
  std::uint64_t horizon_;
};

enum class CsvMode {
  Sequential,  // row r of every node feeds round r; stops when any runs out
  Resample,    // each (agent, round) draws uniformly from the node's rows
};

class CsvSource : public DataSource {
 public:
  CsvSource(NodeTable table, CsvMode mode, std::uint64_t seed);
  int agents() const override;
  Eigen::Index feature_dim() const override { return table_.feature_dim; }
  bool round_samples(std::uint64_t r, std::vector<Sample>& out) const override;
  const NodeTable& table() const { return table_; }

 private:
  NodeTable table_;
  CsvMode mode_;
  std::uint64_t seed_;
};

// One metrics row. Everything here is measured on the round-t snapshot: the
// functions and duals that processed sample t, before that round's updates.
// Slacks are h_ij(f_i(x_i), f_j(x_i)) - gamma_ij per directed edge in the
// topology's fixed edge order; running averages are exact prefix means.
struct RoundMetrics {
  std::uint64_t t = 0;  // 1-based round index
  double global_loss = 0.0;
  double avg_loss = 0.0;
  Eigen::VectorXd edge_slack;
  Eigen::VectorXd avg_edge_slack;
  double max_violation = 0.0;       // max_e edge_slack[e]
  double avg_violation = 0.0;       // prefix mean of mean_e edge_slack[e]
  double mean_violation_pos = 0.0;  // mean_e max(edge_slack[e], 0)
  long long total_model_order = 0;
  long long max_model_order = 0;
  double dual_norm = 0.0;
};

struct RunOptions {
  bool parallel = false;
  int threads = 0;  // 0 picks a small default
  // When set, the engine also measures the per-round compression error
  // ||f_{t+1} - f~_{t+1}||_H per agent and records the running maximum.
  bool track_compression_error = false;
  // When set, RunResult::bandwidths holds each agent's kernel bandwidth per
  // round (snapshot convention, like the metrics).
  bool record_bandwidths = false;
};

struct RunResult {
  std::vector<RoundMetrics> metrics;
  std::vector<AgentState> final_states;
  std::uint64_t rounds_completed = 0;
  bool early_stop = false;
  std::string warning;
  double max_compression_error = 0.0;
  std::uint64_t exchange_evaluations = 0;  // total f_j(x_i) network reads
  std::vector<Eigen::VectorXd> bandwidths;  // per round, V entries
};

// Zero-initialized agents for a topology: empty expansions, duals at the
// topology's initial values (normally zero), shared specs.
std::vector<AgentState> make_agents(const Topology& topo,
                                    const KernelSpec& spec,
                                    const LossSpec& loss,
                                    const ProximitySpec& prox);

// Degenerate single-agent graph (no edges, no duals) for pooled or
// stand-alone runs.
Topology single_agent_topology();

// The full constrained round loop: per round (1) every agent draws its
// sample, (2) exchange delivers f_j(x_i) for every directed edge using the
// round-start functions, (3) every agent runs its primal and dual step from
// that snapshot, (4) a metrics row is appended. Deterministic for a fixed
// seed regardless of options.parallel.
RunResult run_primal_dual(const Topology& topo, std::vector<AgentState> agents,
                          const DataSource& source, const HyperParams& hp,
                          std::uint64_t T, const RunOptions& options = {});

// Approximate-satisfaction baseline: duals pinned at penalty_c for every
// directed edge (no dual ascent); otherwise identical to run_primal_dual.
RunResult run_penalty(const Topology& topo, std::vector<AgentState> agents,
                      const DataSource& source, const HyperParams& hp,
                      std::uint64_t T, double penalty_c,
                      const RunOptions& options = {});

// Fixed-span baseline: the dictionary never changes; the gradient atom is
// spread over the span by a least-squares projection (weights-only update)
// and compression is skipped. The dual recursion is unchanged. Requires a
// fixed bandwidth. An empty dictionary pins every function at zero.
RunResult run_rbf(const Topology& topo, std::vector<AgentState> agents,
                  const DataSource& source, const HyperParams& hp,
                  std::uint64_t T, const Eigen::MatrixXd& fixed_dictionary,
                  const RunOptions& options = {});

// Pools the V per-agent streams into one round-major, agent-minor stream of
// V*T samples and trains a single unconstrained function on it. One metrics
// row per pooled sample.
RunResult run_centralized(const DataSource& source, const HyperParams& hp,
                          std::uint64_t T, const KernelSpec& spec,
                          const LossSpec& loss,
                          const RunOptions& options = {});

// Model-order envelope against the packing bound M <= beta (R / alpha)^{2p}
// with R = C + L_h E max_mu, where max_mu is bounded by the recorded dual
// norm. beta is the largest observed ratio; the check passes when every
// order is finite and the second half of the run alone reproduces beta
// within a factor of two (the envelope is not a startup artifact).
struct ModelOrderBoundReport {
  double beta = 0.0;
  double beta_second_half = 0.0;
  bool ok = false;
};
ModelOrderBoundReport check_model_order_bound(
    const std::vector<RoundMetrics>& history, double alpha, int p, double C,
    double L_h, double E_directed);

}  // namespace dokl
