#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adavu/dataset.hpp"
#include "adavu/gmm.hpp"

namespace adavu {

// Hidden Markov model with one diagonal Gaussian per state.
struct GaussianHmm {
  std::string label;
  Eigen::VectorXd pi;
  // transition(i, j) = P(state j at t+1 | state i at t).
  Eigen::MatrixXd transition;
  // One row per state.
  Eigen::MatrixXd means;
  Eigen::MatrixXd variances;

  Eigen::Index states() const { return pi.size(); }
  Eigen::Index dim() const { return means.cols(); }

  // Throws DomainError on shape errors, unnormalised pi or rows of A
  // (tolerance 1e-9) and non-positive variances.
  void validate() const;
};

double emission_log_density(const GaussianHmm& hmm, Eigen::Index state, const Eigen::Ref<const Eigen::VectorXd>& x);

// log P(O | hmm) by the scaled forward recursion.
double hmm_log_likelihood(const GaussianHmm& hmm, const Eigen::MatrixXd& observations);
// The same quantity computed entirely in the log domain.
double hmm_log_likelihood_logspace(const GaussianHmm& hmm, const Eigen::MatrixXd& observations);

struct ViterbiResult {
  std::vector<int> path;
  double log_probability = 0.0;
};

// Most probable state path. Among equally probable predecessors the lower
// state index wins, and likewise for the final state.
ViterbiResult viterbi(const GaussianHmm& hmm, const Eigen::MatrixXd& observations);

struct HmmConfig {
  // Forces the state count of every model when positive.
  int n_states = 0;
  // Per-label state counts; take precedence over everything else.
  std::map<std::string, int> states_per_label;
  long max_iterations = 1000;
  // Stop once the relative log-likelihood gain drops below this.
  double tolerance = 1e-8;
  double variance_floor = 1e-4;
  // k-means++ restarts competing with the segmentation seed.
  int kmeans_restarts = 4;
  std::uint64_t seed = 0;
};

// Baum-Welch from a k-means clustering of the observations, seeded by a
// uniform temporal segmentation of every sequence. `trace`
// receives the total log-likelihood after each E-step.
GaussianHmm hmm_fit(std::span<const Eigen::MatrixXd> sequences, int n_states, const HmmConfig& config,
                    std::uint64_t seed, EmTrace* trace = nullptr);

struct AdavuBank {
  std::vector<GaussianHmm> models;

  std::vector<std::string> labels() const;
  Eigen::Index dim() const { return models.empty() ? 0 : models.front().dim(); }
  // Throws DomainError for an empty bank, repeated labels or mixed dims.
  void validate() const;
};

// Distinct posture ids of the sequences, ignoring transition markers (ids
// starting with `T`). Zero when no sequence carries posture ids.
int distinct_posture_count(std::span<const ObservationSequence> sequences);

// One model per label in sorted label order.
AdavuBank train_bank(std::span<const ObservationSequence> dataset, const HmmConfig& config,
                     std::vector<EmTrace>* traces = nullptr);

// Label of the maximum log-likelihood; ties go to the first model.
Prediction classify(const AdavuBank& bank, const Eigen::MatrixXd& observations);

}  // namespace adavu
