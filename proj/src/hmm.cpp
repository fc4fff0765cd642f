#include "adavu/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "adavu/error.hpp"
#include "adavu/kmeans.hpp"
#include "adavu/rng.hpp"

namespace adavu {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  if (m == kNegInf) return kNegInf;
  return m + std::log((v.array() - m).exp().sum());
}

void check_observations(const GaussianHmm& hmm, const Eigen::MatrixXd& obs) {
  if (obs.rows() == 0) throw DomainError("empty observation sequence");
  if (obs.cols() != hmm.dim()) {
    throw DomainError(fmt::format("model `{}` expects {}-dimensional observations, got {}", hmm.label, hmm.dim(),
                                  obs.cols()));
  }
  if (!obs.allFinite()) throw DomainError("observation sequence contains non-finite values");
}

// T x S matrix of log b_j(o_t).
Eigen::MatrixXd emission_table(const GaussianHmm& hmm, const Eigen::MatrixXd& obs) {
  Eigen::MatrixXd b(obs.rows(), hmm.states());
  for (Eigen::Index t = 0; t < obs.rows(); ++t) {
    for (Eigen::Index s = 0; s < hmm.states(); ++s) b(t, s) = emission_log_density(hmm, s, obs.row(t).transpose());
  }
  return b;
}

Eigen::MatrixXd log_of(const Eigen::MatrixXd& m) {
  return m.unaryExpr([](double v) { return v > 0.0 ? std::log(v) : kNegInf; });
}

struct Posterior {
  double log_likelihood = 0.0;
  Eigen::MatrixXd gamma;  // T x S
  Eigen::MatrixXd xi;     // S x S summed over t
};

Posterior forward_backward(const GaussianHmm& hmm, const Eigen::MatrixXd& obs) {
  const Eigen::Index n = obs.rows();
  const Eigen::Index s_count = hmm.states();
  const Eigen::MatrixXd lb = emission_table(hmm, obs);
  const Eigen::MatrixXd la = log_of(hmm.transition);
  const Eigen::VectorXd lpi = log_of(hmm.pi);

  Eigen::MatrixXd alpha(n, s_count), beta(n, s_count);
  Eigen::VectorXd tmp(s_count);
  for (Eigen::Index j = 0; j < s_count; ++j) alpha(0, j) = lpi[j] + lb(0, j);
  for (Eigen::Index t = 1; t < n; ++t) {
    for (Eigen::Index j = 0; j < s_count; ++j) {
      for (Eigen::Index i = 0; i < s_count; ++i) tmp[i] = alpha(t - 1, i) + la(i, j);
      alpha(t, j) = log_sum_exp(tmp) + lb(t, j);
    }
  }
  beta.row(n - 1).setZero();
  for (Eigen::Index t = n - 2; t >= 0; --t) {
    for (Eigen::Index i = 0; i < s_count; ++i) {
      for (Eigen::Index j = 0; j < s_count; ++j) tmp[j] = la(i, j) + lb(t + 1, j) + beta(t + 1, j);
      beta(t, i) = log_sum_exp(tmp);
    }
  }

  Posterior p;
  p.log_likelihood = log_sum_exp(alpha.row(n - 1).transpose());
  if (!std::isfinite(p.log_likelihood)) {
    throw NumericError(fmt::format("non-finite log-likelihood while training `{}`", hmm.label));
  }
  p.gamma = (alpha + beta).array() - p.log_likelihood;
  p.gamma = p.gamma.array().exp();
  p.xi = Eigen::MatrixXd::Zero(s_count, s_count);
  for (Eigen::Index t = 0; t + 1 < n; ++t) {
    for (Eigen::Index i = 0; i < s_count; ++i) {
      for (Eigen::Index j = 0; j < s_count; ++j) {
        const double v = alpha(t, i) + la(i, j) + lb(t + 1, j) + beta(t + 1, j) - p.log_likelihood;
        if (v > kNegInf) p.xi(i, j) += std::exp(v);
      }
    }
  }
  return p;
}

}  // namespace

void GaussianHmm::validate() const {
  const Eigen::Index s = states();
  if (s < 1) throw DomainError("HMM needs at least one state");
  if (transition.rows() != s || transition.cols() != s) throw DomainError("transition matrix must be S x S");
  if (means.rows() != s || variances.rows() != s || variances.cols() != means.cols() || means.cols() < 1) {
    throw DomainError("emission parameters must be S x d");
  }
  if ((pi.array() < 0.0).any() || std::abs(pi.sum() - 1.0) > 1e-9) {
    throw DomainError(fmt::format("initial distribution of `{}` does not sum to 1", label));
  }
  for (Eigen::Index i = 0; i < s; ++i) {
    if ((transition.row(i).array() < 0.0).any() || std::abs(transition.row(i).sum() - 1.0) > 1e-9) {
      throw DomainError(fmt::format("transition row {} of `{}` does not sum to 1", i, label));
    }
  }
  if (!means.allFinite() || !variances.allFinite() || (variances.array() <= 0.0).any()) {
    throw DomainError(fmt::format("emission parameters of `{}` must be finite with positive variances", label));
  }
}

double emission_log_density(const GaussianHmm& hmm, Eigen::Index state, const Eigen::Ref<const Eigen::VectorXd>& x) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double v = hmm.variances(state, k);
    const double d = x[k] - hmm.means(state, k);
    acc += std::log(2.0 * std::numbers::pi * v) + d * d / v;
  }
  return -0.5 * acc;
}

double hmm_log_likelihood(const GaussianHmm& hmm, const Eigen::MatrixXd& observations) {
  check_observations(hmm, observations);
  const Eigen::MatrixXd lb = emission_table(hmm, observations);
  const Eigen::Index s_count = hmm.states();
  // Emissions are shifted by their per-step maximum before exponentiating so
  // the scaled recursion cannot underflow on sharply peaked densities.
  double total = 0.0;
  Eigen::VectorXd alpha(s_count);
  for (Eigen::Index t = 0; t < observations.rows(); ++t) {
    const double m = lb.row(t).maxCoeff();
    const Eigen::VectorXd b = (lb.row(t).transpose().array() - m).exp();
    if (t == 0) {
      alpha = hmm.pi.cwiseProduct(b);
    } else {
      alpha = (hmm.transition.transpose() * alpha).cwiseProduct(b);
    }
    const double c = alpha.sum();
    if (!(c > 0.0) || !std::isfinite(c)) return hmm_log_likelihood_logspace(hmm, observations);
    alpha /= c;
    total += std::log(c) + m;
  }
  return total;
}

double hmm_log_likelihood_logspace(const GaussianHmm& hmm, const Eigen::MatrixXd& observations) {
  check_observations(hmm, observations);
  const Eigen::MatrixXd lb = emission_table(hmm, observations);
  const Eigen::MatrixXd la = log_of(hmm.transition);
  const Eigen::Index s_count = hmm.states();
  Eigen::VectorXd alpha = log_of(hmm.pi) + lb.row(0).transpose();
  Eigen::VectorXd next(s_count), tmp(s_count);
  for (Eigen::Index t = 1; t < observations.rows(); ++t) {
    for (Eigen::Index j = 0; j < s_count; ++j) {
      tmp = alpha + la.col(j);
      next[j] = log_sum_exp(tmp) + lb(t, j);
    }
    alpha.swap(next);
  }
  return log_sum_exp(alpha);
}

ViterbiResult viterbi(const GaussianHmm& hmm, const Eigen::MatrixXd& observations) {
  check_observations(hmm, observations);
  const Eigen::MatrixXd lb = emission_table(hmm, observations);
  const Eigen::MatrixXd la = log_of(hmm.transition);
  const Eigen::Index n = observations.rows();
  const Eigen::Index s_count = hmm.states();
  Eigen::MatrixXd delta(n, s_count);
  Eigen::MatrixXi back(n, s_count);
  delta.row(0) = (log_of(hmm.pi) + lb.row(0).transpose()).transpose();
  for (Eigen::Index t = 1; t < n; ++t) {
    for (Eigen::Index j = 0; j < s_count; ++j) {
      double best = kNegInf;
      int arg = 0;
      for (Eigen::Index i = 0; i < s_count; ++i) {
        const double v = delta(t - 1, i) + la(i, j);
        if (v > best) {
          best = v;
          arg = static_cast<int>(i);
        }
      }
      delta(t, j) = best + lb(t, j);
      back(t, j) = arg;
    }
  }
  ViterbiResult r;
  r.path.resize(static_cast<std::size_t>(n));
  double best = kNegInf;
  int state = 0;
  for (Eigen::Index j = 0; j < s_count; ++j) {
    if (delta(n - 1, j) > best) {
      best = delta(n - 1, j);
      state = static_cast<int>(j);
    }
  }
  r.log_probability = best;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    r.path[static_cast<std::size_t>(t)] = state;
    if (t > 0) state = back(t, state);
  }
  return r;
}

GaussianHmm hmm_fit(std::span<const Eigen::MatrixXd> sequences, int n_states, const HmmConfig& config,
                    std::uint64_t seed, EmTrace* trace) {
  if (sequences.empty()) throw DomainError("HMM training set is empty");
  if (n_states < 1) throw DomainError("HMM needs at least one state");
  if (!(config.variance_floor > 0.0)) throw DomainError("HMM variance floor must be positive");
  const Eigen::Index dim = sequences.front().cols();
  Eigen::Index total = 0;
  for (const auto& seq : sequences) {
    if (seq.rows() == 0) throw DomainError("HMM training set holds an empty sequence");
    if (seq.cols() != dim) {
      throw DomainError(fmt::format("HMM training sequences mix dimensions {} and {}", dim, seq.cols()));
    }
    if (!seq.allFinite()) throw DomainError("HMM training sequence contains non-finite values");
    total += seq.rows();
  }
  const Eigen::Index s_count = n_states;
  if (total < s_count) {
    throw DomainError(fmt::format("{} observations cannot train {} states", total, s_count));
  }
  const double floor = config.variance_floor;
  Rng rng(seed);

  Eigen::VectorXd global_mean = Eigen::VectorXd::Zero(dim);
  for (const auto& seq : sequences) global_mean += seq.colwise().sum().transpose();
  global_mean /= static_cast<double>(total);
  Eigen::VectorXd global_var = Eigen::VectorXd::Zero(dim);
  for (const auto& seq : sequences) {
    global_var += (seq.rowwise() - global_mean.transpose()).array().square().colwise().sum().matrix().transpose();
  }
  global_var = (global_var / static_cast<double>(total)).cwiseMax(floor);

  Eigen::MatrixXd all(total, dim);
  {
    Eigen::Index row = 0;
    for (const auto& seq : sequences) {
      all.middleRows(row, seq.rows()) = seq;
      row += seq.rows();
    }
  }

  // Uniform temporal segmentation seeds one Lloyd refinement of the emission
  // means. On cyclic posture orders every chunk mixes postures, so k-means++
  // restarts compete with it and the tightest clustering wins.
  Eigen::VectorXd count = Eigen::VectorXd::Zero(s_count);
  Eigen::MatrixXd seg_means = Eigen::MatrixXd::Zero(s_count, dim);
  for (const auto& seq : sequences) {
    for (Eigen::Index t = 0; t < seq.rows(); ++t) {
      const Eigen::Index s = t * s_count / seq.rows();
      count[s] += 1.0;
      seg_means.row(s) += seq.row(t);
    }
  }
  for (Eigen::Index s = 0; s < s_count; ++s) {
    if (count[s] > 0.0) seg_means.row(s) /= count[s];
    else seg_means.row(s) = global_mean.transpose();
  }
  KMeansResult best = lloyd(all, seg_means);
  for (int r = 0; r < config.kmeans_restarts; ++r) {
    const auto picks = kmeans_plus_plus(all, n_states, rng);
    Eigen::MatrixXd centers(s_count, dim);
    for (Eigen::Index s = 0; s < s_count; ++s) centers.row(s) = all.row(picks[static_cast<std::size_t>(s)]);
    KMeansResult candidate = lloyd(all, std::move(centers));
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }

  GaussianHmm hmm;
  hmm.means = best.centers;
  hmm.variances.resize(s_count, dim);
  Eigen::MatrixXd trans = Eigen::MatrixXd::Ones(s_count, s_count);
  Eigen::VectorXd start = Eigen::VectorXd::Ones(s_count);
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(s_count, dim);
  count.setZero();
  {
    std::size_t i = 0;
    for (const auto& seq : sequences) {
      for (Eigen::Index t = 0; t < seq.rows(); ++t, ++i) {
        const int s = best.assignment[i];
        count[s] += 1.0;
        sq.row(s) += (seq.row(t) - hmm.means.row(s)).array().square().matrix();
        if (t == 0) start[s] += 1.0;
        if (t + 1 < seq.rows()) trans(s, best.assignment[i + 1]) += 1.0;
      }
    }
  }
  for (Eigen::Index s = 0; s < s_count; ++s) {
    if (count[s] >= 2.0) hmm.variances.row(s) = (sq.row(s) / count[s]).cwiseMax(floor);
    else hmm.variances.row(s) = global_var.transpose();
    for (Eigen::Index j = 0; j < s_count; ++j) trans(s, j) += 0.1 * rng.uniform();
    trans.row(s) /= trans.row(s).sum();
  }
  hmm.transition = trans;
  hmm.pi = start / start.sum();

  if (trace) {
    trace->objective.clear();
    trace->converged = false;
  }
  double prev = 0.0;
  for (long iter = 0; iter < config.max_iterations; ++iter) {
    std::vector<Posterior> post;
    post.reserve(sequences.size());
    double ll = 0.0;
    for (const auto& seq : sequences) {
      post.push_back(forward_backward(hmm, seq));
      ll += post.back().log_likelihood;
    }
    if (trace) trace->objective.push_back(ll);
    if (iter > 0 && ll - prev < config.tolerance * std::abs(prev)) {
      if (trace) trace->converged = true;
      break;
    }
    prev = ll;

    Eigen::VectorXd pi = Eigen::VectorXd::Zero(s_count);
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(s_count, s_count);
    Eigen::VectorXd occ = Eigen::VectorXd::Zero(s_count);
    Eigen::MatrixXd mean_acc = Eigen::MatrixXd::Zero(s_count, dim);
    for (std::size_t q = 0; q < sequences.size(); ++q) {
      pi += post[q].gamma.row(0).transpose();
      xi += post[q].xi;
      occ += post[q].gamma.colwise().sum().transpose();
      mean_acc += post[q].gamma.transpose() * sequences[q];
    }
    hmm.pi = pi / pi.sum();
    for (Eigen::Index i = 0; i < s_count; ++i) {
      const double row = xi.row(i).sum();
      if (row > 0.0) hmm.transition.row(i) = xi.row(i) / row;
    }
    Eigen::MatrixXd var_acc = Eigen::MatrixXd::Zero(s_count, dim);
    for (Eigen::Index s = 0; s < s_count; ++s) {
      if (!(occ[s] > 0.0)) continue;
      hmm.means.row(s) = mean_acc.row(s) / occ[s];
      for (std::size_t q = 0; q < sequences.size(); ++q) {
        const auto& seq = sequences[q];
        for (Eigen::Index t = 0; t < seq.rows(); ++t) {
          var_acc.row(s) += post[q].gamma(t, s) * (seq.row(t) - hmm.means.row(s)).array().square().matrix();
        }
      }
      hmm.variances.row(s) = (var_acc.row(s) / occ[s]).cwiseMax(floor);
    }
  }
  return hmm;
}

std::vector<std::string> AdavuBank::labels() const {
  std::vector<std::string> out;
  for (const auto& m : models) out.push_back(m.label);
  return out;
}

void AdavuBank::validate() const {
  if (models.empty()) throw DomainError("HMM bank is empty");
  std::set<std::string> seen;
  for (const auto& m : models) {
    m.validate();
    if (!seen.insert(m.label).second) throw DomainError("HMM bank repeats label `" + m.label + "`");
    if (m.dim() != dim()) throw DomainError("HMM bank mixes observation dimensions");
  }
}

int distinct_posture_count(std::span<const ObservationSequence> sequences) {
  std::set<std::string> ids;
  for (const auto& seq : sequences) {
    for (const auto& p : seq.postures) {
      if (!p.empty() && p.front() != 'T') ids.insert(p);
    }
  }
  return static_cast<int>(ids.size());
}

AdavuBank train_bank(std::span<const ObservationSequence> dataset, const HmmConfig& config,
                     std::vector<EmTrace>* traces) {
  if (dataset.empty()) throw DomainError("sequence dataset is empty");
  std::set<std::string> labels;
  for (const auto& seq : dataset) {
    if (seq.label.empty()) throw DomainError("training sequence `" + seq.source + "` has no label");
    labels.insert(seq.label);
  }
  AdavuBank bank;
  for (const auto& label : labels) {
    std::vector<ObservationSequence> own;
    std::vector<Eigen::MatrixXd> obs;
    for (const auto& seq : dataset) {
      if (seq.label == label) {
        own.push_back(seq);
        obs.push_back(seq.observations);
      }
    }
    int states = 0;
    if (auto it = config.states_per_label.find(label); it != config.states_per_label.end()) states = it->second;
    else if (config.n_states > 0) states = config.n_states;
    else states = distinct_posture_count(own);
    if (states < 1) {
      throw DomainError(fmt::format("cannot infer the state count of `{}`: sequences carry no posture ids", label));
    }
    EmTrace trace{label, {}, false};
    GaussianHmm hmm = hmm_fit(obs, states, config, derive_seed(config.seed, label), traces ? &trace : nullptr);
    hmm.label = label;
    bank.models.push_back(std::move(hmm));
    if (traces) traces->push_back(std::move(trace));
  }
  return bank;
}

Prediction classify(const AdavuBank& bank, const Eigen::MatrixXd& observations) {
  if (bank.models.empty()) throw DomainError("HMM bank is empty");
  Prediction p;
  for (const auto& m : bank.models) p.scores.push_back(hmm_log_likelihood(m, observations));
  p.index = argmax_lowest(p.scores);
  p.label = bank.models[p.index].label;
  return p;
}

}  // namespace adavu
