#pragma once

#include <cstdint>
#include <vector>

namespace mfnet {

// Discrete hidden-state model whose observation at each time step is a whole
// histogram over a fixed vocabulary (multinomial emission). Used to smooth a
// short sequence of yearly empirical tables.
struct HistogramHmmOptions {
    int hidden_states = 2;
    int max_iterations = 200;
    double tolerance = 1e-8;     // relative log-likelihood change
    double emission_floor = 1e-6; // additive pseudo-count per symbol
    std::uint64_t seed = 1;
};

struct HistogramHmm {
    std::vector<double> initial;                 // K
    std::vector<std::vector<double>> transition; // K x K, row-stochastic
    std::vector<std::vector<double>> emission;   // K x V, row-stochastic
};

struct HistogramHmmFit {
    HistogramHmm model;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
};

using Histogram = std::vector<double>;

// log P(observations) by the forward recursion in log space (multinomial
// coefficients omitted, they do not depend on the parameters).
double log_likelihood(const HistogramHmm &model, const std::vector<Histogram> &observations);

// Baum-Welch. Emission rows start at the pooled histogram with a seeded
// perturbation. Throws DomainError on an empty or ragged sequence.
HistogramHmmFit fit_histogram_hmm(const std::vector<Histogram> &observations, const HistogramHmmOptions &options);

// Stationary distribution of a row-stochastic matrix. Falls back to the
// Cesaro average from the uniform start when the chain is not ergodic.
std::vector<double> stationary_distribution(const std::vector<std::vector<double>> &transition);

// sum_k stationary(k) * emission(k, .)
std::vector<double> emission_mixture(const HistogramHmm &model);

} // namespace mfnet
