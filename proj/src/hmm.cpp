#include "mfnet/hmm.hpp"

#include "mfnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mfnet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

double log_sum_exp(const std::vector<double> &terms)
{
    const double top = *std::max_element(terms.begin(), terms.end());
    if (top == kNegInf)
        return kNegInf;
    double sum = 0.0;
    for (double t : terms)
        sum += std::exp(t - top);
    return top + std::log(sum);
}

void check_observations(const std::vector<Histogram> &observations)
{
    if (observations.empty())
        throw DomainError("no observations");
    const auto v = observations.front().size();
    if (v == 0)
        throw DomainError("empty vocabulary");
    for (const auto &h : observations) {
        if (h.size() != v)
            throw DomainError("observation histograms differ in size");
        for (double x : h)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw DomainError("histogram counts must be finite and non-negative");
    }
}

// log b_k(t) for every hidden state and time step.
std::vector<std::vector<double>> emission_log_terms(const HistogramHmm &model,
                                                    const std::vector<Histogram> &observations)
{
    const std::size_t k_count = model.emission.size();
    std::vector<std::vector<double>> terms(observations.size(), std::vector<double>(k_count, 0.0));
    for (std::size_t t = 0; t < observations.size(); ++t) {
        for (std::size_t k = 0; k < k_count; ++k) {
            double sum = 0.0;
            for (std::size_t v = 0; v < observations[t].size(); ++v) {
                const double n = observations[t][v];
                if (n > 0.0)
                    sum += n * safe_log(model.emission[k][v]);
            }
            terms[t][k] = sum;
        }
    }
    return terms;
}

struct Posteriors {
    std::vector<std::vector<double>> gamma;             // T x K
    std::vector<std::vector<std::vector<double>>> xi;   // (T-1) x K x K
    double log_likelihood = 0.0;
};

Posteriors forward_backward(const HistogramHmm &model, const std::vector<Histogram> &observations)
{
    const std::size_t T = observations.size();
    const std::size_t K = model.initial.size();
    const auto logb = emission_log_terms(model, observations);

    std::vector<std::vector<double>> log_a(K, std::vector<double>(K));
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < K; ++j)
            log_a[i][j] = safe_log(model.transition[i][j]);

    std::vector<std::vector<double>> alpha(T, std::vector<double>(K));
    std::vector<std::vector<double>> beta(T, std::vector<double>(K, 0.0));
    std::vector<double> terms(K);

    for (std::size_t k = 0; k < K; ++k)
        alpha[0][k] = safe_log(model.initial[k]) + logb[0][k];
    for (std::size_t t = 1; t < T; ++t)
        for (std::size_t j = 0; j < K; ++j) {
            for (std::size_t i = 0; i < K; ++i)
                terms[i] = alpha[t - 1][i] + log_a[i][j];
            alpha[t][j] = log_sum_exp(terms) + logb[t][j];
        }
    for (std::size_t t = T - 1; t-- > 0;)
        for (std::size_t i = 0; i < K; ++i) {
            for (std::size_t j = 0; j < K; ++j)
                terms[j] = log_a[i][j] + logb[t + 1][j] + beta[t + 1][j];
            beta[t][i] = log_sum_exp(terms);
        }

    Posteriors post;
    post.log_likelihood = log_sum_exp(alpha[T - 1]);
    post.gamma.assign(T, std::vector<double>(K, 0.0));
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t k = 0; k < K; ++k)
            post.gamma[t][k] = std::exp(alpha[t][k] + beta[t][k] - post.log_likelihood);
    post.xi.assign(T > 0 ? T - 1 : 0, std::vector<std::vector<double>>(K, std::vector<double>(K, 0.0)));
    for (std::size_t t = 0; t + 1 < T; ++t)
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j < K; ++j)
                post.xi[t][i][j] = std::exp(alpha[t][i] + log_a[i][j] + logb[t + 1][j] + beta[t + 1][j] -
                                            post.log_likelihood);
    return post;
}

void normalize(std::vector<double> &row)
{
    double sum = 0.0;
    for (double x : row)
        sum += x;
    if (sum <= 0.0) {
        std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(row.size()));
        return;
    }
    for (double &x : row)
        x /= sum;
}

} // namespace

double log_likelihood(const HistogramHmm &model, const std::vector<Histogram> &observations)
{
    check_observations(observations);
    return forward_backward(model, observations).log_likelihood;
}

HistogramHmmFit fit_histogram_hmm(const std::vector<Histogram> &observations, const HistogramHmmOptions &options)
{
    check_observations(observations);
    if (options.hidden_states < 1)
        throw DomainError("hidden state count must be positive");
    const std::size_t K = static_cast<std::size_t>(options.hidden_states);
    const std::size_t V = observations.front().size();
    const std::size_t T = observations.size();

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<double> pooled(V, options.emission_floor);
    for (const auto &h : observations)
        for (std::size_t v = 0; v < V; ++v)
            pooled[v] += h[v];
    normalize(pooled);

    HistogramHmm model;
    model.initial.assign(K, 1.0 / static_cast<double>(K));
    model.transition.assign(K, std::vector<double>(K));
    for (auto &row : model.transition) {
        for (double &x : row)
            x = 1.0 + unit(rng);
        normalize(row);
    }
    model.emission.assign(K, std::vector<double>(V));
    for (auto &row : model.emission) {
        for (std::size_t v = 0; v < V; ++v)
            row[v] = pooled[v] * (0.75 + 0.5 * unit(rng));
        normalize(row);
    }

    HistogramHmmFit fit;
    double previous = kNegInf;
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        const auto post = forward_backward(model, observations);
        fit.iterations = iter;
        fit.log_likelihood = post.log_likelihood;
        if (!std::isfinite(post.log_likelihood))
            break;
        if (previous != kNegInf &&
            std::abs(post.log_likelihood - previous) <= options.tolerance * (1.0 + std::abs(previous))) {
            fit.converged = true;
            break;
        }
        previous = post.log_likelihood;

        model.initial = post.gamma[0];
        normalize(model.initial);
        for (std::size_t i = 0; i < K; ++i) {
            std::vector<double> row(K, 0.0);
            for (std::size_t t = 0; t + 1 < T; ++t)
                for (std::size_t j = 0; j < K; ++j)
                    row[j] += post.xi[t][i][j];
            double sum = 0.0;
            for (double x : row)
                sum += x;
            if (sum > 0.0) {
                normalize(row);
                model.transition[i] = row;
            }
        }
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<double> row(V, options.emission_floor);
            for (std::size_t t = 0; t < T; ++t)
                for (std::size_t v = 0; v < V; ++v)
                    row[v] += post.gamma[t][k] * observations[t][v];
            normalize(row);
            model.emission[k] = std::move(row);
        }
    }
    fit.model = std::move(model);
    return fit;
}

std::vector<double> stationary_distribution(const std::vector<std::vector<double>> &transition)
{
    const std::size_t K = transition.size();
    if (K == 0)
        throw DomainError("empty transition matrix");

    // Solve pi (A - I) = 0 with the last equation replaced by sum(pi) = 1.
    std::vector<std::vector<double>> m(K, std::vector<double>(K + 1, 0.0));
    for (std::size_t r = 0; r < K; ++r)
        for (std::size_t c = 0; c < K; ++c)
            m[r][c] = transition[c][r] - (r == c ? 1.0 : 0.0);
    for (std::size_t c = 0; c <= K; ++c)
        m[K - 1][c] = 1.0;

    bool singular = false;
    for (std::size_t col = 0; col < K && !singular; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < K; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col]))
                pivot = r;
        if (std::abs(m[pivot][col]) < 1e-12) {
            singular = true;
            break;
        }
        std::swap(m[col], m[pivot]);
        for (std::size_t r = 0; r < K; ++r) {
            if (r == col)
                continue;
            const double f = m[r][col] / m[col][col];
            for (std::size_t c = col; c <= K; ++c)
                m[r][c] -= f * m[col][c];
        }
    }

    std::vector<double> pi(K);
    if (!singular) {
        for (std::size_t k = 0; k < K; ++k)
            pi[k] = m[k][K] / m[k][k];
        if (std::all_of(pi.begin(), pi.end(), [](double x) { return x >= -1e-12; })) {
            for (double &x : pi)
                x = std::max(x, 0.0);
            normalize(pi);
            return pi;
        }
    }

    std::vector<double> current(K, 1.0 / static_cast<double>(K));
    std::vector<double> sum(K, 0.0);
    constexpr int kSteps = 10000;
    for (int s = 0; s < kSteps; ++s) {
        for (std::size_t k = 0; k < K; ++k)
            sum[k] += current[k];
        std::vector<double> next(K, 0.0);
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j < K; ++j)
                next[j] += current[i] * transition[i][j];
        current = std::move(next);
    }
    normalize(sum);
    return sum;
}

std::vector<double> emission_mixture(const HistogramHmm &model)
{
    const auto weights = stationary_distribution(model.transition);
    std::vector<double> mix(model.emission.front().size(), 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k)
        for (std::size_t v = 0; v < mix.size(); ++v)
            mix[v] += weights[k] * model.emission[k][v];
    return mix;
}

} // namespace mfnet
