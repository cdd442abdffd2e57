#pragma once

#include "anm/dataset.hpp"
#include "anm/graphs.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace anm {

enum class Regime { linear_nongauss, nonlinear_gauss };
const char* to_string(Regime r);
Regime parse_regime(const std::string& name);

enum class MechanismKind { linear, tabulated, discrete_cpt };
enum class NoiseKind { scaled_power_gaussian, gaussian, uniform, bernoulli_table };

struct Mechanism {
    MechanismKind kind = MechanismKind::linear;
    /// Linear: one coefficient per parent, parents in ascending order.
    std::vector<double> coefficients;
    /// Tabulated: structural function evaluated at each sample's parent
    /// values (the sample path is only realized at observed inputs).
    std::vector<double> table;
    /// Interpolation rule for the table; "sample-points" means the values are
    /// defined only at the observed parent inputs.
    std::string interpolation = "sample-points";
};

struct Noise {
    NoiseKind kind = NoiseKind::gaussian;
    /// scaled_power_gaussian: K * sign(M) * |M|^alpha, M ~ N(0, 1).
    double scale = 0.0;
    double exponent = 1.0;
    /// gaussian: variance.
    double variance = 0.0;
    /// Realized noise draws, one per sample.
    std::vector<double> draws;
};

struct SemSpec {
    Dag graph{1};
    Regime regime = Regime::linear_nongauss;
    std::vector<Mechanism> mechanisms;
    std::vector<Noise> noises;
};

struct SimConfig {
    int p = 4;
    int n = 100;
    Regime regime = Regime::linear_nongauss;
    std::uint64_t seed = 0;
    std::optional<double> edge_prob;
};

/// Uniformly random ordering; each forward pair included with probability
/// min(1, 2 / (p - 1)) unless `edge_prob` overrides it.
Dag random_dag(int p, std::uint64_t seed, std::optional<double> edge_prob = std::nullopt);

/// Data-independent baseline: random ordering and an edge probability drawn
/// uniformly from [0, 1].
Dag random_baseline_dag(int p, std::uint64_t seed);

struct LinearSemOptions {
    /// Forces every coefficient to this value.
    std::optional<double> fixed_coefficient;
    /// Nodes with parents get zero noise.
    bool noiseless_children = false;
};

/// Linear SEM: coefficients uniform on [-2, -0.1] U [0.1, 2]; noise
/// K sign(M) |M|^alpha with K ~ U[0.1, 0.5], alpha ~ U[2, 4].
std::pair<Dataset, SemSpec> sample_linear_sem(const Dag& g, int n, std::uint64_t seed,
                                              const LinearSemOptions& opts = {});

struct NonlinearSemOptions {
    double bandwidth = 1.0;
    double noise_variance_min = 0.1;
    double noise_variance_max = 0.5;
    /// Sum of one GP path per parent; otherwise a joint isotropic GP on the
    /// parent vector.
    bool additive = true;
    /// Apply the GP bandwidth to standardized parent values.
    bool standardize_inputs = false;
};

/// Nonlinear SEM with Gaussian noise: structural functions are Gaussian
/// process sample paths drawn jointly at the observed parent values.
std::pair<Dataset, SemSpec> sample_nonlinear_sem(const Dag& g, int n, std::uint64_t seed,
                                                 const NonlinearSemOptions& opts = {});

/// Random DAG plus a sample from the regime's SEM; the true graph is spec.graph.
std::pair<Dataset, SemSpec> simulate(const SimConfig& cfg);

/// key=value sidecar describing a SemSpec.
void write_sem_spec(std::ostream& out, const SemSpec& spec);

}  // namespace anm
