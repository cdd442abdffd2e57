#include "anm/simulation.hpp"

#include "anm/kernels.hpp"
#include "anm/regression.hpp"
#include "anm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace anm {

const char* to_string(Regime r) {
    return r == Regime::linear_nongauss ? "linear_nongauss" : "nonlinear_gauss";
}

Regime parse_regime(const std::string& name) {
    if (name == "linear_nongauss") return Regime::linear_nongauss;
    if (name == "nonlinear_gauss") return Regime::nonlinear_gauss;
    throw std::invalid_argument("unknown regime '" + name + "'");
}

namespace {

Dag ordered_random_dag(int p, Rng& rng, double prob) {
    const auto order = rng.permutation(p);
    std::vector<Edge> edges;
    for (int a = 0; a < p; ++a) {
        for (int b = a + 1; b < p; ++b) {
            if (rng.uniform() < prob) edges.push_back({order[a], order[b]});
        }
    }
    return Dag(p, edges);
}

}  // namespace

Dag random_dag(int p, std::uint64_t seed, std::optional<double> edge_prob) {
    if (p < 1) throw std::invalid_argument("random_dag: p must be >= 1");
    if (p == 1) return Dag(1);
    const double prob = edge_prob.value_or(std::min(1.0, 2.0 / (p - 1)));
    if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("random_dag: edge probability outside [0, 1]");
    Rng rng(seed);
    return ordered_random_dag(p, rng, prob);
}

Dag random_baseline_dag(int p, std::uint64_t seed) {
    Rng rng(seed);
    const double prob = rng.uniform();
    if (p == 1) return Dag(1);
    return ordered_random_dag(p, rng, prob);
}

std::pair<Dataset, SemSpec> sample_linear_sem(const Dag& g, int n, std::uint64_t seed, const LinearSemOptions& opts) {
    if (n < 2) throw std::invalid_argument("sample_linear_sem: n must be >= 2");
    const int p = g.size();
    Rng rng(seed);
    SemSpec spec;
    spec.graph = g;
    spec.regime = Regime::linear_nongauss;
    spec.mechanisms.resize(static_cast<std::size_t>(p));
    spec.noises.resize(static_cast<std::size_t>(p));

    // parameters first, in node order, so they do not depend on n
    for (int v = 0; v < p; ++v) {
        Mechanism& m = spec.mechanisms[v];
        m.kind = MechanismKind::linear;
        for (int u : mask_nodes(g.parents(v))) {
            (void)u;
            const double magnitude = rng.uniform(0.1, 2.0);
            const double coef = rng.uniform() < 0.5 ? -magnitude : magnitude;
            m.coefficients.push_back(opts.fixed_coefficient.value_or(coef));
        }
        Noise& z = spec.noises[v];
        z.kind = NoiseKind::scaled_power_gaussian;
        z.scale = rng.uniform(0.1, 0.5);
        z.exponent = rng.uniform(2.0, 4.0);
        if (opts.noiseless_children && g.parents(v) != 0) z.scale = 0.0;
    }

    Eigen::MatrixXd x(n, p);
    for (int v : g.topological_order()) {
        Noise& z = spec.noises[v];
        z.draws.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double m = rng.normal();
            z.draws[i] = z.scale * (m < 0 ? -1.0 : 1.0) * std::pow(std::abs(m), z.exponent);
        }
        const auto parents = mask_nodes(g.parents(v));
        for (int i = 0; i < n; ++i) {
            double value = z.draws[i];
            for (std::size_t k = 0; k < parents.size(); ++k) {
                value += spec.mechanisms[v].coefficients[k] * x(i, parents[k]);
            }
            x(i, v) = value;
        }
    }
    return {Dataset(std::move(x)), std::move(spec)};
}

namespace {

// One GP sample path at the rows of `inputs` (n x d), RBF kernel.
Eigen::VectorXd gp_path(const Eigen::MatrixXd& inputs, double bandwidth, Rng& rng) {
    const Eigen::Index n = inputs.rows();
    Eigen::MatrixXd k = rbf_gram(squared_distances(inputs), bandwidth);
    k.diagonal().array() += 1e-10;
    const auto llt = cholesky_with_jitter(k);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
    return llt.matrixL() * z;
}

}  // namespace

std::pair<Dataset, SemSpec> sample_nonlinear_sem(const Dag& g, int n, std::uint64_t seed,
                                                 const NonlinearSemOptions& opts) {
    if (n < 2) throw std::invalid_argument("sample_nonlinear_sem: n must be >= 2");
    if (!(opts.noise_variance_min > 0.0 && opts.noise_variance_max >= opts.noise_variance_min)) {
        throw std::invalid_argument("sample_nonlinear_sem: invalid noise variance range");
    }
    const int p = g.size();
    Rng rng(seed);
    SemSpec spec;
    spec.graph = g;
    spec.regime = Regime::nonlinear_gauss;
    spec.mechanisms.resize(static_cast<std::size_t>(p));
    spec.noises.resize(static_cast<std::size_t>(p));
    for (int v = 0; v < p; ++v) {
        spec.noises[v].kind = NoiseKind::gaussian;
        spec.noises[v].variance = rng.uniform(opts.noise_variance_min, opts.noise_variance_max);
    }

    Eigen::MatrixXd x(n, p);
    for (int v : g.topological_order()) {
        Mechanism& m = spec.mechanisms[v];
        m.kind = MechanismKind::tabulated;
        m.table.assign(static_cast<std::size_t>(n), 0.0);
        const auto parents = mask_nodes(g.parents(v));
        if (!parents.empty()) {
            Eigen::MatrixXd inputs(n, static_cast<Eigen::Index>(parents.size()));
            for (std::size_t k = 0; k < parents.size(); ++k) inputs.col(static_cast<Eigen::Index>(k)) = x.col(parents[k]);
            if (opts.standardize_inputs) inputs = standardize_columns(inputs);
            Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
            if (opts.additive) {
                for (Eigen::Index k = 0; k < inputs.cols(); ++k) f += gp_path(inputs.col(k), opts.bandwidth, rng);
            } else {
                f = gp_path(inputs, opts.bandwidth, rng);
            }
            for (int i = 0; i < n; ++i) m.table[i] = f(i);
        }
        Noise& z = spec.noises[v];
        const double sd = std::sqrt(z.variance);
        z.draws.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            z.draws[i] = sd * rng.normal();
            x(i, v) = m.table[i] + z.draws[i];
        }
    }
    return {Dataset(std::move(x)), std::move(spec)};
}

std::pair<Dataset, SemSpec> simulate(const SimConfig& cfg) {
    const Dag g = random_dag(cfg.p, derive_seed(cfg.seed, 0), cfg.edge_prob);
    if (cfg.regime == Regime::linear_nongauss) return sample_linear_sem(g, cfg.n, derive_seed(cfg.seed, 1));
    return sample_nonlinear_sem(g, cfg.n, derive_seed(cfg.seed, 1));
}

namespace {

const char* to_string(MechanismKind k) {
    switch (k) {
        case MechanismKind::linear:
            return "linear";
        case MechanismKind::tabulated:
            return "tabulated";
        case MechanismKind::discrete_cpt:
            break;
    }
    return "discrete_cpt";
}

const char* to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::scaled_power_gaussian:
            return "scaled_power_gaussian";
        case NoiseKind::gaussian:
            return "gaussian";
        case NoiseKind::uniform:
            return "uniform";
        case NoiseKind::bernoulli_table:
            break;
    }
    return "bernoulli_table";
}

void write_list(std::ostream& out, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
}

}  // namespace

void write_sem_spec(std::ostream& out, const SemSpec& spec) {
    const int p = spec.graph.size();
    out << std::setprecision(17);
    out << "p=" << p << '\n';
    out << "regime=" << to_string(spec.regime) << '\n';
    for (int v = 0; v < p; ++v) {
        const std::string key = "node." + std::to_string(v) + ".";
        const Mechanism& m = spec.mechanisms[v];
        const Noise& z = spec.noises[v];
        out << key << "parents=";
        const auto pa = mask_nodes(spec.graph.parents(v));
        for (std::size_t k = 0; k < pa.size(); ++k) out << (k ? "," : "") << pa[k];
        out << '\n';
        out << key << "mechanism=" << to_string(m.kind) << '\n';
        if (m.kind == MechanismKind::linear) {
            out << key << "coefficients=";
            write_list(out, m.coefficients);
            out << '\n';
        } else if (m.kind == MechanismKind::tabulated) {
            out << key << "interpolation=" << m.interpolation << '\n';
            out << key << "function_table=";
            write_list(out, m.table);
            out << '\n';
        }
        out << key << "noise=" << to_string(z.kind) << '\n';
        if (z.kind == NoiseKind::scaled_power_gaussian) {
            out << key << "noise.K=" << z.scale << '\n';
            out << key << "noise.alpha=" << z.exponent << '\n';
        } else if (z.kind == NoiseKind::gaussian) {
            out << key << "noise.variance=" << z.variance << '\n';
        }
        out << key << "noise.draws=";
        write_list(out, z.draws);
        out << '\n';
    }
}

}  // namespace anm
