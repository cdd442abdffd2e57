#include "anm/identifiability.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace anm {

SmoothFn polynomial(std::vector<double> coef) {
    auto eval = [](const std::vector<double>& c, double x) {
        double acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
        return acc;
    };
    auto derive = [](const std::vector<double>& c) {
        std::vector<double> d;
        for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
        return d;
    };
    const auto c1 = derive(coef);
    const auto c2 = derive(c1);
    const auto c3 = derive(c2);
    return {[=](double x) { return eval(coef, x); }, [=](double x) { return eval(c1, x); },
            [=](double x) { return eval(c2, x); }, [=](double x) { return eval(c3, x); }};
}

SmoothFn gaussian_log_density(double mean, double sd) {
    if (!(sd > 0.0)) throw std::invalid_argument("gaussian_log_density: sd must be positive");
    const double inv = 1.0 / (sd * sd);
    return {[=](double x) { return -0.5 * (x - mean) * (x - mean) * inv; },
            [=](double x) { return -(x - mean) * inv; }, [=](double) { return -inv; },
            [](double) { return 0.0; }};
}

SmoothFn log_mix_lin_exp(double c1, double c2, double c3, double c4) {
    return {[=](double x) { return c1 * std::exp(c2 * x) + c3 * x + c4; },
            [=](double x) { return c1 * c2 * std::exp(c2 * x) + c3; },
            [=](double x) { return c1 * c2 * c2 * std::exp(c2 * x); },
            [=](double x) { return c1 * c2 * c2 * c2 * std::exp(c2 * x); }};
}

namespace {

struct Derivs {
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

Derivs central(const ScalarFn& g, double t, double base) {
    const double scale = std::max(1.0, std::abs(t));
    const double h1 = base * scale;
    const double h2 = 10.0 * base * scale;
    const double h3 = 100.0 * base * scale;
    Derivs d;
    d.d1 = (g(t + h1) - g(t - h1)) / (2.0 * h1);
    d.d2 = (g(t + h2) - 2.0 * g(t) + g(t - h2)) / (h2 * h2);
    auto third = [&](double h) {
        return (g(t + 2.0 * h) - 2.0 * g(t + h) + 2.0 * g(t - h) - g(t - 2.0 * h)) / (2.0 * h * h * h);
    };
    // Richardson step removes the h^2 term
    d.d3 = (4.0 * third(h3) - third(2.0 * h3)) / 3.0;
    return d;
}

Derivs analytic(const SmoothFn& s, double t) { return {s.d1(t), s.d2(t), s.d3(t)}; }

Derivs derivs(const AnmTriple& tr, const SmoothFn& s, double t) {
    return tr.mode == DerivativeMode::analytic ? analytic(s, t) : central(s.value, t, tr.step);
}

ResidualPoint evaluate(double x, double y, const Derivs& f, const Derivs& xi, const Derivs& nu) {
    ResidualPoint out{x, y, 0.0, false, 0.0};
    if (!(std::abs(nu.d2 * f.d1) > kAdmissibilityThreshold)) return out;
    out.admissible = true;
    const double t1 = xi.d2 * (-nu.d3 * f.d1 / nu.d2 + f.d2 / f.d1);
    const double t2 = -2.0 * nu.d2 * f.d2 * f.d1;
    const double t3 = nu.d1 * f.d3;
    const double t4 = nu.d1 * nu.d3 * f.d2 * f.d1 / nu.d2;
    const double t5 = -nu.d1 * f.d2 * f.d2 / f.d1;
    out.residual = xi.d3 - (t1 + t2 + t3 + t4 + t5);
    out.magnitude = std::abs(xi.d3) + std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4) + std::abs(t5);
    return out;
}

}  // namespace

std::vector<ResidualPoint> condition1_residual(const AnmTriple& t, const std::vector<GridPoint>& grid) {
    std::vector<ResidualPoint> out;
    out.reserve(grid.size());
    for (const GridPoint& g : grid) {
        const Derivs f = derivs(t, t.f, g.x);
        const Derivs xi = derivs(t, t.xi, g.x);
        const double u = g.y - t.f.value(g.x);
        const Derivs nu = derivs(t, t.nu, u);
        out.push_back(evaluate(g.x, g.y, f, xi, nu));
    }
    return out;
}

double max_abs_residual(const std::vector<ResidualPoint>& points) {
    double m = 0.0;
    for (const auto& p : points) {
        if (p.admissible) m = std::max(m, std::abs(p.residual));
    }
    return m;
}

double derivative_consistency(const AnmTriple& t, const std::vector<GridPoint>& grid) {
    double worst = 0.0;
    auto gap = [&](const SmoothFn& s, double at) {
        const Derivs a = analytic(s, at);
        const Derivs c = central(s.value, at, t.step);
        for (auto [va, vc] : {std::pair{a.d1, c.d1}, std::pair{a.d2, c.d2}, std::pair{a.d3, c.d3}}) {
            worst = std::max(worst, std::abs(va - vc) / std::max(1.0, std::abs(va)));
        }
    };
    for (const GridPoint& g : grid) {
        gap(t.f, g.x);
        gap(t.xi, g.x);
        gap(t.nu, g.y - t.f.value(g.x));
    }
    return worst;
}

std::vector<GridPoint> uniform_grid(std::pair<double, double> xr, std::pair<double, double> yr, int k) {
    if (k < 2) throw std::invalid_argument("uniform_grid: need at least 2 points per axis");
    std::vector<GridPoint> out;
    out.reserve(static_cast<std::size_t>(k * k));
    for (int i = 0; i < k; ++i) {
        const double x = xr.first + (xr.second - xr.first) * i / (k - 1);
        for (int j = 0; j < k; ++j) {
            out.push_back({x, yr.first + (yr.second - yr.first) * j / (k - 1)});
        }
    }
    return out;
}

std::pair<double, double> central_interval(const ScalarFn& log_density, double mass, double lo, double hi) {
    constexpr int kCells = 200000;
    const double h = (hi - lo) / kCells;
    std::vector<double> logs(kCells + 1);
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kCells; ++i) {
        logs[i] = log_density(lo + i * h);
        if (std::isfinite(logs[i])) peak = std::max(peak, logs[i]);
    }
    std::vector<double> cdf(kCells + 1, 0.0);
    for (int i = 1; i <= kCells; ++i) {
        const double a = std::isfinite(logs[i - 1]) ? std::exp(logs[i - 1] - peak) : 0.0;
        const double b = std::isfinite(logs[i]) ? std::exp(logs[i] - peak) : 0.0;
        cdf[i] = cdf[i - 1] + 0.5 * (a + b) * h;
    }
    const double total = cdf.back();
    if (!(total > 0.0)) throw std::invalid_argument("central_interval: density does not integrate");
    const double tail = 0.5 * (1.0 - mass) * total;
    auto quantile = [&](double target) {
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
        return lo + static_cast<double>(it - cdf.begin()) * h;
    };
    return {quantile(tail), quantile(total - tail)};
}

std::vector<GridPoint> default_grid(const AnmTriple& t, std::pair<double, double> xi, std::pair<double, double> ni,
                                    int k) {
    double fmin = std::numeric_limits<double>::infinity();
    double fmax = -fmin;
    for (int i = 0; i <= 200; ++i) {
        const double v = t.f.value(xi.first + (xi.second - xi.first) * i / 200.0);
        fmin = std::min(fmin, v);
        fmax = std::max(fmax, v);
    }
    return uniform_grid(xi, {fmin + ni.first, fmax + ni.second}, k);
}

AnmTriple log_mix_lin_exp_triple(double a, double b, const std::array<double, 4>& c,
                                 const std::array<double, 4>& g) {
    AnmTriple t;
    t.f = polynomial({b, a});
    t.xi = log_mix_lin_exp(c[0], c[1], c[2], c[3]);
    t.nu = log_mix_lin_exp(g[0], g[1], g[2], g[3]);
    return t;
}

Example7Check verify_example7_constraint(double a, double b, const std::array<double, 4>& c,
                                         const std::array<double, 4>& g) {
    std::vector<std::string> failed;
    if (!(a != 0.0)) failed.push_back("a != 0");
    if (!(c[0] < 0.0)) failed.push_back("c1 < 0");
    if (!(c[1] * c[2] > 0.0)) failed.push_back("c2 * c3 > 0");
    if (!(g[0] < 0.0)) failed.push_back("gamma1 < 0");
    if (!(g[1] * g[2] > 0.0)) failed.push_back("gamma2 * gamma3 > 0");
    if (!failed.empty()) {
        std::string msg = "log-mix-lin-exp family constraints violated:";
        for (const auto& f : failed) msg += " [" + f + "]";
        throw std::invalid_argument(msg);
    }
    auto same = [](double u, double v) { return std::abs(u - v) <= 1e-12 * std::max({1.0, std::abs(u), std::abs(v)}); };

    Example7Check out;
    const bool exponent_match = same(c[1], -a * g[1]);
    const bool slope_differs = !same(c[2], a * g[2]);
    out.non_identifiable = exponent_match && slope_differs;
    out.diagnostics["exponent_match"] = exponent_match ? 1.0 : 0.0;
    out.diagnostics["slope_differs"] = slope_differs ? 1.0 : 0.0;
    if (exponent_match) {
        // backward noise: log-mix-lin-exp with delta = (-e^{-C}, c2, c3 - gamma3 a, delta4)
        constexpr double C = 0.0;
        constexpr double delta4 = 0.0;
        out.diagnostics["delta1"] = -std::exp(-C);
        out.diagnostics["delta2"] = c[1];
        out.diagnostics["delta3"] = c[2] - g[2] * a;
        out.diagnostics["delta4"] = delta4;
        // effect law: generalized mixture of two exponentials
        const double d1 = g[2];
        const double d2 = -(c[2] - a * g[2]) / c[1];
        const double d3 = -c[0];
        const double d4 = -g[0] * std::exp(-g[1] * b);
        const double d5 = g[1];
        const double d6 = -C * (c[2] - a * g[2]) / c[1] + c[3] - g[2] * b + g[3] - delta4;
        out.diagnostics["d1"] = d1;
        out.diagnostics["d2"] = d2;
        out.diagnostics["d3"] = d3;
        out.diagnostics["d4"] = d4;
        out.diagnostics["d5"] = d5;
        out.diagnostics["d6"] = d6;
        const bool valid = d4 > 0.0 && d3 > 0.0 && d1 * d5 > 0.0 && d2 < -d1 / d5;
        out.diagnostics["generalized_mixture_valid"] = valid ? 1.0 : 0.0;
    }
    return out;
}

// ---------------------------------------------------------------- spec file

namespace {

struct Family {
    SmoothFn fn;
    std::optional<std::pair<double, double>> interval;
};

std::vector<double> numbers(std::istringstream& is, const std::string& key) {
    std::vector<double> v;
    double d = 0.0;
    while (is >> d) v.push_back(d);
    if (!is.eof()) throw std::invalid_argument("triple spec: non-numeric parameter for '" + key + "'");
    return v;
}

Family density_family(const std::string& key, const std::string& rest) {
    std::istringstream is(rest);
    std::string name;
    is >> name;
    const auto v = numbers(is, key);
    if (name == "gaussian") {
        if (v.size() != 2) throw std::invalid_argument("triple spec: gaussian needs <mean> <sd>");
        const double z = 1.959963984540054;
        return {gaussian_log_density(v[0], v[1]), std::pair{v[0] - z * v[1], v[0] + z * v[1]}};
    }
    if (name == "log-mix-lin-exp") {
        if (v.size() != 4) throw std::invalid_argument("triple spec: log-mix-lin-exp needs 4 parameters");
        Family f{log_mix_lin_exp(v[0], v[1], v[2], v[3]), std::nullopt};
        f.interval = central_interval(f.fn.value);
        return f;
    }
    throw std::invalid_argument("triple spec: unknown density family '" + name + "' for '" + key + "'");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::pair<double, double> range_of(const std::string& key, const std::string& rest) {
    std::istringstream is(rest);
    const auto v = numbers(is, key);
    if (v.size() != 2 || !(v[0] < v[1])) throw std::invalid_argument("triple spec: '" + key + "' needs <lo> <hi>");
    return {v[0], v[1]};
}

}  // namespace

TripleSpec parse_triple_spec(std::istream& in) {
    std::optional<SmoothFn> f;
    std::optional<Family> x;
    std::optional<Family> noise;
    std::optional<std::pair<double, double>> xr;
    std::optional<std::pair<double, double>> yr;
    int points = 21;
    DerivativeMode mode = DerivativeMode::analytic;
    double step = 1e-4;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("triple spec line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string rest = trim(line.substr(eq + 1));
        if (key == "f") {
            std::istringstream is(rest);
            std::string name;
            is >> name;
            if (name != "polynomial") throw std::invalid_argument("triple spec: f must be 'polynomial <c0> <c1> ...'");
            const auto coef = numbers(is, key);
            if (coef.empty()) throw std::invalid_argument("triple spec: polynomial needs coefficients");
            f = polynomial(coef);
        } else if (key == "x") {
            x = density_family(key, rest);
        } else if (key == "noise") {
            noise = density_family(key, rest);
        } else if (key == "grid") {
            points = std::stoi(rest);
        } else if (key == "x_range") {
            xr = range_of(key, rest);
        } else if (key == "y_range") {
            yr = range_of(key, rest);
        } else if (key == "derivatives") {
            std::istringstream is(rest);
            std::string name;
            is >> name;
            if (name == "analytic") {
                mode = DerivativeMode::analytic;
            } else if (name == "central") {
                mode = DerivativeMode::central_difference;
                if (!(is >> step)) step = 1e-4;
            } else {
                throw std::invalid_argument("triple spec: derivatives must be 'analytic' or 'central [h]'");
            }
        } else {
            throw std::invalid_argument("triple spec line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (!f || !x || !noise) throw std::invalid_argument("triple spec: 'f', 'x' and 'noise' are required");

    TripleSpec spec;
    spec.triple.f = *f;
    spec.triple.xi = x->fn;
    spec.triple.nu = noise->fn;
    spec.triple.mode = mode;
    spec.triple.step = step;
    const auto x_interval = xr.value_or(*x->interval);
    if (yr) {
        spec.grid = uniform_grid(x_interval, *yr, points);
    } else {
        spec.grid = default_grid(spec.triple, x_interval, *noise->interval, points);
    }
    return spec;
}

void write_residual_csv(std::ostream& out, const std::vector<ResidualPoint>& points) {
    out << "x,y,residual,admissible\n" << std::setprecision(17);
    for (const auto& p : points) {
        out << p.x << ',' << p.y << ',' << p.residual << ',' << (p.admissible ? 1 : 0) << '\n';
    }
}

}  // namespace anm
