#include "sdelab/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "sdelab/errors.hpp"

namespace sdelab {

namespace {

void require_steps(std::size_t n, double T) {
    if (n == 0) throw ConfigError("grid: n must be at least 1");
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("grid: horizon T must be positive");
}

std::string number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

Grid Grid::custom(std::vector<double> times) {
    if (times.size() < 2) throw ConfigError("grid: need at least two times");
    if (times.front() != 0.0) throw ConfigError("grid: first time must be 0");
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        if (!std::isfinite(times[k + 1]) || !(times[k + 1] > times[k]))
            throw ConfigError("grid: times must be strictly increasing (index " + std::to_string(k + 1) + ")");
    }
    return Grid(std::move(times), GridKind::custom);
}

Grid Grid::equidistant(std::size_t n, double T) {
    require_steps(n, T);
    std::vector<double> t(n + 1);
    const auto nd = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = T * static_cast<double>(k) / nd;
    t[n] = T;
    return Grid(std::move(t), GridKind::equidistant);
}

Grid Grid::quadratic(std::size_t n, double T) {
    require_steps(n, T);
    std::vector<double> t(n + 1);
    const auto nn = static_cast<double>(static_cast<unsigned long long>(n) * n);
    for (std::size_t k = 0; k < n; ++k) t[k] = T * static_cast<double>(static_cast<unsigned long long>(k) * k) / nn;
    t[n] = T;
    return Grid(std::move(t), GridKind::quadratic);
}

Grid Grid::of_kind(GridKind kind, std::size_t n, double T) {
    switch (kind) {
        case GridKind::equidistant: return equidistant(n, T);
        case GridKind::quadratic: return quadratic(n, T);
        case GridKind::custom: break;
    }
    throw ConfigError("grid: custom grids cannot be built from a step count");
}

Grid Grid::refine_uniformly(std::size_t substeps) const {
    if (substeps == 0) throw ConfigError("grid: substeps must be at least 1");
    if (substeps == 1) return *this;
    std::vector<double> t;
    t.reserve(steps() * substeps + 1);
    const auto m = static_cast<double>(substeps);
    for (std::size_t k = 0; k + 1 < times_.size(); ++k) {
        const double a = times_[k];
        const double width = times_[k + 1] - a;
        t.push_back(a);
        for (std::size_t j = 1; j < substeps; ++j) t.push_back(a + width * (static_cast<double>(j) / m));
    }
    t.push_back(times_.back());
    return Grid(std::move(t), GridKind::custom);
}

double mesh_norm(const Grid& g) {
    const auto n = static_cast<double>(g.steps());
    switch (g.kind()) {
        case GridKind::equidistant: return g.horizon() / n;
        case GridKind::quadratic: return (2.0 * n - 1.0) * g.horizon() / (n * n);
        case GridKind::custom: break;
    }
    double m = 0.0;
    const auto t = g.times();
    for (std::size_t k = 0; k + 1 < t.size(); ++k) m = std::max(m, t[k + 1] - t[k]);
    return m;
}

std::vector<std::size_t> nesting_map(const Grid& coarse, const Grid& fine) {
    if (coarse.horizon() != fine.horizon())
        throw ConfigError("grid: horizons differ (" + number(coarse.horizon()) + " vs " + number(fine.horizon()) + ")");
    std::vector<std::size_t> map(coarse.times().size());
    if (coarse.kind() == fine.kind() && coarse.kind() != GridKind::custom) {
        // t_k = T f(k/n) for the same monotone f: nested iff n divides N, index k -> (N/n) k.
        if (fine.steps() % coarse.steps() != 0) throw ConfigError("grid: coarse grid is not nested in fine grid");
        const std::size_t ratio = fine.steps() / coarse.steps();
        for (std::size_t k = 0; k < map.size(); ++k) map[k] = ratio * k;
        return map;
    }
    const double tol = 1e-14 * coarse.horizon();
    const auto ft = fine.times();
    std::size_t j = 0;
    for (std::size_t k = 0; k < map.size(); ++k) {
        const double t = coarse[k];
        while (j < ft.size() && ft[j] < t - tol) ++j;
        if (j == ft.size() || std::abs(ft[j] - t) > tol)
            throw ConfigError("grid: coarse time " + number(t) + " is missing from the fine grid");
        map[k] = j;
    }
    return map;
}

bool is_nested(const Grid& coarse, const Grid& fine) {
    if (coarse.horizon() != fine.horizon())
        throw ConfigError("grid: horizons differ (" + number(coarse.horizon()) + " vs " + number(fine.horizon()) + ")");
    try {
        nesting_map(coarse, fine);
        return true;
    } catch (const ConfigError&) {
        return false;
    }
}

double weighted_mesh_sum(const Grid& g, double p) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("grid: weighted mesh sum needs 0 < p < 1");
    const auto t = g.times();
    double s = 0.0;
    for (std::size_t k = 1; k + 1 < t.size(); ++k) s += std::pow(t[k], -p) * (t[k + 1] - t[k]);
    return s;
}

double weighted_mesh_sum_bound(double T, double p) { return 1.5 * std::pow(T, 1.0 - p) / (1.0 - p); }

Grid load_custom_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("grid: cannot read " + path.string());
    std::vector<double> times;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        double v = 0.0;
        const char* b = line.data() + first;
        const char* e = line.data() + last + 1;
        auto [ptr, ec] = std::from_chars(b, e, v);
        if (ec != std::errc{} || ptr != e)
            throw ConfigError("grid: " + path.string() + ":" + std::to_string(lineno) + ": not a number");
        times.push_back(v);
    }
    return Grid::custom(std::move(times));
}

Grid parse_grid(std::string_view spec, double T) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ConfigError("grid spec '" + std::string(spec) + "': expected kind:arg");
    const auto kind = spec.substr(0, colon);
    const auto arg = spec.substr(colon + 1);
    if (kind == "custom") {
        Grid g = load_custom_grid(std::filesystem::path(std::string(arg)));
        if (std::abs(g.horizon() - T) > 1e-14 * T)
            throw ConfigError("grid: custom grid ends at " + number(g.horizon()) + ", expected T = " + number(T));
        return g;
    }
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
    if (ec != std::errc{} || ptr != arg.data() + arg.size())
        throw ConfigError("grid spec '" + std::string(spec) + "': n must be a positive integer");
    return Grid::of_kind(parse_grid_kind(kind), n, T);
}

std::string_view to_string(GridKind kind) {
    switch (kind) {
        case GridKind::equidistant: return "equi";
        case GridKind::quadratic: return "quad";
        case GridKind::custom: return "custom";
    }
    return "custom";
}

GridKind parse_grid_kind(std::string_view name) {
    if (name == "equi" || name == "equidistant") return GridKind::equidistant;
    if (name == "quad" || name == "quadratic") return GridKind::quadratic;
    throw ConfigError("unknown grid kind '" + std::string(name) + "' (expected equi or quad)");
}

}  // namespace sdelab
