#include "sdelab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sdelab/drift.hpp"
#include "sdelab/errors.hpp"
#include "sdelab/path.hpp"
#include "sdelab/scheme.hpp"

namespace sdelab {

namespace {

struct Context {
    DriftSpec drift;
    Grid reference;
    std::vector<Grid> study;
    std::vector<std::vector<std::size_t>> maps;
};

Context make_context(const ExperimentConfig& cfg) {
    validate(cfg);
    DriftSpec drift = parse_drift(cfg.drift);
    Grid reference = Grid::of_kind(cfg.grid, cfg.refinement_factor * cfg.n_list.back(), cfg.T);
    std::vector<Grid> study;
    std::vector<std::vector<std::size_t>> maps;
    for (std::size_t n : cfg.n_list) {
        study.push_back(Grid::of_kind(cfg.grid, n, cfg.T));
        maps.push_back(nesting_map(study.back(), reference));
    }
    return {std::move(drift), std::move(reference), std::move(study), std::move(maps)};
}

void replication_gaps_into(const Context& ctx, const ExperimentConfig& cfg, std::uint64_t replication,
                           std::span<double> gaps) {
    const double xi = cfg.xi.sample(cfg.master_seed, replication);
    const BrownianPath path = sample_brownian(ctx.reference, RngStream(cfg.master_seed, replication, Lane::brownian));
    const auto rt = ctx.reference.times();
    std::vector<double> ref(rt.size());
    if (ctx.drift.constant_value && cfg.use_exact_oracle) {
        const double c = *ctx.drift.constant_value;
        for (std::size_t k = 0; k < rt.size(); ++k) ref[k] = xi + c * rt[k] + path.values[k];
    } else {
        em_solve_nodes(ctx.drift, xi, rt, path.values, ref);
    }

    std::vector<double> w;
    std::vector<double> x;
    for (std::size_t i = 0; i < ctx.study.size(); ++i) {
        const auto& map = ctx.maps[i];
        w.resize(map.size());
        x.resize(map.size());
        for (std::size_t k = 0; k < map.size(); ++k) w[k] = path.values[map[k]];
        em_solve_nodes(ctx.drift, xi, ctx.study[i].times(), w, x);
        double g = 0.0;
        if (cfg.error_norm == ErrorNorm::terminal) {
            const double d = x.back() - ref[map.back()];
            g = d * d;
        } else {
            for (std::size_t k = 0; k < map.size(); ++k) {
                const double d = x[k] - ref[map[k]];
                g = std::max(g, d * d);
            }
        }
        gaps[i] = g;
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

double json_number(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::string_view to_string(ErrorNorm norm) { return norm == ErrorNorm::terminal ? "terminal" : "max"; }

ErrorNorm parse_error_norm(std::string_view name) {
    if (name == "max") return ErrorNorm::max_over_nodes;
    if (name == "terminal") return ErrorNorm::terminal;
    throw ConfigError("unknown error norm '" + std::string(name) + "' (expected max or terminal)");
}

void validate(const ExperimentConfig& cfg) {
    if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) throw ConfigError("experiment: T must be positive");
    if (cfg.n_list.empty()) throw ConfigError("experiment: n_list is empty");
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
        if (cfg.n_list[i] == 0) throw ConfigError("experiment: n must be positive");
        if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) throw ConfigError("experiment: n_list must be increasing");
    }
    if (cfg.refinement_factor < 2) throw ConfigError("experiment: refinement factor m must be at least 2");
    if (cfg.replications < 2) throw ConfigError("experiment: need at least 2 replications");
    if (cfg.grid == GridKind::custom) throw ConfigError("experiment: grid kind must be equi or quad");
    const std::size_t ref = cfg.refinement_factor * cfg.n_list.back();
    for (std::size_t n : cfg.n_list)
        if (ref % n != 0)
            throw ConfigError("experiment: study grid n = " + std::to_string(n) + " does not nest in the reference grid (" +
                              std::to_string(ref) + " steps)");
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["drift"] = cfg.drift;
    j["T"] = cfg.T;
    if (cfg.xi.deterministic())
        j["xi"] = std::get<double>(cfg.xi.spec());
    else
        j["xi"] = cfg.xi.to_string();
    j["grid"] = std::string(to_string(cfg.grid));
    j["n_list"] = cfg.n_list;
    j["refinement_factor"] = cfg.refinement_factor;
    j["replications"] = cfg.replications;
    j["master_seed"] = cfg.master_seed;
    j["error_norm"] = std::string(to_string(cfg.error_norm));
    j["use_exact_oracle"] = cfg.use_exact_oracle;
    return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    ExperimentConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "drift")
                cfg.drift = value.get<std::string>();
            else if (key == "T")
                cfg.T = value.get<double>();
            else if (key == "xi")
                cfg.xi = value.is_number() ? XiSampler(value.get<double>()) : XiSampler::parse(value.get<std::string>());
            else if (key == "grid")
                cfg.grid = parse_grid_kind(value.get<std::string>());
            else if (key == "n_list")
                cfg.n_list = value.get<std::vector<std::size_t>>();
            else if (key == "refinement_factor")
                cfg.refinement_factor = value.get<std::size_t>();
            else if (key == "replications")
                cfg.replications = value.get<std::size_t>();
            else if (key == "master_seed")
                cfg.master_seed = value.get<std::uint64_t>();
            else if (key == "error_norm")
                cfg.error_norm = parse_error_norm(value.get<std::string>());
            else if (key == "use_exact_oracle")
                cfg.use_exact_oracle = value.get<bool>();
            else
                throw ConfigError("config: unknown key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    return experiment_config_from_json(j);
}

std::vector<double> replication_gaps(const ExperimentConfig& cfg, std::uint64_t replication) {
    const Context ctx = make_context(cfg);
    std::vector<double> gaps(cfg.n_list.size());
    replication_gaps_into(ctx, cfg, replication, gaps);
    return gaps;
}

ConvergenceResult run_strong_convergence(const ExperimentConfig& cfg, par::Backend backend) {
    const Context ctx = make_context(cfg);
    const std::size_t R = cfg.replications;
    const std::size_t K = cfg.n_list.size();
    std::vector<double> gaps(R * K);
    par::for_each_index(
        R, [&](std::size_t r) { replication_gaps_into(ctx, cfg, r, std::span<double>(gaps).subspan(r * K, K)); },
        backend);

    std::vector<RatePoint> points;
    std::vector<double> column(R);
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t r = 0; r < R; ++r) column[r] = gaps[r * K + i];
        const double mean = par::pairwise_sum(column) / static_cast<double>(R);
        for (std::size_t r = 0; r < R; ++r) column[r] = (gaps[r * K + i] - mean) * (gaps[r * K + i] - mean);
        const double var = par::pairwise_sum(column) / static_cast<double>(R - 1);
        const double error = std::sqrt(mean);
        // Delta method for the square root of a mean.
        const double se = error > 0.0 ? std::sqrt(var / static_cast<double>(R)) / (2.0 * error) : 0.0;
        points.push_back({static_cast<double>(cfg.n_list[i]), error, se});
    }
    ConvergenceResult result;
    result.config = cfg;
    result.rate = fit_rate_or_exact(points);
    result.used_exact_oracle = ctx.drift.constant_value.has_value() && cfg.use_exact_oracle;
    return result;
}

GridComparison compare_grids(const ExperimentConfig& cfg, par::Backend backend) {
    ExperimentConfig equi = cfg;
    equi.grid = GridKind::equidistant;
    ExperimentConfig quad = cfg;
    quad.grid = GridKind::quadratic;
    return {run_strong_convergence(equi, backend), run_strong_convergence(quad, backend)};
}

void write_comparison_csv(std::ostream& out, const GridComparison& cmp) {
    out << "n,equi_error,equi_std_error,quad_error,quad_std_error\n";
    const auto& a = cmp.equidistant.rate.points;
    const auto& b = cmp.quadratic.rate.points;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        out << fmt(a[i].n) << ',' << fmt(a[i].error) << ',' << fmt(a[i].std_error) << ',' << fmt(b[i].error) << ','
            << fmt(b[i].std_error) << '\n';
}

std::string_view code_version() { return "sdelab 1.0.0"; }

void write_rate_csv(std::ostream& out, const RateEstimate& rate) {
    out << "n,error,std_error\n";
    for (const auto& p : rate.points) out << fmt(p.n) << ',' << fmt(p.error) << ',' << fmt(p.std_error) << '\n';
}

nlohmann::json rate_to_json(const RateEstimate& rate) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["status"] = rate.status == RateStatus::exact ? "exact" : "fitted";
    j["slope"] = num(rate.slope);
    j["intercept"] = num(rate.intercept);
    j["slope_std_error"] = num(rate.slope_std_error);
    j["residual_max"] = num(rate.residual_max);
    return j;
}

void write_rate_dat(std::ostream& out, const RateEstimate& rate) {
    out << "# log(n) log(error) fitted_log_error\n";
    for (const auto& p : rate.points) {
        const double x = std::log(p.n);
        const double y = p.error > 0.0 ? std::log(p.error) : -std::numeric_limits<double>::infinity();
        const double f = rate.status == RateStatus::fitted ? rate.intercept + rate.slope * x
                                                           : std::numeric_limits<double>::quiet_NaN();
        out << fmt(x) << ' ' << fmt(y) << ' ' << fmt(f) << '\n';
    }
}

void write_rate_svg(std::ostream& out, const RateEstimate& rate, const std::string& title) {
    constexpr double W = 480, H = 360, M = 50;
    std::vector<double> xs, ys;
    for (const auto& p : rate.points) {
        if (p.error <= 0.0) continue;
        xs.push_back(std::log10(p.n));
        ys.push_back(std::log10(p.error));
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << M << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
    if (xs.size() >= 2) {
        const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
        const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
        const double x0 = *xmin, x1 = *xmax, y0 = *ymin - 0.1, y1 = *ymax + 0.1;
        auto px = [&](double x) { return M + (x - x0) / (x1 - x0 == 0 ? 1 : x1 - x0) * (W - 2 * M); };
        auto py = [&](double y) { return H - M - (y - y0) / (y1 - y0) * (H - 2 * M); };
        out << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M << "\" y2=\"" << H - M
            << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << M << "\" y1=\"" << M << "\" x2=\"" << M << "\" y2=\"" << H - M
            << "\" stroke=\"black\"/>\n";
        for (std::size_t i = 0; i < xs.size(); ++i)
            out << "<circle cx=\"" << fmt(px(xs[i])) << "\" cy=\"" << fmt(py(ys[i])) << "\" r=\"3\" fill=\"navy\"/>\n";
        if (rate.status == RateStatus::fitted) {
            const double ln10 = std::log(10.0);
            auto fit = [&](double lx) { return (rate.intercept + rate.slope * lx * ln10) / ln10; };
            out << "<line x1=\"" << fmt(px(x0)) << "\" y1=\"" << fmt(py(fit(x0))) << "\" x2=\"" << fmt(px(x1))
                << "\" y2=\"" << fmt(py(fit(x1))) << "\" stroke=\"crimson\"/>\n";
            out << "<text x=\"" << W - M - 140 << "\" y=\"" << M << "\" font-family=\"sans-serif\" font-size=\"12\">"
                << "slope " << fmt(std::round(rate.slope * 1000.0) / 1000.0) << "</text>\n";
        }
    }
    out << "<text x=\"" << W / 2 - 20 << "\" y=\"" << H - 15
        << "\" font-family=\"sans-serif\" font-size=\"12\">log10 n</text>\n";
    out << "</svg>\n";
}

void persist_results(const ConvergenceResult& result, const std::filesystem::path& directory,
                     const std::string& stem) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw ConfigError("cannot create directory " + directory.string());
    {
        auto out = open_for_write(directory / (stem + ".csv"));
        write_rate_csv(out, result.rate);
    }
    {
        nlohmann::json j = rate_to_json(result.rate);
        j["config"] = to_json(result.config);
        j["master_seed"] = result.config.master_seed;
        j["code_version"] = std::string(code_version());
        j["used_exact_oracle"] = result.used_exact_oracle;
        auto out = open_for_write(directory / (stem + ".json"));
        out << j.dump(2) << '\n';
    }
    {
        auto out = open_for_write(directory / (stem + ".dat"));
        write_rate_dat(out, result.rate);
    }
    {
        auto out = open_for_write(directory / (stem + ".svg"));
        write_rate_svg(out, result.rate, result.config.drift + " (" + std::string(to_string(result.config.grid)) + ")");
    }
}

RateEstimate load_rate_estimate(const std::filesystem::path& directory, const std::string& stem) {
    RateEstimate rate;
    {
        std::ifstream in(directory / (stem + ".csv"));
        if (!in) throw ConfigError("cannot read " + (directory / (stem + ".csv")).string());
        std::string line;
        std::getline(in, line);
        if (line != "n,error,std_error") throw ConfigError("unexpected CSV header: " + line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            RatePoint p;
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &p.n, &p.error, &p.std_error) != 3)
                throw ConfigError("malformed CSV line: " + line);
            rate.points.push_back(p);
        }
    }
    std::ifstream in(directory / (stem + ".json"));
    if (!in) throw ConfigError("cannot read " + (directory / (stem + ".json")).string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed summary: ") + e.what());
    }
    rate.status = j.at("status") == "exact" ? RateStatus::exact : RateStatus::fitted;
    rate.slope = json_number(j.at("slope"));
    rate.intercept = json_number(j.at("intercept"));
    rate.slope_std_error = json_number(j.at("slope_std_error"));
    rate.residual_max = json_number(j.at("residual_max"));
    return rate;
}

}  // namespace sdelab
