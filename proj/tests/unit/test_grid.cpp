#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "sdelab/errors.hpp"
#include "sdelab/grid.hpp"

using namespace sdelab;

namespace {

std::vector<double> as_vector(const Grid& g) { return {g.times().begin(), g.times().end()}; }

// Brute-force set inclusion, exact equality.
bool contains_all(const Grid& coarse, const Grid& fine) {
    const auto f = fine.times();
    return std::all_of(coarse.times().begin(), coarse.times().end(),
                       [&](double t) { return std::find(f.begin(), f.end(), t) != f.end(); });
}

}  // namespace

TEST_CASE("equidistant times") {
    CHECK(as_vector(Grid::equidistant(4, 1.0)) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    CHECK(as_vector(Grid::equidistant(1, 2.0)) == std::vector<double>{0, 2});
    for (std::size_t n : {1u, 3u, 7u, 10u, 1000u}) CHECK(mesh_norm(Grid::equidistant(n, 1.7)) == 1.7 / n);
    CHECK(mesh_norm(Grid::equidistant(10, 1.0)) == 0.1);
    CHECK_THROWS_AS(Grid::equidistant(0, 1.0), ConfigError);
    CHECK_THROWS_AS(Grid::equidistant(3, 0.0), ConfigError);
}

TEST_CASE("quadratic times") {
    CHECK(as_vector(Grid::quadratic(4, 1.0)) == std::vector<double>{0, 1.0 / 16, 0.25, 9.0 / 16, 1});
    CHECK(mesh_norm(Grid::quadratic(10, 1.0)) == doctest::Approx(0.19).epsilon(1e-15));
    CHECK_THROWS_AS(Grid::quadratic(0, 1.0), ConfigError);
    for (double T : {0.5, 1.0, 3.0}) {
        for (std::size_t n = 1; n <= 512; ++n) {
            const Grid g = Grid::quadratic(n, T);
            const double nd = static_cast<double>(n);
            CHECK(mesh_norm(g) == (2.0 * nd - 1.0) * T / (nd * nd));
            CHECK(mesh_norm(g) <= 2.0 * T / nd);
            // the last interval is the widest one; the stored times agree with it to rounding
            const auto t = g.times();
            CHECK(t[n] - t[n - 1] == doctest::Approx(mesh_norm(g)).epsilon(1e-13));
        }
    }
}

TEST_CASE("mesh norm of a custom grid") {
    CHECK(mesh_norm(Grid::custom({0, 0.5, 0.6, 1})) == 0.5);
}

TEST_CASE("custom grid validation") {
    CHECK_THROWS_AS(Grid::custom({0.1, 0.5}), ConfigError);
    CHECK_THROWS_AS(Grid::custom({0, 0.5, 0.5, 1}), ConfigError);
    CHECK_THROWS_AS(Grid::custom({0}), ConfigError);
    CHECK_NOTHROW(Grid::custom({0, 1e-9, 1}));
}

TEST_CASE("nesting") {
    CHECK(is_nested(Grid::equidistant(4, 1), Grid::equidistant(8, 1)));
    CHECK(is_nested(Grid::quadratic(4, 1), Grid::quadratic(8, 1)));
    CHECK(contains_all(Grid::quadratic(4, 1), Grid::quadratic(8, 1)));
    CHECK_FALSE(is_nested(Grid::equidistant(4, 1), Grid::quadratic(8, 1)));
    CHECK_FALSE(contains_all(Grid::equidistant(4, 1), Grid::quadratic(8, 1)));
    CHECK_FALSE(is_nested(Grid::equidistant(3, 1), Grid::equidistant(8, 1)));
    CHECK_THROWS_AS(is_nested(Grid::equidistant(4, 1), Grid::equidistant(8, 2)), ConfigError);
    CHECK_THROWS_AS(nesting_map(Grid::equidistant(3, 1), Grid::equidistant(8, 1)), ConfigError);
}

TEST_CASE("quadratic nesting for m, n up to 64 matches direct membership") {
    for (std::size_t n = 1; n <= 64; ++n) {
        for (std::size_t m = 1; m <= 64; ++m) {
            const Grid coarse = Grid::quadratic(n, 1.0);
            const Grid fine = Grid::quadratic(m * n, 1.0);
            const auto map = nesting_map(coarse, fine);
            bool ok = contains_all(coarse, fine);
            for (std::size_t k = 0; k <= n; ++k) ok = ok && map[k] == m * k && fine[map[k]] == coarse[k];
            CHECK_MESSAGE(ok, "n=" << n << " m=" << m);
        }
    }
}

TEST_CASE("mixed-kind nesting goes through the tolerance path") {
    const Grid equi = Grid::equidistant(4, 1.0);
    const Grid custom = Grid::custom({0, 0.1, 0.25, 0.5, 0.6, 0.75, 1.0});
    CHECK(is_nested(equi, custom));
    CHECK(nesting_map(equi, custom) == std::vector<std::size_t>{0, 2, 3, 5, 6});
    CHECK(is_nested(Grid::quadratic(2, 1.0), equi));
}

TEST_CASE("weighted mesh sum") {
    CHECK(weighted_mesh_sum(Grid::equidistant(2, 1.0), 0.5) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(weighted_mesh_sum(Grid::equidistant(1, 1.0), 0.5) == 0.0);
    CHECK(weighted_mesh_sum(Grid::quadratic(1, 3.0), 0.3) == 0.0);
    CHECK_THROWS_AS(weighted_mesh_sum(Grid::equidistant(4, 1.0), 0.0), ConfigError);
    CHECK_THROWS_AS(weighted_mesh_sum(Grid::equidistant(4, 1.0), 1.0), ConfigError);
    CHECK_THROWS_AS(weighted_mesh_sum(Grid::equidistant(4, 1.0), -0.2), ConfigError);
}

TEST_CASE("weighted mesh sum bound, exhaustive over the shipped kinds") {
    int checked = 0;
    for (double T : {0.5, 1.0, 3.0}) {
        for (int pi = 1; pi <= 9; ++pi) {
            const double p = 0.1 * pi;
            const double bound = weighted_mesh_sum_bound(T, p);
            CHECK(bound == doctest::Approx(1.5 * std::pow(T, 1 - p) / (1 - p)));
            for (std::size_t n = 2; n <= (1u << 14); n *= 2) {
                for (GridKind kind : {GridKind::equidistant, GridKind::quadratic}) {
                    const double s = weighted_mesh_sum(Grid::of_kind(kind, n, T), p);
                    CHECK_MESSAGE(s <= bound, to_string(kind) << " n=" << n << " p=" << p << " T=" << T);
                    ++checked;
                }
            }
        }
    }
    CHECK(checked == 3 * 9 * 14 * 2);
}

TEST_CASE("uniform refinement keeps the coarse times") {
    const Grid g = Grid::quadratic(8, 1.3);
    const Grid f = g.refine_uniformly(5);
    CHECK(f.steps() == 40);
    CHECK(contains_all(g, f));
    const auto map = nesting_map(g, f);
    for (std::size_t k = 0; k <= 8; ++k) CHECK(map[k] == 5 * k);
    CHECK(g.refine_uniformly(1) == g);
    CHECK_THROWS_AS(g.refine_uniformly(0), ConfigError);
}

TEST_CASE("grid spec strings") {
    CHECK(parse_grid("equi:4", 1.0) == Grid::equidistant(4, 1.0));
    CHECK(parse_grid("quad:16", 2.0) == Grid::quadratic(16, 2.0));
    CHECK_THROWS_AS(parse_grid("equi:0", 1.0), ConfigError);
    CHECK_THROWS_AS(parse_grid("equi:x", 1.0), ConfigError);
    CHECK_THROWS_AS(parse_grid("cubic:4", 1.0), ConfigError);
    CHECK_THROWS_AS(parse_grid("equi", 1.0), ConfigError);

    const auto path = std::filesystem::temp_directory_path() / "sdelab_test_custom_grid.txt";
    {
        std::ofstream out(path);
        out << "0\n0.5\n\n0.6\n1\n";
    }
    const Grid g = parse_grid("custom:" + path.string(), 1.0);
    CHECK(g.kind() == GridKind::custom);
    CHECK(as_vector(g) == std::vector<double>{0, 0.5, 0.6, 1});
    CHECK_THROWS_AS(parse_grid("custom:" + path.string(), 2.0), ConfigError);
    {
        std::ofstream out(path);
        out << "0\n0.5\nabc\n";
    }
    CHECK_THROWS_AS(parse_grid("custom:" + path.string(), 1.0), ConfigError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(parse_grid("custom:" + path.string(), 1.0), ConfigError);
    CHECK(parse_grid_kind("equidistant") == GridKind::equidistant);
    CHECK(to_string(GridKind::quadratic) == "quad");
}
