#include "cgwigner/config.hpp"
#include "cgwigner/error.hpp"
#include "cgwigner/grid_io.hpp"
#include "gen.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sstream>

using namespace cgw;

TEST_SUITE("config")
{
    TEST_CASE("key = value text")
    {
        const auto kv = parse_config_text("# defaults\ndelta = 3.5\n\n  kernel=unit   # trailing\ngrid.nx = 64\n");
        CHECK(kv.size() == 3);
        CHECK(kv.at("delta") == "3.5");
        CHECK(kv.at("kernel") == "unit");
        try {
            parse_config_text("delta = 1\nnonsense\n");
            FAIL("no throw");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }

    TEST_CASE("values and defaults")
    {
        RunConfig cfg;
        CHECK(!cfg.delta);
        CHECK(cfg.kernel == KernelMass::PaperUnnormalized);
        CHECK(cfg.workers == 1);
        cfg.set("delta", "4");
        cfg.set("tol", "1e-7");
        cfg.set("grid.np", "96");
        CHECK(*cfg.delta == 4.0);
        CHECK(*cfg.quadrature.abs_tolerance == 1e-7);
        CHECK(cfg.np == 96);
        CHECK_THROWS_AS(cfg.set("delta", "-1"), ParseError);
        CHECK_THROWS_AS(cfg.set("delta", "abc"), ParseError);
        CHECK_THROWS_AS(cfg.set("colour", "red"), ParseError);
        CHECK_THROWS_AS(cfg.set("workers", "0"), ParseError);
        CHECK_THROWS_AS(cfg.set("tol", "0"), ParseError);
        CHECK_THROWS_AS(load_config("/nonexistent/cgwigner.cfg"), IoError);
    }

    TEST_CASE("config path resolution")
    {
        ::unsetenv(kConfigEnv);
        CHECK(!resolve_config_path(std::nullopt));
        ::setenv(kConfigEnv, "/tmp/from-env.cfg", 1);
        CHECK(*resolve_config_path(std::nullopt) == "/tmp/from-env.cfg");
        CHECK(*resolve_config_path(std::string("/tmp/flag.cfg")) == "/tmp/flag.cfg");
        ::unsetenv(kConfigEnv);
    }

    TEST_CASE("ranges")
    {
        CHECK(parse_int_range("0..3") == std::vector<int>{0, 1, 2, 3});
        CHECK(parse_int_range("2,5, 9") == std::vector<int>{2, 5, 9});
        CHECK(parse_real_range("3..6") == std::vector<double>{3, 4, 5, 6});
        CHECK(parse_real_range("1,2,4.5") == std::vector<double>{1, 2, 4.5});
        CHECK(parse_int_range("4..4") == std::vector<int>{4});
        CHECK_THROWS_AS(parse_int_range("5..2"), ParseError);
        CHECK_THROWS_AS(parse_int_range("a..2"), ParseError);
        CHECK_THROWS_AS(parse_real_range(""), ParseError);
        CHECK(parse_kernel(kernel_name(KernelMass::UnitMass)) == KernelMass::UnitMass);
        CHECK_THROWS_AS(parse_kernel("gauss"), ParseError);
    }
}

TEST_SUITE("grid_io")
{
    TEST_CASE("17-digit numbers round trip")
    {
        testing::Gen g(61);
        for (int t = 0; t < 2000; ++t) {
            const double v = g.real(-1.0, 1.0) * std::pow(10.0, g.integer(-300, 300));
            CHECK(std::strtod(format_exact(v).c_str(), nullptr) == v);
        }
    }

    TEST_CASE("CSV and JSON round trips are exact")
    {
        const WignerGrid g = grid_sample(StateSpec::ho_offdiag(2, 1), GridGeometry::from_bounds(-4.3, 4.1, -3.7, 5.2, 160, 176));
        std::stringstream csv;
        write_grid_csv(csv, g);
        const WignerGrid a = read_grid_csv(csv);
        CHECK(a.geometry == g.geometry);
        CHECK(a.values == g.values);
        const WignerGrid b = grid_from_json(nlohmann::json::parse(grid_to_json(g).dump()));
        CHECK(b.geometry == g.geometry);
        CHECK(b.values == g.values);
        CHECK(csv.str().find("x,p,w\n") != std::string::npos);
    }

    TEST_CASE("CSV without the geometry line")
    {
        std::istringstream in("x,p,w\n0.5,0.25,1\n0.5,0.75,2\n1.5,0.25,3\n1.5,0.75,4\n");
        const WignerGrid g = read_grid_csv(in);
        CHECK(g.geometry.nx == 2);
        CHECK(g.geometry.np == 2);
        CHECK(g.geometry.dx == doctest::Approx(1.0));
        CHECK(g.geometry.dp == doctest::Approx(0.5));
        CHECK(g.at(1, 0) == 3.0);
        std::istringstream bad("x,p,w\n0.5,0.25\n");
        CHECK_THROWS_AS(read_grid_csv(bad), ParseError);
        CHECK_THROWS_AS(load_grid("/nonexistent/grid.csv"), IoError);
    }
}
