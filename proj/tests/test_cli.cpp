#include "cgwigner/experiments.hpp"
#include "cgwigner/grid_io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace cgw;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr discarded; `env` is prepended to the command.
Run cli(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + " " CGWIGNER_CLI " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.out.append(buf.data(), got);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("cgwigner-cli-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::vector<SweepRow> rows_of(const std::string& path)
{
    std::ifstream in(path);
    return read_sweep_csv(in);
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("eval")
    {
        CHECK(cli("eval --state ho:n=0 --at 0,0").out == "0.636619772368\n");
        CHECK(cli("eval --state well:n=1 --at -1,0").out == "0\n");
        CHECK(cli("eval --state ho:m=2,n=2 --at 1,0.5").out == cli("eval --state ho:n=2 --at 1,0.5").out);
        const Run smoothed = cli("eval --state ho:n=2 --at 0,0 --delta 2");
        CHECK(smoothed.code == 0);
        CHECK(std::stod(smoothed.out) == doctest::Approx(0.0).scale(1e-15));
        const Run full = cli("eval --state ho:n=3 --at 0.3,0.2 --digits 17");
        CHECK(std::strtod(full.out.c_str(), nullptr) == ho_wigner(3, {0.3, 0.2}));
    }

    TEST_CASE("usage errors exit with 2")
    {
        CHECK(cli("eval --state ho:n=x --at 0,0").code == 2);
        CHECK(cli("eval --state ho:n=1 --at 0").code == 2);
        CHECK(cli("negativity --state ho:n=1 --bogus").code == 2);
        CHECK(cli("").code == 2);
        CHECK(cli("scan divergence --n 2 --p0 10").code == 2);
        CHECK(cli("negativity --state ho:n=1 --kernel wide").code == 2);
    }

    TEST_CASE("malformed state message names the token")
    {
        const std::string cmd = std::string(CGWIGNER_CLI) + " eval --state ho:q=3 --at 0,0 2>&1";
        FILE* pipe = ::popen(cmd.c_str(), "r");
        REQUIRE(pipe != nullptr);
        std::array<char, 512> buf{};
        const std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe);
        const int status = ::pclose(pipe);
        CHECK(WEXITSTATUS(status) == 2);
        CHECK(std::string(buf.data(), got).find("q=3") != std::string::npos);
    }

    TEST_CASE("negativity")
    {
        const auto j = nlohmann::json::parse(cli("negativity --state ho:n=1").out);
        CHECK(std::abs(j.at("eta").get<double>() - (2.0 * std::exp(-0.5) - 1.0)) < 1e-4);
        CHECK(j.at("status") == "Converged");
        CHECK(j.contains("error_estimate"));
        CHECK(j.contains("truncation_bound"));
        const auto husimi = nlohmann::json::parse(cli("negativity --state ho:n=3 --delta 2").out);
        CHECK(husimi.at("eta").get<double>() <= 1e-6);
    }

    TEST_CASE("negativity of the unsmoothed well")
    {
        const Run r = cli("negativity --state well:n=2");
        CHECK(r.code == 0);
        CHECK(nlohmann::json::parse(r.out).at("status") == "NonConvergent");
    }

    TEST_CASE("flag precedence and config path")
    {
        TempDir tmp;
        {
            std::ofstream(tmp / "a.cfg") << "delta = 3\ntol = 1e-7\n";
            std::ofstream(tmp / "b.cfg") << "delta = 5\n";
        }
        auto eta = [](const Run& r) { return nlohmann::json::parse(r.out).at("eta").get<double>(); };
        const double builtin = eta(cli("negativity --state ho:n=4"));
        const double d3 = eta(cli("negativity --state ho:n=4 --delta 3 --tol 1e-7"));
        const double d5 = eta(cli("negativity --state ho:n=4 --delta 5"));
        const double d8 = eta(cli("negativity --state ho:n=4 --delta 8 --tol 1e-7"));
        CHECK(builtin != d3);
        CHECK(d3 != d5);
        // Built-in default (no smoothing) < file < flag.
        CHECK(eta(cli("negativity --state ho:n=4 --config " + tmp / "a.cfg")) == d3);
        CHECK(eta(cli("negativity --state ho:n=4 --config " + tmp / "a.cfg" + " --delta 8")) == d8);
        CHECK(eta(cli("--config " + tmp / "a.cfg" + " negativity --state ho:n=4")) == d3);
        // Environment names the file; --config wins over it.
        const std::string env = "CGWIGNER_CONFIG=" + tmp / "b.cfg";
        CHECK(eta(cli("negativity --state ho:n=4", env)) == d5);
        CHECK(eta(cli("negativity --state ho:n=4 --config " + tmp / "a.cfg", env)) == d3);
        CHECK(eta(cli("negativity --state ho:n=4 --raw", env)) == builtin);
        CHECK(cli("negativity --state ho:n=1 --config " + tmp / "missing.cfg").code == 3);
        {
            std::ofstream(tmp / "bad.cfg") << "delta 3\n";
        }
        CHECK(cli("negativity --state ho:n=1 --config " + tmp / "bad.cfg").code == 2);
    }

    TEST_CASE("grid, smooth and grid negativity")
    {
        TempDir tmp;
        REQUIRE(cli("grid --state ho:n=2 --x -7,7 --p -7,7 --nx 336 --np 336 --out " + tmp / "g.csv").code == 0);
        REQUIRE(cli("smooth --in " + tmp / "g.csv" + " --out " + tmp / "s.json --delta 3").code == 0);
        const WignerGrid s = load_grid(tmp / "s.json");
        CHECK(s.geometry.nx == 336);
        const auto grid = nlohmann::json::parse(cli("negativity --grid " + tmp / "s.json").out);
        const auto exact = nlohmann::json::parse(cli("negativity --state ho:n=2 --delta 3").out);
        const double gap = std::abs(grid.at("eta").get<double>() - exact.at("eta").get<double>());
        CHECK(gap <= grid.at("error_estimate").get<double>() + exact.at("error_estimate").get<double>());
        CHECK(cli("grid --state ho:n=2 --nx 16 --np 16 --out " + tmp / "c.csv").code == 2);
        CHECK(cli("smooth --in " + tmp / "nope.csv" + " --out " + tmp / "x.csv --delta 3").code == 3);
        CHECK(cli("smooth --in " + tmp / "g.csv" + " --out " + tmp / "x.csv").code == 2);
    }

    TEST_CASE("sweep output")
    {
        TempDir tmp;
        REQUIRE(cli("sweep --kind ho --n 0..30 --delta 3..14 --out " + tmp / "ho.csv").code == 0);
        const auto rows = rows_of(tmp / "ho.csv");
        CHECK(rows.size() == 31 * 12);
        REQUIRE(cli("sweep --kind ho --n 0..30 --delta 3..14 --workers 3 --out " + tmp / "ho2.csv").code == 0);
        CHECK(slurp(tmp / "ho.csv") == slurp(tmp / "ho2.csv"));
        // Printed values parse back to the computed ones.
        const auto direct = negativity_adaptive(StateSpec::ho(rows[7].n), CoarseGrainSpec{rows[7].delta});
        CHECK(rows[7].eta == direct.eta);

        REQUIRE(cli("sweep --kind well --n 1..8 --delta 1,2,4,8,16 --out " + tmp / "well.csv").code == 0);
        CHECK(rows_of(tmp / "well.csv").size() == 40);
        REQUIRE(cli("sweep --kind offdiag --m 0..3 --dm 0..2 --delta 3 --out " + tmp / "off.csv").code == 0);
        for (const auto& r : rows_of(tmp / "off.csv"))
            CHECK(r.m.has_value());
        CHECK(cli("sweep --kind ho --n 1 --delta 3 --out /nonexistent/dir/x.csv").code == 3);
        CHECK(cli("sweep --kind ho --n 1 --out " + tmp / "x.csv").code == 2);
    }

    TEST_CASE("figure data")
    {
        TempDir tmp;
        REQUIRE(cli("fig --which 1 --out " + tmp.path.string()).code == 0);
        for (const auto& r : rows_of(tmp / "fig1.csv"))
            CHECK(r.eta >= 0.0);
        CHECK(fs::exists(tmp.path / "fig1_plot.py"));
        CHECK(slurp(tmp.path / "fig1_plot.py").find("fig1.csv") != std::string::npos);
        REQUIRE(cli("fig --which 2 --out " + tmp.path.string()).code == 0);
        const auto side = nlohmann::json::parse(slurp(tmp.path / "fig2_nmax.json"));
        CHECK(side.contains("slope"));
        REQUIRE(cli("fig --which 4 --out " + tmp.path.string()).code == 0);
        int zeros = 0;
        for (const auto& r : rows_of(tmp / "fig4.csv"))
            if (r.delta == 1.0) {
                CHECK(r.eta <= 1e-6);
                ++zeros;
            }
        CHECK(zeros == 8);
        CHECK(cli("fig --which 5").code == 2);
    }

    TEST_CASE("scans")
    {
        const auto tail = nlohmann::json::parse(cli("scan tail --n 2 --delta 1 --octaves 4").out);
        const auto& oct = tail.at("octaves");
        REQUIRE(oct.size() == 4);
        for (std::size_t k = 1; k < oct.size(); ++k)
            CHECK(oct[k].at("eta").get<double>() <= oct[k - 1].at("eta").get<double>());
        const auto div = nlohmann::json::parse(cli("scan divergence --n 1 --p0 50 --pmax 800").out);
        CHECK(div.at("panels").size() == 4);
        CHECK(div.at("fitted_log_slope").get<double>() == doctest::Approx(0.1013).epsilon(0.10).scale(0));
    }
}
