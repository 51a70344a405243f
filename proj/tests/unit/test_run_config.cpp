#include "doctest.h"
#include "fkising/error.hpp"
#include "fkising/run_config.hpp"

using namespace fkising;

TEST_SUITE("run_config") {
  TEST_CASE("defaults survive an empty file") {
    const auto c = parse_run_config("");
    CHECK(c.L == 64);
    CHECK(c.slope_tol == 0.03);
    CHECK(c.r_list.size() == 7);
  }

  TEST_CASE("sections are read") {
    const auto c = parse_run_config(
        "[lattice]\na = 0.0078125\nL = 128\nbc = plus\n"
        "[params]\nbeta = 0.4\nh = 2\nseed = 99\nsweeps = 500\nchains = 2\n"
        "[run]\nr_list = 2,4,8\nh_list = 0.5, 1\nlambda = 3\n"
        "[tolerances]\nks_max = 0.01\n");
    CHECK(c.a == 0.0078125);
    CHECK(c.L == 128);
    CHECK(c.bc == BoundaryCondition::PlusWired);
    CHECK(c.beta == 0.4);
    CHECK(c.seed == 99);
    CHECK(c.chains == 2);
    CHECK(c.r_list == std::vector<int>{2, 4, 8});
    CHECK(c.h_list == std::vector<double>{0.5, 1.0});
    CHECK(c.lambda == 3.0);
    CHECK(c.ks_max == 0.01);
    const auto p = c.sim_params();
    CHECK(p.h == 2.0);
    CHECK(p.sweeps == 500);
  }

  TEST_CASE("round trip") {
    RunConfig c;
    c.a = 1.0 / 3;
    c.eps_list = {0.3, 0.1};
    c.bc = BoundaryCondition::PlusWired;
    const auto back = parse_run_config(to_ini(c));
    CHECK(back.a == c.a);
    CHECK(back.eps_list == c.eps_list);
    CHECK(back.bc == c.bc);
    CHECK(to_ini(back) == to_ini(c));
  }

  TEST_CASE("malformed input") {
    CHECK_THROWS_AS(parse_run_config("[lattice\n"), Error);
    CHECK_THROWS_AS(parse_run_config("[lattice]\nL = many\n"), Error);
    CHECK_THROWS_AS(parse_run_config("[lattice]\nbc = periodic\n"), Error);
    CHECK_THROWS_AS(parse_run_config("[run]\nr_list = 1,x\n"), Error);
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.ini"), Error);
  }
}
