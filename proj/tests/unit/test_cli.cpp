// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "sbora/commands.hpp"
#include "sbora/report.hpp"

using namespace sbora::cli;

namespace {

RunConfig demo() {
  return RunConfig("demo", {{"n", KeyType::integer, "3", ""},
                            {"x", KeyType::real, "0.5", ""},
                            {"name", KeyType::text, "", ""},
                            {"items", KeyType::list, "a,b", ""}});
}

}  // namespace

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(csv_field("cr\r") == "\"cr\r\"");
  CHECK(csv_field("") == "");
  CHECK(csv_line({"x", "1,2", ""}) == "x,\"1,2\",\n");
}

TEST_CASE("shortest round-trip doubles") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("integer grids") {
  CHECK(parse_int_grid("") == std::vector<std::uint64_t>{});
  CHECK(parse_int_grid("1..3") == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(parse_int_grid("4, 1..2 ,9") == std::vector<std::uint64_t>{4, 1, 2, 9});
  CHECK_THROWS_AS(parse_int_grid("3..1"), ConfigError);
  CHECK_THROWS_AS(parse_int_grid("x"), ConfigError);
  CHECK_THROWS_AS(parse_int_grid("-1"), ConfigError);
}

TEST_CASE("config file then flags; comments and whitespace") {
  auto cfg = demo();
  CHECK(cfg.integer("n") == 3);
  cfg.load_text("# header\n\n  n = 7   # trailing\nname= hello world\nitems=\n", "t");
  CHECK(cfg.integer("n") == 7);
  CHECK(cfg.text("name") == "hello world");
  CHECK(cfg.list("items").empty());
  cfg.set("n", "9");
  CHECK(cfg.integer("n") == 9);
  CHECK(cfg.real("x") == 0.5);
  CHECK(cfg.to_json().dump() == R"({"n":9,"x":0.5,"name":"hello world","items":[]})");
}

TEST_CASE("config rejections") {
  auto cfg = demo();
  CHECK_THROWS_AS(cfg.load_text("bogus=1\n", "t"), ConfigError);
  CHECK_THROWS_AS(cfg.load_text("n=1\nn=2\n", "t"), ConfigError);
  CHECK_THROWS_AS(cfg.load_text("just a line\n", "t"), ConfigError);
  CHECK_THROWS_AS(cfg.load_text("=4\n", "t"), ConfigError);
  CHECK_THROWS_AS(cfg.set("n", "1.5"), ConfigError);
  CHECK_THROWS_AS(cfg.set("n", "-2"), ConfigError);
  CHECK_THROWS_AS(cfg.set("x", "nan"), ConfigError);
  CHECK_THROWS_AS(cfg.set("nope", "1"), ConfigError);
  cfg.set("n", "0");
  CHECK_THROWS_AS(cfg.positive("n"), ConfigError);
  try {
    cfg.load_text("n=1\nwhat=2\n", "file.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "file.cfg:2: unknown key 'what' for demo");
  }
}

TEST_CASE("gradcheck exit codes") {
  RunConfig cfg("gradcheck", gradcheck_schema());
  cfg.set("instances", "3");
  std::ostringstream out, err;
  CHECK(run_gradcheck(cfg, out, err) == kExitOk);
  CHECK(out.str().find("\"schema_version\": 1") != std::string::npos);
  cfg.set("tol", "0");
  CHECK(run_gradcheck(cfg, out, err) == kExitFailed);
  cfg.set("r", "6");
  CHECK_THROWS_AS(run_gradcheck(cfg, out, err), ConfigError);
}

TEST_CASE("bench: empty grid is header only; 4x4 rank-2 row counts") {
  RunConfig cfg("bench", bench_schema());
  std::ostringstream out, err;
  cfg.set("d", "");
  CHECK(run_bench(cfg, out, err) == kExitOk);
  CHECK(out.str() ==
        "method,d,k,r,trainable,total,grad,mults,adds,batch,measured_mults,measured_adds,match,"
        "trainable_ratio_vs_lora\n");
  cfg.set("d", "4");
  cfg.set("k", "4");
  cfg.set("r", "2");
  cfg.set("method", "lora,fa");
  out.str("");
  CHECK(run_bench(cfg, out, err) == kExitOk);
  CHECK(out.str().find("lora,4,4,2,16,16,16,32,26,1,32,26,true,1\n") != std::string::npos);
  CHECK(out.str().find("sbora-fa,4,4,2,8,10,8,24,20,1,24,20,true,0.5\n") != std::string::npos);
}
