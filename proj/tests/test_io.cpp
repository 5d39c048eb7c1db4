#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "oracles.hpp"
#include "ringmpc/io.hpp"

using namespace ringmpc;

TEST_CASE("doubles print in the shortest form that reads back exactly") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(10.49) == "10.49");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");

  oracle::Rng rng(31);
  for (int t = 0; t < 2000; ++t) {
    double v = rng.uniform(-1e6, 1e6);
    if (t % 3 == 0) v = rng.uniform(-1.0, 1.0) * 1e-6;
    if (t % 7 == 0) v *= 1e12;
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
    CHECK(s.find(',') == std::string::npos);
  }
}

TEST_CASE("csv rows come out with commas, newlines and exact numbers") {
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "ringmpc_io_test.csv";
  {
    CsvWriter w(path);
    w.row("algorithm", "n", "value", "ok");
    w.row("AS1D_g", 24, 10.49, true);
    w.cell("x");
    w.cell(std::int64_t{-7});
    w.cell(false);
    w.end_row();
    w.row("a,b", "said \"hi\"");
  }
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() ==
        "algorithm,n,value,ok\n"
        "AS1D_g,24,10.49,true\n"
        "x,-7,false\n"
        "\"a,b\",\"said \"\"hi\"\"\"\n");
  std::filesystem::remove(path);
}
