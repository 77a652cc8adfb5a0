#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lda/instances.hpp"
#include "lda/io.hpp"
#include "test_support.hpp"

using namespace lda;
using lda::testing::random_instance;
using lda::testing::random_state;

namespace {

std::string serialize(const spin_glass& g) {
  std::ostringstream out;
  write_instance(out, g);
  return out.str();
}

spin_glass parse(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const parse_error& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Topology, TriangularTwoByTwoIsComplete) {
  const auto t = triangular_topology(2, 2);
  EXPECT_EQ(t.n_sites, 4u);
  // right, down and diagonal neighbours on a 2x2 torus cover every pair
  const std::vector<site_pair> expected{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  EXPECT_EQ(t.edges, expected);
}

TEST(Topology, TriangularDegreeSix) {
  const auto t = triangular_topology(4, 5);
  EXPECT_EQ(t.n_sites, 20u);
  EXPECT_EQ(t.edges.size(), 60u);
  std::vector<int> degree(20, 0);
  for (const auto& [i, j] : t.edges) {
    ++degree[i];
    ++degree[j];
  }
  for (int d : degree) EXPECT_EQ(d, 6);
  // site (1,1) = 6 links to (1,2), (2,1), (2,2), (1,0), (0,1), (0,0)
  for (std::size_t other : {7u, 11u, 12u, 5u, 1u, 0u})
    EXPECT_TRUE(std::binary_search(t.edges.begin(), t.edges.end(), site_pair{std::min<std::size_t>(6, other), std::max<std::size_t>(6, other)}));
  EXPECT_THROW(triangular_topology(1, 5), parameter_error);
}

TEST(Topology, Validation) {
  topology t{3, {{0, 1}, {1, 1}}};
  EXPECT_THROW(t.validate(), parameter_error);
  t.edges = {{0, 3}};
  EXPECT_THROW(t.validate(), parameter_error);
  t.edges = {{0, 1}, {0, 1}};
  EXPECT_THROW(t.validate(), parameter_error);
  t.edges = {{1, 0}};
  EXPECT_THROW(t.validate(), parameter_error);
}

TEST(Generator, Nat7ValuesAndDeterminism) {
  generator_spec spec;
  spec.rows = 6;
  spec.cols = 6;
  spec.seed = 21;
  const auto a = generate(spec);
  const auto b = generate(spec);
  EXPECT_EQ(serialize(a), serialize(b));
  EXPECT_EQ(a.couplers().size(), 108u);
  EXPECT_TRUE(a.biases().empty());
  for (const auto& [key, j] : a.couplers()) {
    const double scaled = std::abs(j) * 7.0;
    EXPECT_NEAR(scaled, std::round(scaled), 1e-12);
    EXPECT_GE(std::round(scaled), 1.0);
    EXPECT_LE(std::round(scaled), 7.0);
  }
  spec.seed = 22;
  EXPECT_NE(serialize(generate(spec)), serialize(a));
}

TEST(Generator, DrawsStayInValueSet) {
  generator_spec spec;
  spec.rows = 50;
  spec.cols = 70;  // 10500 couplers
  spec.seed = 5;
  const auto g = generate(spec);
  std::set<double> allowed;
  for (const auto& r : nat7_values()) allowed.insert(r.value());
  std::set<double> seen;
  for (const auto& [key, j] : g.couplers()) {
    EXPECT_TRUE(allowed.count(j));
    seen.insert(j);
  }
  EXPECT_EQ(seen, allowed);
}

TEST(Generator, FerromagnetHasTwoGroundStates) {
  generator_spec spec;
  spec.rows = 3;
  spec.cols = 4;
  spec.coupler_values = {{-1, 1}};
  const auto g = generate(spec);
  for (const auto& [key, j] : g.couplers()) EXPECT_EQ(j, -1.0);
  const auto r = exact_enumerate(g, 4);
  EXPECT_EQ(r.ground_degeneracy, 2u);
  EXPECT_EQ(r.lowest.state(0), spin_state(12, -1));
  EXPECT_EQ(r.lowest.state(1), spin_state(12, 1));
}

TEST(Generator, AntiferromagneticChain) {
  topology path{6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}}};
  generator_spec spec;
  spec.kind = generator_kind::from_topology;
  spec.coupler_values = {{1, 1}};
  const auto g = generate(spec, &path);
  const auto r = exact_enumerate(g, 2);
  EXPECT_EQ(r.ground_energy, -5.0);
  EXPECT_EQ(r.ground_degeneracy, 2u);
  EXPECT_EQ(r.lowest.state(0).to_bit_string(), "010101");
  EXPECT_EQ(r.lowest.state(1).to_bit_string(), "101010");
  EXPECT_THROW(generate(spec), parameter_error);
}

TEST(Generator, Biases) {
  generator_spec spec;
  spec.rows = 3;
  spec.cols = 3;
  spec.bias_values = {{-1, 2}, {1, 2}};
  const auto g = generate(spec);
  EXPECT_EQ(g.biases().size(), 9u);
  for (const auto& [i, h] : g.biases()) EXPECT_EQ(std::abs(h), 0.5);
}

TEST(InstanceFormat, ParsesThreeSiteExample) {
  const auto g = parse("# example\n3\n0 1 -1\n1 2 0.5\n0 0 0.2\n");
  EXPECT_EQ(g, lda::testing::three_site());
  EXPECT_EQ(parse("4\n"), spin_glass(4));
  EXPECT_EQ(parse("# a\n\n2\n# b\n\n0 1 -1\n"), lda::testing::ferromagnet_pair());
}

TEST(InstanceFormat, ErrorsNameTheLine) {
  EXPECT_EQ(parse_error_line("3\n0 1 -1\n2 1 0.5\n"), 3u);
  EXPECT_EQ(parse_error_line("3\n0 3 1\n"), 2u);
  EXPECT_EQ(parse_error_line("3\n0 1 1\n# c\n0 1 2\n"), 4u);
  EXPECT_EQ(parse_error_line("3\n1 1 1\n1 1 2\n"), 3u);
  EXPECT_EQ(parse_error_line("3\n0 1\n"), 2u);
  EXPECT_EQ(parse_error_line("3\n0 1 abc\n"), 2u);
  EXPECT_EQ(parse_error_line("x\n"), 1u);
  EXPECT_EQ(parse_error_line("3\n-1 2 0.5\n"), 2u);
  EXPECT_THROW(parse(""), parse_error);
}

TEST(InstanceFormat, RoundTripIsExact) {
  std::mt19937_64 rng(211);
  for (int k = 0; k < 100; ++k) {
    const auto g = random_instance(rng, 1 + rng() % 30, 0.3);
    const auto text = serialize(g);
    const auto back = parse(text);
    EXPECT_EQ(back.couplers(), g.couplers());
    EXPECT_EQ(back.biases(), g.biases());
    EXPECT_EQ(back.n_sites(), g.n_sites());
    EXPECT_EQ(serialize(back), text);
  }
}

TEST(InstanceFormat, ShortestDecimals) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(-1.0), "-1");
  EXPECT_EQ(std::stod(format_double(1.0 / 7.0)), 1.0 / 7.0);
}

TEST(InstanceFormat, Files) {
  const auto dir = std::filesystem::temp_directory_path() / "lda_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "three.txt").string();
  write_instance(lda::testing::three_site(), path);
  EXPECT_EQ(read_instance(path), lda::testing::three_site());
  EXPECT_THROW(read_instance((dir / "missing.txt").string()), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(TopologyFormat, Parses) {
  std::istringstream in("# ring\n4\n0 1\n2 1\n2 3\n3 0\n");
  const auto t = parse_topology(in);
  EXPECT_EQ(t.n_sites, 4u);
  EXPECT_EQ(t.edges, (std::vector<site_pair>{{0, 1}, {0, 3}, {1, 2}, {2, 3}}));
  std::istringstream dup("3\n0 1\n1 0\n");
  EXPECT_THROW(parse_topology(dup), parse_error);
  std::istringstream self("3\n1 1\n");
  EXPECT_THROW(parse_topology(self), parse_error);
}

TEST(StateFormat, Reads) {
  std::istringstream in("# best\n0110\n");
  EXPECT_EQ(read_state(in).to_bit_string(), "0110");
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(read_state(empty), parameter_error);
}

TEST(ResultJson, SchemaAndVerification) {
  const auto g = lda::testing::three_site();
  const auto r = hybrid_solve(g, std::nullopt, hybrid_params{}, exact_sampler{});
  auto j = to_json(r, g);
  EXPECT_EQ(j["schema_version"], result_schema_version);
  EXPECT_EQ(j["best_state"], "100");
  EXPECT_EQ(j["best_energy"].get<double>(), energy(g, spin_state{-1, -1, 1}));
  ASSERT_FALSE(j["iterations"].empty());
  EXPECT_TRUE(j["iterations"][0].contains("wall_time_s"));
  strip_wall_time(j);
  EXPECT_FALSE(j["iterations"][0].contains("wall_time_s"));

  solve_result bad = r;
  bad.best_energy = 0.0;
  EXPECT_THROW(to_json(bad, g), std::logic_error);
}

TEST(ResultJson, TrajectoryCsv) {
  const auto g = lda::testing::three_site();
  const auto r = hybrid_solve(g, std::nullopt, hybrid_params{}, exact_sampler{});
  std::ostringstream out;
  write_trajectory_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("stage,cycle,iteration", 0), 0u);
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, r.records.size());
}
