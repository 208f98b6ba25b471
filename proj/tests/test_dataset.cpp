#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "irig/dataset.hpp"

using namespace irig;

namespace {

struct temp_file {
  std::filesystem::path path;
  explicit temp_file(const std::string &contents) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("irig_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++) + ".svm");
    std::ofstream out(path);
    out << contents;
  }
  ~temp_file() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("svmlight parsing") {
  temp_file f("+1 3:0.5 7:1.2\n-1 \n");
  const auto ds = load_svmlight(f.path.string());
  REQUIRE(ds.size() == 2);
  CHECK(ds.dimension == 7);  // max 1-based index

  CHECK(ds.samples[0].label == 1);
  CHECK(ds.samples[0].a.nnz() == 2);
  CHECK(ds.samples[0].a.indices() == std::vector<std::size_t>{2, 6});
  CHECK(ds.samples[0].a.values() == std::vector<double>{0.5, 1.2});

  CHECK(ds.samples[1].label == -1);
  CHECK(ds.samples[1].a.nnz() == 0);
}

TEST_CASE("svmlight zero labels remap to -1 and get logged") {
  temp_file f("0 1:1\n1 2:1\n");
  std::ostringstream log;
  const auto ds = load_svmlight(f.path.string(), std::nullopt, &log);
  CHECK(ds.samples[0].label == -1);
  CHECK(ds.samples[1].label == 1);
  CHECK(log.str().find("remapped 1") != std::string::npos);
}

TEST_CASE("svmlight dimension override") {
  temp_file f("+1 2:1\n");
  CHECK(load_svmlight(f.path.string(), 10).dimension == 10);
  CHECK_THROWS_AS(load_svmlight(f.path.string(), 1), std::runtime_error);
}

TEST_CASE("svmlight malformed input reports the line") {
  temp_file bad_label("+2 1:1\n");
  CHECK_THROWS_WITH(load_svmlight(bad_label.path.string()),
                    Catch::Matchers::ContainsSubstring("line 1"));

  temp_file bad_pair("+1 1:1\n-1 oops\n");
  CHECK_THROWS_WITH(load_svmlight(bad_pair.path.string()),
                    Catch::Matchers::ContainsSubstring("line 2"));

  temp_file zero_index("+1 0:1\n");
  CHECK_THROWS_WITH(load_svmlight(zero_index.path.string()),
                    Catch::Matchers::ContainsSubstring("1-based"));

  temp_file empty("");
  CHECK_THROWS_AS(load_svmlight(empty.path.string()), std::runtime_error);
}

TEST_CASE("batch partition sizes follow the remainder rule") {
  labeled_dataset ds;
  ds.dimension = 3;
  for (int i = 0; i < 10; ++i)
    ds.samples.push_back({sparse_vector(3, {{0, double(i + 1)}}), i % 2 ? 1 : -1});

  const auto batches = partition_batches(ds, 3);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].size() == 4);
  CHECK(batches[1].size() == 3);
  CHECK(batches[2].size() == 3);

  // every sample appears exactly once, in order
  std::multiset<double> seen, expected;
  for (const auto &s : ds.samples) expected.insert(s.a.values()[0]);
  for (const auto &b : batches)
    for (const auto &s : b.samples()) seen.insert(s.a.values()[0]);
  CHECK(seen == expected);

  const auto singles = partition_batches(ds, 10);
  REQUIRE(singles.size() == 10);
  for (const auto &b : singles) CHECK(b.size() == 1);

  CHECK_THROWS_AS(partition_batches(ds, 11), std::invalid_argument);
  CHECK_THROWS_AS(partition_batches(ds, 0), std::invalid_argument);
}

TEST_CASE("synthetic dataset is deterministic and well formed") {
  synthetic_spec spec;
  spec.dimension = 50;
  spec.samples = 300;
  spec.sparsity = 0.1;
  spec.seed = 99;

  const auto a = gen_synthetic_dataset(spec);
  const auto b = gen_synthetic_dataset(spec);
  REQUIRE(a.size() == 300);
  CHECK(a.dimension == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.samples[i].label == b.samples[i].label);
    CHECK(a.samples[i].a == b.samples[i].a);
    CHECK(a.samples[i].a.nnz() == 5);  // round(0.1 * 50)
    CHECK((a.samples[i].label == 1 || a.samples[i].label == -1));
  }

  spec.seed = 100;
  const auto c = gen_synthetic_dataset(spec);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a.samples[i].a == c.samples[i].a)) any_differs = true;
  CHECK(any_differs);
}

TEST_CASE("svmlight save/load round trip") {
  synthetic_spec spec;
  spec.dimension = 30;
  spec.samples = 40;
  spec.sparsity = 0.2;
  spec.seed = 5;
  const auto ds = gen_synthetic_dataset(spec);

  temp_file f("");
  save_svmlight(ds, f.path.string());
  const auto back = load_svmlight(f.path.string(), ds.dimension);
  REQUIRE(back.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.samples[i].label == ds.samples[i].label);
    CHECK(back.samples[i].a == ds.samples[i].a);
  }
}
