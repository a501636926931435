#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "mhd/linalg.hpp"

using namespace mhd;

TEST_CASE("from_triplets sums duplicates") {
  SparseMatrix m = from_triplets(1, 1, {{0, 0, 1.0}, {0, 0, 2.0}});
  CHECK(m.nnz() == 1);
  CHECK(m.values[0] == doctest::Approx(3.0));
}

TEST_CASE("from_triplets: empty input gives an all-zero pattern") {
  SparseMatrix m = from_triplets(3, 4, {});
  CHECK(m.nnz() == 0);
  std::vector<double> x(4, 1.0);
  std::vector<double> y = m.multiply(x);
  for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("from_triplets rejects out-of-range indices") {
  CHECK_THROWS_AS(from_triplets(2, 2, {{2, 0, 1.0}}), std::out_of_range);
  CHECK_THROWS_AS(from_triplets(2, 2, {{0, -1, 1.0}}), std::out_of_range);
}

TEST_CASE("from_triplets is independent of the triplet order") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> idx(0, 19);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<Triplet> trips;
  for (int k = 0; k < 400; ++k) trips.push_back({idx(rng), idx(rng), val(rng)});
  SparseMatrix a = from_triplets(20, 20, trips);
  for (int rep = 0; rep < 5; ++rep) {
    std::shuffle(trips.begin(), trips.end(), rng);
    SparseMatrix b = from_triplets(20, 20, trips);
    REQUIRE(a.values.size() == b.values.size());
    for (size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
  }
}

TEST_CASE("matvec agrees with a dense oracle") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  const int n = 50;
  std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
  std::vector<Triplet> trips;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double v = val(rng);
      dense[i][j] = v;
      trips.push_back({i, j, v});
    }
  }
  SparseMatrix a = from_triplets(n, n, trips);
  std::vector<double> x(n);
  for (double& xi : x) xi = val(rng);
  std::vector<double> y = a.multiply(x);
  for (int i = 0; i < n; ++i) {
    double ref = 0.0;
    for (int j = 0; j < n; ++j) ref += dense[i][j] * x[j];
    CHECK(y[i] == doctest::Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("lu_solve: identity") {
  std::vector<Triplet> trips;
  for (int i = 0; i < 5; ++i) trips.push_back({i, i, 1.0});
  SparseMatrix a = from_triplets(5, 5, trips);
  std::vector<double> b = {1, 2, 3, 4, 5};
  std::vector<double> x = lu_solve(a, b);
  for (int i = 0; i < 5; ++i) CHECK(x[i] == doctest::Approx(b[i]));
}

TEST_CASE("lu_solve: 1D Poisson with a manufactured solution") {
  const int n = 100;
  std::vector<Triplet> trips;
  for (int i = 0; i < n; ++i) {
    trips.push_back({i, i, 2.0});
    if (i > 0) trips.push_back({i, i - 1, -1.0});
    if (i + 1 < n) trips.push_back({i, i + 1, -1.0});
  }
  SparseMatrix a = from_triplets(n, n, trips);
  std::vector<double> x_ref(n);
  for (int i = 0; i < n; ++i) x_ref[i] = std::sin(0.1 * i) + 0.01 * i * i;
  std::vector<double> b = a.multiply(x_ref);
  std::vector<double> x = lu_solve(a, b);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (x[i] - x_ref[i]) * (x[i] - x_ref[i]);
    den += x_ref[i] * x_ref[i];
  }
  CHECK(std::sqrt(num / den) <= 1e-10);
}

TEST_CASE("lu_solve: pivoting on a zero diagonal") {
  SparseMatrix a = from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  std::vector<double> b = {1.0, 2.0};
  std::vector<double> x = lu_solve(a, b);
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(1.0));
}

TEST_CASE("singular matrix raises a singularity error") {
  // rank-1 2x2 matrix
  SparseMatrix a =
      from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 4.0}});
  std::vector<double> b = {1.0, 2.0};
  CHECK_THROWS_AS(lu_solve(a, b), SingularMatrixError);
  try {
    lu_solve(a, b);
  } catch (const SingularMatrixError& e) {
    CHECK(e.pivot_index() >= 0);  // names the failing pivot
  }
}

TEST_CASE("refactorize reuses the pattern") {
  std::vector<Triplet> trips;
  for (int i = 0; i < 10; ++i) {
    trips.push_back({i, i, 4.0});
    if (i > 0) trips.push_back({i, i - 1, -1.0});
    if (i + 1 < 10) trips.push_back({i, i + 1, -1.0});
  }
  SparseMatrix a = from_triplets(10, 10, trips);
  SparseLu lu(a);
  for (Triplet& t : trips)
    if (t.row == t.col) t.value = 6.0;
  SparseMatrix a2 = from_triplets(10, 10, trips);
  lu.refactorize(a2);
  std::vector<double> b(10, 1.0);
  std::vector<double> x = lu.solve(b);
  std::vector<double> r = a2.multiply(x);
  for (int i = 0; i < 10; ++i) CHECK(r[i] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transpose round trip") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> idx(0, 9);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<Triplet> trips;
  for (int k = 0; k < 40; ++k) trips.push_back({idx(rng), idx(rng), val(rng)});
  SparseMatrix a = from_triplets(10, 10, trips);
  SparseMatrix att = a.transposed().transposed();
  REQUIRE(a.values.size() == att.values.size());
  for (size_t i = 0; i < a.values.size(); ++i) {
    CHECK(a.col_indices[i] == att.col_indices[i]);
    CHECK(a.values[i] == doctest::Approx(att.values[i]).epsilon(1e-15));
  }
}
