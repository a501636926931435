#include "mhd/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace mhd {

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_rows, 0.0);
  for (int i = 0; i < n_rows; ++i) {
    double s = 0.0;
    for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
      s += values[k] * x[col_indices[k]];
    y[i] = s;
  }
  return y;
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<Triplet> trips;
  trips.reserve(values.size());
  for (int i = 0; i < n_rows; ++i)
    for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
      trips.push_back({col_indices[k], i, values[k]});
  return from_triplets(n_cols, n_rows, std::move(trips));
}

SparseMatrix from_triplets(int n_rows, int n_cols, std::vector<Triplet> triplets) {
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
      throw std::out_of_range("from_triplets: index (" + std::to_string(t.row) +
                              ", " + std::to_string(t.col) + ") outside " +
                              std::to_string(n_rows) + "x" + std::to_string(n_cols));
  }
  // The value participates in the sort key so that duplicates are summed in a
  // canonical order and the result does not depend on the input order.
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.value < b.value;
  });
  SparseMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.row_offsets.assign(n_rows + 1, 0);
  size_t i = 0;
  while (i < triplets.size()) {
    size_t j = i;
    double s = 0.0;
    while (j < triplets.size() && triplets[j].row == triplets[i].row &&
           triplets[j].col == triplets[i].col) {
      s += triplets[j].value;
      ++j;
    }
    m.col_indices.push_back(triplets[i].col);
    m.values.push_back(s);
    m.row_offsets[triplets[i].row + 1] += 1;
    i = j;
  }
  for (int r = 0; r < n_rows; ++r) m.row_offsets[r + 1] += m.row_offsets[r];
  return m;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenSparse to_eigen(const SparseMatrix& a) {
  Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>> map(
      a.n_rows, a.n_cols, a.nnz(), a.row_offsets.data(), a.col_indices.data(),
      a.values.data());
  return EigenSparse(map);
}

int parse_trailing_index(const std::string& msg) {
  int end = static_cast<int>(msg.size());
  while (end > 0 && !std::isdigit(static_cast<unsigned char>(msg[end - 1]))) --end;
  int begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(msg[begin - 1]))) --begin;
  if (begin == end) return -1;
  return std::stoi(msg.substr(begin, end - begin));
}

}  // namespace

struct SparseLu::Impl {
  Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> solver;
  EigenSparse mat;          // equilibrated matrix, kept for refinement
  Eigen::VectorXd scale;    // symmetric diagonal scaling
  int n = 0;

  // Symmetric equilibration by the row maxima: strongly graded meshes give
  // the curl-curl block a huge dynamic range that plain LU cannot handle.
  void load(const SparseMatrix& a) {
    scale.resize(a.n_rows);
    for (int i = 0; i < a.n_rows; ++i) {
      double m = 0.0;
      for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
        m = std::max(m, std::abs(a.values[k]));
      scale(i) = m > 0.0 ? 1.0 / std::sqrt(m) : 1.0;
    }
    SparseMatrix scaled = a;
    for (int i = 0; i < a.n_rows; ++i)
      for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
        scaled.values[k] = scale(i) * a.values[k] * scale(a.col_indices[k]);
    mat = to_eigen(scaled);
  }
};

SparseLu::SparseLu(const SparseMatrix& a) : impl_(std::make_unique<Impl>()) {
  if (a.n_rows != a.n_cols)
    throw std::invalid_argument("SparseLu: matrix must be square");
  impl_->n = a.n_rows;
  impl_->load(a);
  impl_->solver.setPivotThreshold(0.1);
  impl_->solver.analyzePattern(impl_->mat);
  impl_->solver.factorize(impl_->mat);
  if (impl_->solver.info() != Eigen::Success) {
    std::string msg = impl_->solver.lastErrorMessage();
    throw SingularMatrixError("lu factorization failed: " + msg,
                              parse_trailing_index(msg));
  }
}

SparseLu::~SparseLu() = default;
SparseLu::SparseLu(SparseLu&&) noexcept = default;
SparseLu& SparseLu::operator=(SparseLu&&) noexcept = default;

void SparseLu::refactorize(const SparseMatrix& a) {
  impl_->load(a);
  impl_->solver.factorize(impl_->mat);
  if (impl_->solver.info() != Eigen::Success) {
    std::string msg = impl_->solver.lastErrorMessage();
    throw SingularMatrixError("lu factorization failed: " + msg,
                              parse_trailing_index(msg));
  }
}

std::vector<double> SparseLu::solve(std::span<const double> b) const {
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd bs = impl_->scale.cwiseProduct(bv);
  Eigen::VectorXd y = impl_->solver.solve(bs);
  for (int pass = 0; pass < 3; ++pass) {
    Eigen::VectorXd r = bs - impl_->mat * y;
    y += impl_->solver.solve(r).eval();
  }
  Eigen::VectorXd x = impl_->scale.cwiseProduct(y);
  return std::vector<double>(x.data(), x.data() + x.size());
}

std::vector<double> lu_solve(const SparseMatrix& a, std::span<const double> b) {
  if (a.n_rows != static_cast<int>(b.size()))
    throw std::invalid_argument("lu_solve: dimension mismatch");
  SparseLu lu(a);
  std::vector<double> x = lu.solve(b);
  std::vector<double> r = a.multiply(x);
  for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  double bnorm = norm2(b);
  double rel = norm2(r) / (bnorm > 0.0 ? bnorm : 1.0);
  if (!(rel <= 1e-10)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3e", rel);
    throw std::runtime_error(std::string("lu_solve: relative residual ") + buf +
                             " exceeds 1e-10");
  }
  return x;
}

void write_matrix_coordinate(const SparseMatrix& a, std::ostream& os) {
  char buf[96];
  for (int i = 0; i < a.n_rows; ++i) {
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i, a.col_indices[k], a.values[k]);
      os << buf;
    }
  }
}

}  // namespace mhd
