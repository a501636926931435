#pragma once

// Compressed-row sparse matrices and a direct LU solver for the indefinite
// saddle-point systems produced by the Newton iteration.

#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhd {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct SparseMatrix {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> row_offsets;  // size n_rows + 1
  std::vector<int> col_indices;  // sorted and unique within each row
  std::vector<double> values;

  int nnz() const { return static_cast<int>(col_indices.size()); }
  std::vector<double> multiply(std::span<const double> x) const;
  SparseMatrix transposed() const;
};

// Duplicate entries are summed. The result is bitwise independent of the
// triplet order. Throws std::out_of_range on an index outside the shape.
SparseMatrix from_triplets(int n_rows, int n_cols, std::vector<Triplet> triplets);

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, int pivot_index)
      : std::runtime_error(what), pivot_(pivot_index) {}
  int pivot_index() const { return pivot_; }

 private:
  int pivot_;
};

// Sparse LU with COLAMD column ordering and threshold partial pivoting
// (threshold 0.1). The factorization can be refreshed on a matrix with the
// same sparsity pattern without repeating the symbolic analysis.
class SparseLu {
 public:
  explicit SparseLu(const SparseMatrix& a);
  ~SparseLu();
  SparseLu(SparseLu&&) noexcept;
  SparseLu& operator=(SparseLu&&) noexcept;

  void refactorize(const SparseMatrix& a);
  std::vector<double> solve(std::span<const double> b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot solve; checks the relative residual |Ax-b| / |b| <= 1e-10 and
// throws std::runtime_error when the factorization fails to reach it.
std::vector<double> lu_solve(const SparseMatrix& a, std::span<const double> b);

double norm2(std::span<const double> v);

// Coordinate-format text dump, one "i j value" line per entry.
void write_matrix_coordinate(const SparseMatrix& a, std::ostream& os);

}  // namespace mhd
