#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pdd/errors.hpp"
#include "pdd/types.hpp"

namespace pdd {

// Dictionary of unit-norm atoms (columns). Overcomplete in normal use, but
// undercomplete dictionaries are legal (useful for exhaustive testing).
class Dictionary {
public:
  explicit Dictionary(Matrix atoms);

  // Normalizes columns before validating; throws on a zero column.
  static Dictionary normalized(Matrix atoms);

  Index dim() const { return atoms_.rows(); }   // signal dimension N
  Index size() const { return atoms_.cols(); }  // atom count K
  const Matrix& atoms() const { return atoms_; }

private:
  Matrix atoms_;
};

// Stopping rule for sparse coding. Coding halts as soon as the squared
// residual reaches error_bound, or the support hits max_nonzeros, whichever
// comes first. max_nonzeros == 0 means "no cap"; at least one of the two
// must be active.
struct SparseStop {
  int max_nonzeros = 0;
  double error_bound = 0.0;

  void validate() const;
};

struct SparseCode {
  std::vector<Index> support; // atom indices in selection order
  Vector values;              // least-squares coefficients, aligned with support
  double residual2 = 0.0;     // squared residual at termination
  bool degenerate = false;    // an atom was skipped as numerically dependent

  Vector dense(Index dict_size) const;
};

// Codes for a batch of signals, stored densely (K x M) plus the per-column
// supports in selection order.
struct CoefficientMatrix {
  Matrix entries;
  std::vector<std::vector<Index>> supports;

  Index dict_size() const { return entries.rows(); }
  Index signals() const { return entries.cols(); }
};

// Orthogonal matching pursuit for one signal. Greedy selection by absolute
// correlation (ties to the lowest index), least-squares refit on the grown
// support each step. Never reselects an atom. If iteration_errors is given
// it receives the squared residual after every selection.
SparseCode sparse_code(const Vector& signal, const Dictionary& dict,
                       const SparseStop& stop,
                       std::vector<double>* iteration_errors = nullptr);

// Same pursuit driven by precomputed products: correlations = D^T x,
// gram = D^T D, energy = x^T x. This is the form the trainer batches.
SparseCode sparse_code_gram(const Vector& correlations, const Matrix& gram,
                            double energy, const SparseStop& stop,
                            std::vector<double>* iteration_errors = nullptr);

Matrix reconstruct(const Dictionary& dict, const CoefficientMatrix& coefficients);

struct KsvdOptions {
  Index dict_size = 128;
  int iterations = 12;
  SparseStop stop;
  std::uint64_t seed = 0;
  double coherence_limit = 0.999;
};

// Housekeeping counters and the per-iteration training error trace.
struct KsvdReport {
  std::vector<double> error_trace; // squared Frobenius error after each sweep
  int unused_replaced = 0;
  int coherent_replaced = 0;
  int degenerate_codes = 0;
};

struct KsvdResult {
  Dictionary dictionary;
  CoefficientMatrix coefficients;
  KsvdReport report;
};

// Called after each iteration with the iteration number (1-based), the
// current dictionary/codes and the training error.
using KsvdObserver =
    std::function<void(int, const Dictionary&, const CoefficientMatrix&, double)>;

// Alternate sparse coding and rank-1 atom updates. Deterministic for a
// given seed. Training error is non-increasing across iterations: a column
// keeps its previous code when the fresh pursuit would fit worse, and atom
// updates are exact rank-1 minimizers. Unused atoms are reseeded from the
// worst-represented training column; near-parallel atom pairs are merged.
KsvdResult ksvd_learn(const Matrix& training, const KsvdOptions& options,
                      const KsvdObserver& observer = {});

} // namespace pdd
