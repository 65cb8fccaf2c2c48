#include "pdd/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "pdd/speckle.hpp"

namespace pdd {
namespace {

// Pursuit stalls when the best remaining correlation falls below this
// fraction of the signal norm; avoids chasing rounding noise.
constexpr double kStallRel = 1e-12;

// A candidate atom whose component orthogonal to the current span has
// squared norm below this is numerically dependent and gets skipped.
constexpr double kDependentEps = 1e-12;

constexpr double kZeroNorm = 1e-12;

Index argmax_abs(const Vector& values, const std::vector<char>& blocked) {
  Index best = -1;
  double best_value = -1.0;
  for (Index k = 0; k < values.size(); ++k) {
    if (blocked[k]) continue;
    const double v = std::abs(values[k]);
    if (v > best_value) { // strict: ties go to the lowest index
      best_value = v;
      best = k;
    }
  }
  return best;
}

// Box-Muller from our own uniform so the stream is identical on every
// platform (std::normal_distribution is implementation-defined).
Vector random_unit(std::mt19937_64& engine, Index n) {
  Vector v(n);
  for (;;) {
    for (Index i = 0; i < n; i += 2) {
      const double u1 = rng::unit_uniform(engine);
      const double u2 = rng::unit_uniform(engine);
      const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
      v[i] = r * std::cos(2.0 * M_PI * u2);
      if (i + 1 < n) v[i + 1] = r * std::sin(2.0 * M_PI * u2);
    }
    const double norm = v.norm();
    if (norm > kZeroNorm) return v / norm;
  }
}

// Squared Frobenius error with compensated summation, so plateaued traces
// wobble by genuine rounding only, well under the documented tolerance.
double frobenius_error(const Matrix& training, const Matrix& dict, const Matrix& codes) {
  const Matrix residual = training - dict * codes;
  double sum = 0.0, carry = 0.0;
  const double* p = residual.data();
  for (Index i = 0; i < residual.size(); ++i) {
    const double term = p[i] * p[i] - carry;
    const double next = sum + term;
    carry = (next - sum) - term;
    sum = next;
  }
  return sum;
}

} // namespace

Dictionary::Dictionary(Matrix atoms) : atoms_(std::move(atoms)) {
  if (atoms_.rows() < 1 || atoms_.cols() < 1)
    throw ValidationError("dictionary: empty atom matrix");
  if (!atoms_.allFinite())
    throw ValidationError("dictionary: non-finite atom entry");
  for (Index k = 0; k < atoms_.cols(); ++k) {
    const double norm = atoms_.col(k).norm();
    if (std::abs(norm - 1.0) > 1e-9)
      throw ValidationError("dictionary: atom " + std::to_string(k) +
                            " is not unit norm (|" + std::to_string(norm) + "|)");
  }
}

Dictionary Dictionary::normalized(Matrix atoms) {
  if (atoms.rows() < 1 || atoms.cols() < 1)
    throw ValidationError("dictionary: empty atom matrix");
  for (Index k = 0; k < atoms.cols(); ++k) {
    const double norm = atoms.col(k).norm();
    if (norm <= kZeroNorm)
      throw ValidationError("dictionary: atom " + std::to_string(k) +
                            " has zero norm");
    atoms.col(k) /= norm;
  }
  return Dictionary(std::move(atoms));
}

void SparseStop::validate() const {
  if (max_nonzeros < 0)
    throw ValidationError("sparse stop: max_nonzeros must be >= 0");
  if (error_bound < 0.0 || !std::isfinite(error_bound))
    throw ValidationError("sparse stop: error_bound must be finite and >= 0");
  if (max_nonzeros == 0 && error_bound == 0.0)
    throw ValidationError("sparse stop: need a support cap or an error bound");
}

Vector SparseCode::dense(Index dict_size) const {
  Vector v = Vector::Zero(dict_size);
  for (std::size_t i = 0; i < support.size(); ++i) v[support[i]] = values[i];
  return v;
}

SparseCode sparse_code_gram(const Vector& correlations, const Matrix& gram,
                            double energy, const SparseStop& stop,
                            std::vector<double>* iteration_errors) {
  stop.validate();
  const Index K = gram.rows();
  if (gram.cols() != K || correlations.size() != K)
    throw ValidationError("sparse_code: gram/correlation shape mismatch");

  SparseCode code;
  code.values.resize(0);
  code.residual2 = std::max(energy, 0.0);
  if (code.residual2 == 0.0) return code; // zero signal: empty code, zero error
  if (stop.error_bound > 0.0 && code.residual2 <= stop.error_bound) return code;

  const Index cap =
      stop.max_nonzeros > 0 ? std::min<Index>(stop.max_nonzeros, K) : K;
  const double stall = kStallRel * std::sqrt(code.residual2);

  Matrix chol(cap, cap);  // lower factor of gram(support, support)
  Vector corr_sel(cap);   // correlations restricted to the support
  Vector alpha = correlations; // correlations with the current residual
  Vector coeffs;
  std::vector<char> blocked(K, 0);
  code.support.reserve(cap);

  while (static_cast<Index>(code.support.size()) < cap) {
    const Index pick = argmax_abs(alpha, blocked);
    if (pick < 0 || std::abs(alpha[pick]) <= stall) break;

    const Index s = static_cast<Index>(code.support.size());
    if (s == 0) {
      chol(0, 0) = 1.0; // atoms are unit norm
    } else {
      Vector w(s);
      for (Index i = 0; i < s; ++i) w[i] = gram(code.support[i], pick);
      chol.topLeftCorner(s, s).triangularView<Eigen::Lower>().solveInPlace(w);
      const double orth2 = 1.0 - w.squaredNorm();
      if (orth2 <= kDependentEps) {
        blocked[pick] = 1; // numerically inside the current span
        code.degenerate = true;
        continue;
      }
      chol.row(s).head(s) = w.transpose();
      chol(s, s) = std::sqrt(orth2);
    }
    blocked[pick] = 1;
    code.support.push_back(pick);
    corr_sel[s] = correlations[pick];

    // refit: (L L^T) coeffs = correlations on the support
    coeffs = corr_sel.head(s + 1);
    auto lower = chol.topLeftCorner(s + 1, s + 1).triangularView<Eigen::Lower>();
    lower.solveInPlace(coeffs);
    lower.transpose().solveInPlace(coeffs);

    alpha = correlations;
    for (Index i = 0; i <= s; ++i)
      alpha -= gram.col(code.support[i]) * coeffs[i];
    code.residual2 = std::max(0.0, energy - coeffs.dot(corr_sel.head(s + 1)));
    if (iteration_errors) iteration_errors->push_back(code.residual2);
    if (stop.error_bound > 0.0 && code.residual2 <= stop.error_bound) break;
  }

  code.values = coeffs;
  return code;
}

SparseCode sparse_code(const Vector& signal, const Dictionary& dict,
                       const SparseStop& stop,
                       std::vector<double>* iteration_errors) {
  if (signal.size() != dict.dim())
    throw ValidationError("sparse_code: signal length != atom dimension");
  if (!signal.allFinite())
    throw ValidationError("sparse_code: non-finite signal sample");
  const Matrix& d = dict.atoms();
  return sparse_code_gram(d.transpose() * signal, d.transpose() * d,
                          signal.squaredNorm(), stop, iteration_errors);
}

Matrix reconstruct(const Dictionary& dict, const CoefficientMatrix& coefficients) {
  if (coefficients.dict_size() != dict.size())
    throw ValidationError("reconstruct: coefficient rows != atom count");
  return dict.atoms() * coefficients.entries;
}

namespace {

// ||z_m - D a_m||^2 evaluated directly over the column's support.
double column_error(const Matrix& training, const Matrix& dict, const Matrix& codes,
                    const std::vector<Index>& support, Index m) {
  Vector r = training.col(m);
  for (Index atom : support) r -= dict.col(atom) * codes(atom, m);
  return r.squaredNorm();
}

// Exact rank-1 refresh of one atom over its users. Returns false when the
// atom has no users (nothing to update).
bool update_atom(const Matrix& training, Matrix& dict, Matrix& codes,
                 const std::vector<std::vector<Index>>& supports, Index k) {
  std::vector<Index> users;
  for (Index m = 0; m < codes.cols(); ++m)
    if (codes(k, m) != 0.0) users.push_back(m);
  if (users.empty()) return false;

  Matrix e(training.rows(), static_cast<Index>(users.size()));
  for (std::size_t j = 0; j < users.size(); ++j) {
    const Index m = users[j];
    Vector r = training.col(m);
    for (Index atom : supports[m]) r -= dict.col(atom) * codes(atom, m);
    r += dict.col(k) * codes(k, m); // add back this atom's contribution
    e.col(j) = r;
  }

  Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector u = svd.matrixU().col(0);
  Vector v = svd.matrixV().col(0);
  const double sigma = svd.singularValues()[0];

  // Sign convention: the atom's largest-magnitude entry is positive.
  Index peak = 0;
  u.cwiseAbs().maxCoeff(&peak);
  if (u[peak] < 0.0) {
    u = -u;
    v = -v;
  }
  dict.col(k) = u;
  for (std::size_t j = 0; j < users.size(); ++j)
    codes(k, users[j]) = sigma * v[static_cast<Index>(j)];
  return true;
}

} // namespace

KsvdResult ksvd_learn(const Matrix& training, const KsvdOptions& options,
                      const KsvdObserver& observer) {
  const Index n = training.rows();
  const Index m_count = training.cols();
  if (n < 1 || m_count < 2)
    throw ValidationError("ksvd: training matrix must have >= 2 columns");
  if (!training.allFinite())
    throw ValidationError("ksvd: non-finite training sample");
  if (options.dict_size < 1)
    throw ValidationError("ksvd: dict_size must be >= 1");
  if (options.iterations < 1)
    throw ValidationError("ksvd: iterations must be >= 1");
  if (!(options.coherence_limit > 0.0 && options.coherence_limit < 1.0))
    throw ValidationError("ksvd: coherence_limit must be in (0, 1)");
  options.stop.validate();

  const Index k_count = options.dict_size;
  std::mt19937_64 engine(rng::mix(options.seed, 0x6b737664ULL)); // "ksvd"

  // Seeded random-unit initialization. Bootstrapping from training columns
  // is the other common choice, but it memorizes: any signal whose column
  // sits in the dictionary codes to itself with residual zero (its own atom
  // always wins the correlation argmax), and with dict_size >= column count
  // that freezes the whole factorization at the identity. Random atoms give
  // the update sweep something to improve everywhere.
  Matrix dict(n, k_count);
  for (Index k = 0; k < k_count; ++k) dict.col(k) = random_unit(engine, n);

  Matrix codes = Matrix::Zero(k_count, m_count);
  std::vector<std::vector<Index>> supports(static_cast<std::size_t>(m_count));
  KsvdReport report;

  for (int iter = 1; iter <= options.iterations; ++iter) {
    // -- sparse coding against the current dictionary
    const Matrix gram = dict.transpose() * dict;
    const Matrix corr = dict.transpose() * training;
    for (Index m = 0; m < m_count; ++m) {
      SparseCode fresh = sparse_code_gram(corr.col(m), gram,
                                          training.col(m).squaredNorm(),
                                          options.stop, nullptr);
      if (fresh.degenerate) ++report.degenerate_codes;

      // The pursuit is greedy, not optimal: re-coding can come back worse
      // than the column's previous code under the updated dictionary. A
      // fresh code inside the error bound is accepted outright (it meets
      // the model and is usually sparser); otherwise the previous code is
      // kept when it fits strictly better, which is what makes the sweep's
      // total error non-increasing when only a support cap is in play.
      if (iter > 1) {
        Vector r = training.col(m);
        for (std::size_t i = 0; i < fresh.support.size(); ++i)
          r -= dict.col(fresh.support[i]) * fresh.values[static_cast<Index>(i)];
        const double fresh_error = r.squaredNorm();
        const bool fresh_acceptable = options.stop.error_bound > 0.0 &&
                                      fresh_error <= options.stop.error_bound;
        if (!fresh_acceptable) {
          const double previous_error =
              column_error(training, dict, codes, supports[m], m);
          if (previous_error < fresh_error) continue;
        }
      }

      codes.col(m).setZero();
      for (std::size_t i = 0; i < fresh.support.size(); ++i)
        codes(fresh.support[i], m) = fresh.values[static_cast<Index>(i)];
      supports[m] = std::move(fresh.support);
    }

    // -- atom updates (unused atoms are handled by housekeeping below)
    for (Index k = 0; k < k_count; ++k)
      update_atom(training, dict, codes, supports, k);

    const double error = frobenius_error(training, dict, codes);
    report.error_trace.push_back(error);
    if (observer)
      observer(iter, Dictionary(dict), CoefficientMatrix{codes, supports}, error);

    // -- housekeeping: after the error is recorded so a reseed can only be
    // repaired by the following sweep, never degrade a recorded value; the
    // final dictionary is left exactly as evaluated.
    if (iter == options.iterations) break;

    std::vector<char> consumed(static_cast<std::size_t>(m_count), 0);
    auto worst_column = [&]() -> Index {
      Index worst = -1;
      double worst_error = -1.0;
      for (Index m = 0; m < m_count; ++m) {
        if (consumed[static_cast<std::size_t>(m)]) continue;
        const double e = column_error(training, dict, codes, supports[m], m);
        if (e > worst_error) {
          worst_error = e;
          worst = m;
        }
      }
      // Only a column the model genuinely fails (fit error above the stop
      // bound) may seed an atom. Re-seeding from well-represented columns
      // is pure memorization, and with dict_size >= column count it
      // spirals into an identity dictionary that denoises nothing.
      const double floor_error = std::max(options.stop.error_bound, kZeroNorm);
      if (worst >= 0 && worst_error > floor_error &&
          training.col(worst).norm() > kZeroNorm)
        return worst;
      return -1;
    };
    auto reseed = [&](Index k) {
      const Index source = worst_column();
      if (source >= 0) {
        dict.col(k) = training.col(source) / training.col(source).norm();
        consumed[static_cast<std::size_t>(source)] = 1;
      } else {
        dict.col(k) = random_unit(engine, n);
      }
    };

    for (Index k = 0; k < k_count; ++k) {
      bool used = false;
      for (Index m = 0; m < m_count && !used; ++m) used = codes(k, m) != 0.0;
      if (!used) {
        reseed(k);
        ++report.unused_replaced;
      }
    }

    for (Index j = 1; j < k_count; ++j) {
      Index mate = -1;
      double best = options.coherence_limit;
      for (Index i = 0; i < j; ++i) {
        const double c = std::abs(dict.col(i).dot(dict.col(j)));
        if (c > best) {
          best = c;
          mate = i;
        }
      }
      if (mate < 0) continue;
      // Fold j's coefficients into the kept atom (sign-aware) so the
      // approximation stays consistent, then refresh the kept atom and
      // reseed j. Plain reseeding with live coefficients would inject an
      // arbitrary error into the next iteration.
      const double sign = dict.col(mate).dot(dict.col(j)) >= 0.0 ? 1.0 : -1.0;
      for (Index m = 0; m < m_count; ++m) {
        if (codes(j, m) == 0.0) continue;
        if (codes(mate, m) == 0.0) supports[m].push_back(mate);
        codes(mate, m) += sign * codes(j, m);
        codes(j, m) = 0.0;
        std::erase(supports[m], j);
      }
      update_atom(training, dict, codes, supports, mate);
      reseed(j);
      ++report.coherent_replaced;
    }
  }

  return KsvdResult{Dictionary(dict), CoefficientMatrix{codes, supports},
                    std::move(report)};
}

} // namespace pdd
