#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ccn/feedforward.hpp"

namespace ccn {

struct BranchSample {
  double lambda = 0.0;
  Vec state;            // equilibrium, (n*d) entries
  double residual = 0;  // ||Gamma_f(state, lambda)||
  int newton_iters = 0;
};

struct ContinuationResult {
  std::vector<BranchSample> samples;     // converged, descending |lambda|
  std::vector<double> failed_lambdas;    // grid points with no equilibrium found
};

// Signed geometric grid, processed from |hi| down to |lo|.
std::vector<double> lambda_grid(int side, double lo = 1e-8, double hi = 1e-3,
                                int points = 24);

// Follows the steady-state branch selected by `pred` on one side of lambda=0:
// root cells take the synchronous value X(lambda); the remaining cells are
// solved in descending reachability order, critical cells by damped-Newton
// multi-start over the bracket |lambda|^(2^-mu) with backtracking over root
// candidates, the rest by warm-started Newton.  Only converged grid points
// become samples.
ContinuationResult continue_branch(const MonoidTable& tab,
                                   const AdmissibleField& field,
                                   const BranchPrediction& pred, int side,
                                   double lo = 1e-8, double hi = 1e-3,
                                   int points = 24);

struct CellFit {
  double exponent = 0.0;     // log-log slope over the smallest 12 |lambda|
  double coefficient = 0.0;  // exp(intercept)
  double r2 = 0.0;
  bool classified = false;   // within 0.05 of a dyadic exponent and r2 >= 0.999
  double dyadic = 0.0;       // nearest of {1, 1/2, 1/4, 1/8} when classified
};

struct ExponentFit {
  std::vector<CellFit> cells;  // per monoid element
};

// Least-squares exponent per cell from the 12 smallest-|lambda| samples.
// Throws InsufficientSamples below 12 converged samples.
ExponentFit estimate_exponents(const std::vector<BranchSample>& samples,
                               int n_cells, int d);

struct SeedVerdict {
  std::uint64_t seed = 0;
  bool pass = false;
  int side = 0;  // side that matched (0 = none usable)
  ExponentFit fit;
  std::string note;
};

struct VerificationReport {
  bool applicable = true;
  int total = 0;
  int passed = 0;
  double pass_rate = 0.0;
  std::vector<SeedVerdict> verdicts;
};

// Builds one constrained random field per seed, continues the predicted
// branch on both sides, and checks the fitted exponents against 2^(-mu):
// critical cells must match within 0.05 (r2 >= 0.999), non-critical cells
// must not grow faster than the predicted ceiling.  A seed passes when
// either side matches.  Not applicable to non-feedforward networks.
VerificationReport verify_amplification(const MonoidTable& tab, int d,
                                        int critical,
                                        const std::vector<int>& root,
                                        const std::vector<std::uint64_t>& seeds,
                                        int l = 1);

struct SpectrumReport {
  std::vector<std::complex<double>> direct;     // eigensolve in topo basis
  std::vector<std::complex<double>> predicted;  // class-block spectra x class size
  double max_mismatch = 0.0;
  bool match = false;
};

// Compares the spectrum of a linear admissible map against the per-class
// diagonal-block prediction.  The eigensolve runs in the topological basis,
// where the matrix is exactly block triangular.
SpectrumReport spectrum_report(const MonoidTable& tab,
                               const LinearAdmissibleMap& L);

}  // namespace ccn
