#pragma once

#include <complex>
#include <string>
#include <vector>

#include "klab/geometry.hpp"
#include "klab/numeric.hpp"

namespace klab {

/// One eigenfunction with its period over H.
///
/// Torus: label = integer coordinates k of m = sum_i k_i d_i in the dual basis,
/// eigenfunction vol^{-1/2} e^{i<x, m>}, lambda = |m|.
/// Sphere: label = (l, 0), zonal harmonic, lambda = sqrt(l(l+1)) / R.
struct EigenItem {
  double lambda = 0.0;
  std::vector<int> label;
  std::complex<double> period;
};

struct SpectrumTable {
  std::vector<EigenItem> items;  // ascending lambda, then label
  double lambda_max = 0.0;
  ModelDescriptor model;
  SubmanifoldDescriptor h;
  /// Sphere only: number of m != 0 harmonics folded away per listed degree
  /// (their periods over a latitude circle vanish).
  std::vector<long long> folded_zero_items;
};

/// All eigenfunctions with lambda <= lambda_max. Throws ConfigError when the
/// item count would exceed cap.
SpectrumTable enumerate_spectrum(const ModelManifold& model, const Submanifold& h, double lambda_max,
                                 const Executor& exec = Executor{}, double cap = 1e7);

/// Period integral of the eigenfunction with the given label. Throws
/// ConfigError for an invalid label.
std::complex<double> period_integral(const ModelManifold& model, const Submanifold& h, const std::vector<int>& label);

std::string label_string(const std::vector<int>& label);

/// CSV with columns lambda, label, period_re, period_im, period_abs2, preceded by
/// '#' comment lines carrying the given header text.
std::string spectrum_csv(const SpectrumTable& table, const std::string& header);

}  // namespace klab
