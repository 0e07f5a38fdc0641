#include "klab/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "klab/errors.hpp"
#include "klab/io.hpp"
#include "klab/special_functions.hpp"

namespace klab {
namespace {

bool item_less(const EigenItem& a, const EigenItem& b) {
  if (a.lambda != b.lambda) return a.lambda < b.lambda;
  return a.label < b.label;
}

// Every k in the box |k_i| <= reach_i with the given first coordinate.
template <class F>
void for_each_in_box(int first, const std::vector<int>& reach, F&& f) {
  const std::size_t n = reach.size();
  std::vector<int> k(n);
  k[0] = first;
  for (std::size_t i = 1; i < n; ++i) k[i] = -reach[i];
  while (true) {
    f(k);
    std::size_t i = 1;
    while (i < n && k[i] == reach[i]) {
      k[i] = -reach[i];
      ++i;
    }
    if (i >= n) return;
    ++k[i];
  }
}

}  // namespace

std::complex<double> period_integral(const ModelManifold& model, const Submanifold& h, const std::vector<int>& label) {
  if (model.kind() == ModelKind::round_sphere) {
    if (label.size() != 2 || label[0] < 0 || std::abs(label[1]) > label[0])
      throw ConfigError("invalid label " + label_string(label) + " for the sphere");
    if (label[1] != 0) return 0.0;
    return kTwoPi * std::sin(h.theta0()) * zonal_harmonic(label[0], h.theta0());
  }
  const int n = model.dim();
  if (static_cast<int>(label.size()) != n) throw ConfigError("invalid label " + label_string(label) + " for the torus");
  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i) k(i) = label[static_cast<std::size_t>(i)];
  const Eigen::VectorXd m = model.dual_lattice().transpose() * k;
  const double norm = 1.0 / std::sqrt(model.volume());
  const auto phase = [&](const Eigen::VectorXd& x) { return std::polar(1.0, x.dot(m)); };
  switch (h.kind()) {
    case SubmanifoldKind::embedded_circle:
      return norm * phase(h.center()) * (h.radius() * kTwoPi * bessel_j0(h.radius() * m.norm()));
    case SubmanifoldKind::point:
      return norm * phase(h.anchor());
    case SubmanifoldKind::affine_subtorus:
      for (int a = 0; a < h.dim(); ++a) {
        if (label[static_cast<std::size_t>(a)] != 0) return 0.0;
      }
      return norm * phase(h.anchor()) * h.volume();
    case SubmanifoldKind::latitude_circle:
      break;
  }
  throw ConfigError("submanifold does not match the model");
}

SpectrumTable enumerate_spectrum(const ModelManifold& model, const Submanifold& h, double lambda_max,
                                 const Executor& exec, double cap) {
  if (!(lambda_max >= 0.0) || !std::isfinite(lambda_max)) throw ConfigError("lambda_max must be >= 0");
  SpectrumTable table;
  table.lambda_max = lambda_max;
  table.model = model.descriptor();
  table.h = h.descriptor();

  if (model.kind() == ModelKind::round_sphere) {
    const double r = model.radius();
    for (int l = 0;; ++l) {
      const double lambda = std::sqrt(static_cast<double>(l) * (l + 1.0)) / r;
      if (lambda > lambda_max) break;
      if (static_cast<double>(l) + 1.0 > cap) throw ConfigError("spectrum item count exceeds cap");
      std::vector<int> label = {l, 0};
      table.items.push_back({lambda, label, period_integral(model, h, label)});
      table.folded_zero_items.push_back(2LL * l);
    }
    return table;
  }

  const int n = model.dim();
  const double estimate =
      unit_ball_volume(n) * std::pow(lambda_max, n) * model.volume() / std::pow(kTwoPi, n);
  if (estimate > cap) throw ConfigError("spectrum item count exceeds cap");

  // k = B m / (2 pi), so |k_i| <= |b_i| lambda / (2 pi).
  std::vector<int> reach(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    reach[static_cast<std::size_t>(i)] =
        static_cast<int>(std::floor(model.lattice().row(i).norm() * lambda_max / kTwoPi + 1e-9));
  const double bound = lambda_max * lambda_max * (1.0 + 1e-12);
  const Eigen::MatrixXd dual_t = model.dual_lattice().transpose();

  const auto shards = static_cast<std::size_t>(2 * reach[0] + 1);
  std::vector<std::vector<EigenItem>> parts(shards);
  exec.for_each_index(shards, [&](std::size_t s) {
    const int first = static_cast<int>(s) - reach[0];
    for_each_in_box(first, reach, [&](const std::vector<int>& k) {
      Eigen::VectorXd kv(n);
      for (int i = 0; i < n; ++i) kv(i) = k[static_cast<std::size_t>(i)];
      const Eigen::VectorXd m = dual_t * kv;
      const double sq = m.squaredNorm();
      if (sq > bound) return;
      parts[s].push_back({std::sqrt(sq), k, period_integral(model, h, k)});
    });
  });
  for (auto& p : parts) table.items.insert(table.items.end(), p.begin(), p.end());
  std::sort(table.items.begin(), table.items.end(), item_less);
  return table;
}

std::string label_string(const std::vector<int>& label) {
  std::string out = "(";
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (i) out += " ";
    out += std::to_string(label[i]);
  }
  return out + ")";
}

std::string spectrum_csv(const SpectrumTable& table, const std::string& header) {
  std::string out;
  std::size_t start = 0;
  while (start < header.size()) {
    const auto end = header.find('\n', start);
    out += "# " + header.substr(start, end == std::string::npos ? std::string::npos : end - start) + "\n";
    if (end == std::string::npos) break;
    start = end + 1;
  }
  out += "lambda,label,period_re,period_im,period_abs2\n";
  for (const auto& item : table.items) {
    out += format_double(item.lambda) + "," + label_string(item.label) + "," + format_double(item.period.real()) +
           "," + format_double(item.period.imag()) + "," + format_double(std::norm(item.period)) + "\n";
  }
  return out;
}

}  // namespace klab
