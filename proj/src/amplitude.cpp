#include "wsin/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wsin/error.hpp"
#include "wsin/losses.hpp"

namespace wsin {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Column of A most nearly parallel to column k among the earlier ones.
std::size_t most_collinear(const DenseMatrix& a, std::size_t k) {
  std::size_t best = 0;
  double best_cos = -1.0;
  const double nk = norm2(a.column(k));
  for (std::size_t j = 0; j < k; ++j) {
    const double nj = norm2(a.column(j));
    double dot = 0.0;
    for (std::size_t r = 0; r < a.rows; ++r) dot += a(r, j) * a(r, k);
    const double c = (nj > 0.0 && nk > 0.0) ? std::abs(dot) / (nj * nk) : 1.0;
    if (c > best_cos) {
      best_cos = c;
      best = j;
    }
  }
  return best;
}

}  // namespace

std::vector<double> least_squares_qr(const DenseMatrix& a, std::span<const double> b,
                                     double rank_tolerance) {
  const std::size_t m = a.rows;
  const std::size_t n = a.cols;
  if (b.size() != m) throw ValidationError("least squares: rhs length does not match rows");
  if (n == 0) return {};
  if (n > m) throw ValidationError("least squares: more columns than rows");

  DenseMatrix r = a;
  std::vector<double> y(b.begin(), b.end());
  std::vector<double> col_norms(n);
  for (std::size_t j = 0; j < n; ++j) col_norms[j] = norm2(a.column(j));
  const double max_norm = *std::max_element(col_norms.begin(), col_norms.end());

  std::vector<double> v(m);
  for (std::size_t j = 0; j < n; ++j) {
    double sigma = 0.0;
    for (std::size_t i = j; i < m; ++i) sigma += r(i, j) * r(i, j);
    const double alpha_norm = std::sqrt(sigma);
    // Rank test relative to both the column's own norm and the largest column.
    if (alpha_norm <= rank_tolerance * std::max(col_norms[j], max_norm) || col_norms[j] == 0.0) {
      const std::size_t other = j == 0 ? 0 : most_collinear(a, j);
      throw ConditioningError(other, j,
                              "least squares: design matrix is rank deficient (columns " +
                                  std::to_string(other) + " and " + std::to_string(j) + ")");
    }
    const double alpha = r(j, j) > 0.0 ? -alpha_norm : alpha_norm;
    for (std::size_t i = 0; i < m; ++i) v[i] = 0.0;
    v[j] = r(j, j) - alpha;
    for (std::size_t i = j + 1; i < m; ++i) v[i] = r(i, j);
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < m; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 > 0.0) {
      for (std::size_t c = j; c < n; ++c) {
        double dot = 0.0;
        for (std::size_t i = j; i < m; ++i) dot += v[i] * r(i, c);
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < m; ++i) r(i, c) -= f * v[i];
      }
      double dot = 0.0;
      for (std::size_t i = j; i < m; ++i) dot += v[i] * y[i];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < m; ++i) y[i] -= f * v[i];
    }
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t jj = n; jj-- > 0;) {
    double s = y[jj];
    for (std::size_t c = jj + 1; c < n; ++c) s -= r(jj, c) * x[c];
    x[jj] = s / r(jj, jj);
  }
  return x;
}

DenseMatrix design_matrix(const SurrogateModel& model, BasisFunction basis) {
  validate(model);
  DenseMatrix u(model.length, model.size());
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double angle = std::arg(model.params[k]);
    for (std::size_t n = 0; n < model.length; ++n) {
      const double phase = angle * static_cast<double>(n);
      u(n, k) = basis == BasisFunction::Cos ? std::cos(phase) : std::sin(phase);
    }
  }
  return u;
}

std::vector<double> apply_representation(const Representation& rep, std::span<const double> v) {
  if (rep.tag == RepresentationTag::Identity) return {v.begin(), v.end()};
  return dft(v, rep.output_dimension(v.size())).magnitudes();
}

Signal render_surrogate_sum(const SurrogateModel& model) {
  SurrogateModel unit = model;
  unit.amplitudes.assign(model.size(), 1.0);
  return surrogate_forward(unit);
}

AmplitudeEstimate recover_amplitudes(const SurrogateModel& model, const Representation& rep,
                                     BasisFunction basis) {
  validate(model);
  if (model.size() > model.length) {
    throw ValidationError("recover_amplitudes: more components than samples");
  }
  const DenseMatrix u = design_matrix(model, basis);
  const Signal v = render_surrogate_sum(model);

  DenseMatrix h_u(rep.output_dimension(model.length), model.size());
  for (std::size_t k = 0; k < model.size(); ++k) {
    const std::vector<double> col = apply_representation(rep, u.column(k));
    std::copy(col.begin(), col.end(), h_u.column(k).begin());
  }
  const std::vector<double> h_v = apply_representation(rep, v);

  AmplitudeEstimate est;
  est.least_squares = least_squares_qr(h_u, h_v);
  est.combined.resize(model.size());
  for (std::size_t k = 0; k < model.size(); ++k) {
    est.combined[k] = model.amplitudes[k] * est.least_squares[k];
  }
  return est;
}

}  // namespace wsin
