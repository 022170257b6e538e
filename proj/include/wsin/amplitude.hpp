#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wsin/signal_model.hpp"
#include "wsin/surrogate.hpp"

namespace wsin {

/// Column-major dense matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[c * rows + r]; }
  double operator()(std::size_t r, std::size_t c) const { return data[c * rows + r]; }
  std::span<double> column(std::size_t c) { return {data.data() + c * rows, rows}; }
  std::span<const double> column(std::size_t c) const { return {data.data() + c * rows, rows}; }
};

/// Minimizes ||A x - b||_2 via Householder QR. Throws ConditioningError naming the pair of
/// columns responsible when A is numerically rank deficient.
std::vector<double> least_squares_qr(const DenseMatrix& a, std::span<const double> b,
                                     double rank_tolerance = 1e-10);

enum class BasisFunction { Cos, Sin };

enum class RepresentationTag { Identity, DftMagnitude };

struct Representation {
  RepresentationTag tag = RepresentationTag::Identity;
  std::size_t dft_size = 0;  ///< DftMagnitude only; 0 means the signal length

  std::size_t output_dimension(std::size_t length) const noexcept {
    return tag == RepresentationTag::Identity ? length : (dft_size == 0 ? length : dft_size);
  }
};

/// u_{nk} = basis(arg(z_k) n). Depends on the angles only.
DenseMatrix design_matrix(const SurrogateModel& model, BasisFunction basis);

/// Applies h to a single length-N vector (identity, or DFT modulus).
std::vector<double> apply_representation(const Representation& rep, std::span<const double> v);

/// v_n = sum_k Re(z_k^n), i.e. the surrogate render with unit amplitudes.
Signal render_surrogate_sum(const SurrogateModel& model);

struct AmplitudeEstimate {
  std::vector<double> least_squares;  ///< alpha*_k
  std::vector<double> combined;       ///< learned amplitude times alpha*_k
};

/// Ordinary least squares projection of h(v) onto the columns of H(U).
AmplitudeEstimate recover_amplitudes(const SurrogateModel& model, const Representation& rep,
                                     BasisFunction basis = BasisFunction::Cos);

}  // namespace wsin
