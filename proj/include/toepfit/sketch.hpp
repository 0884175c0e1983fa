#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "toepfit/toeplitz.hpp"

namespace toepfit {

// c rows drawn with replacement from a distribution pi over source_rows rows.
// indices/weights are parallel; the draw of row i carries weight
// 1/sqrt(c * pi(i)), which makes the sketched Gram matrix unbiased.
struct SampleSet {
  std::vector<std::int64_t> indices;  // 0-based
  std::vector<double> weights;
  std::int64_t source_rows = 0;

  std::int64_t size() const { return static_cast<std::int64_t>(indices.size()); }
};

struct SketchConfig {
  double epsilon = 0.5;
  double delta = 0.1;
  std::optional<std::int64_t> c_override;
  std::uint64_t seed = 0;

  void validate() const;
};

// Dense Gaussian sketch with g rows; entries are i.i.d. standard normal,
// regenerated on demand from the seed, so the matrix is never stored.
struct GaussianSketch {
  std::int64_t rows = 0;  // g
  std::uint64_t seed = 0;
};

inline std::int64_t default_gaussian_rows(std::int64_t n) {
  return static_cast<std::int64_t>(std::ceil(8.0 * std::log(static_cast<double>(n))));
}

// Inverse-CDF sampling with replacement: O(n + c log n) per set.
SampleSet sample_rows(const Eigen::Ref<const Eigen::VectorXd>& pi, std::int64_t c,
                      std::uint64_t seed);

// Compressed copies: output row t = weight_t * source row i_t (restricted to
// the first `width` columns for the system overload), target t = weight_t *
// target(i_t).
void apply_sample(const ToeplitzSystem& sys, const SampleSet& s, int width,
                  Eigen::MatrixXd& a_out, Eigen::VectorXd& b_out);
void apply_sample(const ToeplitzSystem& sys, const SampleSet& s, Eigen::MatrixXd& a_out,
                  Eigen::VectorXd& b_out);
void apply_sample(const Eigen::Ref<const Eigen::MatrixXd>& a,
                  const Eigen::Ref<const Eigen::VectorXd>& b, const SampleSet& s,
                  Eigen::MatrixXd& a_out, Eigen::VectorXd& b_out);

// solve_exact on the compressed system, tagged compressed. Handles c < cols
// through the minimum-norm path.
OLSSolution solve_compressed(const Eigen::Ref<const Eigen::MatrixXd>& a_s,
                             const Eigen::Ref<const Eigen::VectorXd>& b_s);

// In-place normalized fast Walsh-Hadamard transform: each butterfly level
// scales by 1/sqrt(2), so the whole transform is orthogonal and involutive.
// Length must be a power of two.
void hadamard_apply(std::span<double> x);
Eigen::VectorXd hadamard_apply(const Eigen::Ref<const Eigen::VectorXd>& x);

// Pruned transform: computes only the requested output rows of the
// normalized transform of a length-n input, in O(n log c) for c rows.
// Level scratch is reused across calls, so one instance per thread.
class PartialHadamard {
 public:
  explicit PartialHadamard(std::int64_t n);

  // idx must be sorted ascending, unique, within [0, n); x length = n.
  // out[k] = (H x)(idx[k]).
  void rows(std::span<const double> x, std::span<const std::int64_t> idx,
            std::span<double> out);

  std::int64_t size() const { return n_; }

 private:
  struct Req {
    std::int64_t idx;
    std::int64_t out;
  };
  void recurse(const double* x, std::int64_t len, int level, Req* first, Req* last,
               double* out);

  std::int64_t n_;
  std::vector<std::vector<double>> scratch_;  // scratch_[level] holds len/2 values
  std::vector<Req> reqs_;
};

struct SrhtCount {
  std::int64_t c = 0;
  double formula_value = 0.0;  // uncapped
  bool capped = false;
};

// Ideal sampled-row count for the Hadamard sketch:
// max(48^2 d ln(40nd) ln(100^2 d ln(40nd)), 40 d ln(40nd) / eps), capped at n.
SrhtCount srht_sample_count(std::int64_t n, std::int64_t d, double epsilon);

// Randomized-Hadamard sketched solve: zero-pad to a power of two, apply a
// random +-1 diagonal, mix with the normalized transform, uniformly sample c
// rows with weight sqrt(n_pad/c), and solve the compressed system. Only the
// sampled output rows of the transform are computed.
OLSSolution srht_solve(const Eigen::Ref<const Eigen::MatrixXd>& a,
                       const Eigen::Ref<const Eigen::VectorXd>& b, std::int64_t c,
                       std::uint64_t seed);

// G * m for the implicit g x rows(m) Gaussian matrix; entries are drawn
// column-by-column of G (one column per row of m) in a fixed order.
Eigen::MatrixXd gaussian_apply(const GaussianSketch& sketch,
                               const Eigen::Ref<const Eigen::MatrixXd>& m);

// Debug dump: index,weight rows.
void write_sampleset_csv(const SampleSet& s, const std::string& path);

}  // namespace toepfit
