#pragma once

// Randomized one-bit comparison model: landmark pairs, their normalized
// bisector hyperplanes, the sign observation operator, and the Hamming
// metric between observation vectors.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "pairloc/errors.hpp"

namespace pairloc {

// A pair of known landmark points in R^n.  One comparison against the pair
// reveals which side of their perpendicular bisector the unknown point lies.
struct ItemPair {
    Eigen::VectorXd p;
    Eigen::VectorXd q;
};

// How a frame's pairs were generated; kept so experiments can be re-derived
// from the serialized frame alone.  `external` marks frames built from pairs
// whose origin we do not control.
struct GenParams {
    Eigen::VectorXd mean;
    double sigma2 = 0.0;
    std::uint64_t seed = 0;
    bool external = true;

    static GenParams external_source() { return GenParams{}; }
};

// m normalized comparison hyperplanes: unit normals a_i (rows) and offsets
// tau_i.  Immutable after construction and safe to share across threads.
class ComparisonFrame {
public:
    ComparisonFrame(Eigen::MatrixXd normals, Eigen::VectorXd offsets,
                    GenParams gen_params = GenParams::external_source());

    int dimension() const { return static_cast<int>(normals_.cols()); }
    int count() const { return static_cast<int>(normals_.rows()); }
    const Eigen::MatrixXd& normals() const { return normals_; }
    const Eigen::VectorXd& offsets() const { return offsets_; }
    const GenParams& gen_params() const { return gen_params_; }

    // Signed margins a_i^T x - tau_i for all comparisons at once.
    Eigen::VectorXd margins(const Eigen::VectorXd& x) const;

    void save_csv(std::ostream& out) const;
    void save_csv(const std::filesystem::path& path) const;
    static ComparisonFrame load_csv(std::istream& in);
    static ComparisonFrame load_csv(const std::filesystem::path& path);

private:
    Eigen::MatrixXd normals_;   // m x n, unit rows
    Eigen::VectorXd offsets_;
    GenParams gen_params_;
};

// Vector of +/-1 observations.
class SignVector {
public:
    SignVector() = default;
    explicit SignVector(std::vector<int> signs);

    int size() const { return static_cast<int>(signs_.size()); }
    int operator[](int i) const { return signs_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& values() const { return signs_; }

    // Returns a copy with the given entries negated.
    SignVector with_flips(const std::vector<int>& indices) const;

    bool operator==(const SignVector&) const = default;

private:
    std::vector<int> signs_;
};

// Draws m landmark pairs with i.i.d. Gaussian(mean_j, variance) coordinates.
// Pairs closer than 1e-12 are redrawn (at most 100 times, then
// DegeneratePair); deterministic for a fixed seed.
std::vector<ItemPair> sample_pairs(int m, int n, const Eigen::VectorXd& mean,
                                   double variance, std::uint64_t seed);

// Reduces raw pairs to normalized hyperplanes:
//   a_i = (p_i - q_i)/||p_i - q_i||,  tau_i = (||p_i||^2 - ||q_i||^2)/(2||p_i - q_i||).
// The raw (unnormalized) quantities are not retained.
ComparisonFrame derive_frame(const std::vector<ItemPair>& pairs,
                             GenParams gen_params = GenParams::external_source());

// sample_pairs + derive_frame with provenance recorded.
ComparisonFrame sample_frame(int m, int n, const Eigen::VectorXd& mean,
                             double variance, std::uint64_t seed);

// Noise-free observation operator: sign(a_i^T x - tau_i) with sign(0) := +1.
// Equivalent to comparing squared distances to the raw pair.
SignVector observe(const Eigen::VectorXd& x, const ComparisonFrame& frame);

// Fraction of entries that differ; a metric on sign vectors of equal length.
double hamming(const SignVector& s1, const SignVector& s2);

void save_signs(const SignVector& signs, std::ostream& out);
void save_signs(const SignVector& signs, const std::filesystem::path& path);
SignVector load_signs(std::istream& in);
SignVector load_signs(const std::filesystem::path& path);

}  // namespace pairloc
