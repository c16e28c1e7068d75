#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "storymap/contingency.hpp"

namespace storymap {

// Relative frequencies of a contingency table with its marginal masses and
// row profiles (each row divided by its mass).
struct ProfileCloud {
    Eigen::MatrixXd relative;      // f_ij = k(i,j) / k
    Eigen::VectorXd row_masses;    // f_i
    Eigen::VectorXd col_masses;    // f_j
    Eigen::MatrixXd row_profiles;  // f_ij / f_i
    std::vector<std::size_t> row_labels;
    std::vector<std::string> col_labels;

    std::size_t n_rows() const { return static_cast<std::size_t>(relative.rows()); }
    std::size_t n_cols() const { return static_cast<std::size_t>(relative.cols()); }
};

// Factors whose eigenvalue falls below this fraction of the first are dropped.
inline constexpr double kFactorRelativeTolerance = 1e-12;
// A cloud whose first eigenvalue is below this is treated as independent
// (no factors at all).
inline constexpr double kFactorAbsoluteFloor = 1e-24;

struct CorrespondenceEmbedding {
    Eigen::VectorXd eigenvalues;         // non-increasing, length N
    Eigen::MatrixXd row_projections;     // n x N, F_a(i)
    Eigen::MatrixXd col_projections;     // m x N, G_a(j)
    Eigen::VectorXd row_masses;
    Eigen::VectorXd col_masses;
    double inertia_total = 0.0;          // direct evaluation over the cloud
    Eigen::VectorXd percent_inertia;     // 100 * eigenvalue / sum(eigenvalues)
    Eigen::MatrixXd row_correlations;    // signed cosines, zero rows where the norm vanishes
    Eigen::MatrixXd squared_cosines;
    std::vector<std::size_t> zero_norm_rows;  // 0-based rows at the origin
    std::vector<std::size_t> row_labels;
    std::vector<std::string> col_labels;

    std::size_t n_factors() const { return static_cast<std::size_t>(eigenvalues.size()); }
    std::size_t n_rows() const { return static_cast<std::size_t>(row_projections.rows()); }
    bool has_zero_norm_rows() const { return !zero_norm_rows.empty(); }
};

// Throws ZeroMass when a row or column of the table sums to zero.
ProfileCloud make_profiles(const ContingencyTable& table);

// Sum over cells of (f_ij - f_i f_j)^2 / (f_i f_j).
double total_inertia(const ProfileCloud& cloud);

// Squared chi-squared distance between the profiles of rows a and b, centred
// on the column masses.
double chi2_distance(const ProfileCloud& cloud, std::size_t a, std::size_t b);

// Principal axes of inertia from the SVD of the standardized residuals.
// Each factor's sign is fixed so that its largest-magnitude row projection is
// positive. Throws NumericalFailure if the SVD does not converge.
CorrespondenceEmbedding embed(const ProfileCloud& cloud);

// Signed cosines of row i with every retained factor. Throws ZeroNormRow when
// the row projects onto the origin.
Eigen::VectorXd correlations(const CorrespondenceEmbedding& embedding, std::size_t i);

}  // namespace storymap
