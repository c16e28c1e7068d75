#include "storymap/ca_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "storymap/errors.hpp"

namespace storymap {

namespace {

// Relative threshold (against the largest row norm) below which a row is
// considered to sit at the centroid.
constexpr double kZeroNormRelative = 1e-20;

}  // namespace

ProfileCloud make_profiles(const ContingencyTable& table) {
    const auto n = static_cast<Eigen::Index>(table.n_rows());
    const auto m = static_cast<Eigen::Index>(table.n_cols());
    if (table.total() == 0) throw ZeroMass("table total is zero");

    ProfileCloud cloud;
    const double k = static_cast<double>(table.total());
    cloud.relative = Eigen::MatrixXd::Zero(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (const auto& e : table.row(static_cast<std::size_t>(i)))
            cloud.relative(i, static_cast<Eigen::Index>(e.col)) = static_cast<double>(e.count) / k;

    cloud.row_masses.resize(n);
    cloud.col_masses.resize(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto s = table.row_sums()[static_cast<std::size_t>(i)];
        if (s == 0) throw ZeroMass("row " + std::to_string(table.row_labels()[static_cast<std::size_t>(i)]) + " has no mass");
        cloud.row_masses(i) = static_cast<double>(s) / k;
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto s = table.col_sums()[static_cast<std::size_t>(j)];
        if (s == 0) throw ZeroMass("column '" + table.col_labels()[static_cast<std::size_t>(j)] + "' has no mass");
        cloud.col_masses(j) = static_cast<double>(s) / k;
    }

    // Profiles from the integer counts so each row sums to 1 up to rounding.
    cloud.row_profiles = Eigen::MatrixXd::Zero(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rs = static_cast<double>(table.row_sums()[static_cast<std::size_t>(i)]);
        for (const auto& e : table.row(static_cast<std::size_t>(i)))
            cloud.row_profiles(i, static_cast<Eigen::Index>(e.col)) = static_cast<double>(e.count) / rs;
    }
    cloud.row_labels = table.row_labels();
    cloud.col_labels = table.col_labels();
    return cloud;
}

double total_inertia(const ProfileCloud& cloud) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < cloud.relative.rows(); ++i) {
        for (Eigen::Index j = 0; j < cloud.relative.cols(); ++j) {
            const double expected = cloud.row_masses(i) * cloud.col_masses(j);
            const double diff = cloud.relative(i, j) - expected;
            sum += diff * diff / expected;
        }
    }
    return sum;
}

double chi2_distance(const ProfileCloud& cloud, std::size_t a, std::size_t b) {
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    double sum = 0.0;
    for (Eigen::Index j = 0; j < cloud.relative.cols(); ++j) {
        const double d = cloud.row_profiles(ia, j) - cloud.row_profiles(ib, j);
        sum += d * d / cloud.col_masses(j);
    }
    return sum;
}

CorrespondenceEmbedding embed(const ProfileCloud& cloud) {
    const Eigen::Index n = cloud.relative.rows();
    const Eigen::Index m = cloud.relative.cols();

    const Eigen::VectorXd row_isqrt = cloud.row_masses.array().rsqrt();
    const Eigen::VectorXd col_isqrt = cloud.col_masses.array().rsqrt();
    const Eigen::MatrixXd residual = cloud.relative - cloud.row_masses * cloud.col_masses.transpose();
    const Eigen::MatrixXd standardized = row_isqrt.asDiagonal() * residual * col_isqrt.asDiagonal();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(standardized, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        std::ostringstream os;
        os << "SVD of the " << n << "x" << m << " standardized residual matrix did not converge"
           << " (Frobenius norm " << standardized.norm() << ", finite: " << std::boolalpha
           << standardized.allFinite() << ")";
        throw NumericalFailure(os.str());
    }

    const Eigen::VectorXd& sv = svd.singularValues();
    const Eigen::Index max_dim = std::max<Eigen::Index>(0, std::min(n, m) - 1);
    const double lead = sv.size() > 0 ? sv(0) * sv(0) : 0.0;
    Eigen::Index kept = 0;
    if (lead >= kFactorAbsoluteFloor) {
        while (kept < std::min<Eigen::Index>(max_dim, sv.size()) &&
               sv(kept) * sv(kept) >= kFactorRelativeTolerance * lead)
            ++kept;
    }

    CorrespondenceEmbedding e;
    e.row_labels = cloud.row_labels;
    e.col_labels = cloud.col_labels;
    e.row_masses = cloud.row_masses;
    e.col_masses = cloud.col_masses;
    e.inertia_total = total_inertia(cloud);
    e.eigenvalues = sv.head(kept).array().square();

    const Eigen::VectorXd sigma = sv.head(kept);
    e.row_projections = row_isqrt.asDiagonal() * svd.matrixU().leftCols(kept) * sigma.asDiagonal();
    e.col_projections = col_isqrt.asDiagonal() * svd.matrixV().leftCols(kept) * sigma.asDiagonal();

    for (Eigen::Index a = 0; a < kept; ++a) {
        Eigen::Index arg = 0;
        e.row_projections.col(a).cwiseAbs().maxCoeff(&arg);
        if (e.row_projections(arg, a) < 0.0) {
            e.row_projections.col(a) *= -1.0;
            e.col_projections.col(a) *= -1.0;
        }
    }

    const double eig_sum = e.eigenvalues.sum();
    e.percent_inertia = kept > 0 ? Eigen::VectorXd(100.0 * e.eigenvalues / eig_sum) : Eigen::VectorXd();

    const Eigen::VectorXd norms2 = e.row_projections.rowwise().squaredNorm();
    const double max_norm2 = n > 0 && kept > 0 ? norms2.maxCoeff() : 0.0;
    e.row_correlations = Eigen::MatrixXd::Zero(n, kept);
    e.squared_cosines = Eigen::MatrixXd::Zero(n, kept);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (kept == 0 || norms2(i) <= kZeroNormRelative * max_norm2 || norms2(i) == 0.0) {
            e.zero_norm_rows.push_back(static_cast<std::size_t>(i));
            continue;
        }
        e.row_correlations.row(i) = e.row_projections.row(i) / std::sqrt(norms2(i));
        e.squared_cosines.row(i) = e.row_projections.row(i).array().square() / norms2(i);
    }
    return e;
}

Eigen::VectorXd correlations(const CorrespondenceEmbedding& embedding, std::size_t i) {
    if (i >= embedding.n_rows()) throw DimensionMismatch("row " + std::to_string(i) + " out of range");
    if (std::binary_search(embedding.zero_norm_rows.begin(), embedding.zero_norm_rows.end(), i))
        throw ZeroNormRow("row " + std::to_string(i + 1) + " projects onto the origin");
    return embedding.row_correlations.row(static_cast<Eigen::Index>(i)).transpose();
}

}  // namespace storymap
