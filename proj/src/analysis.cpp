#include "dcgossip/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dcgossip/errors.hpp"
#include "dcgossip/weights.hpp"

namespace dcgossip {

namespace {

constexpr double kStochasticTol = 1e-9;
constexpr double kStrictMargin = 1e-9;

void require_square(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() == 0) throw ConfigError("matrix must be square and non-empty");
}

Eigen::VectorXcd eigenvalues_of(const Eigen::MatrixXd& m) {
    require_square(m);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
    return solver.eigenvalues();
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

} // namespace

double drift_of(const Eigen::VectorXd& x, double x_avg) { return std::abs(x.mean() - x_avg); }

double disagreement_of(const Eigen::VectorXd& x, const Graph& g) {
    if (static_cast<std::size_t>(x.size()) != g.size()) throw ConfigError("state length does not match graph");
    double sum = 0.0;
    for (NodeId i = 0; i < g.size(); ++i)
        for (NodeId j : g.out_neighbors(i)) {
            const double diff = x[static_cast<Eigen::Index>(i)] - x[static_cast<Eigen::Index>(j)];
            sum += diff * diff;
        }
    return std::sqrt(sum / static_cast<double>(g.size()));
}

double drift(const Trace& trace, std::size_t k) {
    if (k >= trace.iterations()) throw std::out_of_range("iteration out of range");
    return drift_of(trace.states[k], trace.x_avg);
}

double disagreement(const Trace& trace, std::size_t k, const Graph& g) {
    if (k >= trace.iterations()) throw std::out_of_range("iteration out of range");
    return disagreement_of(trace.states[k], g);
}

std::vector<double> eigen_moduli(const Eigen::MatrixXd& m) {
    const Eigen::VectorXcd values = eigenvalues_of(m);
    std::vector<double> moduli(static_cast<std::size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i) moduli[static_cast<std::size_t>(i)] = std::abs(values[i]);
    std::sort(moduli.begin(), moduli.end(), std::greater<>());
    return moduli;
}

double spectral_radius(const Eigen::MatrixXd& m) { return eigen_moduli(m).front(); }

double second_eigenvalue_modulus(const Eigen::MatrixXd& m) {
    const auto moduli = eigen_moduli(m);
    if (moduli.size() < 2) return 0.0;
    if (moduli[0] - moduli[1] < 1e-9) return moduli[0];
    return moduli[1];
}

SpectralReport check_consensus_conditions(const Eigen::MatrixXd& a) {
    require_square(a);
    if (a.rows() < 2) throw ConfigError("consensus conditions need N >= 2");
    const auto n = a.rows();
    SpectralReport report;

    const auto moduli = eigen_moduli(a);
    report.spectral_radius = moduli[0];
    report.second_eigenvalue_modulus = moduli[0] - moduli[1] < 1e-9 ? moduli[0] : moduli[1];

    report.row_stochastic = ((a.rowwise().sum().array() - 1.0).abs() <= kStochasticTol).all();
    report.column_stochastic = ((a.colwise().sum().array() - 1.0).abs() <= kStochasticTol).all();

    // Left eigenvector for the eigenvalue closest to 1, scaled so that 1^T v1 = 1.
    Eigen::EigenSolver<Eigen::MatrixXd> left(a.transpose());
    if (left.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < n; ++i)
        if (std::abs(left.eigenvalues()[i] - 1.0) < std::abs(left.eigenvalues()[best] - 1.0)) best = i;
    const Eigen::VectorXcd v = left.eigenvectors().col(best);
    const std::complex<double> total = v.sum();
    if (std::abs(total) > 1e-12) {
        const Eigen::VectorXd v1 = (v / total).real();
        report.rho_minus_v1 = spectral_radius(a - Eigen::VectorXd::Ones(n) * v1.transpose());
    } else {
        report.rho_minus_v1 = std::numeric_limits<double>::infinity();
    }

    const Eigen::MatrixXd j = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    report.rho_minus_J = spectral_radius(a - j);

    report.certified_consensus = report.row_stochastic && report.rho_minus_v1 < 1.0 - kStrictMargin;
    report.certified_average =
        report.certified_consensus && report.column_stochastic && report.rho_minus_J < 1.0 - kStrictMargin;
    return report;
}

std::string to_key_value(const SpectralReport& r) {
    std::ostringstream out;
    out << "spectral_radius=" << format_double(r.spectral_radius) << '\n'
        << "second_eigenvalue_modulus=" << format_double(r.second_eigenvalue_modulus) << '\n'
        << "row_stochastic=" << (r.row_stochastic ? 1 : 0) << '\n'
        << "column_stochastic=" << (r.column_stochastic ? 1 : 0) << '\n'
        << "rho_minus_v1=" << format_double(r.rho_minus_v1) << '\n'
        << "rho_minus_J=" << format_double(r.rho_minus_J) << '\n'
        << "certified_consensus=" << (r.certified_consensus ? 1 : 0) << '\n'
        << "certified_average=" << (r.certified_average ? 1 : 0) << '\n';
    return out.str();
}

std::string spectral_csv_header() {
    return "spectral_radius,second_eigenvalue_modulus,row_stochastic,column_stochastic,rho_minus_v1,rho_minus_J,"
           "certified_consensus,certified_average";
}

std::string to_csv_row(const SpectralReport& r) {
    std::ostringstream out;
    out << format_double(r.spectral_radius) << ',' << format_double(r.second_eigenvalue_modulus) << ','
        << (r.row_stochastic ? 1 : 0) << ',' << (r.column_stochastic ? 1 : 0) << ','
        << format_double(r.rho_minus_v1) << ',' << format_double(r.rho_minus_J) << ','
        << (r.certified_consensus ? 1 : 0) << ',' << (r.certified_average ? 1 : 0);
    return out.str();
}

Eigen::MatrixXd expected_weight_matrix(const Graph& g, const UpdateRule& rule) {
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    for (NodeId i = 0; i < g.size(); ++i) sum += single_node_update_matrix(g, rule, i);
    return sum / static_cast<double>(n);
}

Eigen::MatrixXd expected_pairwise_matrix(const Graph& g, double alpha) {
    if (g.directed()) throw ConfigError("pairwise gossip needs an undirected graph");
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    for (NodeId i = 0; i < g.size(); ++i) {
        const auto& nbrs = g.out_neighbors(i);
        for (NodeId j : nbrs)
            sum += pairwise_exchange_matrix(g.size(), i, j, alpha) / static_cast<double>(nbrs.size());
    }
    return sum / static_cast<double>(n);
}

std::optional<std::size_t> convergence_time(const Trace& trace, double tol) {
    if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
    const std::size_t window = std::max<std::size_t>(1, trace.cycle_length);
    const auto& eps = trace.disagreement;
    std::size_t run = 0;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        run = eps[k] < tol ? run + 1 : 0;
        if (run == window) return k + 1 - window;
    }
    return std::nullopt;
}

} // namespace dcgossip
