#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcgossip/graph.hpp"
#include "dcgossip/trace.hpp"
#include "dcgossip/update_rule.hpp"

namespace dcgossip {

/// |mean(x) - x_avg|.
double drift_of(const Eigen::VectorXd& x, double x_avg);

/// sqrt((1/N) sum_ij A_ij (x_i - x_j)^2) with A the 0/1 adjacency.
double disagreement_of(const Eigen::VectorXd& x, const Graph& g);

double drift(const Trace& trace, std::size_t k);
double disagreement(const Trace& trace, std::size_t k, const Graph& g);

/// Eigenvalue moduli, largest first.
std::vector<double> eigen_moduli(const Eigen::MatrixXd& m);

/// max_i |lambda_i|.
double spectral_radius(const Eigen::MatrixXd& m);

/// Second entry of the sorted moduli (multiplicity counted, 1e-9 clusters merged).
double second_eigenvalue_modulus(const Eigen::MatrixXd& m);

struct SpectralReport {
    double spectral_radius = 0.0;
    double second_eigenvalue_modulus = 0.0;
    bool row_stochastic = false;    ///< A 1 = 1
    bool column_stochastic = false; ///< 1^T A = 1^T
    double rho_minus_v1 = 0.0;      ///< rho(A - 1 v1^T), v1 the left Perron vector
    double rho_minus_J = 0.0;       ///< rho(A - 11^T / N)
    bool certified_consensus = false;
    bool certified_average = false;
};

/// Evaluates the consensus and average-consensus conditions. Stochasticity is checked to
/// 1e-9, and strict spectral inequalities require a margin of 1e-9 below one.
SpectralReport check_consensus_conditions(const Eigen::MatrixXd& a_eff);

/// Flat key=value block, one key per line.
std::string to_key_value(const SpectralReport& report);
std::string spectral_csv_header();
std::string to_csv_row(const SpectralReport& report);

/// Mean of the N single-node effective matrices (uniform sequential wake-up).
Eigen::MatrixXd expected_weight_matrix(const Graph& g, const UpdateRule& rule = {});

/// E[W] of randomized pairwise gossip: node i uniform, neighbour j uniform in n_i.
Eigen::MatrixXd expected_pairwise_matrix(const Graph& g, double alpha = 0.5);

/// First k with disagreement below `tol` at every iteration of [k, k + cycle_length).
std::optional<std::size_t> convergence_time(const Trace& trace, double tol);

} // namespace dcgossip
