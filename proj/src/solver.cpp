#include "memlearn/solver.hpp"

#include <Eigen/Dense>

#include <cassert>
#include <cmath>
#include <cstdlib>

namespace memlearn {

namespace {

constexpr double kKclRelTol = 1e-9;

struct Conductances {
    int n_in, n_bulk, n_out;
    std::vector<double> g1; // i * n_bulk + j
    std::vector<double> g2; // j * n_out + k
};

Conductances gather_conductances(const NetworkState& net)
{
    Conductances c;
    c.n_in = net.dims.n_in;
    c.n_bulk = net.dims.n_bulk;
    c.n_out = net.dims.n_out;
    c.g1.resize(net.layer1.size());
    c.g2.resize(net.layer2.size());
    for (std::size_t e = 0; e < net.layer1.size(); ++e) {
        const double r = resistance_of(net.layer1[e]);
        assert(r > 0.0 && std::isfinite(r));
        c.g1[e] = 1.0 / r;
    }
    for (std::size_t e = 0; e < net.layer2.size(); ++e) {
        const double r = resistance_of(net.layer2[e]);
        assert(r > 0.0 && std::isfinite(r));
        c.g2[e] = 1.0 / r;
    }
    return c;
}

// Verifies KCL at every floating node and charge conservation between the
// driven and grounded terminals, then fills the per-device drops and the
// terminal currents.
void finish_solution(const Conductances& c, int input_idx, int output_idx, double v_applied,
                     CircuitSolution& sol)
{
    const int n_in = c.n_in, n_bulk = c.n_bulk, n_out = c.n_out;
    const std::vector<double>& v = sol.node_voltages;

    sol.layer1_drops.resize(c.g1.size());
    sol.layer2_drops.resize(c.g2.size());
    std::vector<double> node_current(static_cast<std::size_t>(n_in) + n_bulk + n_out, 0.0);

    for (int i = 0; i < n_in; ++i)
        for (int j = 0; j < n_bulk; ++j) {
            const std::size_t e = static_cast<std::size_t>(i) * n_bulk + j;
            const double drop = v[i] - v[n_in + j];
            sol.layer1_drops[e] = drop;
            const double cur = c.g1[e] * drop;
            node_current[i] += cur;
            node_current[n_in + j] -= cur;
        }
    for (int j = 0; j < n_bulk; ++j)
        for (int k = 0; k < n_out; ++k) {
            const std::size_t e = static_cast<std::size_t>(j) * n_out + k;
            const double drop = v[n_in + j] - v[n_in + n_bulk + k];
            sol.layer2_drops[e] = drop;
            const double cur = c.g2[e] * drop;
            node_current[n_in + j] += cur;
            node_current[n_in + n_bulk + k] -= cur;
        }

    const int src = input_idx;
    const int snk = n_in + n_bulk + output_idx;
    sol.source_current = node_current[src];
    sol.terminal_current = -node_current[snk];

    const double scale =
        std::max(std::abs(sol.source_current), std::abs(sol.terminal_current));
    const double tol = scale > 0.0 ? kKclRelTol * scale : 1e-15;
    for (int n = 0; n < n_in + n_bulk + n_out; ++n) {
        if (n == src || n == snk)
            continue;
        if (std::abs(node_current[n]) > tol)
            throw SolverFault("KCL residual at floating node " + std::to_string(n) +
                              " exceeds tolerance");
    }
    if (std::abs(sol.source_current - sol.terminal_current) > tol)
        throw SolverFault("source/sink current mismatch exceeds tolerance");
    (void)v_applied;
}

CircuitSolution solve_dense(const Conductances& c, int input_idx, int output_idx,
                            double v_applied)
{
    const int n_in = c.n_in, n_bulk = c.n_bulk, n_out = c.n_out;
    const int n_nodes = n_in + n_bulk + n_out;
    const int src = input_idx;
    const int snk = n_in + n_bulk + output_idx;

    // unknown numbering: every node except the two driven terminals
    std::vector<int> unknown_of(n_nodes, -1);
    int n_f = 0;
    for (int n = 0; n < n_nodes; ++n)
        if (n != src && n != snk)
            unknown_of[n] = n_f++;

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n_f, n_f);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_f);

    auto add_edge = [&](int u, int w, double g) {
        const int fu = unknown_of[u], fw = unknown_of[w];
        const double vu = u == src ? v_applied : 0.0; // fixed nodes: src at bias, snk at 0
        const double vw = w == src ? v_applied : 0.0;
        if (fu >= 0) {
            L(fu, fu) += g;
            if (fw >= 0)
                L(fu, fw) -= g;
            else
                rhs(fu) += g * vw;
        }
        if (fw >= 0) {
            L(fw, fw) += g;
            if (fu >= 0)
                L(fw, fu) -= g;
            else
                rhs(fw) += g * vu;
        }
    };

    for (int i = 0; i < n_in; ++i)
        for (int j = 0; j < n_bulk; ++j)
            add_edge(i, n_in + j, c.g1[static_cast<std::size_t>(i) * n_bulk + j]);
    for (int j = 0; j < n_bulk; ++j)
        for (int k = 0; k < n_out; ++k)
            add_edge(n_in + j, n_in + n_bulk + k, c.g2[static_cast<std::size_t>(j) * n_out + k]);

    CircuitSolution sol;
    sol.node_voltages.assign(n_nodes, 0.0);
    sol.node_voltages[src] = v_applied;
    sol.node_voltages[snk] = 0.0;

    if (n_f > 0) {
        Eigen::LLT<Eigen::MatrixXd> llt(L);
        if (llt.info() != Eigen::Success)
            throw SolverFault("reduced Laplacian factorization failed (singular system)");
        Eigen::VectorXd x = llt.solve(rhs);
        // one step of iterative refinement
        x += llt.solve(rhs - L * x);
        for (int n = 0; n < n_nodes; ++n)
            if (unknown_of[n] >= 0)
                sol.node_voltages[n] = x(unknown_of[n]);
    }
    return sol;
}

// Bulk system after eliminating the floating terminals: M = diag(D) - U U^T
// with one rank-1 term per floating terminal. Solved by the Woodbury
// identity around the diagonal.
CircuitSolution solve_bulk_schur(const Conductances& c, int input_idx, int output_idx,
                                 double v_applied)
{
    const int n_in = c.n_in, n_bulk = c.n_bulk, n_out = c.n_out;
    const int n_nodes = n_in + n_bulk + n_out;

    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(n_in);   // row sums of g1
    Eigen::VectorXd s2 = Eigen::VectorXd::Zero(n_out);  // column sums of g2
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n_bulk);
    for (int i = 0; i < n_in; ++i)
        for (int j = 0; j < n_bulk; ++j) {
            const double g = c.g1[static_cast<std::size_t>(i) * n_bulk + j];
            s1(i) += g;
            diag(j) += g;
        }
    for (int j = 0; j < n_bulk; ++j)
        for (int k = 0; k < n_out; ++k) {
            const double g = c.g2[static_cast<std::size_t>(j) * n_out + k];
            s2(k) += g;
            diag(j) += g;
        }

    const int m = (n_in - 1) + (n_out - 1);
    Eigen::MatrixXd U(n_bulk, m);
    int col = 0;
    for (int i = 0; i < n_in; ++i) {
        if (i == input_idx)
            continue;
        const double inv_sqrt = 1.0 / std::sqrt(s1(i));
        for (int j = 0; j < n_bulk; ++j)
            U(j, col) = c.g1[static_cast<std::size_t>(i) * n_bulk + j] * inv_sqrt;
        ++col;
    }
    for (int k = 0; k < n_out; ++k) {
        if (k == output_idx)
            continue;
        const double inv_sqrt = 1.0 / std::sqrt(s2(k));
        for (int j = 0; j < n_bulk; ++j)
            U(j, col) = c.g2[static_cast<std::size_t>(j) * n_out + k] * inv_sqrt;
        ++col;
    }

    Eigen::VectorXd rhs(n_bulk);
    for (int j = 0; j < n_bulk; ++j)
        rhs(j) = c.g1[static_cast<std::size_t>(input_idx) * n_bulk + j] * v_applied;

    const Eigen::VectorXd inv_diag = diag.cwiseInverse();
    Eigen::LLT<Eigen::MatrixXd> cap_llt; // factorization of I - U^T D^-1 U
    if (m > 0) {
        Eigen::MatrixXd cap = Eigen::MatrixXd::Identity(m, m) -
                              U.transpose() * inv_diag.asDiagonal() * U;
        cap_llt.compute(cap);
        if (cap_llt.info() != Eigen::Success)
            throw SolverFault("bulk elimination capacitance factorization failed");
    }

    auto woodbury_solve = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd {
        Eigen::VectorXd y = inv_diag.cwiseProduct(b);
        if (m == 0)
            return y;
        Eigen::VectorXd w = cap_llt.solve(U.transpose() * y);
        return y + inv_diag.cwiseProduct(U * w);
    };

    Eigen::VectorXd vb = woodbury_solve(rhs);
    // one step of iterative refinement on the bulk system
    {
        Eigen::VectorXd residual = rhs - (diag.cwiseProduct(vb) - U * (U.transpose() * vb));
        vb += woodbury_solve(residual);
    }

    CircuitSolution sol;
    sol.node_voltages.assign(n_nodes, 0.0);
    sol.node_voltages[input_idx] = v_applied;
    for (int j = 0; j < n_bulk; ++j)
        sol.node_voltages[n_in + j] = vb(j);
    // floating terminals sit at the conductance-weighted mean of their bulks
    for (int i = 0; i < n_in; ++i) {
        if (i == input_idx)
            continue;
        double acc = 0.0;
        for (int j = 0; j < n_bulk; ++j)
            acc += c.g1[static_cast<std::size_t>(i) * n_bulk + j] * vb(j);
        sol.node_voltages[i] = acc / s1(i);
    }
    for (int k = 0; k < n_out; ++k) {
        if (k == output_idx)
            continue;
        double acc = 0.0;
        for (int j = 0; j < n_bulk; ++j)
            acc += c.g2[static_cast<std::size_t>(j) * n_out + k] * vb(j);
        sol.node_voltages[n_in + n_bulk + k] = acc / s2(k);
    }
    sol.node_voltages[n_in + n_bulk + output_idx] = 0.0;
    return sol;
}

} // namespace

CircuitSolution solve(const NetworkState& net, int input_idx, int output_idx, double v_applied,
                      SolverMode mode)
{
    if (input_idx < 0 || input_idx >= net.dims.n_in)
        throw std::out_of_range("solve: input index out of range");
    if (output_idx < 0 || output_idx >= net.dims.n_out)
        throw std::out_of_range("solve: output index out of range");

    const Conductances c = gather_conductances(net);
    CircuitSolution sol = mode == SolverMode::Dense
                              ? solve_dense(c, input_idx, output_idx, v_applied)
                              : solve_bulk_schur(c, input_idx, output_idx, v_applied);
    finish_solution(c, input_idx, output_idx, v_applied, sol);
    return sol;
}

std::vector<double> read_currents(const NetworkState& net, int input_idx, double v_read,
                                  SolverMode mode)
{
    std::vector<double> currents(net.dims.n_out);
    for (int k = 0; k < net.dims.n_out; ++k)
        currents[k] = solve(net, input_idx, k, v_read, mode).terminal_current;
    return currents;
}

} // namespace memlearn
