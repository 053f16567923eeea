#pragma once

#include <stdexcept>
#include <vector>

#include "memlearn/network.hpp"

namespace memlearn {

// Dense: LLT factorization of the full reduced nodal Laplacian (all floating
// nodes as unknowns). BulkSchur: floating terminals are eliminated
// analytically and the remaining bulk system, a diagonal matrix minus a
// low-rank term, is solved through the Woodbury identity. Both are direct
// methods and agree to ~1e-13 relative; BulkSchur is O(n_bulk) per solve
// instead of O(n_bulk^3).
enum class SolverMode { Dense, BulkSchur };

struct SolverFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// DC operating point for one applied bias. Node order: inputs, bulks, outputs.
// Drops are oriented input->bulk (layer 1) and bulk->output (layer 2).
struct CircuitSolution {
    std::vector<double> node_voltages;
    std::vector<double> layer1_drops; // v_in(i) - v_bulk(j), index i * n_bulk + j
    std::vector<double> layer2_drops; // v_bulk(j) - v_out(k), index j * n_out + k
    double terminal_current = 0.0;    // amperes into the grounded output
    double source_current = 0.0;      // amperes out of the driven input
};

// Solves Kirchhoff's current law for the network with v(input_idx) =
// v_applied, v(output_idx) = 0, and every other terminal floating. Floating
// terminals still conduct between bulk nodes through their devices. Throws
// SolverFault if the factorization fails or the solution violates current
// conservation beyond 1e-9 relative.
CircuitSolution solve(const NetworkState& net, int input_idx, int output_idx,
                      double v_applied, SolverMode mode = SolverMode::Dense);

// Sequential read: one solve per output node, the other outputs floating.
// Pure with respect to the network state.
std::vector<double> read_currents(const NetworkState& net, int input_idx, double v_read,
                                  SolverMode mode = SolverMode::Dense);

} // namespace memlearn
