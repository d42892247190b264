#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "aeos/graph_env.hpp"
#include "aeos/rng.hpp"

namespace aeos {

/// Dense row-major matrix of doubles.
struct Tensor2 {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Tensor2() = default;
    Tensor2(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

/// Single-head graph-attention layer. For edge j -> i with embeddings
/// z = x W, the unnormalized score is
///   e_ij = LeakyReLU(a_dst . z_i + a_src . z_j)
/// normalized by softmax over i's in-neighborhood (self-loop included), and
/// the output is ELU(sum_j alpha_ij z_j).
struct GatLayerParams {
    Tensor2 weight;                 // in_dim x out_dim
    std::vector<double> attention;  // 2*out_dim: [a_dst ; a_src]
    double leaky_relu_slope = 0.2;
};

/// Final dense readout, hidden -> 1.
struct DenseParams {
    std::vector<double> weight;
    double bias = 0.0;
};

/// Two stacked graph-attention layers followed by a scalar head; maps every
/// node of a state graph to one action value.
struct QNetwork {
    GatLayerParams gat1;
    GatLayerParams gat2;
    DenseParams head;
};

/// Fresh network with uniform(+-sqrt(6/(fan_in+fan_out))) weights and
/// attention vectors, zero head bias.
QNetwork make_q_network(int in_dim, int hidden_dim, Rng& rng);

/// Plain graph input: node features plus directed edges (no self-loops; the
/// forward pass adds them).
struct GraphSpec {
    Tensor2 features;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // (src, dst)
};

GraphSpec to_graph_spec(const StateView& view);

/// Intermediates of one forward pass, kept for backprop.
struct GatTrace {
    Tensor2 z;                  // embeddings before aggregation
    std::vector<double> score;  // post-LeakyReLU per edge
    std::vector<double> alpha;  // attention weight per edge
    Tensor2 pre;                // aggregated embeddings before ELU
    Tensor2 out;                // after ELU
};

struct ForwardTrace {
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // with self-loops
    std::vector<std::int32_t> edge_order;   // edge indices grouped by destination
    std::vector<std::int32_t> group_start;  // per node, offset into edge_order
    GatTrace layer1;
    GatTrace layer2;
};

struct ForwardResult {
    std::vector<double> outputs;  // one scalar per node
    ForwardTrace trace;
};

ForwardResult forward(const QNetwork& net, const GraphSpec& graph);

struct GatGrads {
    Tensor2 weight;
    std::vector<double> attention;
};

struct QNetworkGrads {
    GatGrads gat1;
    GatGrads gat2;
    std::vector<double> head_weight;
    double head_bias = 0.0;
};

/// Gradients of sum_i d_outputs[i] * outputs[i] with respect to every
/// parameter. d_outputs must have one entry per node.
QNetworkGrads backward(const QNetwork& net, const GraphSpec& graph, const ForwardResult& fwd,
                       const std::vector<double>& d_outputs);

/// p <- p - learning_rate * grad for every parameter. Throws
/// std::runtime_error if any gradient is non-finite.
void sgd_step(QNetwork& net, const QNetworkGrads& grads, double learning_rate);

/// One squared-error step on a single node's output: computes
/// loss = (outputs[node_index] - target)^2, backpropagates, applies SGD,
/// and returns the pre-update loss.
double mse_sgd_update(QNetwork& net, const GraphSpec& graph, int node_index, double target,
                      double learning_rate);

/// Action values for the legal actions of a state, aligned with
/// ScheduleGraph::legal_actions().
std::vector<double> q_values(const QNetwork& net, const ScheduleGraph& state);

/// Flat parameter access in a fixed order (gat1.weight, gat1.attention,
/// gat2.weight, gat2.attention, head.weight, head.bias).
std::size_t parameter_count(const QNetwork& net);
std::vector<double> flatten_parameters(const QNetwork& net);
void unflatten_parameters(QNetwork& net, const std::vector<double>& flat);
std::vector<double> flatten_gradients(const QNetworkGrads& grads);

} // namespace aeos
