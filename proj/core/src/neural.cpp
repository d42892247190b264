#include "aeos/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aeos {

namespace {

double glorot_limit(int fan_in, int fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

void fill_uniform(std::vector<double>& v, double limit, Rng& rng) {
    for (double& x : v) x = rng.uniform(-limit, limit);
}

GatLayerParams make_gat(int in_dim, int out_dim, Rng& rng) {
    GatLayerParams p;
    p.weight = Tensor2(in_dim, out_dim);
    fill_uniform(p.weight.data, glorot_limit(in_dim, out_dim), rng);
    p.attention.resize(static_cast<std::size_t>(2 * out_dim));
    fill_uniform(p.attention, glorot_limit(2 * out_dim, 1), rng);
    return p;
}

double elu(double x) { return x > 0.0 ? x : std::expm1(x); }
double elu_prime(double x) { return x > 0.0 ? 1.0 : std::exp(x); }

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
    Tensor2 out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) out.at(i, j) += aik * b.at(k, j);
        }
    }
    return out;
}

} // namespace

QNetwork make_q_network(int in_dim, int hidden_dim, Rng& rng) {
    if (in_dim < 1 || hidden_dim < 1) {
        throw std::invalid_argument("make_q_network: dimensions must be positive");
    }
    QNetwork net;
    net.gat1 = make_gat(in_dim, hidden_dim, rng);
    net.gat2 = make_gat(hidden_dim, hidden_dim, rng);
    net.head.weight.resize(static_cast<std::size_t>(hidden_dim));
    fill_uniform(net.head.weight, glorot_limit(hidden_dim, 1), rng);
    net.head.bias = 0.0;
    return net;
}

GraphSpec to_graph_spec(const StateView& view) {
    GraphSpec spec;
    const auto n = static_cast<int>(view.features.size());
    spec.features = Tensor2(n, kFeatureDim);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < kFeatureDim; ++c) {
            spec.features.at(i, c) = view.features[static_cast<std::size_t>(i)]
                                                  [static_cast<std::size_t>(c)];
        }
    }
    spec.edges = view.edges;
    return spec;
}

namespace {

// Message-passing topology shared by both layers: edges plus one self-loop
// per node, grouped by destination.
struct EdgePlan {
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    std::vector<std::int32_t> edge_order;   // edge indices grouped by dst
    std::vector<std::int32_t> group_start;  // n + 1 offsets into edge_order
};

EdgePlan plan_edges(const GraphSpec& graph) {
    const int n = graph.features.rows;
    EdgePlan plan;
    plan.edges = graph.edges;
    std::vector<std::uint8_t> has_self(static_cast<std::size_t>(n), 0);
    for (const auto& [src, dst] : plan.edges) {
        if (src < 0 || src >= n || dst < 0 || dst >= n) {
            throw std::invalid_argument("forward: edge endpoint out of range");
        }
        if (src == dst) has_self[static_cast<std::size_t>(src)] = 1;
    }
    for (std::int32_t i = 0; i < n; ++i) {
        if (!has_self[static_cast<std::size_t>(i)]) plan.edges.emplace_back(i, i);
    }

    const auto m = static_cast<std::int32_t>(plan.edges.size());
    std::vector<std::int32_t> count(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& e : plan.edges) ++count[static_cast<std::size_t>(e.second) + 1];
    for (int i = 0; i < n; ++i) count[static_cast<std::size_t>(i) + 1] += count[static_cast<std::size_t>(i)];
    plan.group_start = count;
    plan.edge_order.resize(static_cast<std::size_t>(m));
    std::vector<std::int32_t> cursor = plan.group_start;
    for (std::int32_t k = 0; k < m; ++k) {
        const auto dst = static_cast<std::size_t>(plan.edges[static_cast<std::size_t>(k)].second);
        plan.edge_order[static_cast<std::size_t>(cursor[dst]++)] = k;
    }
    return plan;
}

GatTrace gat_forward(const GatLayerParams& params, const Tensor2& x, const EdgePlan& plan) {
    if (x.cols != params.weight.rows) {
        throw std::invalid_argument("forward: feature width does not match layer input width");
    }
    const int n = x.rows;
    const int out_dim = params.weight.cols;
    const double* a_dst = params.attention.data();
    const double* a_src = params.attention.data() + out_dim;

    GatTrace trace;
    trace.z = matmul(x, params.weight);
    const auto m = plan.edges.size();
    trace.score.resize(m);
    trace.alpha.resize(m);

    std::vector<double> dst_term(static_cast<std::size_t>(n), 0.0);
    std::vector<double> src_term(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double d = 0.0;
        double s = 0.0;
        for (int c = 0; c < out_dim; ++c) {
            d += a_dst[c] * trace.z.at(i, c);
            s += a_src[c] * trace.z.at(i, c);
        }
        dst_term[static_cast<std::size_t>(i)] = d;
        src_term[static_cast<std::size_t>(i)] = s;
    }
    for (std::size_t k = 0; k < m; ++k) {
        const auto [src, dst] = plan.edges[k];
        const double raw = dst_term[static_cast<std::size_t>(dst)] +
                           src_term[static_cast<std::size_t>(src)];
        trace.score[k] = raw > 0.0 ? raw : params.leaky_relu_slope * raw;
    }

    // Softmax per destination group, then aggregate source embeddings.
    trace.pre = Tensor2(n, out_dim);
    for (int i = 0; i < n; ++i) {
        const auto lo = static_cast<std::size_t>(plan.group_start[static_cast<std::size_t>(i)]);
        const auto hi = static_cast<std::size_t>(plan.group_start[static_cast<std::size_t>(i) + 1]);
        double max_score = -std::numeric_limits<double>::infinity();
        for (std::size_t q = lo; q < hi; ++q) {
            max_score = std::max(max_score, trace.score[static_cast<std::size_t>(
                                                plan.edge_order[q])]);
        }
        double denom = 0.0;
        for (std::size_t q = lo; q < hi; ++q) {
            const auto k = static_cast<std::size_t>(plan.edge_order[q]);
            trace.alpha[k] = std::exp(trace.score[k] - max_score);
            denom += trace.alpha[k];
        }
        for (std::size_t q = lo; q < hi; ++q) {
            const auto k = static_cast<std::size_t>(plan.edge_order[q]);
            trace.alpha[k] /= denom;
            const int src = plan.edges[k].first;
            for (int c = 0; c < out_dim; ++c) {
                trace.pre.at(i, c) += trace.alpha[k] * trace.z.at(src, c);
            }
        }
    }

    trace.out = Tensor2(n, out_dim);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < out_dim; ++c) trace.out.at(i, c) = elu(trace.pre.at(i, c));
    }
    return trace;
}

struct GatBackwardResult {
    GatGrads grads;
    Tensor2 d_input;
};

GatBackwardResult gat_backward(const GatLayerParams& params, const Tensor2& x,
                               const GatTrace& trace, const EdgePlan& plan, const Tensor2& d_out) {
    const int n = x.rows;
    const int out_dim = params.weight.cols;
    const double* a_dst = params.attention.data();
    const double* a_src = params.attention.data() + out_dim;

    GatBackwardResult res;
    res.grads.weight = Tensor2(params.weight.rows, params.weight.cols);
    res.grads.attention.assign(params.attention.size(), 0.0);

    // Through the ELU.
    Tensor2 d_pre(n, out_dim);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < out_dim; ++c) {
            d_pre.at(i, c) = d_out.at(i, c) * elu_prime(trace.pre.at(i, c));
        }
    }

    Tensor2 d_z(n, out_dim);
    std::vector<double> d_alpha(trace.alpha.size());
    for (int i = 0; i < n; ++i) {
        const auto lo = static_cast<std::size_t>(plan.group_start[static_cast<std::size_t>(i)]);
        const auto hi = static_cast<std::size_t>(plan.group_start[static_cast<std::size_t>(i) + 1]);

        // d(alpha_k) from the aggregation, plus the aggregation's direct
        // contribution to the source embeddings.
        double weighted_sum = 0.0;  // sum_k alpha_k * d_alpha_k for the softmax backward
        for (std::size_t q = lo; q < hi; ++q) {
            const auto k = static_cast<std::size_t>(plan.edge_order[q]);
            const int src = plan.edges[k].first;
            double da = 0.0;
            for (int c = 0; c < out_dim; ++c) {
                da += d_pre.at(i, c) * trace.z.at(src, c);
                d_z.at(src, c) += trace.alpha[k] * d_pre.at(i, c);
            }
            d_alpha[k] = da;
            weighted_sum += trace.alpha[k] * da;
        }
        // Softmax backward, then the LeakyReLU and the attention dot-products.
        for (std::size_t q = lo; q < hi; ++q) {
            const auto k = static_cast<std::size_t>(plan.edge_order[q]);
            const int src = plan.edges[k].first;
            const double d_score = trace.alpha[k] * (d_alpha[k] - weighted_sum);
            const double d_raw =
                d_score * (trace.score[k] > 0.0 ? 1.0 : params.leaky_relu_slope);
            for (int c = 0; c < out_dim; ++c) {
                res.grads.attention[static_cast<std::size_t>(c)] += d_raw * trace.z.at(i, c);
                res.grads.attention[static_cast<std::size_t>(out_dim + c)] +=
                    d_raw * trace.z.at(src, c);
                d_z.at(i, c) += d_raw * a_dst[c];
                d_z.at(src, c) += d_raw * a_src[c];
            }
        }
    }

    // z = x W: accumulate the weight gradient and the input gradient.
    for (int i = 0; i < n; ++i) {
        for (int r = 0; r < params.weight.rows; ++r) {
            const double xi = x.at(i, r);
            if (xi != 0.0) {
                for (int c = 0; c < out_dim; ++c) {
                    res.grads.weight.at(r, c) += xi * d_z.at(i, c);
                }
            }
        }
    }
    res.d_input = Tensor2(n, params.weight.rows);
    for (int i = 0; i < n; ++i) {
        for (int r = 0; r < params.weight.rows; ++r) {
            double acc = 0.0;
            for (int c = 0; c < out_dim; ++c) acc += d_z.at(i, c) * params.weight.at(r, c);
            res.d_input.at(i, r) = acc;
        }
    }
    return res;
}

} // namespace

ForwardResult forward(const QNetwork& net, const GraphSpec& graph) {
    const int n = graph.features.rows;
    if (n < 1) throw std::invalid_argument("forward: graph must have at least one node");

    EdgePlan plan = plan_edges(graph);
    ForwardResult res;
    res.trace.edges = plan.edges;
    res.trace.edge_order = plan.edge_order;
    res.trace.group_start = plan.group_start;
    res.trace.layer1 = gat_forward(net.gat1, graph.features, plan);
    res.trace.layer2 = gat_forward(net.gat2, res.trace.layer1.out, plan);

    const auto hidden = static_cast<int>(net.head.weight.size());
    if (res.trace.layer2.out.cols != hidden) {
        throw std::invalid_argument("forward: head width does not match the embedding width");
    }
    res.outputs.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double q = net.head.bias;
        for (int c = 0; c < hidden; ++c) {
            q += net.head.weight[static_cast<std::size_t>(c)] * res.trace.layer2.out.at(i, c);
        }
        res.outputs[static_cast<std::size_t>(i)] = q;
    }
    return res;
}

QNetworkGrads backward(const QNetwork& net, const GraphSpec& graph, const ForwardResult& fwd,
                       const std::vector<double>& d_outputs) {
    const int n = graph.features.rows;
    if (static_cast<int>(d_outputs.size()) != n) {
        throw std::invalid_argument("backward: need one output gradient per node");
    }
    EdgePlan plan;
    plan.edges = fwd.trace.edges;
    plan.edge_order = fwd.trace.edge_order;
    plan.group_start = fwd.trace.group_start;

    const auto hidden = static_cast<int>(net.head.weight.size());
    QNetworkGrads grads;
    grads.head_weight.assign(net.head.weight.size(), 0.0);
    grads.head_bias = 0.0;

    Tensor2 d_h2(n, hidden);
    for (int i = 0; i < n; ++i) {
        const double d = d_outputs[static_cast<std::size_t>(i)];
        grads.head_bias += d;
        for (int c = 0; c < hidden; ++c) {
            grads.head_weight[static_cast<std::size_t>(c)] += d * fwd.trace.layer2.out.at(i, c);
            d_h2.at(i, c) = d * net.head.weight[static_cast<std::size_t>(c)];
        }
    }

    auto back2 = gat_backward(net.gat2, fwd.trace.layer1.out, fwd.trace.layer2, plan, d_h2);
    auto back1 = gat_backward(net.gat1, graph.features, fwd.trace.layer1, plan, back2.d_input);
    grads.gat2 = std::move(back2.grads);
    grads.gat1 = std::move(back1.grads);
    return grads;
}

namespace {

void axpy_checked(std::vector<double>& params, const std::vector<double>& grads, double lr) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw std::runtime_error("sgd_step: non-finite gradient");
        }
        params[i] -= lr * grads[i];
    }
}

} // namespace

void sgd_step(QNetwork& net, const QNetworkGrads& grads, double learning_rate) {
    axpy_checked(net.gat1.weight.data, grads.gat1.weight.data, learning_rate);
    axpy_checked(net.gat1.attention, grads.gat1.attention, learning_rate);
    axpy_checked(net.gat2.weight.data, grads.gat2.weight.data, learning_rate);
    axpy_checked(net.gat2.attention, grads.gat2.attention, learning_rate);
    axpy_checked(net.head.weight, grads.head_weight, learning_rate);
    if (!std::isfinite(grads.head_bias)) throw std::runtime_error("sgd_step: non-finite gradient");
    net.head.bias -= learning_rate * grads.head_bias;
}

double mse_sgd_update(QNetwork& net, const GraphSpec& graph, int node_index, double target,
                      double learning_rate) {
    auto fwd = forward(net, graph);
    if (node_index < 0 || node_index >= static_cast<int>(fwd.outputs.size())) {
        throw std::invalid_argument("mse_sgd_update: node index out of range");
    }
    const double err = fwd.outputs[static_cast<std::size_t>(node_index)] - target;
    std::vector<double> d_out(fwd.outputs.size(), 0.0);
    d_out[static_cast<std::size_t>(node_index)] = 2.0 * err;
    sgd_step(net, backward(net, graph, fwd, d_out), learning_rate);
    return err * err;
}

std::vector<double> q_values(const QNetwork& net, const ScheduleGraph& state) {
    if (state.terminal()) return {};
    const auto fwd = forward(net, to_graph_spec(state.state_view()));
    // Row 0 is the already-executed last action; the rest align with
    // legal_actions() order.
    return std::vector<double>(fwd.outputs.begin() + 1, fwd.outputs.end());
}

std::size_t parameter_count(const QNetwork& net) {
    return net.gat1.weight.data.size() + net.gat1.attention.size() + net.gat2.weight.data.size() +
           net.gat2.attention.size() + net.head.weight.size() + 1;
}

std::vector<double> flatten_parameters(const QNetwork& net) {
    std::vector<double> flat;
    flat.reserve(parameter_count(net));
    const auto append = [&flat](const std::vector<double>& v) {
        flat.insert(flat.end(), v.begin(), v.end());
    };
    append(net.gat1.weight.data);
    append(net.gat1.attention);
    append(net.gat2.weight.data);
    append(net.gat2.attention);
    append(net.head.weight);
    flat.push_back(net.head.bias);
    return flat;
}

void unflatten_parameters(QNetwork& net, const std::vector<double>& flat) {
    if (flat.size() != parameter_count(net)) {
        throw std::invalid_argument("unflatten_parameters: size mismatch");
    }
    auto it = flat.begin();
    const auto take = [&it](std::vector<double>& v) {
        std::copy(it, it + static_cast<std::ptrdiff_t>(v.size()), v.begin());
        it += static_cast<std::ptrdiff_t>(v.size());
    };
    take(net.gat1.weight.data);
    take(net.gat1.attention);
    take(net.gat2.weight.data);
    take(net.gat2.attention);
    take(net.head.weight);
    net.head.bias = *it;
}

std::vector<double> flatten_gradients(const QNetworkGrads& grads) {
    std::vector<double> flat;
    const auto append = [&flat](const std::vector<double>& v) {
        flat.insert(flat.end(), v.begin(), v.end());
    };
    append(grads.gat1.weight.data);
    append(grads.gat1.attention);
    append(grads.gat2.weight.data);
    append(grads.gat2.attention);
    append(grads.head_weight);
    flat.push_back(grads.head_bias);
    return flat;
}

} // namespace aeos
