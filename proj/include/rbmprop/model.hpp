#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace rbmprop {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

// Value set for the binary nodes; "1" always codes the high state.
enum class Coding { ZeroOne, PlusMinusOne };

std::string to_string(Coding c);
Coding coding_from_string(const std::string& s);

inline double low_value(Coding c) { return c == Coding::ZeroOne ? 0.0 : -1.0; }
inline double high_value(Coding) { return 1.0; }

// Model architecture: node counts plus the coding set.
// Total nodes are capped so exact enumeration stays tractable.
struct ModelShape {
    Index n_visible = 0;
    Index n_hidden = 0;
    Coding coding = Coding::PlusMinusOne;

    static constexpr Index kDefaultEnumerationCap = 20;

    ModelShape() = default;
    ModelShape(Index nv, Index nh, Coding c, Index enumeration_cap = kDefaultEnumerationCap);

    Index n_nodes() const { return n_visible + n_hidden; }
    // parameter / statistic dimension
    Index m() const { return n_visible + n_hidden + n_visible * n_hidden; }
    Index n_joint_states() const { return Index(1) << n_nodes(); }
    Index n_visible_states() const { return Index(1) << n_visible; }

    // canonical flat layout: visible mains, hidden mains, interactions row-major by (i, j)
    Index main_visible_index(Index i) const { return i; }
    Index main_hidden_index(Index j) const { return n_visible + j; }
    Index interaction_index(Index i, Index j) const { return n_visible + n_hidden + i * n_hidden + j; }

    bool operator==(const ModelShape& o) const
    {
        return n_visible == o.n_visible && n_hidden == o.n_hidden && coding == o.coding;
    }
};

// Full parameter vector split by role. Flattening follows the canonical layout.
struct ThetaVector {
    ModelShape shape;
    VectorXd visible_main;   // θ_{v_i}
    VectorXd hidden_main;    // θ_{h_j}
    MatrixXd interaction;    // θ_{ij}, visible i by hidden j

    ThetaVector() = default;
    explicit ThetaVector(const ModelShape& s);
    ThetaVector(const ModelShape& s, VectorXd vm, VectorXd hm, MatrixXd inter);

    static ThetaVector zero(const ModelShape& s) { return ThetaVector(s); }
    static ThetaVector from_flat(const ModelShape& s, const VectorXd& flat);

    VectorXd flat() const;
    void require_finite() const;
};

// One joint configuration, stored as coded values.
struct NodeState {
    VectorXd visibles;
    VectorXd hiddens;
};

// A statistic vector t(x) or mean vector mu(theta) lives in the canonical layout.
using StatVector = VectorXd;

// Observed visibles; rows hold coded values. cell_counts indexes visible
// outcomes with v_1 as the least significant bit (bit set = high value).
struct Dataset {
    ModelShape shape;
    MatrixXd observations;  // n x n_visible
    VectorXi cell_counts;   // 2^n_visible
    Index n = 0;
};

// state index codec: v_1 least significant, visibles before hiddens,
// set bit = high value
NodeState decode_state(const ModelShape& shape, Index state_index);
Index encode_state(const ModelShape& shape, const NodeState& state);
VectorXd decode_visibles(const ModelShape& shape, Index visible_index);
Index encode_visibles(const ModelShape& shape, const VectorXd& visibles);

Dataset make_dataset(const ModelShape& shape, MatrixXd observations);

void require_same_shape(const ModelShape& a, const ModelShape& b, const char* where);
void require_visibles(const ModelShape& shape, const VectorXd& visibles, const char* where);
void require_hiddens(const ModelShape& shape, const VectorXd& hiddens, const char* where);

}  // namespace rbmprop
