#include "rbmprop/model.hpp"

#include <cmath>
#include <stdexcept>

namespace rbmprop {

std::string to_string(Coding c)
{
    return c == Coding::ZeroOne ? "01" : "pm1";
}

Coding coding_from_string(const std::string& s)
{
    if (s == "01" || s == "zero_one") return Coding::ZeroOne;
    if (s == "pm1" || s == "plus_minus_one") return Coding::PlusMinusOne;
    throw std::invalid_argument("unknown coding '" + s + "' (expected 01 or pm1)");
}

ModelShape::ModelShape(Index nv, Index nh, Coding c, Index enumeration_cap)
    : n_visible(nv), n_hidden(nh), coding(c)
{
    if (nv < 1 || nh < 1)
        throw std::invalid_argument("ModelShape: need n_visible >= 1 and n_hidden >= 1");
    if (nv + nh > enumeration_cap)
        throw std::domain_error("ModelShape: " + std::to_string(nv + nh) +
                                " nodes exceeds enumeration cap " + std::to_string(enumeration_cap));
}

ThetaVector::ThetaVector(const ModelShape& s)
    : shape(s),
      visible_main(VectorXd::Zero(s.n_visible)),
      hidden_main(VectorXd::Zero(s.n_hidden)),
      interaction(MatrixXd::Zero(s.n_visible, s.n_hidden))
{
}

ThetaVector::ThetaVector(const ModelShape& s, VectorXd vm, VectorXd hm, MatrixXd inter)
    : shape(s), visible_main(std::move(vm)), hidden_main(std::move(hm)), interaction(std::move(inter))
{
    if (visible_main.size() != s.n_visible || hidden_main.size() != s.n_hidden ||
        interaction.rows() != s.n_visible || interaction.cols() != s.n_hidden)
        throw std::invalid_argument("ThetaVector: block dimensions do not match shape");
    require_finite();
}

ThetaVector ThetaVector::from_flat(const ModelShape& s, const VectorXd& flat)
{
    if (flat.size() != s.m())
        throw std::invalid_argument("ThetaVector::from_flat: expected dimension " + std::to_string(s.m()));
    ThetaVector t(s);
    t.visible_main = flat.head(s.n_visible);
    t.hidden_main = flat.segment(s.n_visible, s.n_hidden);
    for (Index i = 0; i < s.n_visible; ++i)
        for (Index j = 0; j < s.n_hidden; ++j)
            t.interaction(i, j) = flat(s.interaction_index(i, j));
    t.require_finite();
    return t;
}

VectorXd ThetaVector::flat() const
{
    VectorXd out(shape.m());
    out.head(shape.n_visible) = visible_main;
    out.segment(shape.n_visible, shape.n_hidden) = hidden_main;
    for (Index i = 0; i < shape.n_visible; ++i)
        for (Index j = 0; j < shape.n_hidden; ++j)
            out(shape.interaction_index(i, j)) = interaction(i, j);
    return out;
}

void ThetaVector::require_finite() const
{
    if (!visible_main.allFinite() || !hidden_main.allFinite() || !interaction.allFinite())
        throw std::invalid_argument("ThetaVector: entries must be finite");
}

NodeState decode_state(const ModelShape& shape, Index state_index)
{
    if (state_index < 0 || state_index >= shape.n_joint_states())
        throw std::invalid_argument("decode_state: index out of range");
    const double lo = low_value(shape.coding);
    NodeState s;
    s.visibles.resize(shape.n_visible);
    s.hiddens.resize(shape.n_hidden);
    for (Index i = 0; i < shape.n_visible; ++i)
        s.visibles(i) = (state_index >> i) & 1 ? 1.0 : lo;
    for (Index j = 0; j < shape.n_hidden; ++j)
        s.hiddens(j) = (state_index >> (shape.n_visible + j)) & 1 ? 1.0 : lo;
    return s;
}

Index encode_state(const ModelShape& shape, const NodeState& state)
{
    require_visibles(shape, state.visibles, "encode_state");
    require_hiddens(shape, state.hiddens, "encode_state");
    Index idx = 0;
    for (Index i = 0; i < shape.n_visible; ++i)
        if (state.visibles(i) == 1.0) idx |= Index(1) << i;
    for (Index j = 0; j < shape.n_hidden; ++j)
        if (state.hiddens(j) == 1.0) idx |= Index(1) << (shape.n_visible + j);
    return idx;
}

VectorXd decode_visibles(const ModelShape& shape, Index visible_index)
{
    if (visible_index < 0 || visible_index >= shape.n_visible_states())
        throw std::invalid_argument("decode_visibles: index out of range");
    const double lo = low_value(shape.coding);
    VectorXd v(shape.n_visible);
    for (Index i = 0; i < shape.n_visible; ++i)
        v(i) = (visible_index >> i) & 1 ? 1.0 : lo;
    return v;
}

Index encode_visibles(const ModelShape& shape, const VectorXd& visibles)
{
    require_visibles(shape, visibles, "encode_visibles");
    Index idx = 0;
    for (Index i = 0; i < shape.n_visible; ++i)
        if (visibles(i) == 1.0) idx |= Index(1) << i;
    return idx;
}

Dataset make_dataset(const ModelShape& shape, MatrixXd observations)
{
    if (observations.cols() != shape.n_visible)
        throw std::invalid_argument("make_dataset: observation width does not match n_visible");
    Dataset d;
    d.shape = shape;
    d.n = observations.rows();
    d.cell_counts = VectorXi::Zero(shape.n_visible_states());
    for (Index r = 0; r < observations.rows(); ++r) {
        VectorXd row = observations.row(r);
        d.cell_counts(encode_visibles(shape, row)) += 1;
    }
    d.observations = std::move(observations);
    return d;
}

void require_same_shape(const ModelShape& a, const ModelShape& b, const char* where)
{
    if (!(a == b)) throw std::invalid_argument(std::string(where) + ": shape mismatch");
}

void require_visibles(const ModelShape& shape, const VectorXd& visibles, const char* where)
{
    if (visibles.size() != shape.n_visible)
        throw std::invalid_argument(std::string(where) + ": wrong visible count");
    const double lo = low_value(shape.coding);
    for (Index i = 0; i < visibles.size(); ++i)
        if (visibles(i) != lo && visibles(i) != 1.0)
            throw std::invalid_argument(std::string(where) + ": visible value outside coding set");
}

void require_hiddens(const ModelShape& shape, const VectorXd& hiddens, const char* where)
{
    if (hiddens.size() != shape.n_hidden)
        throw std::invalid_argument(std::string(where) + ": wrong hidden count");
    const double lo = low_value(shape.coding);
    for (Index j = 0; j < hiddens.size(); ++j)
        if (hiddens(j) != lo && hiddens(j) != 1.0)
            throw std::invalid_argument(std::string(where) + ": hidden value outside coding set");
}

}  // namespace rbmprop
