#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rbmprop::numeric {

// log(exp(a) + exp(b)) without overflow.
template <typename Scalar>
Scalar log_add_exp(Scalar a, Scalar b)
{
    if (a == -std::numeric_limits<Scalar>::infinity()) return b;
    if (b == -std::numeric_limits<Scalar>::infinity()) return a;
    const Scalar hi = a > b ? a : b;
    const Scalar lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

// log sum_i exp(x_i) via the max-shift trick.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    if (x.size() == 0) throw std::invalid_argument("log_sum_exp: empty input");
    const Scalar mx = x.maxCoeff();
    if (!std::isfinite(mx)) return mx;
    Scalar sum = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) sum += std::exp(x.derived()(i) - mx);
    return mx + std::log(sum);
}

// log(1 + exp(a)), stable for large |a|.
template <typename Scalar>
Scalar log1p_exp(Scalar a)
{
    if (a > 0) return a + std::log1p(std::exp(-a));
    return std::log1p(std::exp(a));
}

// log(exp(a) + exp(-a)) = log(2 cosh(a)), stable for large |a|.
template <typename Scalar>
Scalar log_2cosh(Scalar a)
{
    const Scalar aa = std::abs(a);
    return aa + std::log1p(std::exp(-2 * aa));
}

// 1 / (1 + exp(-a))
template <typename Scalar>
Scalar logistic(Scalar a)
{
    if (a >= 0) return 1 / (1 + std::exp(-a));
    const Scalar e = std::exp(a);
    return e / (1 + e);
}

}  // namespace rbmprop::numeric
