#pragma once

#include <functional>
#include <vector>

#include "nsdg/field.hpp"

namespace nsdg {

using MatrixFn = std::function<Mat2(const Vec2&)>;

// Per-element evaluator used to feed the error integrals with either a
// DiscreteField or an analytic function.
using ElemVectorFn = std::function<Vec2(int elem, const Vec2&)>;
using ElemScalarFn = std::function<double(int elem, const Vec2&)>;

// Energy norm of a vector field: broken H1 plus (sigma/h_e)-weighted jumps
// over interior and boundary faces (boundary jump = trace).
double dg_norm(const DiscreteField& field, double sigma);

// Energy seminorm of a scalar field: broken H1 plus (sigma_tilde/h_e) jumps
// over interior faces only. Vanishes on globally constant fields.
double dg_seminorm(const DiscreteField& field, double sigma_tilde);

// L2(Omega) distance between two elementwise evaluators.
double l2_distance(const Mesh& mesh, const QuadratureRule& rule, const ElemVectorFn& a,
                   const ElemVectorFn& b);
double l2_distance(const Mesh& mesh, const QuadratureRule& rule, const ElemScalarFn& a,
                   const ElemScalarFn& b);

double l2_error(const DiscreteField& field, const VectorFn& exact);
double l2_error(const DiscreteField& field, const ScalarFn& exact);

// Energy-norm distance between a discrete vector field and an analytic one
// (exact traces evaluated on both sides of each face).
double dg_error(const DiscreteField& field, const VectorFn& exact, const MatrixFn& exact_grad,
                double sigma);

// sqrt(mu * tau * sum of squared per-step errors).
double space_time_l2(const std::vector<double>& step_errors, double tau, double mu);

}  // namespace nsdg
