#pragma once

#include "partop/lsq.hpp"
#include "partop/nodes.hpp"

#include <Eigen/Core>

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace partop::ddin {

/// Linear operators that can be applied to an interpolant at its center node.
enum class Operator { identity, dx, dy, dxx, dxy, dyy, laplacian };

std::string_view to_string(Operator op);

Operator to_operator(Derivative d);

/// A basis function of the local interpolant, expressed in the offset from the
/// center node, together with its operator images at zero offset.
struct BasisFunction
{
    std::string name;
    int dim = 1;
    std::function<double(const Point& offset)> eval;
    std::map<Operator, double> images;
    /// Homogeneity degree in length, used to scale the design-matrix column
    /// (0 for functions without a natural power of length).
    int scale_degree = 0;
};

using Basis = std::vector<BasisFunction>;

/// Monomials of the offset up to total degree `order`, constant excluded.
Basis power_basis(int order, int dim);

/// Linear monomials plus the Gaussian radial function exp(-|d|^2/c^2) - 1.
Basis gaussian_basis(int dim, double width);

/// phi(x) = phi_i + sum_mu a_mu Phi_mu(x - x_i)
struct Interpolant
{
    std::size_t center = 0;
    Point center_position = Point::Zero();
    double phi_center = 0.0;
    Eigen::VectorXd coefficients;
    Basis basis;
    double condition = 0.0;
};

/// Least-squares fit over the radius neighbors of node i.
Interpolant fit(const NodeSet& nodes, std::span<const double> field, std::size_t i, const Basis& basis,
                const RowWeighting& weighting);

/// Least-squares fit over an explicit neighbor list.
Interpolant fit(const NodeSet& nodes, std::span<const double> field, const NeighborList& nl, const Basis& basis,
                const RowWeighting& weighting);

double evaluate(const Interpolant& interp, const Point& x);

/// Throws if a basis function lacks an image for the operator.
double apply_operator(const Interpolant& interp, Operator op);

} // namespace partop::ddin
