#pragma once

#include <stdexcept>
#include <string>

namespace partop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain of an operation.
class InvalidArgument : public Error
{
public:
    using Error::Error;
};

/// A center node with no neighbors inside the support radius.
class IsolatedNode : public Error
{
public:
    explicit IsolatedNode(std::size_t node)
        : Error("isolated node " + std::to_string(node) + ": no neighbors inside cutoff radius")
        , node_(node)
    {
    }

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

/// Fewer stencil rows than unknowns.
class UnderdeterminedStencil : public Error
{
public:
    using Error::Error;
};

/// Normal-equation matrix numerically singular.
class DegenerateStencil : public Error
{
public:
    DegenerateStencil(const std::string& what, double condition)
        : Error(what)
        , condition_(condition)
    {
    }

    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

} // namespace partop
