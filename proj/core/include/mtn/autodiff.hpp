#pragma once

// Minimal tape-based reverse-mode automatic differentiation.
//
// Values are dense row-major matrices of doubles; column vectors are
// (n, 1). A Tape records every primitive application in order, and
// backward() walks the records in exact reverse order. Parameters live
// outside the tape in Tensor objects; gradients for them are accumulated
// (added) into Tensor::grad on every backward() call, so several
// examples can be run through separate tapes before one optimizer step.
//
// Tapes are single-threaded. A Tensor referenced from several tapes must
// not have backward() run on those tapes concurrently.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtn::ad {

struct Shape {
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::size_t size() const noexcept { return rows * cols; }
    std::string str() const;
    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Owned value storage with an optional gradient buffer.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::size_t rows, std::size_t cols, bool requires_grad = false);
    Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

    static Tensor column(std::vector<double> data, bool requires_grad = false);

    Shape shape() const noexcept { return shape_; }
    std::size_t rows() const noexcept { return shape_.rows; }
    std::size_t cols() const noexcept { return shape_.cols; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_.cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_.cols + c]; }

    bool requires_grad() const noexcept { return requires_grad_; }
    void set_requires_grad(bool on);

    /// Empty when requires_grad() is false.
    std::span<double> grad() noexcept { return grad_; }
    std::span<const double> grad() const noexcept { return grad_; }
    void zero_grad() noexcept;

private:
    Shape shape_;
    std::vector<double> data_;
    std::vector<double> grad_;
    bool requires_grad_ = false;
};

class Tape;

/// Handle to a value recorded on a Tape.
class Var {
public:
    Var() = default;

    Tape* tape() const noexcept { return tape_; }
    std::uint32_t id() const noexcept { return id_; }
    bool valid() const noexcept { return tape_ != nullptr; }

    Shape shape() const;
    std::span<const double> value() const;
    /// Scalar value of a (1, 1) Var.
    double item() const;

private:
    friend class Tape;
    Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

    Tape* tape_ = nullptr;
    std::uint32_t id_ = 0;
};

class ShapeMismatch : public std::invalid_argument {
public:
    ShapeMismatch(std::string primitive, Shape got, Shape expected);
    const std::string& primitive() const noexcept { return primitive_; }

private:
    std::string primitive_;
};

class NotScalar : public std::invalid_argument {
public:
    explicit NotScalar(Shape got);
};

class DetachedFromTape : public std::logic_error {
public:
    DetachedFromTape();
};

class NonFiniteValue : public std::domain_error {
public:
    explicit NonFiniteValue(std::string where);
};

class Tape {
public:
    Tape();
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // -- leaves -------------------------------------------------------------

    /// References `t` without copying; gradients flow into t.grad() when
    /// t.requires_grad(). `t` must outlive the tape.
    Var param(Tensor& t);
    /// Row `r` of `table` as an (cols, 1) column; gradients go to that row.
    Var row(Tensor& table, std::size_t r);
    Var constant(Shape shape, std::span<const double> values);
    Var zeros(std::size_t rows, std::size_t cols = 1);

    // -- primitives ---------------------------------------------------------

    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    /// Element-wise product.
    Var mul(Var a, Var b);
    Var matmul(Var a, Var b);
    /// Stacks column vectors (equal column count) top to bottom.
    Var concat_rows(std::initializer_list<Var> parts);
    Var concat_rows(std::span<const Var> parts);
    Var tanh(Var a);
    Var sigmoid(Var a);
    /// Element-wise max; gradient goes to `a` on ties.
    Var max(Var a, Var b);
    /// Sum of equally shaped values. Each component is summed in ascending
    /// value order, so the result is bitwise invariant under permutation
    /// of `parts`.
    Var sum_of(std::span<const Var> parts);
    Var scale(Var a, double s);
    /// Sum of all components, (1, 1).
    Var sum(Var a);

    // -- fused heads --------------------------------------------------------

    /// a.b / (|a||b|) as (1, 1). Evaluates to 0 with zero gradient when
    /// either norm is below 1e-12.
    Var cosine(Var a, Var b);
    /// -log softmax(logits)[label] computed via log-sum-exp. Throws
    /// NonFiniteValue on non-finite logits.
    Var cross_entropy(Var logits, std::size_t label);
    /// (target - prediction)^2 for a (1, 1) prediction.
    Var squared_error(Var prediction, double target);

    // -- reverse pass -------------------------------------------------------

    /// Seeds d(loss)/d(loss) = 1 and accumulates gradients into every
    /// requires_grad parameter reachable from `loss`.
    void backward(Var loss);

    Shape shape(Var v) const;
    std::span<const double> value(Var v) const;
    /// Gradient of an intermediate from the last backward() call.
    std::span<const double> grad(Var v) const;

    std::size_t size() const noexcept { return nodes_.size(); }

private:
    enum class Op : std::uint8_t {
        Constant,
        Param,
        Row,
        Add,
        Sub,
        Mul,
        MatMul,
        Concat,
        Tanh,
        Sigmoid,
        Max,
        SumOf,
        Scale,
        Sum,
        Cosine,
        CrossEntropy,
        SquaredError,
    };

    struct Node {
        Op op;
        bool needs_grad;
        std::uint32_t rows;
        std::uint32_t cols;
        std::uint32_t a = 0;
        std::uint32_t b = 0;
        std::size_t offset = 0;       // into values_/grads_ for owned nodes
        std::uint32_t list_begin = 0;  // into lists_ for Concat/SumOf
        std::uint32_t list_size = 0;
        Tensor* tensor = nullptr;  // Param/Row
        std::size_t row = 0;
        double scalar = 0.0;  // Scale factor, target or label
    };

    Var push(Node node);
    Var owned(Op op, Shape shape, bool needs_grad);
    const Node& node_of(Var v) const;
    void check_same_tape(Var v) const;
    const double* value_ptr(const Node& n) const;
    double* grad_ptr(const Node& n);
    void backprop(const Node& n, const double* g);

    std::vector<Node> nodes_;
    std::vector<double> values_;
    std::vector<double> grads_;
    std::vector<std::uint32_t> lists_;
};

// Free-function spellings over the Var's own tape.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var matmul(Var a, Var b);
Var concat_rows(std::initializer_list<Var> parts);
Var tanh(Var a);
Var sigmoid(Var a);
Var max(Var a, Var b);
Var sum_of(std::span<const Var> parts);
Var scale(Var a, double s);
Var sum(Var a);
void backward(Var loss);

/// Builds a scalar-valued graph on the supplied tape.
using ScalarFn = std::function<Var(Tape&)>;

/// Max relative error between backward() gradients and central finite
/// differences over every component of every input. Inputs must have
/// requires_grad set. Relative error per component is
/// |a - n| / max(|a|, |n|, 1e-8). Throws NonFiniteValue.
double grad_check(const ScalarFn& f, std::span<Tensor* const> inputs, double eps = 1e-5);

}  // namespace mtn::ad
