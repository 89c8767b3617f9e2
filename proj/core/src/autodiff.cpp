#include "mtn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mtn::ad {

namespace {

constexpr double kNormFloor = 1e-12;

// y = W x for a row-major (m x k) W. Four rows at a time so the
// accumulations are independent; each row still sums in index order.
void matvec(const double* w, const double* x, double* y, std::size_t m, std::size_t k) {
    std::size_t r = 0;
    for (; r + 4 <= m; r += 4) {
        const double* w0 = w + r * k;
        const double* w1 = w0 + k;
        const double* w2 = w1 + k;
        const double* w3 = w2 + k;
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            const double xc = x[c];
            s0 += w0[c] * xc;
            s1 += w1[c] * xc;
            s2 += w2[c] * xc;
            s3 += w3[c] * xc;
        }
        y[r] = s0;
        y[r + 1] = s1;
        y[r + 2] = s2;
        y[r + 3] = s3;
    }
    for (; r < m; ++r) {
        const double* wr = w + r * k;
        double s = 0.0;
        for (std::size_t c = 0; c < k; ++c) s += wr[c] * x[c];
        y[r] = s;
    }
}

}  // namespace

std::string Shape::str() const {
    return "(" + std::to_string(rows) + "," + std::to_string(cols) + ")";
}

Tensor::Tensor(std::size_t rows, std::size_t cols, bool requires_grad)
    : shape_{rows, cols}, data_(rows * cols, 0.0) {
    set_requires_grad(requires_grad);
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad)
    : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.size())
        throw ShapeMismatch("tensor", Shape{data_.size(), 1}, shape_);
    set_requires_grad(requires_grad);
}

Tensor Tensor::column(std::vector<double> data, bool requires_grad) {
    const std::size_t n = data.size();
    return Tensor(Shape{n, 1}, std::move(data), requires_grad);
}

void Tensor::set_requires_grad(bool on) {
    requires_grad_ = on;
    if (on) {
        grad_.assign(data_.size(), 0.0);
    } else {
        grad_.clear();
        grad_.shrink_to_fit();
    }
}

void Tensor::zero_grad() noexcept {
    std::fill(grad_.begin(), grad_.end(), 0.0);
}

Shape Var::shape() const {
    if (!tape_) throw DetachedFromTape();
    return tape_->shape(*this);
}

std::span<const double> Var::value() const {
    if (!tape_) throw DetachedFromTape();
    return tape_->value(*this);
}

double Var::item() const {
    const Shape s = shape();
    if (s.rows != 1 || s.cols != 1) throw NotScalar(s);
    return value()[0];
}

ShapeMismatch::ShapeMismatch(std::string primitive, Shape got, Shape expected)
    : std::invalid_argument("shape mismatch in " + primitive + ": got " + got.str() +
                            ", expected " + expected.str()),
      primitive_(std::move(primitive)) {}

NotScalar::NotScalar(Shape got)
    : std::invalid_argument("backward requires a (1,1) loss, got " + got.str()) {}

DetachedFromTape::DetachedFromTape() : std::logic_error("value is not recorded on this tape") {}

NonFiniteValue::NonFiniteValue(std::string where)
    : std::domain_error("non-finite value in " + where) {}

// ---------------------------------------------------------------------------

Tape::Tape() {
    nodes_.reserve(1024);
    values_.reserve(1 << 15);
}

Var Tape::push(Node node) {
    nodes_.push_back(node);
    return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::owned(Op op, Shape shape, bool needs_grad) {
    Node n{};
    n.op = op;
    n.needs_grad = needs_grad;
    n.rows = static_cast<std::uint32_t>(shape.rows);
    n.cols = static_cast<std::uint32_t>(shape.cols);
    n.offset = values_.size();
    values_.resize(values_.size() + shape.size());
    return push(n);
}

void Tape::check_same_tape(Var v) const {
    if (v.tape_ != this || v.id_ >= nodes_.size()) throw DetachedFromTape();
}

const Tape::Node& Tape::node_of(Var v) const {
    check_same_tape(v);
    return nodes_[v.id_];
}

const double* Tape::value_ptr(const Node& n) const {
    switch (n.op) {
        case Op::Param: return n.tensor->data().data();
        case Op::Row: return n.tensor->data().data() + n.row * n.tensor->cols();
        default: return values_.data() + n.offset;
    }
}

double* Tape::grad_ptr(const Node& n) {
    switch (n.op) {
        case Op::Param: return n.tensor->grad().data();
        case Op::Row: return n.tensor->grad().data() + n.row * n.tensor->cols();
        default: return grads_.data() + n.offset;
    }
}

Shape Tape::shape(Var v) const {
    const Node& n = node_of(v);
    return Shape{n.rows, n.cols};
}

std::span<const double> Tape::value(Var v) const {
    const Node& n = node_of(v);
    return {value_ptr(n), static_cast<std::size_t>(n.rows) * n.cols};
}

std::span<const double> Tape::grad(Var v) const {
    const Node& n = node_of(v);
    const std::size_t size = static_cast<std::size_t>(n.rows) * n.cols;
    switch (n.op) {
        case Op::Param:
        case Op::Row:
            if (!n.tensor->requires_grad()) return {};
            return {n.tensor->grad().data() + (n.op == Op::Row ? n.row * n.tensor->cols() : 0),
                    size};
        default:
            if (grads_.size() < n.offset + size) return {};
            return {grads_.data() + n.offset, size};
    }
}

// -- leaves -----------------------------------------------------------------

Var Tape::param(Tensor& t) {
    Node n{};
    n.op = Op::Param;
    n.needs_grad = t.requires_grad();
    n.rows = static_cast<std::uint32_t>(t.rows());
    n.cols = static_cast<std::uint32_t>(t.cols());
    n.tensor = &t;
    return push(n);
}

Var Tape::row(Tensor& table, std::size_t r) {
    if (r >= table.rows()) throw ShapeMismatch("row", Shape{r, 1}, table.shape());
    Node n{};
    n.op = Op::Row;
    n.needs_grad = table.requires_grad();
    n.rows = static_cast<std::uint32_t>(table.cols());
    n.cols = 1;
    n.tensor = &table;
    n.row = r;
    return push(n);
}

Var Tape::constant(Shape shape, std::span<const double> values) {
    if (values.size() != shape.size())
        throw ShapeMismatch("constant", Shape{values.size(), 1}, shape);
    Var out = owned(Op::Constant, shape, false);
    std::copy(values.begin(), values.end(), values_.begin() + nodes_[out.id_].offset);
    return out;
}

Var Tape::zeros(std::size_t rows, std::size_t cols) {
    return owned(Op::Constant, Shape{rows, cols}, false);
}

// -- primitives -------------------------------------------------------------

Var Tape::add(Var a, Var b) {
    const Shape sa = shape(a), sb = shape(b);
    if (sa != sb) throw ShapeMismatch("add", sb, sa);
    Var out = owned(Op::Add, sa, nodes_[a.id_].needs_grad || nodes_[b.id_].needs_grad);
    Node& n = nodes_[out.id_];
    n.a = a.id_;
    n.b = b.id_;
    const double* x = value_ptr(nodes_[a.id_]);
    const double* y = value_ptr(nodes_[b.id_]);
    double* o = values_.data() + n.offset;
    for (std::size_t i = 0; i < sa.size(); ++i) o[i] = x[i] + y[i];
    return out;
}

Var Tape::sub(Var a, Var b) {
    const Shape sa = shape(a), sb = shape(b);
    if (sa != sb) throw ShapeMismatch("sub", sb, sa);
    Var out = owned(Op::Sub, sa, nodes_[a.id_].needs_grad || nodes_[b.id_].needs_grad);
    Node& n = nodes_[out.id_];
    n.a = a.id_;
    n.b = b.id_;
    const double* x = value_ptr(nodes_[a.id_]);
    const double* y = value_ptr(nodes_[b.id_]);
    double* o = values_.data() + n.offset;
    for (std::size_t i = 0; i < sa.size(); ++i) o[i] = x[i] - y[i];
    return out;
}

Var Tape::mul(Var a, Var b) {
    const Shape sa = shape(a), sb = shape(b);
    if (sa != sb) throw ShapeMismatch("mul_elem", sb, sa);
    Var out = owned(Op::Mul, sa, nodes_[a.id_].needs_grad || nodes_[b.id_].needs_grad);
    Node& n = nodes_[out.id_];
    n.a = a.id_;
    n.b = b.id_;
    const double* x = value_ptr(nodes_[a.id_]);
    const double* y = value_ptr(nodes_[b.id_]);
    double* o = values_.data() + n.offset;
    for (std::size_t i = 0; i < sa.size(); ++i) o[i] = x[i] * y[i];
    return out;
}

Var Tape::matmul(Var a, Var b) {
    const Shape sa = shape(a), sb = shape(b);
    if (sa.cols != sb.rows) throw ShapeMismatch("matmul", sb, Shape{sa.cols, sb.cols});
    Var out = owned(Op::MatMul, Shape{sa.rows, sb.cols},
                    nodes_[a.id_].needs_grad || nodes_[b.id_].needs_grad);
    Node& n = nodes_[out.id_];
    n.a = a.id_;
    n.b = b.id_;
    const double* x = value_ptr(nodes_[a.id_]);
    const double* y = value_ptr(nodes_[b.id_]);
    double* o = values_.data() + n.offset;
    if (sb.cols == 1) {
        matvec(x, y, o, sa.rows, sa.cols);
    } else {
        for (std::size_t i = 0; i < sa.rows; ++i) {
            for (std::size_t j = 0; j < sb.cols; ++j) {
                double s = 0.0;
                for (std::size_t p = 0; p < sa.cols; ++p) s += x[i * sa.cols + p] * y[p * sb.cols + j];
                o[i * sb.cols + j] = s;
            }
        }
    }
    return out;
}

Var Tape::concat_rows(std::initializer_list<Var> parts) {
    return concat_rows(std::span<const Var>(parts.begin(), parts.size()));
}

Var Tape::concat_rows(std::span<const Var> parts) {
    if (parts.empty()) throw ShapeMismatch("concat_rows", Shape{0, 0}, Shape{1, 1});
    const std::size_t cols = shape(parts[0]).cols;
    std::size_t rows = 0;
    bool needs = false;
    for (Var p : parts) {
        const Shape s = shape(p);
        if (s.cols != cols) throw ShapeMismatch("concat_rows", s, Shape{s.rows, cols});
        rows += s.rows;
        needs = needs || nodes_[p.id_].needs_grad;
    }
    const auto list_begin = static_cast<std::uint32_t>(lists_.size());
    for (Var p : parts) lists_.push_back(p.id_);
    Var out = owned(Op::Concat, Shape{rows, cols}, needs);
    Node& n = nodes_[out.id_];
    n.list_begin = list_begin;
    n.list_size = static_cast<std::uint32_t>(parts.size());
    double* o = values_.data() + n.offset;
    for (Var p : parts) {
        const Node& src = nodes_[p.id_];
        const std::size_t size = static_cast<std::size_t>(src.rows) * src.cols;
        const double* v = value_ptr(src);
        o = std::copy(v, v + size, o);
    }
    return out;
}

Var Tape::tanh(Var a) {
    const Shape sa = shape(a);
    Var out = owned(Op::Tanh, sa, nodes_[a.id_].needs_grad);
    Node& n = nodes_[out.id_];
    n.a = a.id_;
    const double* x = value_ptr(nodes_[a.id_]);
    double* o = values_.data() + n.offset;
    for (std::size_t i = 0; i < sa.size(); ++i) o[i] = std::tanh(x[i]);
    return out;
}

Var Tape::sigmoid(Var a) {
    const Shape sa = shape(a);
    Var out = owned(Op::Sigmoid, sa, nodes_[a.id_].needs_grad);
    Node& n = nodes_[out.id_];
    n.a = a.id_;
    const double* x = value_ptr(nodes_[a.id_]);
    double* o = values_.data() + n.offset;
    for (std::size_t i = 0; i < sa.size(); ++i) o[i] = 1.0 / (1.0 + std::exp(-x[i]));
    return out;
}

Var Tape::max(Var a, Var b) {
    const Shape sa = shape(a), sb = shape(b);
    if (sa != sb) throw ShapeMismatch("elementwise_max", sb, sa);
    Var out = owned(Op::Max, sa, nodes_[a.id_].needs_grad || nodes_[b.id_].needs_grad);
    Node& n = nodes_[out.id_];
    n.a = a.id_;
    n.b = b.id_;
    const double* x = value_ptr(nodes_[a.id_]);
    const double* y = value_ptr(nodes_[b.id_]);
    double* o = values_.data() + n.offset;
    for (std::size_t i = 0; i < sa.size(); ++i) o[i] = x[i] >= y[i] ? x[i] : y[i];
    return out;
}

Var Tape::sum_of(std::span<const Var> parts) {
    if (parts.empty()) throw ShapeMismatch("sum_of", Shape{0, 0}, Shape{1, 1});
    const Shape s0 = shape(parts[0]);
    bool needs = false;
    for (Var p : parts) {
        const Shape s = shape(p);
        if (s != s0) throw ShapeMismatch("sum_of", s, s0);
        needs = needs || nodes_[p.id_].needs_grad;
    }
    const auto list_begin = static_cast<std::uint32_t>(lists_.size());
    for (Var p : parts) lists_.push_back(p.id_);
    Var out = owned(Op::SumOf, s0, needs);
    Node& n = nodes_[out.id_];
    n.list_begin = list_begin;
    n.list_size = static_cast<std::uint32_t>(parts.size());
    double* o = values_.data() + n.offset;
    const std::size_t k = parts.size();
    if (k == 1) {
        const double* v = value_ptr(nodes_[parts[0].id_]);
        std::copy(v, v + s0.size(), o);
    } else if (k == 2) {
        const double* x = value_ptr(nodes_[parts[0].id_]);
        const double* y = value_ptr(nodes_[parts[1].id_]);
        for (std::size_t i = 0; i < s0.size(); ++i) o[i] = x[i] + y[i];
    } else {
        std::vector<const double*> srcs(k);
        for (std::size_t j = 0; j < k; ++j) srcs[j] = value_ptr(nodes_[parts[j].id_]);
        std::vector<double> column(k);
        for (std::size_t i = 0; i < s0.size(); ++i) {
            for (std::size_t j = 0; j < k; ++j) column[j] = srcs[j][i];
            std::sort(column.begin(), column.end());
            double s = 0.0;
            for (double v : column) s += v;
            o[i] = s;
        }
    }
    return out;
}

Var Tape::scale(Var a, double s) {
    const Shape sa = shape(a);
    Var out = owned(Op::Scale, sa, nodes_[a.id_].needs_grad);
    Node& n = nodes_[out.id_];
    n.a = a.id_;
    n.scalar = s;
    const double* x = value_ptr(nodes_[a.id_]);
    double* o = values_.data() + n.offset;
    for (std::size_t i = 0; i < sa.size(); ++i) o[i] = s * x[i];
    return out;
}

Var Tape::sum(Var a) {
    const Shape sa = shape(a);
    Var out = owned(Op::Sum, Shape{1, 1}, nodes_[a.id_].needs_grad);
    Node& n = nodes_[out.id_];
    n.a = a.id_;
    const double* x = value_ptr(nodes_[a.id_]);
    double s = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) s += x[i];
    values_[n.offset] = s;
    return out;
}

Var Tape::cosine(Var a, Var b) {
    const Shape sa = shape(a), sb = shape(b);
    if (sa != sb) throw ShapeMismatch("cosine", sb, sa);
    Var out = owned(Op::Cosine, Shape{1, 1}, nodes_[a.id_].needs_grad || nodes_[b.id_].needs_grad);
    Node& n = nodes_[out.id_];
    n.a = a.id_;
    n.b = b.id_;
    const double* x = value_ptr(nodes_[a.id_]);
    const double* y = value_ptr(nodes_[b.id_]);
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) {
        dot += x[i] * y[i];
        nx += x[i] * x[i];
        ny += y[i] * y[i];
    }
    nx = std::sqrt(nx);
    ny = std::sqrt(ny);
    values_[n.offset] = (nx < kNormFloor || ny < kNormFloor) ? 0.0 : dot / (nx * ny);
    return out;
}

Var Tape::cross_entropy(Var logits, std::size_t label) {
    const Shape s = shape(logits);
    if (s.cols != 1 || label >= s.rows)
        throw ShapeMismatch("cross_entropy", s, Shape{label + 1, 1});
    Var out = owned(Op::CrossEntropy, Shape{1, 1}, nodes_[logits.id_].needs_grad);
    Node& n = nodes_[out.id_];
    n.a = logits.id_;
    n.row = label;
    const double* z = value_ptr(nodes_[logits.id_]);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.rows; ++i) {
        if (!std::isfinite(z[i])) throw NonFiniteValue("cross_entropy logits");
        m = std::max(m, z[i]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < s.rows; ++i) acc += std::exp(z[i] - m);
    values_[n.offset] = m + std::log(acc) - z[label];
    return out;
}

Var Tape::squared_error(Var prediction, double target) {
    const Shape s = shape(prediction);
    if (s.rows != 1 || s.cols != 1) throw ShapeMismatch("squared_error", s, Shape{1, 1});
    Var out = owned(Op::SquaredError, Shape{1, 1}, nodes_[prediction.id_].needs_grad);
    Node& n = nodes_[out.id_];
    n.a = prediction.id_;
    n.scalar = target;
    const double diff = target - value_ptr(nodes_[prediction.id_])[0];
    values_[n.offset] = diff * diff;
    return out;
}

// -- reverse pass -----------------------------------------------------------

void Tape::backward(Var loss) {
    check_same_tape(loss);
    const Node& root = nodes_[loss.id_];
    if (root.rows != 1 || root.cols != 1) throw NotScalar(Shape{root.rows, root.cols});
    if (!root.needs_grad) return;

    grads_.assign(values_.size(), 0.0);
    grad_ptr(root)[0] += 1.0;
    for (std::size_t i = loss.id_ + 1; i-- > 0;) {
        const Node& n = nodes_[i];
        if (!n.needs_grad) continue;
        if (n.op == Op::Param || n.op == Op::Row || n.op == Op::Constant) continue;
        backprop(n, grads_.data() + n.offset);
    }
}

void Tape::backprop(const Node& n, const double* g) {
    const std::size_t size = static_cast<std::size_t>(n.rows) * n.cols;
    switch (n.op) {
        case Op::Constant:
        case Op::Param:
        case Op::Row: return;

        case Op::Add:
        case Op::Sub: {
            const Node& a = nodes_[n.a];
            const Node& b = nodes_[n.b];
            if (a.needs_grad) {
                double* ga = grad_ptr(a);
                for (std::size_t i = 0; i < size; ++i) ga[i] += g[i];
            }
            if (b.needs_grad) {
                double* gb = grad_ptr(b);
                if (n.op == Op::Add) {
                    for (std::size_t i = 0; i < size; ++i) gb[i] += g[i];
                } else {
                    for (std::size_t i = 0; i < size; ++i) gb[i] -= g[i];
                }
            }
            return;
        }

        case Op::Mul: {
            const Node& a = nodes_[n.a];
            const Node& b = nodes_[n.b];
            const double* x = value_ptr(a);
            const double* y = value_ptr(b);
            if (a.needs_grad) {
                double* ga = grad_ptr(a);
                for (std::size_t i = 0; i < size; ++i) ga[i] += g[i] * y[i];
            }
            if (b.needs_grad) {
                double* gb = grad_ptr(b);
                for (std::size_t i = 0; i < size; ++i) gb[i] += g[i] * x[i];
            }
            return;
        }

        case Op::MatMul: {
            const Node& a = nodes_[n.a];
            const Node& b = nodes_[n.b];
            const std::size_t m = a.rows, k = a.cols, cols = b.cols;
            const double* x = value_ptr(a);
            const double* y = value_ptr(b);
            if (a.needs_grad) {
                double* ga = grad_ptr(a);
                if (cols == 1) {
                    for (std::size_t i = 0; i < m; ++i) {
                        const double gi = g[i];
                        double* row = ga + i * k;
                        for (std::size_t p = 0; p < k; ++p) row[p] += gi * y[p];
                    }
                } else {
                    for (std::size_t i = 0; i < m; ++i)
                        for (std::size_t p = 0; p < k; ++p) {
                            double s = 0.0;
                            for (std::size_t j = 0; j < cols; ++j) s += g[i * cols + j] * y[p * cols + j];
                            ga[i * k + p] += s;
                        }
                }
            }
            if (b.needs_grad) {
                double* gb = grad_ptr(b);
                for (std::size_t i = 0; i < m; ++i) {
                    const double* row = x + i * k;
                    for (std::size_t j = 0; j < cols; ++j) {
                        const double gij = g[i * cols + j];
                        for (std::size_t p = 0; p < k; ++p) gb[p * cols + j] += row[p] * gij;
                    }
                }
            }
            return;
        }

        case Op::Concat: {
            const double* src = g;
            for (std::uint32_t j = 0; j < n.list_size; ++j) {
                const Node& part = nodes_[lists_[n.list_begin + j]];
                const std::size_t part_size = static_cast<std::size_t>(part.rows) * part.cols;
                if (part.needs_grad) {
                    double* gp = grad_ptr(part);
                    for (std::size_t i = 0; i < part_size; ++i) gp[i] += src[i];
                }
                src += part_size;
            }
            return;
        }

        case Op::SumOf: {
            for (std::uint32_t j = 0; j < n.list_size; ++j) {
                const Node& part = nodes_[lists_[n.list_begin + j]];
                if (!part.needs_grad) continue;
                double* gp = grad_ptr(part);
                for (std::size_t i = 0; i < size; ++i) gp[i] += g[i];
            }
            return;
        }

        case Op::Tanh: {
            const Node& a = nodes_[n.a];
            const double* o = values_.data() + n.offset;
            double* ga = grad_ptr(a);
            for (std::size_t i = 0; i < size; ++i) ga[i] += g[i] * (1.0 - o[i] * o[i]);
            return;
        }

        case Op::Sigmoid: {
            const Node& a = nodes_[n.a];
            const double* o = values_.data() + n.offset;
            double* ga = grad_ptr(a);
            for (std::size_t i = 0; i < size; ++i) ga[i] += g[i] * o[i] * (1.0 - o[i]);
            return;
        }

        case Op::Max: {
            const Node& a = nodes_[n.a];
            const Node& b = nodes_[n.b];
            const double* x = value_ptr(a);
            const double* y = value_ptr(b);
            double* ga = a.needs_grad ? grad_ptr(a) : nullptr;
            double* gb = b.needs_grad ? grad_ptr(b) : nullptr;
            for (std::size_t i = 0; i < size; ++i) {
                if (x[i] >= y[i]) {
                    if (ga) ga[i] += g[i];
                } else if (gb) {
                    gb[i] += g[i];
                }
            }
            return;
        }

        case Op::Scale: {
            const Node& a = nodes_[n.a];
            double* ga = grad_ptr(a);
            for (std::size_t i = 0; i < size; ++i) ga[i] += n.scalar * g[i];
            return;
        }

        case Op::Sum: {
            const Node& a = nodes_[n.a];
            const std::size_t in_size = static_cast<std::size_t>(a.rows) * a.cols;
            double* ga = grad_ptr(a);
            for (std::size_t i = 0; i < in_size; ++i) ga[i] += g[0];
            return;
        }

        case Op::Cosine: {
            const Node& a = nodes_[n.a];
            const Node& b = nodes_[n.b];
            const std::size_t len = static_cast<std::size_t>(a.rows) * a.cols;
            const double* x = value_ptr(a);
            const double* y = value_ptr(b);
            double nx = 0.0, ny = 0.0;
            for (std::size_t i = 0; i < len; ++i) {
                nx += x[i] * x[i];
                ny += y[i] * y[i];
            }
            nx = std::sqrt(nx);
            ny = std::sqrt(ny);
            if (nx < kNormFloor || ny < kNormFloor) return;
            const double cos = values_[n.offset];
            const double inv = 1.0 / (nx * ny);
            if (a.needs_grad) {
                double* ga = grad_ptr(a);
                const double ca = cos / (nx * nx);
                for (std::size_t i = 0; i < len; ++i) ga[i] += g[0] * (y[i] * inv - ca * x[i]);
            }
            if (b.needs_grad) {
                double* gb = grad_ptr(b);
                const double cb = cos / (ny * ny);
                for (std::size_t i = 0; i < len; ++i) gb[i] += g[0] * (x[i] * inv - cb * y[i]);
            }
            return;
        }

        case Op::CrossEntropy: {
            const Node& a = nodes_[n.a];
            const double* z = value_ptr(a);
            const std::size_t m = a.rows;
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) mx = std::max(mx, z[i]);
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) acc += std::exp(z[i] - mx);
            double* ga = grad_ptr(a);
            for (std::size_t i = 0; i < m; ++i) {
                const double p = std::exp(z[i] - mx) / acc;
                ga[i] += g[0] * (p - (i == n.row ? 1.0 : 0.0));
            }
            return;
        }

        case Op::SquaredError: {
            const Node& a = nodes_[n.a];
            double* ga = grad_ptr(a);
            ga[0] += g[0] * 2.0 * (value_ptr(a)[0] - n.scalar);
            return;
        }
    }
}

// ---------------------------------------------------------------------------

namespace {

Tape& tape_of(Var v) {
    if (!v.valid()) throw DetachedFromTape();
    return *v.tape();
}

}  // namespace

Var add(Var a, Var b) { return tape_of(a).add(a, b); }
Var sub(Var a, Var b) { return tape_of(a).sub(a, b); }
Var mul(Var a, Var b) { return tape_of(a).mul(a, b); }
Var matmul(Var a, Var b) { return tape_of(a).matmul(a, b); }
Var concat_rows(std::initializer_list<Var> parts) {
    if (parts.size() == 0) throw ShapeMismatch("concat_rows", Shape{0, 0}, Shape{1, 1});
    return tape_of(*parts.begin()).concat_rows(parts);
}
Var tanh(Var a) { return tape_of(a).tanh(a); }
Var sigmoid(Var a) { return tape_of(a).sigmoid(a); }
Var max(Var a, Var b) { return tape_of(a).max(a, b); }
Var sum_of(std::span<const Var> parts) {
    if (parts.empty()) throw ShapeMismatch("sum_of", Shape{0, 0}, Shape{1, 1});
    return tape_of(parts.front()).sum_of(parts);
}
Var scale(Var a, double s) { return tape_of(a).scale(a, s); }
Var sum(Var a) { return tape_of(a).sum(a); }
void backward(Var loss) { tape_of(loss).backward(loss); }

double grad_check(const ScalarFn& f, std::span<Tensor* const> inputs, double eps) {
    for (Tensor* t : inputs) t->zero_grad();
    {
        Tape tape;
        Var y = f(tape);
        if (!std::isfinite(y.item())) throw NonFiniteValue("grad_check objective");
        tape.backward(y);
    }
    auto evaluate = [&f]() {
        Tape tape;
        const double v = f(tape).item();
        if (!std::isfinite(v)) throw NonFiniteValue("grad_check objective");
        return v;
    };

    double worst = 0.0;
    for (Tensor* t : inputs) {
        const std::vector<double> analytic(t->grad().begin(), t->grad().end());
        auto data = t->data();
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double saved = data[i];
            data[i] = saved + eps;
            const double up = evaluate();
            data[i] = saved - eps;
            const double down = evaluate();
            data[i] = saved;
            const double numeric = (up - down) / (2.0 * eps);
            if (!std::isfinite(analytic[i])) throw NonFiniteValue("grad_check gradient");
            const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
            worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
        }
    }
    return worst;
}

}  // namespace mtn::ad
