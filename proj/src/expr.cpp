#include "pexider/expr.hpp"

#include <cmath>

#include "pexider/errors.hpp"
#include "pexider/fn1d.hpp"

namespace pexider {

namespace {

Dual dual_add(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual dual_sub(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual dual_mul(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual dual_div(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }

}  // namespace

ExprPtr Expr::constant(double v) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->op_ = Op::Const;
    e->value_ = v;
    return e;
}

ExprPtr Expr::var() {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->op_ = Op::Var;
    return e;
}

ExprPtr Expr::poly(std::vector<double> coeffs) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    auto e = std::shared_ptr<Expr>(new Expr());
    e->op_ = Op::Poly;
    e->coeffs_ = std::move(coeffs);
    return e;
}

ExprPtr Expr::unary(Op op, ExprPtr a) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->op_ = op;
    e->a_ = std::move(a);
    return e;
}

ExprPtr Expr::binary(Op op, ExprPtr a, ExprPtr b) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->op_ = op;
    e->a_ = std::move(a);
    e->b_ = std::move(b);
    return e;
}

ExprPtr Expr::fn(std::shared_ptr<const Fn1D> f, ExprPtr arg) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->op_ = Op::Fn;
    e->fn_ = std::move(f);
    e->a_ = std::move(arg);
    return e;
}

Dual Expr::eval(double x) const {
    switch (op_) {
        case Op::Const:
            return {value_, 0.0};
        case Op::Var:
            return {x, 1.0};
        case Op::Poly: {
            // Horner for both value and derivative.
            double v = 0.0, d = 0.0;
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
                d = d * x + v;
                v = v * x + *it;
            }
            return {v, d};
        }
        case Op::Add:
            return dual_add(a_->eval(x), b_->eval(x));
        case Op::Sub:
            return dual_sub(a_->eval(x), b_->eval(x));
        case Op::Mul:
            return dual_mul(a_->eval(x), b_->eval(x));
        case Op::Div:
            return dual_div(a_->eval(x), b_->eval(x));
        case Op::Neg: {
            Dual a = a_->eval(x);
            return {-a.v, -a.d};
        }
        case Op::Sin: {
            Dual a = a_->eval(x);
            return {std::sin(a.v), std::cos(a.v) * a.d};
        }
        case Op::Cos: {
            Dual a = a_->eval(x);
            return {std::cos(a.v), -std::sin(a.v) * a.d};
        }
        case Op::Sinh: {
            Dual a = a_->eval(x);
            return {std::sinh(a.v), std::cosh(a.v) * a.d};
        }
        case Op::Cosh: {
            Dual a = a_->eval(x);
            return {std::cosh(a.v), std::sinh(a.v) * a.d};
        }
        case Op::Exp: {
            Dual a = a_->eval(x);
            double e = std::exp(a.v);
            return {e, e * a.d};
        }
        case Op::Log: {
            Dual a = a_->eval(x);
            return {std::log(a.v), a.d / a.v};
        }
        case Op::Fn: {
            Dual a = a_->eval(x);
            return {fn_->eval_inner(a.v), fn_->deriv_inner(a.v) * a.d};
        }
    }
    throw NumericError("unreachable expression op");
}

void Expr::collect_guards(std::vector<std::pair<const Expr*, bool>>& out) const {
    if (op_ == Op::Div) out.emplace_back(b_.get(), false);
    if (op_ == Op::Log) out.emplace_back(a_.get(), true);
    if (a_) a_->collect_guards(out);
    if (b_) b_->collect_guards(out);
}

ExprPtr operator+(ExprPtr a, ExprPtr b) { return Expr::binary(Expr::Op::Add, std::move(a), std::move(b)); }
ExprPtr operator-(ExprPtr a, ExprPtr b) { return Expr::binary(Expr::Op::Sub, std::move(a), std::move(b)); }
ExprPtr operator*(ExprPtr a, ExprPtr b) { return Expr::binary(Expr::Op::Mul, std::move(a), std::move(b)); }
ExprPtr operator/(ExprPtr a, ExprPtr b) { return Expr::binary(Expr::Op::Div, std::move(a), std::move(b)); }
ExprPtr operator-(ExprPtr a) { return Expr::unary(Expr::Op::Neg, std::move(a)); }
ExprPtr operator+(double a, ExprPtr b) { return Expr::constant(a) + std::move(b); }
ExprPtr operator+(ExprPtr a, double b) { return std::move(a) + Expr::constant(b); }
ExprPtr operator-(double a, ExprPtr b) { return Expr::constant(a) - std::move(b); }
ExprPtr operator-(ExprPtr a, double b) { return std::move(a) - Expr::constant(b); }
ExprPtr operator*(double a, ExprPtr b) { return Expr::constant(a) * std::move(b); }
ExprPtr operator*(ExprPtr a, double b) { return std::move(a) * Expr::constant(b); }
ExprPtr operator/(double a, ExprPtr b) { return Expr::constant(a) / std::move(b); }
ExprPtr operator/(ExprPtr a, double b) { return std::move(a) / Expr::constant(b); }

}  // namespace pexider
