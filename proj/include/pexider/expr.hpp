#ifndef PEXIDER_EXPR_HPP
#define PEXIDER_EXPR_HPP

#include <memory>
#include <vector>

namespace pexider {

class Fn1D;

/// Value/derivative pair for forward-mode evaluation.  Derivatives obtained
/// this way are exact chain-rule compositions, never finite differences.
struct Dual {
    double v = 0.0;
    double d = 0.0;
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Closed-form scalar expression over one variable: constants, polynomials,
/// sums/products/quotients and the {sin, cos, sinh, cosh, exp, log} primitives,
/// plus composition with an embedded piecewise function.
class Expr {
  public:
    enum class Op {
        Const,
        Var,
        Poly,  // c0 + c1 x + c2 x^2 + ... in the expression variable
        Add,
        Sub,
        Mul,
        Div,
        Neg,
        Sin,
        Cos,
        Sinh,
        Cosh,
        Exp,
        Log,
        Fn,  // embedded Fn1D applied to the child expression
    };

    static ExprPtr constant(double v);
    static ExprPtr var();
    static ExprPtr poly(std::vector<double> coeffs);
    static ExprPtr unary(Op op, ExprPtr a);
    static ExprPtr binary(Op op, ExprPtr a, ExprPtr b);
    static ExprPtr fn(std::shared_ptr<const Fn1D> f, ExprPtr arg);

    Dual eval(double x) const;
    double value(double x) const { return eval(x).v; }

    /// Collects every subexpression that must stay away from zero (quotient
    /// denominators) or positive (log arguments) for the expression to be
    /// well defined; used by the construction-time sampling checks.
    void collect_guards(std::vector<std::pair<const Expr*, bool>>& out) const;

    Op op() const { return op_; }
    double const_value() const { return value_; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    const ExprPtr& child_a() const { return a_; }
    const ExprPtr& child_b() const { return b_; }
    const std::shared_ptr<const Fn1D>& embedded_fn() const { return fn_; }

  private:
    Expr() = default;

    Op op_ = Op::Const;
    double value_ = 0.0;
    std::vector<double> coeffs_;
    ExprPtr a_, b_;
    std::shared_ptr<const Fn1D> fn_;
};

// Arithmetic sugar so formulas read like formulas.
ExprPtr operator+(ExprPtr a, ExprPtr b);
ExprPtr operator-(ExprPtr a, ExprPtr b);
ExprPtr operator*(ExprPtr a, ExprPtr b);
ExprPtr operator/(ExprPtr a, ExprPtr b);
ExprPtr operator-(ExprPtr a);
ExprPtr operator+(double a, ExprPtr b);
ExprPtr operator+(ExprPtr a, double b);
ExprPtr operator-(double a, ExprPtr b);
ExprPtr operator-(ExprPtr a, double b);
ExprPtr operator*(double a, ExprPtr b);
ExprPtr operator*(ExprPtr a, double b);
ExprPtr operator/(double a, ExprPtr b);
ExprPtr operator/(ExprPtr a, double b);

namespace ex {
inline ExprPtr c(double v) { return Expr::constant(v); }
inline ExprPtr x() { return Expr::var(); }
inline ExprPtr poly(std::vector<double> coeffs) { return Expr::poly(std::move(coeffs)); }
inline ExprPtr sin(ExprPtr a) { return Expr::unary(Expr::Op::Sin, std::move(a)); }
inline ExprPtr cos(ExprPtr a) { return Expr::unary(Expr::Op::Cos, std::move(a)); }
inline ExprPtr sinh(ExprPtr a) { return Expr::unary(Expr::Op::Sinh, std::move(a)); }
inline ExprPtr cosh(ExprPtr a) { return Expr::unary(Expr::Op::Cosh, std::move(a)); }
inline ExprPtr exp(ExprPtr a) { return Expr::unary(Expr::Op::Exp, std::move(a)); }
inline ExprPtr log(ExprPtr a) { return Expr::unary(Expr::Op::Log, std::move(a)); }
inline ExprPtr fn(std::shared_ptr<const Fn1D> f, ExprPtr arg) {
    return Expr::fn(std::move(f), std::move(arg));
}
inline ExprPtr fn(std::shared_ptr<const Fn1D> f) { return Expr::fn(std::move(f), Expr::var()); }
}  // namespace ex

}  // namespace pexider

#endif
