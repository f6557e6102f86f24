#include "pexider/serialize.hpp"

#include <string>

#include "pexider/errors.hpp"

namespace pexider::ser {

namespace {

Json body_json(const Fn1D::Body& body) {
    struct Visitor {
        Json operator()(const Fn1D::AffineBody& b) const {
            return Json{{"kind", "affine"}, {"slope", b.slope}, {"intercept", b.intercept}};
        }
        Json operator()(const Fn1D::QuadraticBody& b) const {
            return Json{{"kind", "quadratic"}, {"c2", b.c2}, {"c1", b.c1}, {"c0", b.c0}};
        }
        Json operator()(const Fn1D::ClosedBody& b) const {
            return Json{{"kind", "closed"}, {"expr", expr(b.expr)}};
        }
        Json operator()(const Fn1D::AntiderivBody& b) const {
            return Json{{"kind", "antiderivative"},
                        {"integrand", fn(*b.integrand)},
                        {"x0", b.x0},
                        {"y0", b.y0},
                        {"tol", b.tol}};
        }
        Json operator()(const Fn1D::TabulatedBody& b) const {
            return Json{{"kind", "tabulated"}, {"x", b.x}, {"y", b.y}};
        }
    };
    return std::visit(Visitor{}, body);
}

Fn1D::Body body_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "affine")
        return Fn1D::AffineBody{j.at("slope").get<double>(), j.at("intercept").get<double>()};
    if (kind == "quadratic")
        return Fn1D::QuadraticBody{j.at("c2").get<double>(), j.at("c1").get<double>(),
                                   j.at("c0").get<double>()};
    if (kind == "closed") return Fn1D::ClosedBody{to_expr(j.at("expr"))};
    if (kind == "antiderivative") {
        Fn1D integrand = to_fn(j.at("integrand"));
        Fn1D rebuilt = antiderivative(integrand, j.at("x0").get<double>(),
                                      j.at("y0").get<double>(), j.at("tol").get<double>());
        return rebuilt.pieces().front().body;  // checkpoints recomputed deterministically
    }
    if (kind == "tabulated") {
        auto xs = j.at("x").get<std::vector<double>>();
        auto ys = j.at("y").get<std::vector<double>>();
        auto ds = pchip_slopes(xs, ys);
        return Fn1D::TabulatedBody{std::move(xs), std::move(ys), std::move(ds)};
    }
    throw SchemaError("unknown piece body kind '" + kind + "'");
}

}  // namespace

Json interval(const OpenInterval& iv) { return Json{{"lo", iv.lo}, {"hi", iv.hi}}; }

OpenInterval to_interval(const Json& j) {
    try {
        return OpenInterval(j.at("lo").get<double>(), j.at("hi").get<double>());
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("bad interval: ") + e.what());
    }
}

Json expr(const ExprPtr& e) {
    switch (e->op()) {
        case Expr::Op::Const:
            return Json{{"op", "const"}, {"value", e->const_value()}};
        case Expr::Op::Var:
            return Json{{"op", "var"}};
        case Expr::Op::Poly:
            return Json{{"op", "poly"}, {"coeffs", e->coeffs()}};
        case Expr::Op::Add:
            return Json{{"op", "add"}, {"a", expr(e->child_a())}, {"b", expr(e->child_b())}};
        case Expr::Op::Sub:
            return Json{{"op", "sub"}, {"a", expr(e->child_a())}, {"b", expr(e->child_b())}};
        case Expr::Op::Mul:
            return Json{{"op", "mul"}, {"a", expr(e->child_a())}, {"b", expr(e->child_b())}};
        case Expr::Op::Div:
            return Json{{"op", "div"}, {"a", expr(e->child_a())}, {"b", expr(e->child_b())}};
        case Expr::Op::Neg:
            return Json{{"op", "neg"}, {"a", expr(e->child_a())}};
        case Expr::Op::Sin:
            return Json{{"op", "sin"}, {"a", expr(e->child_a())}};
        case Expr::Op::Cos:
            return Json{{"op", "cos"}, {"a", expr(e->child_a())}};
        case Expr::Op::Sinh:
            return Json{{"op", "sinh"}, {"a", expr(e->child_a())}};
        case Expr::Op::Cosh:
            return Json{{"op", "cosh"}, {"a", expr(e->child_a())}};
        case Expr::Op::Exp:
            return Json{{"op", "exp"}, {"a", expr(e->child_a())}};
        case Expr::Op::Log:
            return Json{{"op", "log"}, {"a", expr(e->child_a())}};
        case Expr::Op::Fn:
            return Json{{"op", "fn"}, {"fn", fn(*e->embedded_fn())}, {"a", expr(e->child_a())}};
    }
    throw SchemaError("unknown expression op");
}

ExprPtr to_expr(const Json& j) {
    const std::string op = j.at("op").get<std::string>();
    if (op == "const") return Expr::constant(j.at("value").get<double>());
    if (op == "var") return Expr::var();
    if (op == "poly") return Expr::poly(j.at("coeffs").get<std::vector<double>>());
    const auto unary = [&](Expr::Op o) { return Expr::unary(o, to_expr(j.at("a"))); };
    if (op == "neg") return unary(Expr::Op::Neg);
    if (op == "sin") return unary(Expr::Op::Sin);
    if (op == "cos") return unary(Expr::Op::Cos);
    if (op == "sinh") return unary(Expr::Op::Sinh);
    if (op == "cosh") return unary(Expr::Op::Cosh);
    if (op == "exp") return unary(Expr::Op::Exp);
    if (op == "log") return unary(Expr::Op::Log);
    const auto binary = [&](Expr::Op o) {
        return Expr::binary(o, to_expr(j.at("a")), to_expr(j.at("b")));
    };
    if (op == "add") return binary(Expr::Op::Add);
    if (op == "sub") return binary(Expr::Op::Sub);
    if (op == "mul") return binary(Expr::Op::Mul);
    if (op == "div") return binary(Expr::Op::Div);
    if (op == "fn")
        return Expr::fn(std::make_shared<Fn1D>(to_fn(j.at("fn"))), to_expr(j.at("a")));
    throw SchemaError("unknown expression op '" + op + "'");
}

Json fn(const Fn1D& f) {
    Json pieces = Json::array();
    for (const auto& p : f.pieces())
        pieces.push_back(Json{{"lo", p.lo}, {"hi", p.hi}, {"body", body_json(p.body)}});
    return Json{{"domain", interval(f.domain())}, {"pieces", std::move(pieces)}};
}

Fn1D to_fn(const Json& j) {
    try {
        OpenInterval dom = to_interval(j.at("domain"));
        std::vector<Fn1D::Piece> ps;
        for (const auto& pj : j.at("pieces"))
            ps.push_back(Fn1D::Piece{pj.at("lo").get<double>(), pj.at("hi").get<double>(),
                                     body_from_json(pj.at("body"))});
        return Fn1D(dom, std::move(ps));
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("bad function record: ") + e.what());
    }
}

Json residual(const ResidualReport& r) {
    return Json{{"max_abs", r.max_abs},
                {"mean_abs", r.mean_abs},
                {"worst", Json::array({r.worst.first, r.worst.second})},
                {"samples", r.samples},
                {"n", r.n},
                {"margin", r.margin}};
}

Json affinity(const AffinityReport& r) {
    Json ivs = Json::array();
    for (const auto& w : r.intervals)
        ivs.push_back(Json{{"lo", w.window.lo},
                           {"hi", w.window.hi},
                           {"slope", w.slope},
                           {"intercept", w.intercept}});
    return Json{{"verdict", regime_name(r.verdict)},
                {"intervals", std::move(ivs)},
                {"tol", r.tol},
                {"n", r.n}};
}

Json const_checks(const std::vector<ConstCheck>& cs) {
    Json arr = Json::array();
    for (const auto& c : cs)
        arr.push_back(Json{{"identity", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"pass", c.pass}});
    return arr;
}

Json set_report(const IntervalSetReport& r) {
    const auto opt = [](const std::optional<OpenInterval>& iv) {
        return iv ? interval(*iv) : Json(nullptr);
    };
    return Json{{"ext", opt(r.ext)},
                {"ref", opt(r.ref)},
                {"star", opt(r.star)},
                {"side_minus", opt(r.side_minus)},
                {"side_plus", opt(r.side_plus)}};
}

}  // namespace pexider::ser
