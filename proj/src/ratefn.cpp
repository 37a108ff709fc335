#include "agesi/ratefn.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace agesi {

double ExprNode::eval(double v) const {
    switch (kind) {
        case Kind::Constant: return value;
        case Kind::Variable: return v;
        case Kind::Negate: return -lhs->eval(v);
        case Kind::Add: return lhs->eval(v) + rhs->eval(v);
        case Kind::Sub: return lhs->eval(v) - rhs->eval(v);
        case Kind::Mul: return lhs->eval(v) * rhs->eval(v);
        case Kind::Div: return lhs->eval(v) / rhs->eval(v);
        case Kind::Pow: return std::pow(lhs->eval(v), rhs->eval(v));
        case Kind::Call: {
            const double x = lhs->eval(v);
            if (name == "sin") return std::sin(x);
            if (name == "cos") return std::cos(x);
            if (name == "tan") return std::tan(x);
            if (name == "exp") return std::exp(x);
            const double y = rhs->eval(v);
            if (name == "max") return std::max(x, y);
            return std::min(x, y);
        }
    }
    return 0.0;
}

namespace {

ExprPtr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

ExprPtr constant(double v) { return make({ExprNode::Kind::Constant, v, {}, nullptr, nullptr}); }

class Parser {
  public:
    Parser(const std::string& src, char variable) : s_(src), var_(variable) {}

    ExprPtr parse_full() {
        ExprPtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

    ExprPtr expr() {
        ExprPtr e = term();
        for (;;) {
            skip_ws();
            if (accept('+')) e = bin(ExprNode::Kind::Add, e, term());
            else if (accept('-')) e = bin(ExprNode::Kind::Sub, e, term());
            else return e;
        }
    }

    std::size_t pos() const { return pos_; }
    void set_pos(std::size_t p) { pos_ = p; }
    void skip_ws() { while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_; }
    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    void expect(char c, const char* what) {
        if (!accept(c)) fail(std::string("expected '") + c + "' " + what);
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  private:
    ExprPtr bin(ExprNode::Kind k, ExprPtr a, ExprPtr b) {
        return make({k, 0.0, {}, std::move(a), std::move(b)});
    }

    ExprPtr term() {
        ExprPtr e = unary();
        for (;;) {
            skip_ws();
            if (accept('*')) e = bin(ExprNode::Kind::Mul, e, unary());
            else if (accept('/')) e = bin(ExprNode::Kind::Div, e, unary());
            else return e;
        }
    }

    ExprPtr unary() {
        skip_ws();
        if (accept('-')) return make({ExprNode::Kind::Negate, 0.0, {}, unary(), nullptr});
        if (accept('+')) return unary();
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        skip_ws();
        if (accept('^')) return bin(ExprNode::Kind::Pow, base, unary());  // right-assoc
        return base;
    }

    ExprPtr primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        if (accept('(')) {
            ExprPtr e = expr();
            expect(')', "to close parenthesis");
            return e;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    ExprPtr number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                s_[pos_] == 'e' || s_[pos_] == 'E' ||
                ((s_[pos_] == '+' || s_[pos_] == '-') && pos_ > start &&
                 (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E'))))
            ++pos_;
        try {
            std::size_t used = 0;
            const double v = std::stod(s_.substr(start, pos_ - start), &used);
            if (used != pos_ - start) throw std::invalid_argument("");
            return constant(v);
        } catch (const std::exception&) {
            pos_ = start;
            fail("malformed number");
        }
    }

    ExprPtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::string id = s_.substr(start, pos_ - start);
        if (id == "pi") return constant(M_PI);
        if (id.size() == 1 && id[0] == var_)
            return make({ExprNode::Kind::Variable, 0.0, {}, nullptr, nullptr});
        if (id == "sin" || id == "cos" || id == "tan" || id == "exp") {
            expect('(', "after function name");
            ExprPtr arg = expr();
            expect(')', "to close call");
            return make({ExprNode::Kind::Call, 0.0, id, std::move(arg), nullptr});
        }
        if (id == "max" || id == "min") {
            expect('(', "after function name");
            ExprPtr a = expr();
            expect(',', "between arguments");
            ExprPtr b = expr();
            expect(')', "to close call");
            return make({ExprNode::Kind::Call, 0.0, id, std::move(a), std::move(b)});
        }
        pos_ = start;
        fail("unknown identifier '" + id + "'");
    }

    const std::string& s_;
    char var_;
    std::size_t pos_ = 0;
};

int precedence(ExprNode::Kind k) {
    switch (k) {
        case ExprNode::Kind::Add:
        case ExprNode::Kind::Sub: return 1;
        case ExprNode::Kind::Mul:
        case ExprNode::Kind::Div: return 2;
        case ExprNode::Kind::Negate: return 3;
        case ExprNode::Kind::Pow: return 4;
        default: return 5;
    }
}

void print_node(const ExprNode& n, char var, int parent_prec, std::ostream& os) {
    const int prec = precedence(n.kind);
    const bool paren = prec < parent_prec;
    if (paren) os << '(';
    switch (n.kind) {
        case ExprNode::Kind::Constant: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.value;
            os << tmp.str();
            break;
        }
        case ExprNode::Kind::Variable: os << var; break;
        case ExprNode::Kind::Negate:
            os << '-';
            print_node(*n.lhs, var, prec + 1, os);
            break;
        case ExprNode::Kind::Add:
        case ExprNode::Kind::Sub:
        case ExprNode::Kind::Mul:
        case ExprNode::Kind::Div: {
            const char op = n.kind == ExprNode::Kind::Add   ? '+'
                            : n.kind == ExprNode::Kind::Sub ? '-'
                            : n.kind == ExprNode::Kind::Mul ? '*'
                                                            : '/';
            print_node(*n.lhs, var, prec, os);
            os << ' ' << op << ' ';
            print_node(*n.rhs, var, prec + 1, os);  // -, / are left-assoc
            break;
        }
        case ExprNode::Kind::Pow:
            print_node(*n.lhs, var, prec + 1, os);
            os << '^';
            print_node(*n.rhs, var, prec, os);
            break;
        case ExprNode::Kind::Call:
            os << n.name << '(';
            print_node(*n.lhs, var, 0, os);
            if (n.rhs) {
                os << ", ";
                print_node(*n.rhs, var, 0, os);
            }
            os << ')';
            break;
    }
    if (paren) os << ')';
}

double parse_const(Parser& p) {
    ExprPtr e = p.expr();
    // no variable may appear in piece bounds
    std::vector<const ExprNode*> stack{e.get()};
    while (!stack.empty()) {
        const ExprNode* n = stack.back();
        stack.pop_back();
        if (n->kind == ExprNode::Kind::Variable)
            p.fail("piece bound must be constant");
        if (n->lhs) stack.push_back(n->lhs.get());
        if (n->rhs) stack.push_back(n->rhs.get());
    }
    return e->eval(0.0);
}

}  // namespace

std::string RateExpr::print() const {
    std::ostringstream os;
    print_node(*ast_, variable_, 0, os);
    return os.str();
}

double PiecewiseExpr::operator()(double v) const {
    for (const Piece& p : pieces_) {
        if (v >= p.lo && (v < p.hi || (p.hi_closed && v <= p.hi))) return p.expr(v);
    }
    // outside declared pieces: clamp to nearest (validation guarantees cover)
    if (!pieces_.empty()) {
        if (v < pieces_.front().lo) return pieces_.front().expr(v);
        return pieces_.back().expr(v);
    }
    return 0.0;
}

std::string PiecewiseExpr::print() const {
    std::ostringstream os;
    os.precision(17);
    os << "piecewise{";
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const Piece& p = pieces_[i];
        if (i) os << "; ";
        os << '[' << p.lo << ',' << p.hi << (p.hi_closed ? "]" : ")") << ": "
           << p.expr.print();
    }
    os << '}';
    return os.str();
}

void PiecewiseExpr::validate_cover(double a_dagger) const {
    const double tol = 1e-12 * std::max(1.0, a_dagger);
    if (pieces_.empty()) throw std::invalid_argument("piecewise: no pieces");
    if (std::abs(pieces_.front().lo) > tol)
        throw std::invalid_argument("piecewise: pieces must start at 0");
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
        if (pieces_[i].hi >= pieces_[i + 1].hi)
            throw std::invalid_argument("piecewise: pieces out of order");
        if (std::abs(pieces_[i].hi - pieces_[i + 1].lo) > tol)
            throw std::invalid_argument("piecewise: gap or overlap between pieces");
    }
    if (std::abs(pieces_.back().hi - a_dagger) > tol)
        throw std::invalid_argument("piecewise: pieces do not cover [0, a_dagger]");
}

std::vector<double> PiecewiseExpr::breakpoints() const {
    std::vector<double> b;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) b.push_back(pieces_[i].hi);
    return b;
}

RateFn parse_rate(const std::string& source, char variable) {
    if (source.empty()) throw ParseError("empty expression", 0);
    std::size_t i = 0;
    while (i < source.size() && std::isspace(static_cast<unsigned char>(source[i]))) ++i;
    if (source.compare(i, 9, "piecewise") == 0) {
        Parser p(source, variable);
        p.set_pos(i + 9);
        p.expect('{', "after 'piecewise'");
        std::vector<Piece> pieces;
        for (;;) {
            p.expect('[', "to open piece interval");
            Piece piece;
            piece.lo = parse_const(p);
            p.expect(',', "between interval bounds");
            piece.hi = parse_const(p);
            if (p.accept(']')) piece.hi_closed = true;
            else p.expect(')', "to close piece interval");
            p.expect(':', "before piece expression");
            ExprPtr e = p.expr();
            piece.expr = RateExpr(source, std::move(e), variable);
            pieces.push_back(std::move(piece));
            if (p.accept(';')) {
                p.skip_ws();
                if (p.accept('}')) break;  // trailing ';' tolerated
                continue;
            }
            p.expect('}', "to close piecewise");
            break;
        }
        pieces.back().hi_closed = true;
        return RateFn(PiecewiseExpr(std::move(pieces)));
    }
    Parser p(source, variable);
    return RateFn(RateExpr(source, p.parse_full(), variable));
}

DensityDependence DensityDependence::parse(const std::string& source) {
    std::size_t i = 0;
    while (i < source.size() && std::isspace(static_cast<unsigned char>(source[i]))) ++i;
    if (source.compare(i, 9, "piecewise") == 0)
        throw ParseError("density dependence cannot be piecewise", i);
    DensityDependence d;
    Parser p(source, 'x');
    d.expr_ = RateExpr(source, p.parse_full(), 'x');

    // detect max(1 - x/X, 0) or max(0, 1 - x/X)
    const ExprNode* n = d.expr_.ast().get();
    if (n->kind == ExprNode::Kind::Call && n->name == "max") {
        const ExprNode* a = n->lhs.get();
        const ExprNode* b = n->rhs.get();
        if (a->kind == ExprNode::Kind::Constant && a->value == 0.0) std::swap(a, b);
        if (b->kind == ExprNode::Kind::Constant && b->value == 0.0 &&
            a->kind == ExprNode::Kind::Sub && a->lhs->kind == ExprNode::Kind::Constant &&
            a->lhs->value == 1.0 && a->rhs->kind == ExprNode::Kind::Div &&
            a->rhs->lhs->kind == ExprNode::Kind::Variable &&
            a->rhs->rhs->kind == ExprNode::Kind::Constant && a->rhs->rhs->value > 0.0) {
            d.linear_ = true;
            d.X_ = a->rhs->rhs->value;
        }
    }
    return d;
}

DensityDependence DensityDependence::linear_capped(double X) {
    DensityDependence d;
    d.linear_ = true;
    d.X_ = X;
    std::ostringstream os;
    os.precision(17);
    os << "max(1 - x/" << X << ", 0)";
    const std::string src = os.str();
    Parser q(src, 'x');
    d.expr_ = RateExpr(src, q.parse_full(), 'x');
    return d;
}

double DensityDependence::operator()(double x) const {
    if (linear_) return std::max(1.0 - x / X_, 0.0);
    return expr_(x);
}

double DensityDependence::derivative(double x) const {
    if (linear_) return x < X_ ? -1.0 / X_ : 0.0;
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    return ((*this)(x + h) - (*this)(x - h)) / (2.0 * h);
}

std::string DensityDependence::print() const { return expr_.print(); }

void DensityDependence::validate(double x_max) const {
    if (std::abs((*this)(0.0) - 1.0) > 1e-12)
        throw std::invalid_argument("density dependence: Phi(0) != 1");
    double prev = (*this)(0.0);
    const int n = 1000;
    for (int i = 1; i <= n; ++i) {
        const double x = x_max * i / n;
        const double v = (*this)(x);
        if (v > prev + 1e-12)
            throw std::invalid_argument("density dependence: Phi not non-increasing");
        prev = v;
    }
}

}  // namespace agesi
