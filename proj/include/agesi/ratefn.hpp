#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace agesi {

/// Parse failure; offset is the byte position in the source text.
struct ParseError : std::runtime_error {
    ParseError(std::string msg, std::size_t offset_)
        : std::runtime_error(std::move(msg)), offset(offset_) {}
    std::size_t offset;
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
    Kind kind;
    double value = 0.0;          // Constant
    std::string name;            // Call: function name
    ExprPtr lhs, rhs;            // binary / unary (lhs) / call args (lhs, rhs)

    double eval(double v) const;
};

/// Immutable expression of one free variable. Evaluation is reentrant.
class RateExpr {
  public:
    RateExpr() = default;
    RateExpr(std::string source, ExprPtr ast, char variable)
        : source_(std::move(source)), ast_(std::move(ast)), variable_(variable) {}

    double operator()(double v) const { return ast_->eval(v); }
    const std::string& source() const { return source_; }
    char variable() const { return variable_; }
    std::string print() const;
    const ExprPtr& ast() const { return ast_; }

  private:
    std::string source_;
    ExprPtr ast_;
    char variable_ = 'a';
};

struct Piece {
    double lo = 0.0;
    double hi = 0.0;
    bool hi_closed = false;  // final piece is closed at a_dagger
    RateExpr expr;
};

/// Ordered left-closed/right-open pieces; the last piece is closed above.
class PiecewiseExpr {
  public:
    PiecewiseExpr() = default;
    explicit PiecewiseExpr(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {}

    double operator()(double v) const;
    const std::vector<Piece>& pieces() const { return pieces_; }
    std::string print() const;

    /// Checks disjoint, ordered pieces covering [0, a_dagger]; throws on failure.
    void validate_cover(double a_dagger) const;
    std::vector<double> breakpoints() const;

  private:
    std::vector<Piece> pieces_;
};

/// A rate function: single expression or piecewise, over one variable.
class RateFn {
  public:
    RateFn() = default;
    RateFn(RateExpr e) : expr_(std::move(e)) {}
    RateFn(PiecewiseExpr p) : piecewise_(std::move(p)), is_piecewise_(true) {}

    double operator()(double v) const { return is_piecewise_ ? piecewise_(v) : expr_(v); }
    bool piecewise() const { return is_piecewise_; }
    const PiecewiseExpr& pieces() const { return piecewise_; }
    std::string print() const { return is_piecewise_ ? piecewise_.print() : expr_.print(); }
    std::vector<double> breakpoints() const {
        return is_piecewise_ ? piecewise_.breakpoints() : std::vector<double>{};
    }

  private:
    RateExpr expr_;
    PiecewiseExpr piecewise_;
    bool is_piecewise_ = false;
};

/// Parse a rate expression (or `piecewise{[lo,hi): expr; ...}`) over `variable`.
RateFn parse_rate(const std::string& source, char variable = 'a');

/// Density dependence Phi(x). Linear-capped max{1 - x/X, 0} is detected
/// structurally so its derivative is exact; anything else keeps the AST.
class DensityDependence {
  public:
    DensityDependence() = default;
    static DensityDependence parse(const std::string& source);
    static DensityDependence linear_capped(double X);

    double operator()(double x) const;
    /// Derivative; exact -1/X inside the cap for the linear-capped form,
    /// central finite difference otherwise.
    double derivative(double x) const;
    bool is_linear_capped() const { return linear_; }
    double ceiling() const { return X_; }
    std::string print() const;

    /// Phi(0)=1 within 1e-12 and non-increasing on a sampled grid.
    void validate(double x_max) const;

  private:
    bool linear_ = false;
    double X_ = 0.0;
    RateExpr expr_;
};

}  // namespace agesi
