#include "aniso/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cctype>

namespace aniso {

namespace {

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

class ExprParser {
public:
    ExprParser(std::string_view text, std::span<const std::string> variables, Expression& out)
        : text_(text), vars_(variables), out_(out) {}

    void run() {
        skip_ws();
        if (at_end()) throw ExprError(pos_, "empty expression");
        parse_expr();
        skip_ws();
        if (!at_end()) throw ExprError(pos_, "unexpected trailing input");
    }

private:
    std::string_view text_;
    std::span<const std::string> vars_;
    Expression& out_;
    std::size_t at_ = 0;
    SourcePos pos_{1, 1};

    bool at_end() const { return at_ >= text_.size(); }
    char peek() const { return text_[at_]; }

    void advance() {
        if (text_[at_] == '\n') {
            ++pos_.line;
            pos_.column = 1;
        } else {
            ++pos_.column;
        }
        ++at_;
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
    }

    bool accept(char c) {
        skip_ws();
        if (!at_end() && peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) throw ExprError(pos_, std::string("expected ") + what);
    }

    void emit(Expression::Op op, SourcePos pos) { out_.program_.push_back({op, 0.0, 0, pos}); }

    void parse_expr() {
        parse_term();
        for (;;) {
            skip_ws();
            if (at_end()) return;
            const SourcePos p = pos_;
            if (accept('+')) {
                parse_term();
                emit(Expression::Op::add, p);
            } else if (accept('-')) {
                parse_term();
                emit(Expression::Op::sub, p);
            } else {
                return;
            }
        }
    }

    void parse_term() {
        parse_factor();
        for (;;) {
            skip_ws();
            if (at_end()) return;
            const SourcePos p = pos_;
            if (accept('*')) {
                parse_factor();
                emit(Expression::Op::mul, p);
            } else if (accept('/')) {
                parse_factor();
                emit(Expression::Op::div, p);
            } else {
                return;
            }
        }
    }

    // factor := unary ('^' factor)?   -- right-associative power
    void parse_factor() {
        parse_unary();
        skip_ws();
        if (!at_end() && peek() == '^') {
            const SourcePos p = pos_;
            advance();
            parse_factor();
            emit(Expression::Op::pow, p);
        }
    }

    void parse_unary() {
        skip_ws();
        if (!at_end() && peek() == '-') {
            const SourcePos p = pos_;
            advance();
            parse_unary();
            emit(Expression::Op::neg, p);
            return;
        }
        if (!at_end() && peek() == '+') {
            advance();
            parse_unary();
            return;
        }
        parse_primary();
    }

    void parse_primary() {
        skip_ws();
        if (at_end()) throw ExprError(pos_, "unexpected end of expression");
        const SourcePos p = pos_;
        const char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            parse_number(p);
            return;
        }
        if (c == '(') {
            advance();
            parse_expr();
            expect(')', "')'");
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name;
            while (!at_end() && is_ident_char(peek())) {
                name += peek();
                advance();
            }
            skip_ws();
            if (!at_end() && peek() == '(') {
                parse_call(name, p);
                return;
            }
            for (std::size_t v = 0; v < vars_.size(); ++v) {
                if (vars_[v] == name) {
                    out_.program_.push_back(
                        {Expression::Op::push_var, 0.0, static_cast<int>(v), p});
                    return;
                }
            }
            throw ExprError(p, "unknown variable '" + name + "'");
        }
        throw ExprError(p, std::string("unexpected character '") + c + "'");
    }

    void parse_number(SourcePos p) {
        const char* begin = text_.data() + at_;
        const char* end = text_.data() + text_.size();
        double value = 0.0;
        const std::from_chars_result r = std::from_chars(begin, end, value);
        if (r.ec != std::errc{}) throw ExprError(p, "malformed number");
        const std::size_t consumed = static_cast<std::size_t>(r.ptr - begin);
        for (std::size_t j = 0; j < consumed; ++j) advance();
        out_.program_.push_back({Expression::Op::push_const, value, 0, p});
    }

    void parse_call(const std::string& name, SourcePos p) {
        struct Fn {
            const char* name;
            Expression::Op op;
            int arity;
        };
        static constexpr Fn fns[] = {
            {"sin", Expression::Op::fn_sin, 1},  {"cos", Expression::Op::fn_cos, 1},
            {"exp", Expression::Op::fn_exp, 1},  {"abs", Expression::Op::fn_abs, 1},
            {"sqrt", Expression::Op::fn_sqrt, 1}, {"min", Expression::Op::fn_min, 2},
            {"max", Expression::Op::fn_max, 2},
        };
        for (const Fn& f : fns) {
            if (name == f.name) {
                expect('(', "'('");
                parse_expr();
                for (int a = 1; a < f.arity; ++a) {
                    expect(',', "','");
                    parse_expr();
                }
                expect(')', "')'");
                emit(f.op, p);
                return;
            }
        }
        throw ExprError(p, "unknown function '" + name + "'");
    }
};

Expression Expression::parse(std::string_view text, std::span<const std::string> variables) {
    Expression e;
    e.text_ = std::string(text);
    ExprParser parser(text, variables, e);
    parser.run();
    int depth = 0, max_depth = 0;
    for (const Instr& in : e.program_) {
        if (in.op == Op::push_const || in.op == Op::push_var)
            ++depth;
        else if (in.op != Op::neg && in.op != Op::fn_sin && in.op != Op::fn_cos &&
                 in.op != Op::fn_exp && in.op != Op::fn_abs && in.op != Op::fn_sqrt)
            --depth;
        max_depth = std::max(max_depth, depth);
    }
    if (max_depth > 63) throw ExprError({1, 1}, "expression nests too deeply");
    return e;
}

double Expression::eval(std::span<const double> values) const {
    double stack[64];
    int top = -1;
    for (const Instr& in : program_) {
        switch (in.op) {
            case Op::push_const:
                stack[++top] = in.value;
                break;
            case Op::push_var:
                if (static_cast<std::size_t>(in.var) >= values.size())
                    throw ExprError(in.pos, "unbound variable");
                stack[++top] = values[static_cast<std::size_t>(in.var)];
                break;
            case Op::neg:
                stack[top] = -stack[top];
                break;
            case Op::add:
                --top;
                stack[top] += stack[top + 1];
                break;
            case Op::sub:
                --top;
                stack[top] -= stack[top + 1];
                break;
            case Op::mul:
                --top;
                stack[top] *= stack[top + 1];
                break;
            case Op::div:
                --top;
                if (stack[top + 1] == 0.0) throw ExprError(in.pos, "division by zero");
                stack[top] /= stack[top + 1];
                break;
            case Op::pow: {
                --top;
                const double base = stack[top];
                const double ex = stack[top + 1];
                if (base == 0.0 && ex < 0.0)
                    throw ExprError(in.pos, "zero raised to a negative power");
                if (base < 0.0 && ex != std::nearbyint(ex))
                    throw ExprError(in.pos, "negative base with non-integer exponent");
                stack[top] = std::pow(base, ex);
                break;
            }
            case Op::fn_sin:
                stack[top] = std::sin(stack[top]);
                break;
            case Op::fn_cos:
                stack[top] = std::cos(stack[top]);
                break;
            case Op::fn_exp:
                stack[top] = std::exp(stack[top]);
                break;
            case Op::fn_abs:
                stack[top] = std::abs(stack[top]);
                break;
            case Op::fn_sqrt:
                if (stack[top] < 0.0)
                    throw ExprError(in.pos, "square root of a negative value");
                stack[top] = std::sqrt(stack[top]);
                break;
            case Op::fn_min:
                --top;
                stack[top] = std::min(stack[top], stack[top + 1]);
                break;
            case Op::fn_max:
                --top;
                stack[top] = std::max(stack[top], stack[top + 1]);
                break;
        }
    }
    return stack[0];
}

std::vector<std::string> field_variables(int dim) {
    std::vector<std::string> v;
    for (int d = 1; d <= dim; ++d) v.push_back("x" + std::to_string(d));
    return v;
}

std::vector<std::string> flux_variables(int dim) {
    std::vector<std::string> v = field_variables(dim);
    v.push_back("s");
    for (int d = 1; d <= dim; ++d) v.push_back("xi" + std::to_string(d));
    return v;
}

}  // namespace aniso
