#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aniso {

struct SourcePos {
    int line = 1;
    int column = 1;
};

class ExprError : public std::runtime_error {
public:
    ExprError(SourcePos where, const std::string& msg)
        : std::runtime_error("line " + std::to_string(where.line) + ", column " +
                             std::to_string(where.column) + ": " + msg),
          pos(where) {}
    SourcePos pos;
};

// Arithmetic expression over named variables, compiled to a postfix program.
// Operators + - * / ^ (right-associative ^, unary minus binding tighter),
// functions sin cos exp abs sqrt min max, numeric literals. Division by
// zero, 0^negative, negative^non-integer and sqrt of a negative value raise
// ExprError carrying the source position.
class Expression {
public:
    Expression() = default;
    static Expression parse(std::string_view text, std::span<const std::string> variables);
    double eval(std::span<const double> values) const;
    const std::string& text() const { return text_; }
    bool empty() const { return program_.empty(); }

private:
    enum class Op : std::uint8_t {
        push_const, push_var, neg, add, sub, mul, div, pow,
        fn_sin, fn_cos, fn_exp, fn_abs, fn_sqrt, fn_min, fn_max,
    };
    struct Instr {
        Op op;
        double value = 0.0;
        int var = 0;
        SourcePos pos;
    };
    std::vector<Instr> program_;
    std::string text_;
    friend class ExprParser;
};

std::vector<std::string> field_variables(int dim);  // x1..xN
std::vector<std::string> flux_variables(int dim);   // x1..xN, s, xi1..xiN

}  // namespace aniso
