#pragma once

#include <string>
#include <vector>

namespace slnorm {

// Arithmetic over the single variable x: numbers, `x`, `pi`, binary
// + - * / ^ (power is right-associative), unary minus, and the functions
// sin, cos, exp.  The text is compiled once to a postfix program; evaluation
// is a flat stack loop with no allocation.
class ExpressionProgram {
public:
    explicit ExpressionProgram(std::string body);

    double operator()(double x) const;

    const std::string& source() const { return source_; }

private:
    enum class Op : unsigned char {
        PushConst, PushX, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp
    };
    struct Instr {
        Op op;
        double value; // PushConst payload, unused otherwise
    };

    std::vector<Instr> code_;
    std::string source_;

    friend struct ExpressionCompiler;
};

} // namespace slnorm
