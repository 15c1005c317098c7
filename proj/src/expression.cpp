#include "slnorm/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "slnorm/errors.hpp"

namespace slnorm {

namespace {

constexpr int kMaxStack = 64;

} // namespace

// Recursive-descent compiler.  Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | '+' factor | power
//   power  := primary ('^' factor)?          (right-associative)
//   primary:= number | 'x' | 'pi' | ('sin'|'cos'|'exp') '(' expr ')' | '(' expr ')'
struct ExpressionCompiler {
    const std::string& text;
    std::size_t pos = 0;
    std::vector<ExpressionProgram::Instr>& code;
    int depth = 0;     // current simulated stack depth
    int peak = 0;

    using Op = ExpressionProgram::Op;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("expression error at position " + std::to_string(pos) +
                         ": " + what + " (in \"" + text + "\")");
    }

    void emit(Op op, double value = 0.0) {
        code.push_back({op, value});
        switch (op) {
        case Op::PushConst:
        case Op::PushX:
            if (++depth > peak) peak = depth;
            if (peak > kMaxStack) fail("expression too deeply nested");
            break;
        case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Pow:
            --depth;
            break;
        default: // unary ops keep the depth
            break;
        }
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) { ++pos; return true; }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) ++pos;
        return text.substr(start, pos - start);
    }

    void parse_expr() {
        parse_term();
        for (;;) {
            if (accept('+')) { parse_term(); emit(Op::Add); }
            else if (accept('-')) { parse_term(); emit(Op::Sub); }
            else break;
        }
    }

    void parse_term() {
        parse_factor();
        for (;;) {
            if (accept('*')) { parse_factor(); emit(Op::Mul); }
            else if (accept('/')) { parse_factor(); emit(Op::Div); }
            else break;
        }
    }

    void parse_factor() {
        if (accept('-')) { parse_factor(); emit(Op::Neg); return; }
        if (accept('+')) { parse_factor(); return; }
        parse_primary();
        if (accept('^')) { parse_factor(); emit(Op::Pow); }
    }

    void parse_primary() {
        char c = peek();
        if (c == '(') {
            ++pos;
            parse_expr();
            expect(')');
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = text.c_str() + pos;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) fail("malformed number");
            pos += static_cast<std::size_t>(end - begin);
            emit(Op::PushConst, v);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string name = ident();
            if (name == "x") { emit(Op::PushX); return; }
            if (name == "pi") { emit(Op::PushConst, std::numbers::pi); return; }
            if (name == "sin" || name == "cos" || name == "exp") {
                expect('(');
                parse_expr();
                expect(')');
                emit(name == "sin" ? Op::Sin : name == "cos" ? Op::Cos : Op::Exp);
                return;
            }
            fail("unknown identifier '" + name + "'");
        }
        if (c == '\0') fail("unexpected end of expression");
        fail(std::string("unexpected character '") + c + "'");
    }
};

ExpressionProgram::ExpressionProgram(std::string body) : source_(std::move(body)) {
    ExpressionCompiler comp{source_, 0, code_};
    comp.parse_expr();
    comp.skip_ws();
    if (comp.pos != source_.size()) comp.fail("trailing characters");
    if (comp.depth != 1) comp.fail("malformed expression");
}

double ExpressionProgram::operator()(double x) const {
    double st[kMaxStack];
    int top = -1;
    for (const Instr& ins : code_) {
        switch (ins.op) {
        case Op::PushConst: st[++top] = ins.value; break;
        case Op::PushX:     st[++top] = x; break;
        case Op::Add: st[top - 1] += st[top]; --top; break;
        case Op::Sub: st[top - 1] -= st[top]; --top; break;
        case Op::Mul: st[top - 1] *= st[top]; --top; break;
        case Op::Div: st[top - 1] /= st[top]; --top; break;
        case Op::Pow: st[top - 1] = std::pow(st[top - 1], st[top]); --top; break;
        case Op::Neg: st[top] = -st[top]; break;
        case Op::Sin: st[top] = std::sin(st[top]); break;
        case Op::Cos: st[top] = std::cos(st[top]); break;
        case Op::Exp: st[top] = std::exp(st[top]); break;
        }
    }
    return st[0];
}

} // namespace slnorm
