#include <cctype>
#include <string>
#include <vector>

#include "defilab/error.hpp"
#include "defilab/formula.hpp"

namespace defilab {

namespace {

enum class Tok {
    end,
    integer,
    ident,
    exists_kw,
    forall_kw,
    dot,
    lparen,
    rparen,
    plus,
    minus,
    star,
    percent,
    bang,
    amp,
    bar,
    arrow,
    iff,
    lt,
    le,
    eq,
    ne,
    ge,
    gt,
};

struct Token {
    Tok kind = Tok::end;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::end: return "end of input";
        case Tok::integer:
        case Tok::ident: return "'" + t.text + "'";
        default: return "'" + t.text + "'";
    }
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    auto emit = [&](Tok kind, std::size_t len) {
        out.push_back({kind, std::string(src.substr(i, len)), line, col});
        advance(len);
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        auto next = [&](std::size_t k) { return i + k < src.size() ? src[i + k] : '\0'; };
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t len = 0;
            while (std::isdigit(static_cast<unsigned char>(next(len)))) ++len;
            emit(Tok::integer, len);
            continue;
        }
        if (c >= 'a' && c <= 'z') {
            std::size_t len = 0;
            while (true) {
                char d = next(len);
                if ((d >= 'a' && d <= 'z') || std::isdigit(static_cast<unsigned char>(d)) || d == '_') ++len;
                else break;
            }
            emit(Tok::ident, len);
            continue;
        }
        switch (c) {
            case 'E': emit(Tok::exists_kw, 1); continue;
            case 'A': emit(Tok::forall_kw, 1); continue;
            case '.': emit(Tok::dot, 1); continue;
            case '(': emit(Tok::lparen, 1); continue;
            case ')': emit(Tok::rparen, 1); continue;
            case '+': emit(Tok::plus, 1); continue;
            case '*': emit(Tok::star, 1); continue;
            case '%': emit(Tok::percent, 1); continue;
            case '&': emit(Tok::amp, 1); continue;
            case '|': emit(Tok::bar, 1); continue;
            case '=': emit(Tok::eq, 1); continue;
            case '-':
                if (next(1) == '>') emit(Tok::arrow, 2);
                else emit(Tok::minus, 1);
                continue;
            case '!':
                if (next(1) == '=') emit(Tok::ne, 2);
                else emit(Tok::bang, 1);
                continue;
            case '<':
                if (next(1) == '-' && next(2) == '>') emit(Tok::iff, 3);
                else if (next(1) == '=') emit(Tok::le, 2);
                else emit(Tok::lt, 1);
                continue;
            case '>':
                if (next(1) == '=') emit(Tok::ge, 2);
                else emit(Tok::gt, 1);
                continue;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
    }
    out.push_back({Tok::end, "", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Formula parse_all() {
        Formula f = formula();
        if (peek().kind != Tok::end) fail("unexpected " + describe(peek()));
        return f;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }
    const Token& expect(Tok k, const char* what) {
        if (peek().kind != k) fail(std::string("expected ") + what + ", found " + describe(peek()));
        return take();
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }

    Formula formula() {
        Formula f = implication();
        while (accept(Tok::iff)) f = Formula::equivalence(f, implication());
        return f;
    }

    Formula implication() {
        Formula f = disjunction();
        if (accept(Tok::arrow)) return Formula::implication(f, implication());
        return f;
    }

    Formula disjunction() {
        Formula f = conjunction();
        while (accept(Tok::bar)) f = Formula::disjunction(f, conjunction());
        return f;
    }

    Formula conjunction() {
        Formula f = unary();
        while (accept(Tok::amp)) f = Formula::conjunction(f, unary());
        return f;
    }

    Formula unary() {
        if (accept(Tok::bang)) return Formula::negation(unary());
        if (peek().kind == Tok::exists_kw || peek().kind == Tok::forall_kw) {
            bool is_exists = take().kind == Tok::exists_kw;
            const Token& name = expect(Tok::ident, "a variable after the quantifier");
            expect(Tok::dot, "'.' after the quantified variable");
            Variable v = Variable::fresh(name.text);
            scopes_.push_back(v);
            // The body extends to the end of the enclosing parenthesis.
            Formula body = formula();
            scopes_.pop_back();
            return is_exists ? Formula::exists(v, body) : Formula::forall(v, body);
        }
        if (accept(Tok::lparen)) {
            Formula f = formula();
            expect(Tok::rparen, "')'");
            return f;
        }
        return atom();
    }

    Formula atom() {
        Term lhs = term();
        if (accept(Tok::percent)) {
            const Token& mod = expect(Tok::integer, "a modulus after '%'");
            Int modulus(mod.text);
            if (modulus == 0) throw ParseError("congruence modulus must be positive", mod.line, mod.column);
            expect(Tok::eq, "'=' in congruence");
            bool neg = accept(Tok::minus);
            Int residue(expect(Tok::integer, "a residue").text);
            if (neg) residue = -residue;
            return Formula::congruence(lhs, modulus, residue);
        }
        Comparison op;
        switch (peek().kind) {
            case Tok::lt: op = Comparison::less; break;
            case Tok::le: op = Comparison::less_equal; break;
            case Tok::eq: op = Comparison::equal; break;
            case Tok::ne: op = Comparison::not_equal; break;
            case Tok::ge: op = Comparison::greater_equal; break;
            case Tok::gt: op = Comparison::greater; break;
            default: fail("expected a comparison operator, found " + describe(peek()));
        }
        take();
        return Formula::compare(lhs, op, term());
    }

    Term term() {
        Term t = product();
        while (true) {
            if (accept(Tok::plus)) t = Term::sum(t, product());
            else if (accept(Tok::minus)) t = Term::difference(t, product());
            else return t;
        }
    }

    Term product() {
        if (accept(Tok::minus)) {
            if (peek().kind == Tok::integer) {
                Int c(take().text);
                return scaled_or_constant(-c);
            }
            return Term::negate(product());
        }
        if (peek().kind == Tok::integer) return scaled_or_constant(Int(take().text));
        if (peek().kind == Tok::ident) {
            const Token& name = take();
            if (peek().kind == Tok::star) {
                const Token& star = peek();
                if (peek(1).kind == Tok::ident)
                    throw NonlinearTermError("nonlinear term: product of variables '" + name.text + "*" +
                                                 peek(1).text + "'",
                                             star.line, star.column);
                throw ParseError("coefficient must precede the variable (write c*" + name.text + ")", star.line,
                                 star.column);
            }
            return Term::variable(lookup(name.text));
        }
        fail("expected a term, found " + describe(peek()));
    }

    Term scaled_or_constant(Int c) {
        if (!accept(Tok::star)) return Term::constant(std::move(c));
        if (peek().kind == Tok::integer)
            fail("product of constants is not supported; fold it into one coefficient");
        const Token& name = expect(Tok::ident, "a variable after '*'");
        if (peek().kind == Tok::star)
            throw NonlinearTermError("nonlinear term: product involving '" + name.text + "'", peek().line,
                                     peek().column);
        return Term::scaled(std::move(c), lookup(name.text));
    }

    Variable lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
            if (it->name == name) return *it;
        return Variable::free(name);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<Variable> scopes_;
};

}  // namespace

Formula parse(std::string_view text) {
    return Parser(lex(text)).parse_all();
}

Formula parse_file_contents(std::string_view text) {
    // The lexer already treats '#' to end of line as a comment.
    return parse(text);
}

}  // namespace defilab
