#include "nct/parser.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

namespace nct {

namespace {

struct Token {
    enum Kind { Number, Imag, Var, Tr, LParen, RParen, Star, Caret, Plus, Minus, End } kind;
    double value = 0.0;  // Number
    int var = 0;         // Var
};

class Lexer {
  public:
    explicit Lexer(const std::string& s) : s_(s) { advance(); }
    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ >= s_.size()) {
            tok_ = {Token::End};
            return;
        }
        char c = s_[pos_];
        if (c == '(') { tok_ = {Token::LParen}; ++pos_; return; }
        if (c == ')') { tok_ = {Token::RParen}; ++pos_; return; }
        if (c == '*') { tok_ = {Token::Star}; ++pos_; return; }
        if (c == '^') { tok_ = {Token::Caret}; ++pos_; return; }
        if (c == '+') { tok_ = {Token::Plus}; ++pos_; return; }
        if (c == '-') { tok_ = {Token::Minus}; ++pos_; return; }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) throw ParseError("bad number at position " + std::to_string(pos_));
            pos_ += static_cast<std::size_t>(end - begin);
            tok_ = {Token::Number, v, 0};
            if (pos_ < s_.size() && s_[pos_] == 'i') {  // 2i
                ++pos_;
                tok_.kind = Token::Imag;
            }
            return;
        }
        if (c == 'i' && !follows_ident(pos_ + 1)) {
            tok_ = {Token::Imag, 1.0, 0};
            ++pos_;
            return;
        }
        if (c == 't' && s_.compare(pos_, 2, "tr") == 0 && !follows_ident(pos_ + 2)) {
            tok_ = {Token::Tr};
            pos_ += 2;
            return;
        }
        if (c == 'X' || c == 'x') {
            std::size_t q = pos_ + 1, start = q;
            while (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) ++q;
            if (q == start) throw ParseError("expected variable index after 'X'");
            int idx = std::atoi(s_.substr(start, q - start).c_str());
            if (idx < 1) throw ParseError("variable indices start at 1");
            pos_ = q;
            tok_ = {Token::Var, 0.0, idx};
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'");
    }

    bool follows_ident(std::size_t p) const {
        return p < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p])) || s_[p] == '_');
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    Token tok_{Token::End};
};

class Parser {
  public:
    Parser(const std::string& text, int dim) : lex_(text), dim_(dim) {}

    TracePoly parse() {
        TracePoly p = poly();
        if (lex_.peek().kind != Token::End) throw ParseError("trailing input");
        return p;
    }

  private:
    TracePoly poly() {
        double sign = 1.0;
        if (lex_.peek().kind == Token::Plus) lex_.take();
        else if (lex_.peek().kind == Token::Minus) { lex_.take(); sign = -1.0; }
        TracePoly acc = term() * Complex(sign);
        while (lex_.peek().kind == Token::Plus || lex_.peek().kind == Token::Minus) {
            bool minus = lex_.take().kind == Token::Minus;
            TracePoly t = term();
            if (minus) acc -= t;
            else acc += t;
        }
        return acc;
    }

    TracePoly term() {
        TracePoly acc = factor();
        while (lex_.peek().kind == Token::Star) {
            lex_.take();
            acc = acc * factor();
        }
        return acc;
    }

    TracePoly factor() {
        TracePoly base = primary();
        if (lex_.peek().kind == Token::Caret) {
            lex_.take();
            Token e = lex_.take();
            if (e.kind != Token::Number || e.value < 0 || e.value != static_cast<int>(e.value))
                throw ParseError("exponent must be a nonnegative integer");
            int n = static_cast<int>(e.value);
            TracePoly acc = TracePoly::one(dim_);
            for (int k = 0; k < n; ++k) acc = acc * base;
            return acc;
        }
        return base;
    }

    TracePoly primary() {
        Token t = lex_.take();
        switch (t.kind) {
            case Token::Number:
                return TracePoly::constant(dim_, t.value);
            case Token::Imag:
                return TracePoly::constant(dim_, Complex(0.0, t.value));
            case Token::Var:
                if (t.var > dim_) throw ParseError("variable exceeds alphabet size");
                return TracePoly::variable(dim_, t.var);
            case Token::Tr: {
                if (lex_.take().kind != Token::LParen) throw ParseError("expected '(' after tr");
                TracePoly inner = poly();
                if (lex_.take().kind != Token::RParen) throw ParseError("expected ')'");
                return trace_of(inner);
            }
            case Token::LParen: {
                TracePoly inner = poly();
                if (lex_.take().kind != Token::RParen) throw ParseError("expected ')'");
                return inner;
            }
            default:
                throw ParseError("unexpected token");
        }
    }

    Lexer lex_;
    int dim_;
};

int scan_max_letter(const std::string& text) {
    int best = 0;
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
        if ((text[i] == 'X' || text[i] == 'x') &&
            std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
            best = std::max(best, std::atoi(text.c_str() + i + 1));
        }
    }
    return best;
}

std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void print_word(std::ostringstream& os, const Word& w, bool& need_star) {
    std::size_t i = 0;
    while (i < w.size()) {
        std::size_t j = i;
        while (j < w.size() && w.letters[j] == w.letters[i]) ++j;
        if (need_star) os << '*';
        os << 'X' << w.letters[i];
        if (j - i > 1) os << '^' << (j - i);
        need_star = true;
        i = j;
    }
}

}  // namespace

TracePoly parse_poly(const std::string& text, int dim) {
    int need = scan_max_letter(text);
    if (dim == 0) dim = std::max(need, 1);
    if (need > dim) throw ParseError("variable exceeds alphabet size");
    TracePoly p = Parser(text, dim).parse();
    p.prune();
    return p;
}

Word parse_word(const std::string& text) {
    TracePoly p = parse_poly(text);
    if (p.term_count() != 1) throw ParseError("expected a single word");
    const auto& [key, c] = *p.terms().begin();
    if (!key.traces.empty() || c != Complex(1.0)) throw ParseError("expected a plain word");
    return key.word;
}

std::string print_poly(const TracePoly& p) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [key, c] : p.terms()) {
        Complex coeff = c;
        bool negative = false;
        if (coeff.imag() == 0.0) {
            negative = coeff.real() < 0.0;
            if (negative) coeff = -coeff;
        } else if (coeff.real() == 0.0) {
            negative = coeff.imag() < 0.0;
            if (negative) coeff = -coeff;
        }
        if (first) {
            if (negative) os << '-';
            first = false;
        } else {
            os << (negative ? " - " : " + ");
        }

        bool need_star = false;
        bool has_factors = !key.word.empty() || !key.traces.empty();
        if (coeff.imag() == 0.0) {
            if (coeff.real() != 1.0 || !has_factors) {
                os << fmt_double(coeff.real());
                need_star = true;
            }
        } else if (coeff.real() == 0.0) {
            if (coeff.imag() == 1.0) os << 'i';
            else os << fmt_double(coeff.imag()) << 'i';
            need_star = true;
        } else {
            os << '(' << fmt_double(coeff.real());
            os << (coeff.imag() < 0 ? '-' : '+');
            double im = std::abs(coeff.imag());
            if (im != 1.0) os << fmt_double(im);
            os << "i)";
            need_star = true;
        }
        for (const auto& t : key.traces) {
            if (need_star) os << '*';
            os << "tr(";
            bool inner = false;
            print_word(os, t, inner);
            os << ')';
            need_star = true;
        }
        print_word(os, key.word, need_star);
    }
    return os.str();
}

}  // namespace nct
