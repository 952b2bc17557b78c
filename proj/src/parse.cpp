#include "branesim/parse.hpp"

#include <cctype>
#include <optional>
#include <sstream>
#include <vector>

namespace brane {

namespace {

enum class Tok {
    End,
    Int,      // [0-9]+
    Ident,    // [A-Za-z_][A-Za-z0-9_]* (keywords are contextual)
    Star,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Bar,
    Dot,
    Less,
    Greater,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

const char* describe(Tok k) {
    switch (k) {
        case Tok::End: return "end of input";
        case Tok::Int: return "integer";
        case Tok::Ident: return "identifier";
        case Tok::Star: return "'*'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Bar: return "'|'";
        case Tok::Dot: return "'.'";
        case Tok::Less: return "'<'";
        case Tok::Greater: return "'>'";
    }
    return "?";
}

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            t.kind = Tok::Int;
            t.text = text.substr(i, j - i);
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            t.kind = Tok::Ident;
            t.text = text.substr(i, j - i);
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        switch (c) {
            case '*': t.kind = Tok::Star; break;
            case '[': t.kind = Tok::LBracket; break;
            case ']': t.kind = Tok::RBracket; break;
            case '(': t.kind = Tok::LParen; break;
            case ')': t.kind = Tok::RParen; break;
            case '|': t.kind = Tok::Bar; break;
            case '.': t.kind = Tok::Dot; break;
            case '<': t.kind = Tok::Less; break;
            case '>': t.kind = Tok::Greater; break;
            default:
                throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        }
        t.text = c;
        advance(1);
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

std::optional<ActionKind> prefix_keyword(const std::string& word) {
    if (word == "phago") return ActionKind::Phago;
    if (word == "cophago") return ActionKind::CoPhago;
    if (word == "exo") return ActionKind::Exo;
    if (word == "coexo") return ActionKind::CoExo;
    if (word == "pino") return ActionKind::Pino;
    return std::nullopt;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

    SystemPtr system_top() {
        SystemPtr s = system();
        expect(Tok::End);
        return s;
    }

    MembranePtr membrane_top() {
        MembranePtr m = membrane();
        expect(Tok::End);
        return m;
    }

  private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        if (i >= toks_.size()) i = toks_.size() - 1;
        return toks_[i];
    }
    Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const Token& at, const std::string& message) const {
        throw ParseError(at.line, at.column, message);
    }

    Token expect(Tok kind, const char* what = nullptr) {
        if (peek().kind != kind) {
            std::ostringstream msg;
            msg << "expected " << (what ? what : describe(kind)) << ", found ";
            if (peek().kind == Tok::End)
                msg << "end of input";
            else
                msg << "'" << peek().text << "'";
            fail(peek(), msg.str());
        }
        return take();
    }

    bool at_ident(const char* word) const {
        return peek().kind == Tok::Ident && peek().text == word;
    }

    // System ::= "void" | Item ("o" Item)*
    SystemPtr system() {
        if (at_ident("void")) {
            take();
            return void_system();
        }
        SystemPtr s = item();
        while (at_ident("o")) {
            take();
            s = compose(std::move(s), item());
        }
        return s;
    }

    // Item ::= [INT "*"] Membrane "[" System "]"
    SystemPtr item() {
        Count count = 1;
        if (peek().kind == Tok::Int && peek(1).kind == Tok::Star) {
            count = Count(take().text);
            take();  // '*'
        }
        MembranePtr m = membrane();
        expect(Tok::LBracket, "'[' after membrane");
        SystemPtr content = system();
        expect(Tok::RBracket);
        return replicate(count, cell(std::move(m), std::move(content)));
    }

    // Membrane ::= "0" | Guard ("|" Guard)*
    MembranePtr membrane() {
        if (peek().kind == Tok::Int) {
            const Token& t = peek();
            if (t.text != "0") fail(t, "expected membrane, found integer");
            take();
            return zero_membrane();
        }
        MembranePtr m = guard();
        while (peek().kind == Tok::Bar) {
            take();
            m = par(std::move(m), guard());
        }
        return m;
    }

    // Guard ::= Prefix ["." GuardBody]
    MembranePtr guard() {
        const Token head = peek();
        if (head.kind != Tok::Ident) fail(head, "expected action prefix");
        auto kind = prefix_keyword(head.text);
        if (!kind) fail(head, "unknown action prefix '" + head.text + "'");
        take();
        expect(Tok::Less, "'<' after action prefix");
        Token name = expect(Tok::Ident, "action name");
        expect(Tok::Greater);

        MembranePtr argument;
        if (action_takes_argument(*kind)) {
            if (peek().kind != Tok::LParen)
                fail(peek(), std::string(head.text) +
                                 "<...> requires a parenthesized membrane argument");
            take();
            argument = membrane();
            expect(Tok::RParen);
        } else if (peek().kind == Tok::LParen) {
            fail(peek(),
                 std::string(head.text) + "<...> does not take a membrane argument");
        }

        MembranePtr continuation = zero_membrane();
        if (peek().kind == Tok::Dot) {
            take();
            continuation = guard_body();
        }
        return action(*kind, name.text, std::move(argument), std::move(continuation));
    }

    // GuardBody ::= "0" | Guard | "(" Membrane ")"
    MembranePtr guard_body() {
        if (peek().kind == Tok::LParen) {
            take();
            MembranePtr m = membrane();
            expect(Tok::RParen);
            return m;
        }
        if (peek().kind == Tok::Int && peek().text == "0") {
            take();
            return zero_membrane();
        }
        return guard();
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

SystemPtr parse_system(const std::string& text) { return Parser(text).system_top(); }

MembranePtr parse_membrane(const std::string& text) { return Parser(text).membrane_top(); }

}  // namespace brane
