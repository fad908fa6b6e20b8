#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "purity_lab/state.hpp"

// State-expression language. Grammar (EBNF):
//
//   expr    := mixture | tensor
//   mixture := "mix" "(" weight ":" tensor {"," weight ":" tensor} ")"
//   tensor  := atom {("x" | "⊗") atom}
//   atom    := named | ket_sum | "(" expr ")" [ "/" "sqrt" "(" int ")" ]
//   ket_sum := term {("+" | "-") term}
//   term    := [coef "*"] "|" digits ">"
//   coef    := decimal | int "/" int | "1/sqrt(" int ")"
//
// Ket digits are one character per site ("|010>"); sites with local
// dimension above 10 use the comma form ("|1,0,11>"). Named states:
// ghz(m) / ghz(m,d), w(m), bell, phi+, phi-, psi+, psi-. The table is
// closed; unknown names are errors.

namespace purity_lab::ket {

// ---------------------------------------------------------------------------
// AST

// Numeric literal, kept in its written form so expressions print back the
// way they were written.
struct Scalar {
    enum class Form { Integer, Decimal, Fraction, InvSqrt };
    Form form = Form::Integer;
    double decimal = 0.0;    // Decimal
    std::int64_t a = 1;      // Integer value, Fraction numerator, InvSqrt argument
    std::int64_t b = 1;      // Fraction denominator

    static Scalar integer(std::int64_t v) {
        Scalar s;
        s.form = Form::Integer;
        s.a = v;
        return s;
    }
    static Scalar dec(double v) {
        Scalar s;
        s.form = Form::Decimal;
        s.decimal = v;
        return s;
    }
    static Scalar fraction(std::int64_t num, std::int64_t den) {
        Scalar s;
        s.form = Form::Fraction;
        s.a = num;
        s.b = den;
        return s;
    }
    static Scalar inv_sqrt(std::int64_t k) {
        Scalar s;
        s.form = Form::InvSqrt;
        s.a = k;
        return s;
    }

    double value() const {
        switch (form) {
            case Form::Integer: return static_cast<double>(a);
            case Form::Decimal: return decimal;
            case Form::Fraction: return static_cast<double>(a) / static_cast<double>(b);
            case Form::InvSqrt: return 1.0 / std::sqrt(static_cast<double>(a));
        }
        return 0.0;
    }

    // this * 1/sqrt(k), staying in closed form where possible
    Scalar times_inv_sqrt(std::int64_t k) const {
        switch (form) {
            case Form::Integer:
                if (a == 1) return inv_sqrt(k);
                break;
            case Form::InvSqrt:
                return inv_sqrt(a * k);
            case Form::Fraction:
                if (a == 1) return inv_sqrt(b * b * k);
                break;
            case Form::Decimal:
                break;
        }
        return dec(value() / std::sqrt(static_cast<double>(k)));
    }

    std::string to_string() const {
        switch (form) {
            case Form::Integer: return std::to_string(a);
            case Form::Fraction: return std::to_string(a) + "/" + std::to_string(b);
            case Form::InvSqrt: return "1/sqrt(" + std::to_string(a) + ")";
            case Form::Decimal: {
                std::ostringstream os;
                os << std::setprecision(17) << decimal;
                return os.str();
            }
        }
        return "?";
    }
};

struct StateExpr;

struct NamedState {
    std::string name; // canonical: ghz, w, bell, phi+, phi-, psi+, psi-
    int arity = 2;
    int local_dim = 2;
    SourcePos pos;
};

struct KetTerm {
    int sign = 1;
    bool has_coef = false;
    Scalar coef = Scalar::integer(1);
    std::vector<int> digits;
    SourcePos pos;
};

struct ExplicitKet {
    std::vector<KetTerm> terms;
    SourcePos pos;
};

struct TensorExpr {
    std::vector<StateExpr> children;
    SourcePos pos;
};

struct MixtureBranch;

struct MixtureExpr {
    std::vector<MixtureBranch> branches;
    SourcePos pos;
};

// "(expr) / sqrt(k)" where the child did not fold into a ket
struct ScaledExpr {
    std::vector<StateExpr> child; // exactly one
    std::int64_t sqrt_arg = 1;
    SourcePos pos;
};

struct StateExpr {
    std::variant<NamedState, ExplicitKet, TensorExpr, MixtureExpr, ScaledExpr> node;
};

struct MixtureBranch {
    Scalar weight;
    StateExpr child;
};

// ---------------------------------------------------------------------------
// Lexer

namespace detail {

enum class Tok {
    End, LParen, RParen, Comma, Colon, Plus, Minus, Star, Slash,
    Pipe, KetClose, TensorOp, Ident, Int, Decimal,
};

inline const char* tok_name(Tok t) {
    switch (t) {
        case Tok::End: return "end of input";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Comma: return "','";
        case Tok::Colon: return "':'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Pipe: return "'|'";
        case Tok::KetClose: return "'>'";
        case Tok::TensorOp: return "'x'";
        case Tok::Ident: return "a name";
        case Tok::Int: return "an integer";
        case Tok::Decimal: return "a number";
    }
    return "?";
}

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourcePos pos;
};

inline std::vector<Token> tokenize(const std::string& input) {
    std::vector<Token> out;
    SourcePos pos;
    std::size_t i = 0;
    const auto emit = [&](Tok kind, std::string text, SourcePos at) {
        out.push_back(Token{kind, std::move(text), at});
    };
    while (i < input.size()) {
        const char c = input[i];
        if (c == '\n') {
            ++pos.line;
            pos.column = 1;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++pos.column;
            ++i;
            continue;
        }
        const SourcePos at = pos;
        // UTF-8 tensor sign
        if (static_cast<unsigned char>(c) == 0xE2 && i + 2 < input.size() &&
            static_cast<unsigned char>(input[i + 1]) == 0x8A &&
            static_cast<unsigned char>(input[i + 2]) == 0x97) {
            emit(Tok::TensorOp, "⊗", at);
            i += 3;
            ++pos.column;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < input.size() && std::isdigit(static_cast<unsigned char>(input[j]))) ++j;
            bool decimal = false;
            if (j + 1 < input.size() && input[j] == '.' &&
                std::isdigit(static_cast<unsigned char>(input[j + 1]))) {
                decimal = true;
                ++j;
                while (j < input.size() && std::isdigit(static_cast<unsigned char>(input[j]))) ++j;
            }
            emit(decimal ? Tok::Decimal : Tok::Int, input.substr(i, j - i), at);
            pos.column += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < input.size() && (std::isalnum(static_cast<unsigned char>(input[j])) ||
                                        input[j] == '_'))
                ++j;
            std::string word = input.substr(i, j - i);
            // phi+/psi+ and friends are single names
            if ((word == "phi" || word == "psi") && j < input.size() &&
                (input[j] == '+' || input[j] == '-')) {
                word += input[j];
                ++j;
            }
            pos.column += static_cast<int>(j - i);
            i = j;
            if (word == "x")
                emit(Tok::TensorOp, word, at);
            else
                emit(Tok::Ident, std::move(word), at);
            continue;
        }
        Tok kind;
        switch (c) {
            case '(': kind = Tok::LParen; break;
            case ')': kind = Tok::RParen; break;
            case ',': kind = Tok::Comma; break;
            case ':': kind = Tok::Colon; break;
            case '+': kind = Tok::Plus; break;
            case '-': kind = Tok::Minus; break;
            case '*': kind = Tok::Star; break;
            case '/': kind = Tok::Slash; break;
            case '|': kind = Tok::Pipe; break;
            case '>': kind = Tok::KetClose; break;
            default:
                throw ParseError(at, std::string("unexpected character '") + c + "'");
        }
        emit(kind, std::string(1, c), at);
        ++pos.column;
        ++i;
    }
    out.push_back(Token{Tok::End, "", pos});
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Parser

namespace detail {

class Parser {
public:
    explicit Parser(const std::string& input) : tokens_(tokenize(input)) {}

    StateExpr parse() {
        StateExpr expr = parse_expr();
        expect(Tok::End, {"'x'", "end of input"});
        return expr;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    Token advance() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
    bool at(Tok kind) const { return peek().kind == kind; }

    Token expect(Tok kind, std::vector<std::string> expected) {
        if (!at(kind))
            throw ParseError(peek().pos,
                             "unexpected " + describe(peek()), std::move(expected));
        return advance();
    }

    static std::string describe(const Token& t) {
        if (t.kind == Tok::End) return "end of input";
        return "'" + t.text + "'";
    }

    static std::int64_t to_int(const Token& t) {
        try {
            return std::stoll(t.text);
        } catch (const std::exception&) {
            throw ParseError(t.pos, "integer literal '" + t.text + "' is out of range");
        }
    }

    static double to_double(const Token& t) {
        try {
            return std::stod(t.text);
        } catch (const std::exception&) {
            throw ParseError(t.pos, "number '" + t.text + "' is out of range");
        }
    }

    std::int64_t expect_int(const char* what) {
        const Token t = expect(Tok::Int, {what});
        return to_int(t);
    }

    StateExpr parse_expr() {
        if (at(Tok::Ident) && peek().text == "mix") return parse_mixture();
        return parse_tensor();
    }

    StateExpr parse_mixture() {
        MixtureExpr mixture;
        mixture.pos = peek().pos;
        advance(); // mix
        expect(Tok::LParen, {"'('"});
        while (true) {
            MixtureBranch branch{parse_scalar("a weight"), parse_tensor()};
            mixture.branches.push_back(std::move(branch));
            if (at(Tok::Comma)) {
                advance();
                continue;
            }
            break;
        }
        expect(Tok::RParen, {"','", "')'"});
        return StateExpr{std::move(mixture)};
    }

    // scalar followed by ':' is a weight; plain scalar parsing is shared
    // with ket coefficients
    Scalar parse_scalar(const char* what) {
        Scalar s = parse_number(what);
        expect(Tok::Colon, {"':'"});
        return s;
    }

    Scalar parse_number(const char* what) {
        if (at(Tok::Decimal)) {
            const Token t = advance();
            return Scalar::dec(to_double(t));
        }
        if (!at(Tok::Int))
            throw ParseError(peek().pos, "unexpected " + describe(peek()), {what});
        const std::int64_t a = to_int(advance());
        if (at(Tok::Slash)) {
            if (peek(1).kind == Tok::Int) {
                advance();
                const std::int64_t b = to_int(advance());
                if (b == 0)
                    throw ParseError(peek().pos, "fraction with zero denominator");
                return Scalar::fraction(a, b);
            }
            if (peek(1).kind == Tok::Ident && peek(1).text == "sqrt") {
                advance(); // '/'
                advance(); // sqrt
                expect(Tok::LParen, {"'('"});
                const std::int64_t k = expect_int("an integer");
                if (k <= 0) throw ParseError(peek().pos, "sqrt argument must be positive");
                expect(Tok::RParen, {"')'"});
                if (a == 1) return Scalar::inv_sqrt(k);
                return Scalar::dec(static_cast<double>(a) / std::sqrt(static_cast<double>(k)));
            }
        }
        return Scalar::integer(a);
    }

    StateExpr parse_tensor() {
        TensorExpr tensor;
        tensor.pos = peek().pos;
        tensor.children.push_back(parse_atom());
        while (at(Tok::TensorOp)) {
            advance();
            tensor.children.push_back(parse_atom());
        }
        if (tensor.children.size() == 1) return std::move(tensor.children.front());
        return StateExpr{std::move(tensor)};
    }

    StateExpr parse_atom() {
        if (at(Tok::LParen)) {
            const SourcePos at_pos = advance().pos;
            StateExpr inner = parse_expr();
            expect(Tok::RParen, {"')'"});
            if (at(Tok::Slash)) {
                advance();
                const Token fn = expect(Tok::Ident, {"'sqrt'"});
                if (fn.text != "sqrt")
                    throw ParseError(fn.pos, "unexpected '" + fn.text + "'", {"'sqrt'"});
                expect(Tok::LParen, {"'('"});
                const std::int64_t k = expect_int("an integer");
                if (k <= 0) throw ParseError(fn.pos, "sqrt argument must be positive");
                expect(Tok::RParen, {"')'"});
                return scaled(std::move(inner), k, at_pos);
            }
            return inner;
        }
        if (at(Tok::Pipe) || at(Tok::Int) || at(Tok::Decimal)) return parse_ket_sum();
        if (at(Tok::Ident)) return parse_named();
        throw ParseError(peek().pos, "unexpected " + describe(peek()),
                         {"'('", "'|'", "a number", "a state name"});
    }

    static StateExpr scaled(StateExpr inner, std::int64_t k, SourcePos pos) {
        // fold straight into explicit kets so the printed form keeps
        // closed-form coefficients
        if (auto* explicit_ket = std::get_if<ExplicitKet>(&inner.node)) {
            for (KetTerm& term : explicit_ket->terms) {
                term.coef = term.coef.times_inv_sqrt(k);
                term.has_coef = true;
            }
            return inner;
        }
        ScaledExpr node;
        node.pos = pos;
        node.sqrt_arg = k;
        node.child.push_back(std::move(inner));
        return StateExpr{std::move(node)};
    }

    StateExpr parse_named() {
        const Token name = advance();
        NamedState named;
        named.pos = name.pos;
        named.name = name.text == "bell" ? "phi+" : name.text;
        if (named.name == "ghz" || named.name == "w") {
            expect(Tok::LParen, {"'('"});
            const std::int64_t m = expect_int("an integer");
            if (m < 1)
                throw ParseError(name.pos, "'" + name.text + "' needs at least one site");
            if (m > SiteSubset::kMaxSites)
                throw ParseError(name.pos, "'" + name.text + "' arity is too large");
            named.arity = static_cast<int>(m);
            named.local_dim = 2;
            if (named.name == "ghz" && at(Tok::Comma)) {
                advance();
                const std::int64_t d = expect_int("an integer");
                if (d < 2)
                    throw ParseError(name.pos, "local dimension must be >= 2");
                named.local_dim = static_cast<int>(d);
            }
            expect(Tok::RParen, {"')'"});
        } else if (named.name == "phi+" || named.name == "phi-" || named.name == "psi+" ||
                   named.name == "psi-") {
            if (at(Tok::LParen))
                throw ParseError(peek().pos, "'" + name.text + "' takes no arguments");
            named.arity = 2;
            named.local_dim = 2;
        } else {
            throw ParseError(name.pos, "unknown named state '" + name.text + "'");
        }
        return StateExpr{std::move(named)};
    }

    StateExpr parse_ket_sum() {
        ExplicitKet ket;
        ket.pos = peek().pos;
        ket.terms.push_back(parse_term(1));
        while (at(Tok::Plus) || at(Tok::Minus)) {
            const int sign = at(Tok::Plus) ? 1 : -1;
            advance();
            ket.terms.push_back(parse_term(sign));
        }
        return StateExpr{std::move(ket)};
    }

    KetTerm parse_term(int sign) {
        KetTerm term;
        term.sign = sign;
        term.pos = peek().pos;
        if (at(Tok::Int) || at(Tok::Decimal)) {
            term.coef = parse_number("a coefficient");
            term.has_coef = true;
            expect(Tok::Star, {"'*'"});
        }
        expect(Tok::Pipe, {"'|'"});
        // digits: compact ("010") or comma-separated ("1,0,11")
        std::vector<Token> parts;
        bool comma_form = false;
        parts.push_back(expect(Tok::Int, {"digits"}));
        while (at(Tok::Int) || at(Tok::Comma)) {
            if (at(Tok::Comma)) {
                comma_form = true;
                advance();
                parts.push_back(expect(Tok::Int, {"a digit"}));
            } else {
                parts.push_back(advance());
            }
        }
        expect(Tok::KetClose, {"'>'"});
        if (comma_form) {
            for (const Token& p : parts) {
                const std::int64_t d = to_int(p);
                if (d > 1'000'000) throw ParseError(p.pos, "site digit is too large");
                term.digits.push_back(static_cast<int>(d));
            }
        } else {
            for (const Token& p : parts)
                for (char c : p.text) term.digits.push_back(c - '0');
        }
        return term;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace detail

// ---------------------------------------------------------------------------
// Static dimension analysis (used for parse-time checks and by evaluate)

inline std::vector<int> expr_dims(const StateExpr& expr);

namespace detail {

inline std::vector<int> ket_dims(const ExplicitKet& ket) {
    const std::size_t sites = ket.terms.front().digits.size();
    if (sites == 0) throw ParseError(ket.terms.front().pos, "empty ket");
    for (const KetTerm& term : ket.terms)
        if (term.digits.size() != sites)
            throw ParseError(term.pos, "ket has " + std::to_string(term.digits.size()) +
                                           " sites, expected " + std::to_string(sites));
    std::vector<int> dims(sites, 2);
    for (const KetTerm& term : ket.terms)
        for (std::size_t i = 0; i < sites; ++i)
            dims[i] = std::max(dims[i], term.digits[i] + 1);
    return dims;
}

struct DimsVisitor {
    std::vector<int> operator()(const NamedState& named) const {
        return std::vector<int>(static_cast<std::size_t>(named.arity), named.local_dim);
    }
    std::vector<int> operator()(const ExplicitKet& ket) const { return ket_dims(ket); }
    std::vector<int> operator()(const TensorExpr& tensor) const {
        std::vector<int> dims;
        for (const StateExpr& child : tensor.children) {
            const std::vector<int> d = expr_dims(child);
            dims.insert(dims.end(), d.begin(), d.end());
        }
        return dims;
    }
    std::vector<int> operator()(const MixtureExpr& mixture) const {
        std::vector<int> dims = expr_dims(mixture.branches.front().child);
        for (std::size_t i = 1; i < mixture.branches.size(); ++i) {
            const std::vector<int> other = expr_dims(mixture.branches[i].child);
            if (other != dims)
                throw ParseError(mixture.pos,
                                 "mixture branches have mismatched dimensions");
        }
        return dims;
    }
    std::vector<int> operator()(const ScaledExpr& scaled) const {
        return expr_dims(scaled.child.front());
    }
};

} // namespace detail

inline std::vector<int> expr_dims(const StateExpr& expr) {
    return std::visit(detail::DimsVisitor{}, expr.node);
}

// Parses an expression, including static checks (names, arities, mixture
// dimension agreement). Every failure carries a source position.
inline StateExpr parse(const std::string& text) {
    detail::Parser parser(text);
    StateExpr expr = parser.parse();
    expr_dims(expr); // surface static dimension errors now
    return expr;
}

// ---------------------------------------------------------------------------
// Evaluation

struct EvalResult {
    std::variant<PureState, DensityMatrix> state;
    std::vector<std::string> warnings;

    bool is_density() const { return std::holds_alternative<DensityMatrix>(state); }
    const PureState& pure() const { return std::get<PureState>(state); }
    const DensityMatrix& density() const { return std::get<DensityMatrix>(state); }
};

namespace detail {

inline LocalDims make_dims_capped(std::vector<int> dims, std::size_t max_dim) {
    std::size_t acc = 1;
    for (int d : dims) {
        if (d < 2) throw ValidationError("local dimension must be >= 2");
        if (acc > max_dim / static_cast<std::size_t>(d)) {
            unsigned __int128 total = 1;
            for (int e : dims) {
                total *= static_cast<unsigned>(e);
                if (total > static_cast<unsigned __int128>(SIZE_MAX)) break;
            }
            throw DimensionCapError(
                total > static_cast<unsigned __int128>(SIZE_MAX) ? SIZE_MAX
                                                                 : static_cast<std::size_t>(total),
                max_dim);
        }
        acc *= static_cast<std::size_t>(d);
    }
    return LocalDims(std::move(dims));
}

inline PureState eval_named(const NamedState& named, std::size_t max_dim) {
    LocalDims dims = make_dims_capped(
        std::vector<int>(static_cast<std::size_t>(named.arity), named.local_dim), max_dim);
    std::vector<cplx> amps(dims.total_dim(), cplx{0.0, 0.0});
    if (named.name == "ghz" || named.name == "phi+" || named.name == "phi-") {
        const int d = named.local_dim;
        const double c = 1.0 / std::sqrt(static_cast<double>(d));
        std::vector<int> digits(static_cast<std::size_t>(named.arity));
        for (int j = 0; j < d; ++j) {
            std::fill(digits.begin(), digits.end(), j);
            const double sign = (named.name == "phi-" && j == 1) ? -1.0 : 1.0;
            amps[dims.index_of(digits)] = cplx{sign * c, 0.0};
        }
    } else if (named.name == "w") {
        const double c = 1.0 / std::sqrt(static_cast<double>(named.arity));
        std::vector<int> digits(static_cast<std::size_t>(named.arity), 0);
        for (int i = 0; i < named.arity; ++i) {
            digits[static_cast<std::size_t>(i)] = 1;
            amps[dims.index_of(digits)] = cplx{c, 0.0};
            digits[static_cast<std::size_t>(i)] = 0;
        }
    } else { // psi+ / psi-
        const double c = 1.0 / std::sqrt(2.0);
        amps[1] = cplx{c, 0.0};
        amps[2] = cplx{named.name == "psi-" ? -c : c, 0.0};
    }
    return PureState(std::move(dims), std::move(amps));
}

inline PureState normalize_pure(LocalDims dims, std::vector<cplx> amps,
                                NormalizePolicy policy, std::vector<std::string>& warnings,
                                const std::string& what) {
    double norm2 = 0.0;
    for (const cplx& a : amps) norm2 += std::norm(a);
    if (norm2 <= 0.0) throw ValidationError(what + " is the zero vector");
    if (std::abs(norm2 - 1.0) > kNormTol) {
        if (policy == NormalizePolicy::Strict)
            throw ValidationError(what + " is not normalized (sum |amplitude|^2 = " +
                                  std::to_string(norm2) +
                                  "); the lenient policy renormalizes instead");
        const double scale = 1.0 / std::sqrt(norm2);
        for (cplx& a : amps) a *= scale;
        std::ostringstream os;
        os << "renormalized " << what << ": sum |amplitude|^2 was " << std::setprecision(12)
           << norm2;
        warnings.push_back(os.str());
    }
    return PureState(std::move(dims), std::move(amps));
}

inline std::variant<PureState, DensityMatrix> eval_node(const StateExpr& expr,
                                                        NormalizePolicy policy,
                                                        std::size_t max_dim,
                                                        std::vector<std::string>& warnings);

struct EvalVisitor {
    NormalizePolicy policy;
    std::size_t max_dim;
    std::vector<std::string>& warnings;

    std::variant<PureState, DensityMatrix> operator()(const NamedState& named) const {
        return eval_named(named, max_dim);
    }

    std::variant<PureState, DensityMatrix> operator()(const ExplicitKet& ket) const {
        LocalDims dims = make_dims_capped(ket_dims(ket), max_dim);
        std::vector<cplx> amps(dims.total_dim(), cplx{0.0, 0.0});
        for (const KetTerm& term : ket.terms)
            amps[dims.index_of(term.digits)] +=
                cplx{static_cast<double>(term.sign) * term.coef.value(), 0.0};
        return normalize_pure(std::move(dims), std::move(amps), policy, warnings,
                              "ket expression");
    }

    std::variant<PureState, DensityMatrix> operator()(const TensorExpr& tensor) const {
        std::vector<std::variant<PureState, DensityMatrix>> parts;
        bool any_density = false;
        for (const StateExpr& child : tensor.children) {
            parts.push_back(eval_node(child, policy, max_dim, warnings));
            any_density = any_density || std::holds_alternative<DensityMatrix>(parts.back());
        }
        if (!any_density) {
            PureState acc = std::get<PureState>(std::move(parts.front()));
            for (std::size_t i = 1; i < parts.size(); ++i)
                acc = tensor_product(acc, std::get<PureState>(parts[i]), max_dim);
            return acc;
        }
        const auto to_density = [](std::variant<PureState, DensityMatrix>&& v) {
            if (auto* rho = std::get_if<DensityMatrix>(&v)) return std::move(*rho);
            return density_from_pure(std::get<PureState>(v));
        };
        DensityMatrix acc = to_density(std::move(parts.front()));
        for (std::size_t i = 1; i < parts.size(); ++i)
            acc = tensor_product(acc, to_density(std::move(parts[i])), max_dim);
        return acc;
    }

    std::variant<PureState, DensityMatrix> operator()(const MixtureExpr& mixture) const {
        std::vector<double> weights;
        std::vector<DensityMatrix> states;
        double sum = 0.0;
        for (const MixtureBranch& branch : mixture.branches) {
            const double w = branch.weight.value();
            weights.push_back(w);
            sum += w;
            auto child = eval_node(branch.child, policy, max_dim, warnings);
            if (auto* rho = std::get_if<DensityMatrix>(&child))
                states.push_back(std::move(*rho));
            else
                states.push_back(density_from_pure(std::get<PureState>(child)));
        }
        if (std::abs(sum - 1.0) > kNormTol) {
            if (policy == NormalizePolicy::Strict)
                throw ValidationError("mixture weights sum to " + std::to_string(sum) +
                                      "; the lenient policy rescales instead");
            for (double& w : weights) w /= sum;
            std::ostringstream os;
            os << "rescaled mixture weights: they summed to " << std::setprecision(12) << sum;
            warnings.push_back(os.str());
        }
        return mix(weights, states);
    }

    std::variant<PureState, DensityMatrix> operator()(const ScaledExpr& scaled) const {
        auto child = eval_node(scaled.child.front(), policy, max_dim, warnings);
        const double factor = 1.0 / std::sqrt(static_cast<double>(scaled.sqrt_arg));
        if (auto* psi = std::get_if<PureState>(&child)) {
            std::vector<cplx> amps = psi->amplitudes();
            for (cplx& a : amps) a *= factor;
            return normalize_pure(psi->dims(), std::move(amps), policy, warnings,
                                  "scaled expression");
        }
        DensityMatrix& rho = std::get<DensityMatrix>(child);
        if (policy == NormalizePolicy::Strict && std::abs(factor - 1.0) > kNormTol)
            throw ValidationError(
                "scaling a density matrix breaks its unit trace; the lenient policy "
                "rescales instead");
        if (std::abs(factor - 1.0) > kNormTol)
            warnings.push_back("ignored scale factor on a density matrix (trace rescaled)");
        return std::move(rho);
    }
};

inline std::variant<PureState, DensityMatrix> eval_node(const StateExpr& expr,
                                                        NormalizePolicy policy,
                                                        std::size_t max_dim,
                                                        std::vector<std::string>& warnings) {
    return std::visit(EvalVisitor{policy, max_dim, warnings}, expr.node);
}

} // namespace detail

// Mixture anywhere makes the result a density matrix; otherwise pure.
inline EvalResult evaluate(const StateExpr& expr,
                           NormalizePolicy policy = NormalizePolicy::Strict,
                           std::size_t max_dim = kDefaultDimCap) {
    std::vector<std::string> warnings;
    auto state = detail::eval_node(expr, policy, max_dim, warnings);
    return EvalResult{std::move(state), std::move(warnings)};
}

inline EvalResult evaluate(const std::string& text,
                           NormalizePolicy policy = NormalizePolicy::Strict,
                           std::size_t max_dim = kDefaultDimCap) {
    return evaluate(parse(text), policy, max_dim);
}

// ---------------------------------------------------------------------------
// Printing (grammar-conformant; parse(print(e)) evaluates to the same state)

inline std::string pretty_print(const StateExpr& expr);

namespace detail {

inline std::string print_digits(const std::vector<int>& digits) {
    bool wide = false;
    for (int d : digits) wide = wide || d >= 10;
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (wide && i > 0) out += ",";
        out += std::to_string(digits[i]);
    }
    return out;
}

struct PrintVisitor {
    std::string operator()(const NamedState& named) const {
        if (named.name == "ghz") {
            std::string out = "ghz(" + std::to_string(named.arity);
            if (named.local_dim != 2) out += "," + std::to_string(named.local_dim);
            return out + ")";
        }
        if (named.name == "w") return "w(" + std::to_string(named.arity) + ")";
        return named.name;
    }
    std::string operator()(const ExplicitKet& ket) const {
        std::string out;
        for (std::size_t i = 0; i < ket.terms.size(); ++i) {
            const KetTerm& term = ket.terms[i];
            if (i > 0) out += term.sign < 0 ? " - " : " + ";
            if (term.has_coef) out += term.coef.to_string() + "*";
            out += "|" + print_digits(term.digits) + ">";
        }
        return out;
    }
    std::string operator()(const TensorExpr& tensor) const {
        std::string out;
        for (std::size_t i = 0; i < tensor.children.size(); ++i) {
            if (i > 0) out += " x ";
            const StateExpr& child = tensor.children[i];
            const bool needs_parens = std::holds_alternative<MixtureExpr>(child.node) ||
                                      std::holds_alternative<TensorExpr>(child.node);
            if (needs_parens)
                out += "(" + pretty_print(child) + ")";
            else
                out += pretty_print(child);
        }
        return out;
    }
    std::string operator()(const MixtureExpr& mixture) const {
        std::string out = "mix(";
        for (std::size_t i = 0; i < mixture.branches.size(); ++i) {
            if (i > 0) out += ", ";
            const MixtureBranch& branch = mixture.branches[i];
            out += branch.weight.to_string() + ": ";
            const bool needs_parens = std::holds_alternative<MixtureExpr>(branch.child.node);
            if (needs_parens)
                out += "(" + pretty_print(branch.child) + ")";
            else
                out += pretty_print(branch.child);
        }
        return out + ")";
    }
    std::string operator()(const ScaledExpr& scaled) const {
        return "(" + pretty_print(scaled.child.front()) + ")/sqrt(" +
               std::to_string(scaled.sqrt_arg) + ")";
    }
};

} // namespace detail

inline std::string pretty_print(const StateExpr& expr) {
    return std::visit(detail::PrintVisitor{}, expr.node);
}

} // namespace purity_lab::ket
