#include "fraggen/printer/printer.hpp"

#include <charconv>
#include <cmath>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fraggen/errors.hpp"

namespace fraggen::printer {
namespace {

using estree::AstNode;
using estree::NodeKind;
using estree::NodeList;
using estree::Regex;
using estree::Scalar;

// Binding power, higher binds tighter.
enum Prec : int {
  kSequence = 1,
  kAssign = 2,
  kConditional = 3,
  kNullish = 4,
  kLogicalOr = 4,
  kLogicalAnd = 5,
  kBitOr = 6,
  kBitXor = 7,
  kBitAnd = 8,
  kEquality = 9,
  kRelational = 10,
  kShift = 11,
  kAdditive = 12,
  kMultiplicative = 13,
  kExponent = 14,
  kUnary = 15,
  kPostfix = 16,
  kCall = 17,
  kMember = 18,
  kPrimary = 19,
};

int binary_prec(std::string_view op) {
  if (op == "??") return kNullish;
  if (op == "||") return kLogicalOr;
  if (op == "&&") return kLogicalAnd;
  if (op == "|") return kBitOr;
  if (op == "^") return kBitXor;
  if (op == "&") return kBitAnd;
  if (op == "==" || op == "!=" || op == "===" || op == "!==") return kEquality;
  if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "in" ||
      op == "instanceof") {
    return kRelational;
  }
  if (op == "<<" || op == ">>" || op == ">>>") return kShift;
  if (op == "+" || op == "-") return kAdditive;
  if (op == "*" || op == "/" || op == "%") return kMultiplicative;
  if (op == "**") return kExponent;
  return kPrimary;
}

const std::string& op_of(const AstNode& n) {
  static const std::string kEmpty;
  const auto* s = n.string_value("operator");
  return s ? *s : kEmpty;
}

int precedence(const AstNode& n) {
  switch (n.kind()) {
    case NodeKind::SequenceExpression:
      return kSequence;
    case NodeKind::AssignmentExpression:
    case NodeKind::ArrowFunctionExpression:
    case NodeKind::YieldExpression:
      return kAssign;
    case NodeKind::ConditionalExpression:
      return kConditional;
    case NodeKind::BinaryExpression:
    case NodeKind::LogicalExpression:
      return binary_prec(op_of(n));
    case NodeKind::UnaryExpression:
    case NodeKind::AwaitExpression:
      return kUnary;
    case NodeKind::UpdateExpression:
      return n.flag("prefix") ? kUnary : kPostfix;
    case NodeKind::CallExpression:
      return kCall;
    case NodeKind::NewExpression:
    case NodeKind::MemberExpression:
    case NodeKind::TaggedTemplateExpression:
      return kMember;
    default:
      return kPrimary;
  }
}

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '$' || static_cast<unsigned char>(c) >= 0x80;
}

bool starts_with_word(std::string_view text, std::string_view word) {
  return text.starts_with(word) && (text.size() == word.size() || !is_word_char(text[word.size()]));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Callee chains of `new` must not contain a call, or the call's argument list
// would be taken as the construct's.
bool contains_call(const AstNode& n) {
  switch (n.kind()) {
    case NodeKind::CallExpression:
      return true;
    case NodeKind::MemberExpression:
      return contains_call(*n.child("object"));
    case NodeKind::TaggedTemplateExpression:
      return contains_call(*n.child("tag"));
    default:
      return false;
  }
}

// A consequent that would capture a following `else`.
bool ends_with_open_if(const AstNode& n) {
  switch (n.kind()) {
    case NodeKind::IfStatement:
      return !n.child("alternate") || ends_with_open_if(*n.child("alternate"));
    case NodeKind::ForStatement:
    case NodeKind::ForInStatement:
    case NodeKind::ForOfStatement:
    case NodeKind::WhileStatement:
    case NodeKind::LabeledStatement:
      return ends_with_open_if(*n.child("body"));
    default:
      return false;
  }
}

class Printer {
 public:
  std::string take() { return std::move(out_); }

  void program(const AstNode& n) {
    const auto* body = n.list("body");
    for (std::size_t i = 0; i < body->size(); ++i) {
      statement(*(*body)[i]);
    }
  }

  void statement(const AstNode& n) {
    check(n);
    indent();
    statement_inline(n);
    out_ += '\n';
  }

  void any(const AstNode& n) {
    check(n);
    if (is_statement(n.kind())) {
      statement_inline(n);
    } else {
      expression(n, 0);
    }
  }

 private:
  static bool is_statement(NodeKind k) {
    switch (k) {
      case NodeKind::EmptyStatement:
      case NodeKind::ExpressionStatement:
      case NodeKind::BlockStatement:
      case NodeKind::VariableDeclaration:
      case NodeKind::FunctionDeclaration:
      case NodeKind::ClassDeclaration:
      case NodeKind::ReturnStatement:
      case NodeKind::IfStatement:
      case NodeKind::ForStatement:
      case NodeKind::ForInStatement:
      case NodeKind::ForOfStatement:
      case NodeKind::WhileStatement:
      case NodeKind::DoWhileStatement:
      case NodeKind::SwitchStatement:
      case NodeKind::BreakStatement:
      case NodeKind::ContinueStatement:
      case NodeKind::LabeledStatement:
      case NodeKind::TryStatement:
      case NodeKind::ThrowStatement:
      case NodeKind::DebuggerStatement:
      case NodeKind::Program:
        return true;
      default:
        return false;
    }
  }

  static void check(const AstNode& n) {
    if (n.is_stub()) throw IncompleteAst();
  }

  void indent() { out_.append(static_cast<std::size_t>(depth_) * 2, ' '); }

  void statement_inline(const AstNode& n) {
    check(n);
    switch (n.kind()) {
      case NodeKind::Program:
        program(n);
        break;
      case NodeKind::EmptyStatement:
        out_ += ';';
        break;
      case NodeKind::DebuggerStatement:
        out_ += "debugger;";
        break;
      case NodeKind::ExpressionStatement:
        expression_statement(n);
        break;
      case NodeKind::BlockStatement:
        block(n);
        break;
      case NodeKind::VariableDeclaration:
        variable_declaration(n);
        out_ += ';';
        break;
      case NodeKind::FunctionDeclaration:
        function(n);
        break;
      case NodeKind::ClassDeclaration:
        class_(n);
        break;
      case NodeKind::ReturnStatement:
        out_ += "return";
        if (const auto* arg = n.child("argument")) {
          out_ += ' ';
          expression(*arg, 0);
        }
        out_ += ';';
        break;
      case NodeKind::ThrowStatement:
        out_ += "throw ";
        expression(*n.child("argument"), 0);
        out_ += ';';
        break;
      case NodeKind::BreakStatement:
      case NodeKind::ContinueStatement:
        out_ += n.kind() == NodeKind::BreakStatement ? "break" : "continue";
        if (const auto* label = n.child("label")) {
          out_ += ' ';
          expression(*label, 0);
        }
        out_ += ';';
        break;
      case NodeKind::LabeledStatement:
        expression(*n.child("label"), 0);
        out_ += ": ";
        statement_inline(*n.child("body"));
        break;
      case NodeKind::IfStatement:
        if_statement(n);
        break;
      case NodeKind::ForStatement:
        for_statement(n);
        break;
      case NodeKind::ForInStatement:
      case NodeKind::ForOfStatement:
        for_in_of(n);
        break;
      case NodeKind::WhileStatement:
        out_ += "while (";
        expression(*n.child("test"), 0);
        out_ += ") ";
        statement_inline(*n.child("body"));
        break;
      case NodeKind::DoWhileStatement:
        out_ += "do ";
        statement_inline(*n.child("body"));
        out_ += " while (";
        expression(*n.child("test"), 0);
        out_ += ");";
        break;
      case NodeKind::SwitchStatement:
        switch_statement(n);
        break;
      case NodeKind::TryStatement:
        try_statement(n);
        break;
      default:
        expression(n, 0);
        break;
    }
  }

  void expression_statement(const AstNode& n) {
    const auto& expr = *n.child("expression");
    check(expr);
    // A bare string statement would reparse as a directive.
    const bool directive = n.string_value("directive") != nullptr;
    const auto* value = expr.kind() == NodeKind::Literal ? expr.value("value") : nullptr;
    const bool string_literal = value && std::holds_alternative<std::string>(*value);
    Printer inner;
    inner.depth_ = depth_;
    inner.expression(expr, 0);
    std::string text = inner.take();
    const bool needs_parens =
        (string_literal && !directive) || text.starts_with('{') ||
        starts_with_word(text, "function") || starts_with_word(text, "class") ||
        starts_with_word(text, "async") || starts_with_word(text, "let");
    if (needs_parens) {
      out_ += '(';
      out_ += text;
      out_ += ')';
    } else {
      out_ += text;
    }
    out_ += ';';
  }

  void block(const AstNode& n) {
    const auto* body = n.list("body");
    if (body->empty()) {
      out_ += "{}";
      return;
    }
    out_ += "{\n";
    ++depth_;
    for (const auto& s : *body) statement(*s);
    --depth_;
    indent();
    out_ += '}';
  }

  void variable_declaration(const AstNode& n) {
    out_ += *n.string_value("kind");
    out_ += ' ';
    const auto* decls = n.list("declarations");
    for (std::size_t i = 0; i < decls->size(); ++i) {
      if (i) out_ += ", ";
      const auto& d = *(*decls)[i];
      check(d);
      pattern(*d.child("id"));
      if (const auto* init = d.child("init")) {
        out_ += " = ";
        expression(*init, kAssign);
      }
    }
  }

  void if_statement(const AstNode& n) {
    out_ += "if (";
    expression(*n.child("test"), 0);
    out_ += ") ";
    const auto& cons = *n.child("consequent");
    const auto* alt = n.child("alternate");
    if (alt && ends_with_open_if(cons)) {
      // The only case where printing changes shape: braces keep the else.
      out_ += "{\n";
      ++depth_;
      statement(cons);
      --depth_;
      indent();
      out_ += '}';
    } else {
      statement_inline(cons);
    }
    if (alt) {
      out_ += " else ";
      statement_inline(*alt);
    }
  }

  void for_statement(const AstNode& n) {
    out_ += "for (";
    if (const auto* init = n.child("init")) {
      ++no_in_;
      if (init->kind() == NodeKind::VariableDeclaration) {
        variable_declaration(*init);
      } else {
        expression(*init, 0);
      }
      --no_in_;
    }
    out_ += ';';
    if (const auto* test = n.child("test")) {
      out_ += ' ';
      expression(*test, 0);
    }
    out_ += ';';
    if (const auto* update = n.child("update")) {
      out_ += ' ';
      expression(*update, 0);
    }
    out_ += ") ";
    statement_inline(*n.child("body"));
  }

  void for_in_of(const AstNode& n) {
    const bool of = n.kind() == NodeKind::ForOfStatement;
    out_ += "for ";
    if (of && n.flag("await")) out_ += "await ";
    out_ += '(';
    const auto& left = *n.child("left");
    check(left);
    if (left.kind() == NodeKind::VariableDeclaration) {
      variable_declaration(left);
    } else {
      pattern(left);
    }
    out_ += of ? " of " : " in ";
    expression(*n.child("right"), of ? kAssign : 0);
    out_ += ") ";
    statement_inline(*n.child("body"));
  }

  void switch_statement(const AstNode& n) {
    out_ += "switch (";
    expression(*n.child("discriminant"), 0);
    out_ += ") {\n";
    ++depth_;
    for (const auto& c : *n.list("cases")) {
      check(*c);
      indent();
      if (const auto* test = c->child("test")) {
        out_ += "case ";
        expression(*test, 0);
        out_ += ":\n";
      } else {
        out_ += "default:\n";
      }
      ++depth_;
      for (const auto& s : *c->list("consequent")) statement(*s);
      --depth_;
    }
    --depth_;
    indent();
    out_ += '}';
  }

  void try_statement(const AstNode& n) {
    out_ += "try ";
    block(*n.child("block"));
    if (const auto* handler = n.child("handler")) {
      check(*handler);
      out_ += " catch ";
      if (const auto* param = handler->child("param")) {
        out_ += '(';
        pattern(*param);
        out_ += ") ";
      }
      block(*handler->child("body"));
    }
    if (const auto* finalizer = n.child("finalizer")) {
      out_ += " finally ";
      block(*finalizer);
    }
  }

  void params(const AstNode& fn) {
    out_ += '(';
    const auto* ps = fn.list("params");
    for (std::size_t i = 0; i < ps->size(); ++i) {
      if (i) out_ += ", ";
      pattern(*(*ps)[i]);
    }
    out_ += ')';
  }

  void function(const AstNode& n) {
    if (n.flag("async")) out_ += "async ";
    out_ += "function";
    if (n.flag("generator")) out_ += '*';
    if (const auto* id = n.child("id")) {
      out_ += ' ';
      expression(*id, 0);
    }
    params(n);
    out_ += ' ';
    block(*n.child("body"));
  }

  void arrow(const AstNode& n) {
    if (n.flag("async")) out_ += "async ";
    params(n);
    out_ += " => ";
    const auto& body = *n.child("body");
    check(body);
    if (body.kind() == NodeKind::BlockStatement) {
      block(body);
    } else if (body.kind() == NodeKind::ObjectExpression ||
               body.kind() == NodeKind::SequenceExpression) {
      out_ += '(';
      expression(body, 0);
      out_ += ')';
    } else {
      expression(body, kAssign);
    }
  }

  void class_(const AstNode& n) {
    out_ += "class";
    if (const auto* id = n.child("id")) {
      out_ += ' ';
      expression(*id, 0);
    }
    if (const auto* super = n.child("superClass")) {
      out_ += " extends ";
      expression(*super, kCall);
    }
    out_ += ' ';
    const auto& body = *n.child("body");
    check(body);
    const auto* members = body.list("body");
    if (members->empty()) {
      out_ += "{}";
      return;
    }
    out_ += "{\n";
    ++depth_;
    for (const auto& m : *members) {
      check(*m);
      indent();
      method(*m);
      out_ += '\n';
    }
    --depth_;
    indent();
    out_ += '}';
  }

  void property_key(const AstNode& owner) {
    const auto& key = *owner.child("key");
    if (owner.flag("computed")) {
      out_ += '[';
      expression(key, kAssign);
      out_ += ']';
    } else {
      expression(key, 0);
    }
  }

  // Shared by class methods and object methods/accessors.
  void method_tail(const AstNode& owner, std::string_view kind) {
    const auto& fn = *owner.child("value");
    check(fn);
    if (kind == "get" || kind == "set") {
      out_ += kind;
      out_ += ' ';
    } else {
      if (fn.flag("async")) out_ += "async ";
      if (fn.flag("generator")) out_ += '*';
    }
    property_key(owner);
    params(fn);
    out_ += ' ';
    block(*fn.child("body"));
  }

  void method(const AstNode& m) {
    if (m.flag("static")) out_ += "static ";
    method_tail(m, *m.string_value("kind"));
  }

  void property(const AstNode& p, bool in_pattern) {
    check(p);
    if (p.kind() == NodeKind::SpreadElement || p.kind() == NodeKind::RestElement) {
      out_ += "...";
      if (in_pattern) {
        pattern(*p.child("argument"));
      } else {
        expression(*p.child("argument"), kAssign);
      }
      return;
    }
    const auto* kind = p.string_value("kind");
    if (!in_pattern && kind && (*kind == "get" || *kind == "set")) {
      method_tail(p, *kind);
      return;
    }
    if (!in_pattern && p.flag("method")) {
      method_tail(p, "init");
      return;
    }
    const auto& key = *p.child("key");
    const auto& value = *p.child("value");
    check(key);
    check(value);
    if (p.flag("shorthand") && !p.flag("computed") && key.kind() == NodeKind::Identifier) {
      const AstNode* named = &value;
      if (value.kind() == NodeKind::AssignmentPattern) named = value.child("left");
      if (named && named->kind() == NodeKind::Identifier &&
          *named->string_value("name") == *key.string_value("name")) {
        if (in_pattern || value.kind() == NodeKind::AssignmentPattern) {
          pattern(value);
        } else {
          expression(value, kAssign);
        }
        return;
      }
    }
    property_key(p);
    out_ += ": ";
    if (in_pattern) {
      pattern(value);
    } else {
      expression(value, kAssign);
    }
  }

  void pattern(const AstNode& n) {
    check(n);
    switch (n.kind()) {
      case NodeKind::ObjectPattern: {
        const auto* props = n.list("properties");
        if (props->empty()) {
          out_ += "{}";
          return;
        }
        out_ += "{ ";
        for (std::size_t i = 0; i < props->size(); ++i) {
          if (i) out_ += ", ";
          property(*(*props)[i], true);
        }
        out_ += " }";
        return;
      }
      case NodeKind::ArrayPattern:
        elements(*n.list("elements"), true);
        return;
      case NodeKind::AssignmentPattern:
        pattern(*n.child("left"));
        out_ += " = ";
        expression(*n.child("right"), kAssign);
        return;
      case NodeKind::RestElement:
        out_ += "...";
        pattern(*n.child("argument"));
        return;
      default:
        expression(n, kCall);
        return;
    }
  }

  void elements(const NodeList& items, bool in_pattern) {
    out_ += '[';
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out_ += ", ";
      if (!items[i]) continue;
      const auto& item = *items[i];
      if (in_pattern) {
        pattern(item);
      } else if (item.kind() == NodeKind::SpreadElement) {
        out_ += "...";
        expression(*item.child("argument"), kAssign);
      } else {
        expression(item, kAssign);
      }
    }
    if (!items.empty() && !items.back()) out_ += ',';
    out_ += ']';
  }

  void arguments(const NodeList& args) {
    out_ += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out_ += ", ";
      const auto& a = *args[i];
      check(a);
      if (a.kind() == NodeKind::SpreadElement) {
        out_ += "...";
        expression(*a.child("argument"), kAssign);
      } else {
        expression(a, kAssign);
      }
    }
    out_ += ')';
  }

  void literal(const AstNode& n) {
    if (const auto* raw = n.string_value("raw")) {
      out_ += *raw;
      return;
    }
    const auto* value = n.value("value");
    if (!value) {
      out_ += "undefined";
      return;
    }
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::nullptr_t>) {
            out_ += "null";
          } else if constexpr (std::is_same_v<T, bool>) {
            out_ += v ? "true" : "false";
          } else if constexpr (std::is_same_v<T, double>) {
            out_ += format_number(v);
          } else if constexpr (std::is_same_v<T, std::string>) {
            out_ += nlohmann::json(v).dump(-1, ' ', false,
                                           nlohmann::json::error_handler_t::replace);
          } else if constexpr (std::is_same_v<T, Regex>) {
            out_ += '/';
            out_ += v.pattern;
            out_ += '/';
            out_ += v.flags;
          }
        },
        *value);
  }

  void template_literal(const AstNode& n) {
    out_ += '`';
    const auto* quasis = n.list("quasis");
    const auto* exprs = n.list("expressions");
    for (std::size_t i = 0; i < quasis->size(); ++i) {
      const auto& q = *(*quasis)[i];
      check(q);
      if (const auto* raw = q.string_value("value.raw")) out_ += *raw;
      if (i < exprs->size()) {
        out_ += "${";
        expression(*(*exprs)[i], 0);
        out_ += '}';
      }
    }
    out_ += '`';
  }

  void expression(const AstNode& n, int min_prec) {
    check(n);
    const int prec = precedence(n);
    const bool in_op =
        no_in_ > 0 && n.kind() == NodeKind::BinaryExpression && op_of(n) == "in";
    const bool wrap = prec < min_prec || in_op;
    if (wrap) out_ += '(';
    const int saved_no_in = no_in_;
    if (wrap) no_in_ = 0;
    expression_body(n, prec);
    no_in_ = saved_no_in;
    if (wrap) out_ += ')';
  }

  void expression_body(const AstNode& n, int prec) {
    switch (n.kind()) {
      case NodeKind::Identifier:
        out_ += *n.string_value("name");
        break;
      case NodeKind::Literal:
        literal(n);
        break;
      case NodeKind::ThisExpression:
        out_ += "this";
        break;
      case NodeKind::Super:
        out_ += "super";
        break;
      case NodeKind::MetaProperty:
        expression(*n.child("meta"), 0);
        out_ += '.';
        expression(*n.child("property"), 0);
        break;
      case NodeKind::ArrayExpression:
      case NodeKind::ArrayPattern:
        elements(*n.list("elements"), n.kind() == NodeKind::ArrayPattern);
        break;
      case NodeKind::ObjectExpression:
      case NodeKind::ObjectPattern: {
        const bool in_pattern = n.kind() == NodeKind::ObjectPattern;
        const auto* props = n.list("properties");
        if (props->empty()) {
          out_ += "{}";
          break;
        }
        out_ += "{ ";
        for (std::size_t i = 0; i < props->size(); ++i) {
          if (i) out_ += ", ";
          property(*(*props)[i], in_pattern);
        }
        out_ += " }";
        break;
      }
      case NodeKind::AssignmentPattern:
      case NodeKind::RestElement:
        pattern(n);
        break;
      case NodeKind::FunctionExpression:
        function(n);
        break;
      case NodeKind::ArrowFunctionExpression:
        arrow(n);
        break;
      case NodeKind::ClassExpression:
        class_(n);
        break;
      case NodeKind::TemplateLiteral:
        template_literal(n);
        break;
      case NodeKind::TaggedTemplateExpression:
        expression(*n.child("tag"), kCall);
        template_literal(*n.child("quasi"));
        break;
      case NodeKind::MemberExpression: {
        const auto& object = *n.child("object");
        check(object);
        const bool numeric = object.kind() == NodeKind::Literal && object.value("value") &&
                             std::holds_alternative<double>(*object.value("value"));
        if (numeric) {
          out_ += '(';
          expression(object, 0);
          out_ += ')';
        } else {
          expression(object, kCall);
        }
        if (n.flag("computed")) {
          out_ += '[';
          expression(*n.child("property"), 0);
          out_ += ']';
        } else {
          out_ += '.';
          expression(*n.child("property"), 0);
        }
        break;
      }
      case NodeKind::CallExpression:
        expression(*n.child("callee"), kCall);
        arguments(*n.list("arguments"));
        break;
      case NodeKind::NewExpression: {
        out_ += "new ";
        const auto& callee = *n.child("callee");
        check(callee);
        if (contains_call(callee)) {
          out_ += '(';
          expression(callee, 0);
          out_ += ')';
        } else {
          expression(callee, kMember);
        }
        arguments(*n.list("arguments"));
        break;
      }
      case NodeKind::AssignmentExpression:
        pattern(*n.child("left"));
        out_ += ' ';
        out_ += op_of(n);
        out_ += ' ';
        expression(*n.child("right"), kAssign);
        break;
      case NodeKind::BinaryExpression:
      case NodeKind::LogicalExpression: {
        const auto& op = op_of(n);
        const auto& left = *n.child("left");
        const auto& right = *n.child("right");
        int left_min = prec + 1;
        if (op == "**") left_min = kPostfix;
        auto mixes_nullish = [&](const AstNode& side) {
          if (side.kind() != NodeKind::LogicalExpression) return false;
          const auto& sop = op_of(side);
          return (op == "??") != (sop == "??");
        };
        if (mixes_nullish(left)) left_min = kPrimary;
        expression(left, left_min);
        out_ += ' ';
        out_ += op;
        out_ += ' ';
        expression(right, mixes_nullish(right) ? kPrimary : prec + 1);
        break;
      }
      case NodeKind::UnaryExpression: {
        const auto& op = op_of(n);
        out_ += op;
        const auto& arg = *n.child("argument");
        check(arg);
        if (op == "typeof" || op == "void" || op == "delete") out_ += ' ';
        const bool nested = arg.kind() == NodeKind::UnaryExpression ||
                            arg.kind() == NodeKind::UpdateExpression ||
                            arg.kind() == NodeKind::AwaitExpression;
        expression(arg, nested ? kPrimary : kUnary);
        break;
      }
      case NodeKind::UpdateExpression:
        if (n.flag("prefix")) {
          out_ += op_of(n);
          expression(*n.child("argument"), kPostfix);
        } else {
          expression(*n.child("argument"), kCall);
          out_ += op_of(n);
        }
        break;
      case NodeKind::AwaitExpression: {
        out_ += "await ";
        const auto& arg = *n.child("argument");
        check(arg);
        const bool nested = arg.kind() == NodeKind::UnaryExpression ||
                            arg.kind() == NodeKind::AwaitExpression;
        expression(arg, nested ? kPrimary : kUnary);
        break;
      }
      case NodeKind::YieldExpression:
        out_ += "yield";
        if (n.flag("delegate")) out_ += '*';
        if (const auto* arg = n.child("argument")) {
          out_ += ' ';
          expression(*arg, kAssign);
        }
        break;
      case NodeKind::ConditionalExpression:
        expression(*n.child("test"), kConditional + 1);
        out_ += " ? ";
        expression(*n.child("consequent"), kAssign);
        out_ += " : ";
        expression(*n.child("alternate"), kAssign);
        break;
      case NodeKind::SequenceExpression: {
        const auto* exprs = n.list("expressions");
        for (std::size_t i = 0; i < exprs->size(); ++i) {
          if (i) out_ += ", ";
          expression(*(*exprs)[i], kAssign);
        }
        break;
      }
      case NodeKind::SpreadElement:
        out_ += "...";
        expression(*n.child("argument"), kAssign);
        break;
      default:
        // Statement-only or structural kinds never appear in expression
        // position of a well-formed tree; emit them best-effort.
        statement_inline(n);
        break;
    }
  }

  std::string out_;
  int depth_ = 0;
  int no_in_ = 0;
};

}  // namespace

std::string print_program(const estree::AstNode& ast) {
  if (estree::has_stub(ast)) throw IncompleteAst();
  Printer p;
  if (ast.kind() == NodeKind::Program) {
    p.program(ast);
  } else {
    p.statement(ast);
  }
  std::string text = p.take();
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

std::string print_node(const estree::AstNode& node) {
  if (estree::has_stub(node)) throw IncompleteAst();
  Printer p;
  p.any(node);
  return p.take();
}

}  // namespace fraggen::printer
