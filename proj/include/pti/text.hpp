#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pti/net.hpp"
#include "pti/relation.hpp"

namespace pti {

// Plain-text net format:
//
//   net NAME
//   places: s1 s2 s3
//   trans t1 : a ; pre s1 + 2*s2 ; inh s3 ; post s2
//   marking m0 : s1 + s3
//
// '#' starts a comment, "0" denotes the empty multiset, whitespace within a
// line is free-form. Printing emits the canonical form (declaration order,
// merged counts), and parsing that output reproduces the net.

namespace detail {

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct LineLexer {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw parse_error(std::string("expected '") + c + "'", line_no);
  }
  std::string ident() {
    skip_ws();
    if (pos >= text.size() || !ident_start(text[pos]))
      throw parse_error("expected identifier", line_no);
    std::size_t start = pos;
    while (pos < text.size() && ident_char(text[pos])) ++pos;
    return std::string(text.substr(start, pos - start));
  }
  bool at_ident() {
    skip_ws();
    return pos < text.size() && ident_start(text[pos]);
  }
  bool at_digit() {
    skip_ws();
    return pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]));
  }
  Count nat() {
    skip_ws();
    if (!at_digit()) throw parse_error("expected number", line_no);
    Count v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      Count d = static_cast<Count>(text[pos] - '0');
      v = Multiset::checked_add(Multiset::checked_mul(v, 10), d);
      ++pos;
    }
    return v;
  }
  void end() {
    if (!done()) throw parse_error("trailing input: " + std::string(text.substr(pos)), line_no);
  }
};

// mset := "0" | term ("+" term)* ; term := [NAT "*"] IDENT
inline Multiset parse_mset(LineLexer& lex, const PtiNet& net) {
  if (lex.at_digit()) {
    std::size_t save = lex.pos;
    Count n = lex.nat();
    if (n == 0) {
      if (lex.peek() == '*') throw parse_error("zero coefficient", lex.line_no);
      return Multiset();
    }
    lex.pos = save;  // re-read as a term
  }
  std::vector<Multiset::Entry> entries;
  while (true) {
    Count k = 1;
    if (lex.at_digit()) {
      k = lex.nat();
      lex.expect('*');
      if (k == 0) throw parse_error("zero coefficient", lex.line_no);
    }
    std::string name = lex.ident();
    auto place = net.find_place(name);
    if (!place) throw parse_error("undeclared place: " + name, lex.line_no);
    entries.emplace_back(*place, k);
    if (!lex.accept('+')) break;
  }
  return Multiset::from_entries(std::move(entries));
}

inline std::vector<std::string> logical_lines(std::string_view text,
                                              std::vector<std::size_t>* line_numbers) {
  std::vector<std::string> lines;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    std::string_view raw =
        text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::size_t a = 0, b = raw.size();
    while (a < b && std::isspace(static_cast<unsigned char>(raw[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(raw[b - 1]))) --b;
    if (b > a) {
      lines.emplace_back(raw.substr(a, b - a));
      if (line_numbers) line_numbers->push_back(line_no);
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return lines;
}

}  // namespace detail

inline PtiNet parse_net(std::string_view text) {
  std::vector<std::size_t> line_nos;
  auto lines = detail::logical_lines(text, &line_nos);
  if (lines.empty()) throw parse_error("empty net description");

  std::size_t i = 0;
  auto lexer = [&](std::size_t idx) {
    detail::LineLexer lex;
    lex.text = lines[idx];
    lex.line_no = line_nos[idx];
    return lex;
  };

  auto head = lexer(i);
  if (head.ident() != "net") throw parse_error("expected 'net NAME' header", head.line_no);
  std::string net_name = head.ident();
  head.end();
  ++i;

  if (i >= lines.size()) throw parse_error("expected 'places:' line");
  auto places = lexer(i);
  if (places.ident() != "places") throw parse_error("expected 'places:' line", places.line_no);
  places.expect(':');
  if (!places.at_ident()) throw parse_error("at least one place required", places.line_no);
  std::vector<std::string> place_names;
  while (places.at_ident()) place_names.push_back(places.ident());
  places.end();
  ++i;

  struct PendingTrans {
    std::string name, label;
    std::string pre, inh, post;
    std::size_t line;
  };
  struct PendingMarking {
    std::string name, expr;
    std::size_t line;
  };
  std::vector<PendingTrans> pending_trans;
  std::vector<PendingMarking> pending_markings;

  for (; i < lines.size(); ++i) {
    auto lex = lexer(i);
    std::string kw = lex.ident();
    if (kw == "trans") {
      PendingTrans pt;
      pt.line = lex.line_no;
      pt.name = lex.ident();
      lex.expect(':');
      pt.label = lex.ident();
      lex.expect(';');
      {
        auto section = lex.ident();
        if (section != "pre") throw parse_error("expected 'pre'", lex.line_no);
      }
      std::size_t pre_start = lex.pos;
      while (!lex.done() && lex.peek() != ';') ++lex.pos;
      pt.pre = std::string(lex.text.substr(pre_start, lex.pos - pre_start));
      lex.expect(';');
      std::string section = lex.ident();
      if (section == "inh") {
        std::size_t inh_start = lex.pos;
        while (!lex.done() && lex.peek() != ';') ++lex.pos;
        pt.inh = std::string(lex.text.substr(inh_start, lex.pos - inh_start));
        lex.expect(';');
        section = lex.ident();
      }
      if (section != "post") throw parse_error("expected 'post'", lex.line_no);
      std::size_t post_start = lex.pos;
      pt.post = std::string(lex.text.substr(post_start));
      pending_trans.push_back(std::move(pt));
    } else if (kw == "marking") {
      PendingMarking pm;
      pm.line = lex.line_no;
      pm.name = lex.ident();
      lex.expect(':');
      pm.expr = std::string(lex.text.substr(lex.pos));
      pending_markings.push_back(std::move(pm));
    } else {
      throw parse_error("unexpected keyword: " + kw, lex.line_no);
    }
  }

  // Places-only view used to resolve names in mset expressions.
  NetBuilder resolver_builder(net_name);
  for (const auto& name : place_names) resolver_builder.add_place(name);
  PtiNet resolver = resolver_builder.build();

  NetBuilder out(net_name);
  for (const auto& name : place_names) out.add_place(name);

  auto parse_expr = [&](const std::string& expr, std::size_t line) {
    detail::LineLexer lex;
    lex.text = expr;
    lex.line_no = line;
    Multiset m = detail::parse_mset(lex, resolver);
    lex.end();
    return m;
  };

  for (const auto& pt : pending_trans) {
    std::vector<PlaceId> inhib;
    if (!pt.inh.empty()) {
      detail::LineLexer lex;
      lex.text = pt.inh;
      lex.line_no = pt.line;
      while (true) {
        std::string name = lex.ident();
        auto place = resolver.find_place(name);
        if (!place) throw parse_error("undeclared place: " + name, pt.line);
        inhib.push_back(*place);
        if (!lex.accept(',')) break;
      }
      lex.end();
    }
    out.add_transition(pt.name, pt.label, parse_expr(pt.pre, pt.line), inhib,
                       parse_expr(pt.post, pt.line));
  }
  for (const auto& pm : pending_markings) out.add_marking(pm.name, parse_expr(pm.expr, pm.line));
  return out.build();
}

inline PtiNet load_net(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open net file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_net(buf.str());
}

inline std::string marking_to_text(const PtiNet& net, const Multiset& m) {
  if (m.empty()) return "0";
  std::string out;
  for (const auto& [place, count] : m.entries()) {
    if (!out.empty()) out += " + ";
    if (count != 1) out += std::to_string(count) + "*";
    out += net.place_name(place);
  }
  return out;
}

// Accepts either a marking name declared in the net or an mset expression.
inline Multiset parse_marking_expr(const PtiNet& net, std::string_view expr) {
  detail::LineLexer lex;
  lex.text = expr;
  if (lex.at_ident()) {
    std::size_t save = lex.pos;
    std::string name = lex.ident();
    if (lex.done()) {
      if (auto named = net.find_marking(name)) return *named;
      if (!net.find_place(name)) throw parse_error("unknown place or marking: " + name);
    }
    lex.pos = save;
  }
  Multiset m = detail::parse_mset(lex, net);
  lex.end();
  return m;
}

inline std::string net_to_text(const PtiNet& net) {
  std::ostringstream out;
  out << "net " << net.name() << "\n";
  out << "places:";
  for (std::uint32_t p = 0; p < net.place_count(); ++p)
    out << " " << net.place_name(PlaceId(p));
  out << "\n";
  for (const auto& t : net.transitions()) {
    out << "trans " << t.name << " : " << net.label_name(t.label) << " ; pre "
        << marking_to_text(net, t.pre);
    if (t.inhib.any()) {
      out << " ; inh ";
      bool first = true;
      t.inhib.for_each([&](std::uint32_t s) {
        if (!first) out << ", ";
        first = false;
        out << net.place_name(PlaceId(s));
      });
    }
    out << " ; post " << marking_to_text(net, t.post) << "\n";
  }
  for (const auto& [name, m] : net.named_markings())
    out << "marking " << name << " : " << marking_to_text(net, m) << "\n";
  return out.str();
}

// Relation files: one "LEFT RIGHT" place pair per line, '#' comments.
inline PlaceRelation parse_relation(const PtiNet& net, std::string_view text) {
  PlaceRelation rel(net.place_count());
  std::vector<std::size_t> line_nos;
  auto lines = detail::logical_lines(text, &line_nos);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    detail::LineLexer lex;
    lex.text = lines[i];
    lex.line_no = line_nos[i];
    std::string left = lex.ident();
    std::string right = lex.ident();
    lex.end();
    auto l = net.find_place(left);
    if (!l) throw parse_error("undeclared place: " + left, lex.line_no);
    auto r = net.find_place(right);
    if (!r) throw parse_error("undeclared place: " + right, lex.line_no);
    rel.insert(*l, *r);
  }
  return rel;
}

inline PlaceRelation load_relation(const PtiNet& net, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open relation file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_relation(net, buf.str());
}

inline std::string relation_to_text(const PtiNet& net, const PlaceRelation& rel) {
  std::ostringstream out;
  for (const auto& [l, r] : rel.pairs())
    out << net.place_name(l) << " " << net.place_name(r) << "\n";
  return out.str();
}

}  // namespace pti
