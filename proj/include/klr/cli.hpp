#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "klr/klr.hpp"

namespace klr::cli {

enum class Format { text, csv, json };

inline Format parse_format(const std::string& s) {
  if (s == "text") return Format::text;
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw validation_error("unknown format '" + s + "' (expected text, csv or json)");
}

inline std::string pretty(const std::string& word) {
  return word.empty() ? std::string("e") : word;
}

// Parses a word option, echoing the canonical form to err when the input was
// not already canonical.
inline Element parse_word_opt(const CoxeterSystem& sys, const std::string& text,
                              const char* name, std::ostream& err) {
  Element e = sys.parse_word(text);
  const std::string canon = e.word_str();
  if (text != canon && !(text == "e" && canon.empty()))
    err << "note: " << name << " canonicalized to '" << canon << "'\n";
  return e;
}

struct TableOptions {
  std::string table_path;
  std::string dual_table_path;

  std::optional<KLTable> load(const CoxeterSystem& sys) const {
    if (table_path.empty()) return std::nullopt;
    return load_table(table_path, sys.type());
  }
  std::optional<KLTable> load_dual(const CoxeterSystem& sys) const {
    if (dual_table_path.empty()) return std::nullopt;
    return load_table(dual_table_path, sys.type().dual());
  }
};

// One scalar result with its identifying fields, rendered in any format.
inline void emit_fields(Format fmt, std::ostream& out,
                        const std::vector<std::pair<std::string, std::string>>& fields,
                        const std::string& text_value) {
  switch (fmt) {
    case Format::text:
      out << text_value << '\n';
      break;
    case Format::csv: {
      std::string header, row;
      for (size_t i = 0; i < fields.size(); ++i) {
        if (i) {
          header += ',';
          row += ',';
        }
        header += fields[i].first;
        row += csv_quote(fields[i].second);
      }
      out << header << '\n' << row << '\n';
      break;
    }
    case Format::json: {
      nlohmann::ordered_json j;
      for (const auto& [k, v] : fields) j[k] = v;
      out << j.dump(1) << '\n';
      break;
    }
  }
}

inline int cmd_group(const std::string& type_str, const std::vector<std::string>& interval_words,
                     Format fmt, std::ostream& out, std::ostream& err) {
  CoxeterSystem sys(CartanType::parse(type_str));
  const Element w0 = sys.longest_element();
  if (interval_words.empty()) {
    std::vector<std::pair<std::string, std::string>> fields = {
        {"type", sys.type().str()},
        {"order", sys.order().str()},
        {"positive_roots", std::to_string(sys.positive_roots().size())},
        {"w0", w0.word_str()},
    };
    if (fmt == Format::text) {
      for (const auto& [k, v] : fields) out << k << ' ' << (k == "w0" ? pretty(v) : v) << '\n';
    } else {
      emit_fields(fmt, out, fields, "");
    }
    return 0;
  }
  const Element z = parse_word_opt(sys, interval_words[0], "z", err);
  const Element x = parse_word_opt(sys, interval_words[1], "x", err);
  const std::vector<Element> ival = sys.interval(z, x);
  switch (fmt) {
    case Format::text:
      for (const auto& y : ival) out << pretty(y.word_str()) << '\n';
      break;
    case Format::csv:
      out << "word,length\n";
      for (const auto& y : ival)
        out << csv_quote(y.word_str()) << ',' << y.length() << '\n';
      break;
    case Format::json: {
      nlohmann::ordered_json j;
      j["type"] = sys.type().str();
      j["z"] = z.word_str();
      j["x"] = x.word_str();
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& y : ival) arr.push_back(y.word_str());
      j["interval"] = std::move(arr);
      out << j.dump(1) << '\n';
      break;
    }
  }
  return 0;
}

inline int cmd_kl(const std::string& type_str, const std::string& x_str,
                  const std::optional<std::string>& y_str, bool all, const TableOptions& topt,
                  Format fmt, std::ostream& out, std::ostream& err) {
  CoxeterSystem sys(CartanType::parse(type_str));
  std::optional<KLTable> loaded = topt.load(sys);
  const KLTable table = loaded ? *loaded : default_table(sys);

  if (all) {
    // Full dump, grouped by x in canonical order.
    std::map<std::pair<Element, Element>, const LaurentPoly*> ordered;
    for (const auto& [key, p] : table.polys)
      ordered.emplace(std::make_pair(sys.parse_word(key.second), sys.parse_word(key.first)), &p);
    switch (fmt) {
      case Format::text:
        for (const auto& [xy, p] : ordered)
          out << pretty(xy.second.word_str()) << " | " << pretty(xy.first.word_str()) << " : "
              << p->str() << '\n';
        break;
      case Format::csv:
        out << "y,x,polynomial\n";
        for (const auto& [xy, p] : ordered)
          out << csv_quote(xy.second.word_str()) << ',' << csv_quote(xy.first.word_str()) << ','
              << csv_quote(p->str()) << '\n';
        break;
      case Format::json: {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& [xy, p] : ordered) {
          nlohmann::ordered_json j;
          j["y"] = xy.second.word_str();
          j["x"] = xy.first.word_str();
          j["polynomial"] = p->str();
          arr.push_back(std::move(j));
        }
        out << arr.dump(1) << '\n';
        break;
      }
    }
    return 0;
  }

  const Element x = parse_word_opt(sys, x_str, "x", err);
  if (y_str) {
    const Element y = parse_word_opt(sys, *y_str, "y", err);
    const LaurentPoly h = table.get(y.word_str(), x.word_str());
    emit_fields(fmt, out,
                {{"y", y.word_str()}, {"x", x.word_str()}, {"polynomial", h.str()}}, h.str());
    return 0;
  }
  // Whole canonical-basis column b_x.
  std::map<Element, LaurentPoly> column;
  for (const auto& [key, p] : table.polys)
    if (key.second == x.word_str()) column.emplace(sys.parse_word(key.first), p);
  switch (fmt) {
    case Format::text:
      for (const auto& [y, p] : column) out << pretty(y.word_str()) << " : " << p.str() << '\n';
      break;
    case Format::csv:
      out << "y,x,polynomial\n";
      for (const auto& [y, p] : column)
        out << csv_quote(y.word_str()) << ',' << csv_quote(x.word_str()) << ','
            << csv_quote(p.str()) << '\n';
      break;
    case Format::json: {
      nlohmann::ordered_json j;
      j["x"] = x.word_str();
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& [y, p] : column) {
        nlohmann::ordered_json t;
        t["y"] = y.word_str();
        t["polynomial"] = p.str();
        arr.push_back(std::move(t));
      }
      j["terms"] = std::move(arr);
      out << j.dump(1) << '\n';
      break;
    }
  }
  return 0;
}

inline int cmd_rpoly(const std::string& type_str, const std::string& y_str,
                     const std::string& x_str, bool as_R, Format fmt, std::ostream& out,
                     std::ostream& err) {
  CoxeterSystem sys(CartanType::parse(type_str));
  const Element y = parse_word_opt(sys, y_str, "y", err);
  const Element x = parse_word_opt(sys, x_str, "x", err);
  const LaurentPoly r = r_poly(y, x);
  std::string value;
  if (as_R) {
    const LaurentPoly R = r.is_zero() ? LaurentPoly::zero() : to_R(r, x.length() - y.length());
    value = R.str("q");
  } else {
    value = r.str();
  }
  emit_fields(fmt, out,
              {{"y", y.word_str()},
               {"x", x.word_str()},
               {"form", as_R ? "R(q)" : "r(v)"},
               {"polynomial", value}},
              value);
  return 0;
}

inline int cmd_mult(const std::string& type_str, const std::string& z_str,
                    const std::string& x_str, bool ungraded, const TableOptions& topt,
                    Format fmt, std::ostream& out, std::ostream& err) {
  CoxeterSystem sys(CartanType::parse(type_str));
  const Element z = parse_word_opt(sys, z_str, "z", err);
  const Element x = parse_word_opt(sys, x_str, "x", err);
  MultiplicityEngine engine = make_engine(sys, topt.load(sys), topt.load_dual(sys));
  if (ungraded) {
    const Int m = engine.ungraded_mult(z, x);
    emit_fields(fmt, out, {{"z", z.word_str()}, {"x", x.word_str()}, {"value", m.str()}},
                m.str());
  } else {
    const GradedMultiplicity gm = engine.jh_poly(z, x);
    emit_fields(fmt, out,
                {{"z", z.word_str()}, {"x", x.word_str()}, {"polynomial", gm.poly.str()}},
                gm.poly.str());
  }
  return 0;
}

inline int cmd_poincare(const std::string& type_str, const std::string& z_str,
                        const std::string& x_str, const TableOptions& topt, Format fmt,
                        std::ostream& out, std::ostream& err) {
  CoxeterSystem sys(CartanType::parse(type_str));
  const Element z = parse_word_opt(sys, z_str, "z", err);
  const Element x = parse_word_opt(sys, x_str, "x", err);
  MultiplicityEngine engine = make_engine(sys, topt.load(sys), topt.load_dual(sys));
  const LaurentPoly p = engine.richardson_poincare(z, x);
  emit_fields(fmt, out, {{"z", z.word_str()}, {"x", x.word_str()}, {"polynomial", p.str()}},
              p.str());
  return 0;
}

inline int cmd_verify(const std::string& type_str, const std::string& suite_str, int jobs,
                      const TableOptions& topt, Format fmt, std::ostream& out,
                      std::ostream& err) {
  (void)err;
  CoxeterSystem sys(CartanType::parse(type_str));
  MultiplicityEngine engine = make_engine(sys, topt.load(sys), topt.load_dual(sys));
  std::vector<Suite> suites;
  if (suite_str == "all") {
    suites = all_suites();
  } else {
    const auto s = suite_from_name(suite_str);
    if (!s)
      throw validation_error("unknown suite '" + suite_str +
                             "' (expected duality, reciprocity, parity, agreement, positivity "
                             "or all)");
    suites = {*s};
  }
  const std::vector<SuiteResult> results = engine.run_suites(suites, jobs);
  switch (fmt) {
    case Format::text:
      out << render_suites_text(results);
      break;
    case Format::csv:
      out << render_suites_csv(results);
      break;
    case Format::json:
      out << suites_to_json(results).dump(1) << '\n';
      break;
  }
  for (const auto& r : results)
    if (!r.pass) return 1;
  return 0;
}

inline int cmd_oracle(int n, int q, bool compare, int jobs, Format fmt, std::ostream& out,
                      std::ostream& err) {
  (void)err;
  const std::vector<OracleRow> rows = oracle_table(n, q, compare, jobs);
  switch (fmt) {
    case Format::text: {
      out << (compare ? "y y' q count R verdict\n" : "y y' q count\n");
      for (const auto& r : rows) {
        out << pretty(r.y) << ' ' << pretty(r.y_prime) << ' ' << r.q << ' ' << r.count;
        if (compare) out << ' ' << r.r_value.str() << ' ' << (r.match ? "OK" : "MISMATCH");
        out << '\n';
      }
      break;
    }
    case Format::csv: {
      out << (compare ? "y,y_prime,q,count,R_value,verdict\n" : "y,y_prime,q,count\n");
      for (const auto& r : rows) {
        out << csv_quote(r.y) << ',' << csv_quote(r.y_prime) << ',' << r.q << ',' << r.count;
        if (compare) out << ',' << r.r_value.str() << ',' << (r.match ? "OK" : "MISMATCH");
        out << '\n';
      }
      break;
    }
    case Format::json: {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["y"] = r.y;
        j["y_prime"] = r.y_prime;
        j["q"] = r.q;
        j["count"] = r.count;
        if (compare) {
          j["R_value"] = r.r_value.str();
          j["verdict"] = r.match ? "OK" : "MISMATCH";
        }
        arr.push_back(std::move(j));
      }
      out << arr.dump(1) << '\n';
      break;
    }
  }
  if (compare)
    for (const auto& r : rows)
      if (!r.match) return 1;
  return 0;
}

inline int cmd_table_validate(const std::string& path, const std::string& type_str,
                              std::ostream& out) {
  const CartanType t = CartanType::parse(type_str);
  const KLTable table = load_table(path, t);  // throws with the violation list
  out << "OK type=" << table.cartan.str() << " ell=" << table.ell
      << " entries=" << table.polys.size() << '\n';
  return 0;
}

inline int cmd_table_export(const std::string& type_str, const TableOptions& topt,
                            const std::string& out_path, std::ostream& out) {
  CoxeterSystem sys(CartanType::parse(type_str));
  std::optional<KLTable> loaded = topt.load(sys);
  const KLTable table = loaded ? *loaded : default_table(sys);
  if (out_path.empty()) {
    out << table_to_json(table).dump(1) << '\n';
  } else {
    save_table(table, out_path);
    out << "wrote " << out_path << " (" << table.polys.size() << " entries)\n";
  }
  return 0;
}

// Dispatch: exit 0 on success, 1 on verification failure (counterexample or
// mismatch found), 2 on usage or validation errors.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"klr: exact graded multiplicities of tilting sheaves, Kazhdan-Lusztig "
               "combinatorics, and a finite-field Richardson-variety oracle"};
  app.require_subcommand(1);

  std::string format_str = "text";
  std::string type_str, z_str, x_str, y_str, suite_str = "all";
  std::vector<std::string> interval_words;
  bool flag_all = false, flag_ungraded = false, flag_as_R = false, flag_compare = false;
  bool have_y = false;
  int n = 2, q = 2, jobs = 1;
  TableOptions topt;
  std::string file_path, out_path;

  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", format_str, "output format: text, csv or json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
  };
  auto add_tables = [&](CLI::App* c) {
    c->add_option("--table", topt.table_path, "KL table file (omitted: internal ell=0)");
    c->add_option("--dual-table", topt.dual_table_path,
                  "table file for the Langlands-dual type (ell > 0, types B/C)");
  };

  CLI::App* group = app.add_subcommand("group", "group order, longest element, intervals");
  group->add_option("--type", type_str, "Cartan type, e.g. A3")->required();
  group->add_option("--interval", interval_words, "interval bounds z x (canonical words)")
      ->expected(2);
  add_format(group);

  CLI::App* kl = app.add_subcommand("kl", "Kazhdan-Lusztig polynomials h_{y,x}");
  kl->add_option("--type", type_str)->required();
  kl->add_option("--x", x_str, "x word (omit with --all)");
  kl->add_option("--y", y_str, "y word")->each([&](const std::string&) { have_y = true; });
  kl->add_flag("--all", flag_all, "dump the whole table");
  add_tables(kl);
  add_format(kl);

  CLI::App* rpoly = app.add_subcommand("rpoly", "r-polynomials (or R via --as-R)");
  rpoly->add_option("--type", type_str)->required();
  rpoly->add_option("--y", y_str)->required();
  rpoly->add_option("--x", x_str)->required();
  rpoly->add_flag("--as-R", flag_as_R, "print R_{y,x}(q) instead of r_{y,x}(v)");
  add_format(rpoly);

  CLI::App* mult = app.add_subcommand("mult", "graded tilting multiplicity polynomial");
  mult->add_option("--type", type_str)->required();
  mult->add_option("--z", z_str)->required();
  mult->add_option("--x", x_str)->required();
  mult->add_flag("--ungraded", flag_ungraded, "evaluate at v = 1");
  add_tables(mult);
  add_format(mult);

  CLI::App* poincare = app.add_subcommand("poincare", "Richardson Poincare polynomial");
  poincare->add_option("--type", type_str)->required();
  poincare->add_option("--z", z_str)->required();
  poincare->add_option("--x", x_str)->required();
  add_tables(poincare);
  add_format(poincare);

  CLI::App* verify = app.add_subcommand("verify", "exhaustive identity suites");
  verify->add_option("--type", type_str)->required();
  verify->add_option("--suite", suite_str,
                     "duality|reciprocity|parity|agreement|positivity|all");
  verify->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  add_tables(verify);
  add_format(verify);

  CLI::App* oracle = app.add_subcommand("oracle", "finite-field Richardson point counts");
  oracle->add_option("--n", n, "flags in F_q^n")->required();
  oracle->add_option("--q", q, "prime power field size")->required();
  oracle->add_flag("--compare", flag_compare, "compare counts against R_{y,y'}(q)");
  oracle->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
  add_format(oracle);

  CLI::App* table = app.add_subcommand("table", "KL table files");
  table->require_subcommand(1);
  CLI::App* tval = table->add_subcommand("validate", "validate a table file");
  tval->add_option("--file", file_path)->required();
  tval->add_option("--type", type_str)->required();
  CLI::App* texp = table->add_subcommand("export", "export a table as JSON");
  texp->add_option("--type", type_str)->required();
  texp->add_option("--out", out_path, "output path (default: stdout)");
  texp->add_option("--table", topt.table_path, "re-export a loaded table file");

  std::vector<const char*> argv;
  argv.push_back("klr");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    const Format fmt = parse_format(format_str);
    if (group->parsed()) return cmd_group(type_str, interval_words, fmt, out, err);
    if (kl->parsed()) {
      if (!flag_all && x_str.empty() && !have_y && !kl->count("--x"))
        throw validation_error("kl: provide --x (and optionally --y), or --all");
      return cmd_kl(type_str, x_str,
                    have_y ? std::optional<std::string>(y_str) : std::nullopt, flag_all, topt,
                    fmt, out, err);
    }
    if (rpoly->parsed()) return cmd_rpoly(type_str, y_str, x_str, flag_as_R, fmt, out, err);
    if (mult->parsed())
      return cmd_mult(type_str, z_str, x_str, flag_ungraded, topt, fmt, out, err);
    if (poincare->parsed()) return cmd_poincare(type_str, z_str, x_str, topt, fmt, out, err);
    if (verify->parsed()) return cmd_verify(type_str, suite_str, jobs, topt, fmt, out, err);
    if (oracle->parsed()) return cmd_oracle(n, q, flag_compare, jobs, fmt, out, err);
    if (table->parsed()) {
      if (tval->parsed()) return cmd_table_validate(file_path, type_str, out);
      if (texp->parsed()) return cmd_table_export(type_str, topt, out_path, out);
    }
    err << "error: no command\n";
    return 2;
  } catch (const error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace klr::cli
