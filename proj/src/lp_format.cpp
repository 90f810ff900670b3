#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <set>

#include "hems/format.hpp"
#include "hems/lp.hpp"

namespace hems::lp {

namespace {

constexpr std::size_t kTermsPerLine = 6;

bool valid_identifier(const std::string& name) {
  if (name.empty() || name.size() > 255) return false;
  const char first = name.front();
  if (std::isdigit(static_cast<unsigned char>(first)) || first == '.') return false;
  // Names such as e1 or E5 read as exponents in some parsers.
  if ((first == 'e' || first == 'E') && name.size() > 1 &&
      (std::isdigit(static_cast<unsigned char>(name[1])) || name[1] == 'e' || name[1] == 'E')) {
    return false;
  }
  for (const char ch : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '(' ||
                    ch == ')' || ch == '#' || ch == '@' || ch == '~' || ch == '{' || ch == '}';
    if (!ok) return false;
  }
  static const std::set<std::string> reserved = {"free", "inf", "infinity", "st", "bounds", "end",
                                                 "minimize", "maximize", "subject", "to"};
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return reserved.count(lower) == 0;
}

void write_terms(std::ostream& out, const std::vector<Term>& terms, const std::vector<std::string>& names) {
  if (terms.empty()) {
    // An empty row still needs a variable reference to parse.
    out << " 0 " << (names.empty() ? std::string("v0") : names.front());
    return;
  }
  std::size_t on_line = 0;
  for (const auto& t : terms) {
    if (on_line == kTermsPerLine) {
      out << "\n  ";
      on_line = 0;
    }
    out << (t.coef < 0.0 ? " - " : " + ") << format_number(std::abs(t.coef)) << ' '
        << names[static_cast<std::size_t>(t.var)];
    ++on_line;
  }
}

std::vector<std::string> row_names(const std::vector<Row>& rows, const char* prefix,
                                   std::set<std::string>& used) {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& label = rows[i].name;
    if (valid_identifier(label) && used.insert(label).second) {
      out.push_back(label);
    } else {
      std::string fallback = prefix + std::to_string(i);
      used.insert(fallback);
      out.push_back(std::move(fallback));
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> lp_format_names(const LinearProgram& lp) {
  const auto n = static_cast<std::size_t>(lp.n_vars);
  std::vector<std::string> names(n);
  bool use_labels = lp.names.size() == n;
  if (use_labels) {
    std::set<std::string> seen;
    for (const auto& label : lp.names) {
      if (!valid_identifier(label) || !seen.insert(label).second) {
        use_labels = false;
        break;
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) names[j] = use_labels ? lp.names[j] : "v" + std::to_string(j);
  return names;
}

void write_lp_format(const LinearProgram& lp, std::ostream& out) {
  lp.validate();
  const auto names = lp_format_names(lp);

  out << "\\ " << lp.n_vars << " variables, " << lp.eq_rows.size() << " equality rows, "
      << lp.ineq_rows.size() << " inequality rows\n";
  out << "Minimize\n obj:";
  std::vector<Term> objective;
  for (int j = 0; j < lp.n_vars; ++j) {
    if (lp.objective[static_cast<std::size_t>(j)] != 0.0) objective.push_back({j, lp.objective[static_cast<std::size_t>(j)]});
  }
  if (!objective.empty() || lp.n_vars > 0) write_terms(out, objective, names);
  out << "\nSubject To\n";

  std::set<std::string> used(names.begin(), names.end());
  const auto eq_names = row_names(lp.eq_rows, "eq", used);
  const auto le_names = row_names(lp.ineq_rows, "le", used);
  for (std::size_t i = 0; i < lp.eq_rows.size(); ++i) {
    out << ' ' << eq_names[i] << ':';
    write_terms(out, lp.eq_rows[i].terms, names);
    out << " = " << format_number(lp.eq_rows[i].rhs) << '\n';
  }
  for (std::size_t i = 0; i < lp.ineq_rows.size(); ++i) {
    out << ' ' << le_names[i] << ':';
    write_terms(out, lp.ineq_rows[i].terms, names);
    out << " <= " << format_number(lp.ineq_rows[i].rhs) << '\n';
  }

  out << "Bounds\n";
  for (std::size_t j = 0; j < names.size(); ++j) {
    const double lo = lp.lower_bounds[j];
    const double up = lp.upper_bounds[j];
    if (lo == 0.0 && up == kInf) continue;  // the format's default bounds
    if (lo == -kInf && up == kInf) {
      out << ' ' << names[j] << " free\n";
    } else if (lo == up) {
      out << ' ' << names[j] << " = " << format_number(lo) << '\n';
    } else {
      out << ' ' << (lo == -kInf ? std::string("-inf") : format_number(lo)) << " <= " << names[j]
          << " <= " << (up == kInf ? std::string("+inf") : format_number(up)) << '\n';
    }
  }
  out << "End\n";
}

}  // namespace hems::lp
