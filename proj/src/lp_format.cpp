#include "vfc/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "vfc/errors.hpp"
#include "vfc/util.hpp"

namespace vfc {

namespace {

std::string sanitize(const std::string& name, int fallback_id) {
  std::string out;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.') out += ch;
    else out += '_';
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.')
    out = "v" + std::to_string(fallback_id) + "_" + out;
  return out;
}

void append_term(std::string& line, std::string& body, double coef, const std::string& name) {
  std::string term = (coef < 0.0 ? " - " : " + ") + fmt_full(std::abs(coef)) + " " + name;
  if (line.size() + term.size() > 200) {
    body += line + "\n";
    line = "   ";
  }
  line += term;
}

}  // namespace

std::string lp_format_text(const ModelInstance& model) {
  model.validate();
  std::vector<std::string> names(model.num_vars());
  for (int j = 0; j < model.num_vars(); ++j) names[j] = sanitize(model.var(j).name, j);

  std::string body = "\\ LP export\nMinimize\n";
  {
    std::string line = " obj:";
    bool any = false;
    for (int j = 0; j < model.num_vars(); ++j) {
      if (model.objective_coef(j) == 0.0) continue;
      append_term(line, body, model.objective_coef(j), names[j]);
      any = true;
    }
    if (model.objective_constant() != 0.0) {
      std::string term = (model.objective_constant() < 0.0 ? " - " : " + ") +
                         fmt_full(std::abs(model.objective_constant()));
      line += term;
      any = true;
    }
    if (!any) line += " 0 " + (names.empty() ? std::string("x") : names[0]);
    body += line + "\n";
  }

  body += "Subject To\n";
  for (int i = 0; i < model.num_constraints(); ++i) {
    const LinearConstraint& c = model.con(i);
    std::string line = " " + sanitize(c.name.empty() ? "c" + std::to_string(i) : c.name, i) + ":";
    if (c.cols.empty()) {
      line += " 0 " + names[0];
    } else {
      for (std::size_t k = 0; k < c.cols.size(); ++k) append_term(line, body, c.coefs[k], names[c.cols[k]]);
    }
    switch (c.sense) {
      case Sense::LessEqual: line += " <= "; break;
      case Sense::GreaterEqual: line += " >= "; break;
      case Sense::Equal: line += " = "; break;
    }
    line += fmt_full(c.rhs);
    body += line + "\n";
  }

  body += "Bounds\n";
  for (int j = 0; j < model.num_vars(); ++j) {
    const Variable& v = model.var(j);
    const bool lb_inf = !std::isfinite(v.lb);
    const bool ub_inf = !std::isfinite(v.ub);
    if (lb_inf && ub_inf) {
      body += " " + names[j] + " free\n";
    } else if (lb_inf) {
      body += " -infinity <= " + names[j] + " <= " + fmt_full(v.ub) + "\n";
    } else if (ub_inf) {
      body += " " + names[j] + " >= " + fmt_full(v.lb) + "\n";
    } else if (v.lb == v.ub) {
      body += " " + names[j] + " = " + fmt_full(v.lb) + "\n";
    } else {
      body += " " + fmt_full(v.lb) + " <= " + names[j] + " <= " + fmt_full(v.ub) + "\n";
    }
  }

  if (model.has_integers()) {
    body += "General\n";
    std::string line = "";
    for (int j = 0; j < model.num_vars(); ++j) {
      if (!model.var(j).integer) continue;
      if (line.size() + names[j].size() + 1 > 200) {
        body += line + "\n";
        line = "";
      }
      line += " " + names[j];
    }
    if (!line.empty()) body += line + "\n";
  }
  body += "End\n";
  return body;
}

void write_lp_file(const ModelInstance& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << lp_format_text(model);
  if (!out) throw IoError("write failed for " + path);
}

Solution ExternalSolver::parse_solution_file(const ModelInstance& model, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read solution file " + path);
  std::map<std::string, int> by_name;
  for (int j = 0; j < model.num_vars(); ++j) by_name[sanitize(model.var(j).name, j)] = j;

  Solution sol;
  sol.x.assign(model.num_vars(), 0.0);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;
    if (name[0] == '#' || name[0] == '\\') continue;
    double value = 0.0;
    if (!(ls >> value))
      throw DataError("solution file " + path + ": line " + std::to_string(lineno) + ": missing value");
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw DataError("solution file " + path + ": unknown variable '" + name + "'");
    sol.x[it->second] = value;
  }
  sol.status = SolveStatus::Optimal;
  sol.objective = model.objective_value(sol.x);
  return sol;
}

Solution ExternalSolver::solve(const ModelInstance& model, const std::string& workdir) const {
  namespace fs = std::filesystem;
  fs::create_directories(workdir);
  const std::string model_path = (fs::path(workdir) / "model.lp").string();
  const std::string sol_path = (fs::path(workdir) / "solution.txt").string();
  write_lp_file(model, model_path);

  std::string cmd = command_;
  const auto substitute = [&cmd](const std::string& key, const std::string& value) {
    for (std::size_t pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key))
      cmd.replace(pos, key.size(), value);
  };
  substitute("{model}", model_path);
  substitute("{solution}", sol_path);

  const int rc = std::system(cmd.c_str());
  if (rc != 0) throw SolverFailure("external solver command failed (exit " + std::to_string(rc) + ")");
  return parse_solution_file(model, sol_path);
}

}  // namespace vfc
