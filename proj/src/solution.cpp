#include "tdcarp/solution.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "tdcarp/move.hpp"

namespace tdcarp {

int Solution::task_count() const {
  int n = 0;
  for (const Route& r : routes) n += static_cast<int>(r.visits.size());
  return n;
}

void Solution::drop_empty_routes() {
  std::erase_if(routes, [](const Route& r) { return r.visits.empty(); });
}

std::vector<std::vector<Visit>> plan_key(const Solution& sol) {
  std::vector<std::vector<Visit>> key;
  key.reserve(sol.routes.size());
  for (const Route& r : sol.routes) {
    if (!r.visits.empty()) key.push_back(r.visits);
  }
  std::sort(key.begin(), key.end());
  return key;
}

void write_solution(std::ostream& out, const Solution& sol) {
  for (const Route& r : sol.routes) {
    out << format_real(r.departure) << " :";
    for (std::size_t i = 0; i < r.visits.size(); ++i) {
      out << (i == 0 ? " " : ", ") << (r.visits[i].task + 1) << (r.visits[i].reversed ? '-' : '+');
    }
    out << '\n';
  }
}

std::string write_solution_string(const Solution& sol) {
  std::ostringstream out;
  write_solution(out, sol);
  return out.str();
}

Solution parse_solution(std::istream& in) {
  Solution sol;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError(line_no, "route line needs 't : tasks'");
    Route route;
    try {
      route.departure = std::stod(line.substr(0, colon));
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad departure time");
    }
    std::string rest = line.substr(colon + 1);
    std::replace(rest.begin(), rest.end(), ',', ' ');
    std::istringstream ss(rest);
    for (std::string tok; ss >> tok;) {
      const char sign = tok.back();
      if ((sign != '+' && sign != '-') || tok.size() < 2) {
        throw ParseError(line_no, "task token needs a +/- orientation: '" + tok + "'");
      }
      int number = 0;
      try {
        number = std::stoi(tok.substr(0, tok.size() - 1));
      } catch (const std::exception&) {
        throw ParseError(line_no, "bad task number '" + tok + "'");
      }
      if (number < 1) throw ParseError(line_no, "task numbers start at 1");
      route.visits.push_back({number - 1, sign == '-'});
    }
    sol.routes.push_back(std::move(route));
  }
  return sol;
}

Solution parse_solution_string(const std::string& text) {
  std::istringstream in(text);
  return parse_solution(in);
}

const char* to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::SingleInsertion: return "SI";
    case MoveKind::DoubleInsertion: return "DI";
    case MoveKind::Swap: return "SW";
  }
  return "?";
}

std::string describe(const Move& m) {
  std::ostringstream out;
  out << to_string(m.kind) << " (" << m.src_route << ',' << m.src_pos << ") -> (";
  if (m.dst_route == kNewRoute) {
    out << "new";
  } else {
    out << m.dst_route;
  }
  out << ',' << m.dst_pos << ") rev " << m.rev_a << m.rev_b;
  return out.str();
}

}  // namespace tdcarp
