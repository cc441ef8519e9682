#include "qalin/qubo.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qalin/errors.hpp"

namespace qalin {

QuboProblem::QuboProblem(BitRange range, double a, double b, double offset)
    : range_(range), a_(a), b_(b), offset_(offset) {
  validate(range_);
  coeffs_.assign(static_cast<std::size_t>(size()) * static_cast<std::size_t>(size()), 0.0);
}

std::size_t QuboProblem::index(int i, int j) const {
  if (i > j || i < range_.r || j > range_.p) {
    throw std::out_of_range("QUBO index (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") outside upper triangle of [" + std::to_string(range_.r) + ", " +
                            std::to_string(range_.p) + "]");
  }
  return static_cast<std::size_t>(i - range_.r) * static_cast<std::size_t>(size()) +
         static_cast<std::size_t>(j - range_.r);
}

double QuboProblem::coefficient(int i, int j) const { return coeffs_[index(i, j)]; }

void QuboProblem::set_coefficient(int i, int j, double value) { coeffs_[index(i, j)] = value; }

std::vector<QuboEntry> QuboProblem::nonzero_entries() const {
  std::vector<QuboEntry> entries;
  for (int i = range_.r; i <= range_.p; ++i) {
    for (int j = i; j <= range_.p; ++j) {
      const double v = coefficient(i, j);
      if (v != 0.0) {
        entries.push_back({i, j, v});
      }
    }
  }
  return entries;
}

QuboProblem build_qubo(double a, double b, BitRange range) {
  if (a == 0.0) {
    throw DegenerateProblem("QUBO for a*x = b requires a != 0");
  }
  validate(range);
  QuboProblem problem(range, a, b, b * b);
  const int p = range.p;
  const double theta = sign_weight(range);
  const double a2 = a * a;

  problem.set_coefficient(p, p, a2 * theta * theta - 2.0 * a * b * theta);
  for (int i = range.r; i < p; ++i) {
    problem.set_coefficient(i, i, std::ldexp(a2, 2 * i) - std::ldexp(a * b, i + 1));
    problem.set_coefficient(i, p, std::ldexp(a2 * theta, i + 1));
    for (int j = i + 1; j < p; ++j) {
      problem.set_coefficient(i, j, std::ldexp(a2, i + j + 1));
    }
  }
  return problem;
}

double evaluate_pattern(const QuboProblem& problem, std::uint64_t pattern) {
  const auto& range = problem.range();
  double total = 0.0;
  for (int i = range.r; i <= range.p; ++i) {
    if (((pattern >> (i - range.r)) & 1U) == 0) continue;
    for (int j = i; j <= range.p; ++j) {
      if (((pattern >> (j - range.r)) & 1U) != 0) {
        total += problem.coefficient(i, j);
      }
    }
  }
  return total;
}

double evaluate(const QuboProblem& problem, std::span<const std::uint8_t> bits) {
  if (static_cast<int>(bits.size()) != problem.size()) {
    throw std::invalid_argument("bit vector length " + std::to_string(bits.size()) +
                                " does not match QUBO size " + std::to_string(problem.size()));
  }
  if (problem.size() > 63) {
    throw std::invalid_argument("bit vector too long");
  }
  std::uint64_t pattern = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] > 1) throw std::invalid_argument("bit values must be 0 or 1");
    pattern |= static_cast<std::uint64_t>(bits[k]) << k;
  }
  return evaluate_pattern(problem, pattern);
}

double max_identity_deviation(const QuboProblem& problem) {
  const SupportSpec spec{SupportKind::TwosComplement, problem.range()};
  const auto values = enumerate_patterns(spec);
  double worst = 0.0;
  for (std::uint64_t pattern = 0; pattern < values.size(); ++pattern) {
    const double direct = problem.a() * values[pattern] - problem.b();
    const double dev =
        std::abs(evaluate_pattern(problem, pattern) + problem.offset() - direct * direct);
    worst = std::max(worst, dev);
  }
  return worst;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& token) {
  std::size_t used = 0;
  const double v = std::stod(token, &used);
  if (used != token.size()) throw std::invalid_argument("malformed number '" + token + "'");
  return v;
}

void write_coo(const QuboProblem& problem, std::ostream& out,
               const std::vector<std::string>& header_lines) {
  for (const auto& line : header_lines) out << "# " << line << '\n';
  out << "# qubo " << problem.range().r << ' ' << problem.range().p << ' '
      << format_double(problem.a()) << ' ' << format_double(problem.b()) << ' '
      << format_double(problem.offset()) << '\n';
  for (const auto& e : problem.nonzero_entries()) {
    out << e.i << ' ' << e.j << ' ' << format_double(e.value) << '\n';
  }
}

QuboProblem read_coo(std::istream& in) {
  std::string line;
  // Free-form comment lines may precede the "# qubo" header.
  do {
    if (!std::getline(in, line)) throw std::invalid_argument("empty QUBO stream");
  } while (line.rfind("#", 0) == 0 && line.rfind("# qubo ", 0) != 0);
  std::istringstream header(line);
  std::string hash, tag, a, b, offset;
  BitRange range;
  if (!(header >> hash >> tag >> range.r >> range.p >> a >> b >> offset) || hash != "#" ||
      tag != "qubo") {
    throw std::invalid_argument("malformed QUBO header: '" + line + "'");
  }
  QuboProblem problem(range, parse_double(a), parse_double(b), parse_double(offset));
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    int i = 0, j = 0;
    std::string value, extra;
    if (!(row >> i >> j >> value) || (row >> extra)) {
      throw std::invalid_argument("malformed QUBO entry on line " + std::to_string(lineno));
    }
    problem.set_coefficient(i, j, parse_double(value));
  }
  return problem;
}

void write_json(const QuboProblem& problem, std::ostream& out,
                const std::vector<std::string>& header_lines) {
  nlohmann::json doc;
  if (!header_lines.empty()) doc["config"] = header_lines;
  doc["range"] = {{"r", problem.range().r}, {"p", problem.range().p}};
  auto entries = nlohmann::json::array();
  for (const auto& e : problem.nonzero_entries()) {
    entries.push_back({e.i, e.j, e.value});
  }
  doc["entries"] = std::move(entries);
  doc["offset"] = problem.offset();
  doc["a"] = problem.a();
  doc["b"] = problem.b();
  out << doc.dump(2) << '\n';
}

QuboProblem read_json(std::istream& in) {
  try {
    const auto doc = nlohmann::json::parse(in);
    const BitRange range{doc.at("range").at("r").get<int>(), doc.at("range").at("p").get<int>()};
    QuboProblem problem(range, doc.at("a").get<double>(), doc.at("b").get<double>(),
                        doc.at("offset").get<double>());
    for (const auto& e : doc.at("entries")) {
      if (!e.is_array() || e.size() != 3) {
        throw std::invalid_argument("QUBO entry must be [i, j, value]");
      }
      problem.set_coefficient(e[0].get<int>(), e[1].get<int>(), e[2].get<double>());
    }
    return problem;
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("malformed QUBO json: ") + ex.what());
  }
}

}  // namespace

void export_qubo(const QuboProblem& problem, QuboFormat format, std::ostream& out,
                 const std::vector<std::string>& header_lines) {
  if (format == QuboFormat::CooText) {
    write_coo(problem, out, header_lines);
  } else {
    write_json(problem, out, header_lines);
  }
  if (!out) throw std::runtime_error("failed writing QUBO output");
}

QuboProblem import_qubo(std::istream& in, QuboFormat format) {
  return format == QuboFormat::CooText ? read_coo(in) : read_json(in);
}

}  // namespace qalin
