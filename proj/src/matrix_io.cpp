#include "wax/matrix_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wax/errors.hpp"

namespace wax {

std::string format_complex(Cplx z) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", z.real(), z.imag());
  return std::string(buf);
}

Cplx parse_complex(const std::string& token) {
  if (token.empty() || token.back() != 'j') {
    // Plain real entry.
    std::size_t pos = 0;
    double re;
    try {
      re = std::stod(token, &pos);
    } catch (const std::exception&) {
      throw IoError("bad matrix entry '" + token + "'");
    }
    if (pos != token.size()) throw IoError("bad matrix entry '" + token + "'");
    return Cplx(re, 0.0);
  }
  const std::string body = token.substr(0, token.size() - 1);
  // Split at the sign of the imaginary part: the last +/- not following e/E.
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    const char c = body[i];
    if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) throw IoError("bad complex entry '" + token + "'");
  try {
    std::size_t p1 = 0, p2 = 0;
    const std::string re_s = body.substr(0, split);
    const std::string im_s = body.substr(split);
    const double re = std::stod(re_s, &p1);
    const double im = std::stod(im_s, &p2);
    if (p1 != re_s.size() || p2 != im_s.size()) throw IoError("bad complex entry '" + token + "'");
    return Cplx(re, im);
  } catch (const IoError&) {
    throw;
  } catch (const std::exception&) {
    throw IoError("bad complex entry '" + token + "'");
  }
}

void write_matrix(std::ostream& os, const Mat& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_complex(m(i, j));
    }
    os << '\n';
  }
}

void write_matrix(const std::string& path, const Mat& m) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_matrix(f, m);
  if (!f) throw IoError("write failed for '" + path + "'");
}

Mat read_matrix(std::istream& is) {
  Eigen::Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) {
    throw IoError("matrix header must be 'rows cols'");
  }
  Mat m(rows, cols);
  std::string token;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(is >> token)) throw IoError("matrix data ended early");
      m(i, j) = parse_complex(token);
    }
  }
  return m;
}

Mat read_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  return read_matrix(f);
}

DimsConfig read_dims_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad JSON in '" + path + "': " + e.what());
  }
  DimsConfig cfg;
  try {
    cfg.M = j.at("M").get<int>();
    cfg.K = j.at("K").get<int>();
    cfg.L = j.at("L").get<int>();
    cfg.T_P = j.at("T_P").get<int>();
    if (j.contains("N0")) cfg.N0 = j.at("N0").get<double>();
    if (j.contains("seed")) {
      cfg.seed = j.at("seed").get<std::uint64_t>();
      cfg.has_seed = true;
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad dims config '" + path + "': " + e.what());
  }
  return cfg;
}

}  // namespace wax
