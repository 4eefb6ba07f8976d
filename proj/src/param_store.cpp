#include "absa/param_store.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "absa/errors.hpp"
#include "absa/textio.hpp"

namespace absa::nn {

void save_params(const std::string& path,
                 std::span<ad::Param* const> params) {
  textio::atomic_write(path, [&](std::ostream& out) {
    out << "absa-params 1\n";
    out << "count " << params.size() << "\n";
    for (const ad::Param* p : params) {
      out << "param " << p->name << " " << p->value.rows() << " "
          << p->value.cols() << "\n";
      for (Eigen::Index i = 0; i < p->value.rows(); ++i) {
        for (Eigen::Index j = 0; j < p->value.cols(); ++j) {
          if (j > 0) out << ' ';
          out << textio::format_double(p->value(i, j));
        }
        out << '\n';
      }
    }
  });
}

void load_params(const std::string& path,
                 std::span<ad::Param* const> params) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  int line_no = 0;
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw FormatError(path + ": unexpected end of file, expected " +
                        std::string(what));
    }
    ++line_no;
  };

  next_line("header");
  if (line != "absa-params 1") {
    throw FormatError(path + ":1: unrecognized header '" + line + "'");
  }
  next_line("count");
  std::size_t count = 0;
  {
    std::istringstream s(line);
    std::string word;
    if (!(s >> word >> count) || word != "count") {
      throw FormatError(path + ":2: expected 'count <n>'");
    }
  }

  std::map<std::string, ad::Mat> blocks;
  for (std::size_t b = 0; b < count; ++b) {
    next_line("param block");
    std::istringstream head(line);
    std::string word, name;
    Eigen::Index rows = 0, cols = 0;
    if (!(head >> word >> name >> rows >> cols) || word != "param" ||
        rows <= 0 || cols <= 0) {
      throw FormatError(path + ":" + std::to_string(line_no) +
                        ": expected 'param <name> <rows> <cols>'");
    }
    ad::Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      next_line("value row");
      std::istringstream vals(line);
      std::string tok;
      for (Eigen::Index j = 0; j < cols; ++j) {
        if (!(vals >> tok)) {
          throw FormatError(path + ":" + std::to_string(line_no) +
                            ": expected " + std::to_string(cols) +
                            " values for " + name);
        }
        m(i, j) = textio::parse_double(
            tok, path + ":" + std::to_string(line_no));
      }
      if (vals >> tok) {
        throw FormatError(path + ":" + std::to_string(line_no) +
                          ": extra values for " + name);
      }
    }
    if (!blocks.emplace(name, std::move(m)).second) {
      throw FormatError(path + ": duplicate parameter '" + name + "'");
    }
  }

  std::string stray;
  while (std::getline(in, stray)) {
    ++line_no;
    if (!stray.empty()) {
      throw FormatError(path + ":" + std::to_string(line_no) +
                        ": content after the declared parameter blocks");
    }
  }

  if (blocks.size() != params.size()) {
    throw FormatError(path + ": file has " + std::to_string(blocks.size()) +
                      " parameters, model expects " +
                      std::to_string(params.size()));
  }
  for (ad::Param* p : params) {
    auto it = blocks.find(p->name);
    if (it == blocks.end()) {
      throw FormatError(path + ": missing parameter '" + p->name + "'");
    }
    if (it->second.rows() != p->value.rows() ||
        it->second.cols() != p->value.cols()) {
      throw FormatError(path + ": parameter '" + p->name + "' is " +
                        std::to_string(it->second.rows()) + "x" +
                        std::to_string(it->second.cols()) + ", model expects " +
                        std::to_string(p->value.rows()) + "x" +
                        std::to_string(p->value.cols()));
    }
    p->value = it->second;
  }
}

}  // namespace absa::nn
