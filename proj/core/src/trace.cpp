#include "olr/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace olr {

namespace {

void format_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

void RunTrace::write_csv(const std::string& csv_path,
                         const std::string& params_path) const {
  {
    std::ofstream out(params_path);
    if (!out) throw std::runtime_error("cannot open " + params_path);
    out << params_json << "\n";
  }
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot open " + csv_path);
  std::string line = "t,i";
  for (int c = 1; c <= dim; ++c) line += ",x_" + std::to_string(c);
  line += ",network_loss,disagreement,cv_increment\n";
  out << line;
  for (int t = 1; t <= horizon; ++t) {
    for (int i = 0; i < nodes; ++i) {
      line = std::to_string(t) + "," + std::to_string(i);
      for (int c = 0; c < dim; ++c) {
        line += ',';
        format_double(line, has_predictors() ? predictors[t - 1][i][c]
                                             : std::nan(""));
      }
      line += ',';
      format_double(line, network_loss[t - 1][i]);
      line += ',';
      format_double(line, disagreement[t - 1]);
      line += ',';
      format_double(line, cv_increment[t - 1]);
      line += '\n';
      out << line;
    }
  }
}

}  // namespace olr
