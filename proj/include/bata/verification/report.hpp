#pragma once

#include <ostream>
#include <string>

namespace bata::verify {

struct OracleReport {
  std::string name;
  double max_rel_error = 0.0;
  int instances = 0;
  bool pass = false;
  double tolerance = 0.0;

  void finalize() { pass = max_rel_error <= tolerance; }

  static void write_csv_header(std::ostream& out) { out << "name,max_rel_error,instances,pass,tolerance\n"; }
  void write_csv_row(std::ostream& out) const {
    out << name << ',' << max_rel_error << ',' << instances << ',' << (pass ? 1 : 0) << ',' << tolerance << '\n';
  }
};

}  // namespace bata::verify
