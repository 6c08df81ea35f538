#pragma once

#include <sstream>
#include <string>

#include "krf/types.hpp"

namespace krf::acceptance {

inline std::string sci(Real v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << static_cast<double>(v);
  return os.str();
}

bool cigar_steady_identity(std::string& detail);
bool flat_fixed_point(std::string& detail);
bool maximum_principle_suite(std::string& detail);
bool bernstein_gate(std::string& detail);
bool evolution_identity_order(std::string& detail);
bool first_variation(std::string& detail);
bool modified_flow_chain(std::string& detail);
bool entropy_anchors(std::string& detail);
bool blowup_machinery(std::string& detail);
bool phong_sturm(std::string& detail);
bool collapse_probe(std::string& detail);

}  // namespace krf::acceptance
