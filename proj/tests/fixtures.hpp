#pragma once

#include <string>

#include "pti/text.hpp"

inline std::string fixture_path(const std::string& name) {
  return std::string(PTI_FIXTURE_DIR) + "/" + name;
}

inline pti::PtiNet load_fixture(const std::string& name) {
  return pti::load_net(fixture_path(name));
}

inline pti::PlaceRelation load_fixture_relation(const pti::PtiNet& net, const std::string& name) {
  return pti::load_relation(net, fixture_path(name));
}
