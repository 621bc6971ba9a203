#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "simplebisim/grammar.hpp"

#ifndef SIMPLEBISIM_TEST_DATA
#error "SIMPLEBISIM_TEST_DATA must point at tests/data"
#endif

namespace testing {

inline std::string read_data(const std::string& name) {
  std::ifstream in(std::string(SIMPLEBISIM_TEST_DATA) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline simplebisim::Grammar load(const std::string& name) { return simplebisim::parse_grammar(read_data(name)); }
inline simplebisim::Grammar g1() { return load("g1.sg"); }
inline simplebisim::Grammar g2() { return load("g2.sg"); }

inline simplebisim::Word w(const simplebisim::Grammar& g, const std::string& text) {
  return simplebisim::parse_word(g, text);
}
inline std::string s(const simplebisim::Grammar& g, const simplebisim::Word& word) {
  return simplebisim::format_word(g, word);
}

}  // namespace testing
