#ifndef PASM_SURFACE_HPP
#define PASM_SURFACE_HPP

#include <string>
#include <vector>

#include "pasm/machine.hpp"
#include "pasm/state.hpp"
#include "pasm/term.hpp"
#include "pasm/value.hpp"

namespace pasm {

Machine parse_machine_text(const std::string& text, const std::string& origin = "<input>");
State parse_state_text(const std::string& text, const std::string& origin = "<input>");
Term parse_term_text(const std::string& text, const Vocabulary& vocab,
                     const std::vector<std::string>& bound = {},
                     const std::string& origin = "<input>");
Rule parse_rule_text(const std::string& text, const Vocabulary& vocab,
                     const std::string& origin = "<input>");
Value parse_value_text(const std::string& text, const std::string& origin = "<input>");

Machine load_machine_file(const std::string& path);
State load_state_file(const std::string& path);

std::string print_machine(const Machine& m);
std::string print_state(const State& s, const std::string& name = "s");

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace pasm

#endif
