#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qfc/assign.hpp"
#include "qfc/parser.hpp"

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_path(const std::string& name) {
  return std::string(CORPUS_DIR) + "/" + name;
}

inline qfc::Program load_corpus(const std::string& name) {
  return qfc::parse_program(read_file(corpus_path(name)));
}

inline qfc::AnnotationFile load_ann(const std::string& name,
                                    const qfc::Program& p) {
  return qfc::parse_annotations(read_file(corpus_path(name)), p);
}

inline qfc::AssignmentSet to_assignment(const qfc::AnnotationFile& ann) {
  qfc::AssignmentSet a;
  a.sup = ann.sup;
  a.weight = ann.weight;
  return a;
}
