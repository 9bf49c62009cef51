#include "aqi/resources.hpp"

#include <stdexcept>
#include <string>

namespace aqi::resources {

namespace {

std::string_view required(std::string_view file_name) {
    if (auto found = find(file_name)) return *found;
    throw std::logic_error("missing embedded resource " + std::string(file_name));
}

}  // namespace

std::string_view parameters() { return required("parameters.toml"); }
std::string_view comparison_matrix() { return required("comparison_matrix.txt"); }
std::string_view reasoning_rules() { return required("reasoning_rules.swrl"); }
std::string_view schema() { return required("schema.txt"); }
std::string_view demo_kb() { return required("demo_kb.nt"); }
std::string_view demo_sample() { return required("demo_sample.csv"); }
std::string_view example_rules() { return required("example_rules.dsl"); }
std::string_view query1() { return required("query1.rq"); }
std::string_view query2() { return required("query2.rq"); }
std::string_view dl_query3() { return required("dl_query3.txt"); }

}  // namespace aqi::resources
