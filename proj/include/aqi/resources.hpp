#pragma once

#include <optional>
#include <string_view>
#include <vector>

// Data files compiled into the library (see data/).
namespace aqi::resources {

std::string_view parameters();        // data/parameters.toml
std::string_view comparison_matrix();  // data/comparison_matrix.txt
std::string_view reasoning_rules();    // data/reasoning_rules.swrl
std::string_view schema();             // data/schema.txt
std::string_view demo_kb();            // data/demo_kb.nt
std::string_view demo_sample();        // data/demo_sample.csv
std::string_view example_rules();      // data/example_rules.dsl
std::string_view query1();             // data/query1.rq
std::string_view query2();             // data/query2.rq
std::string_view dl_query3();          // data/dl_query3.txt

/// Lookup by file name, e.g. "schema.txt".
std::optional<std::string_view> find(std::string_view file_name);
std::vector<std::string_view> names();

}  // namespace aqi::resources
