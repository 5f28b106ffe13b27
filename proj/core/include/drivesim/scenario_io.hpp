#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "drivesim/scenario.hpp"

namespace drivesim {

// Raised by the JSON readers. path() is the JSON path of the offending value
// (for example "objects[2].states[17].p").
class ScenarioError : public Error {
 public:
  enum class Code {
    kMalformedJson,
    kMissingField,
    kTypeMismatch,
    kLengthMismatch,
    kInvalidValue,
    kIo,
  };

  ScenarioError(Code code, const std::string& what, std::string path = {})
      : Error(what, std::move(path)), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

// Parses the scenario JSON document. Unknown keys are ignored. Headings
// outside (-pi, pi] are normalized and reported through `warnings`.
Scenario parse_scenario(std::string_view json_text, std::vector<std::string>* warnings = nullptr);

// Inverse of parse_scenario; doubles are printed with round-trip precision.
std::string serialize_scenario(const Scenario& scenario, int indent = -1);

std::string serialize_prepared(const PreparedScenario& prepared, int indent = -1);
PreparedScenario parse_prepared(std::string_view json_text);

// True if the document looks like serialize_prepared output.
bool is_prepared_document(std::string_view json_text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

// Loads either a prepared document or a raw scenario (which is then
// preprocessed with the given thresholds).
PreparedScenario load_prepared(const std::filesystem::path& path,
                               double decimation_threshold = kDefaultDecimationThreshold,
                               double controllable_threshold = kDefaultControllableThreshold);

// Sorted list of *.json files directly inside `dir`.
std::vector<std::filesystem::path> list_json_files(const std::filesystem::path& dir);

}  // namespace drivesim
