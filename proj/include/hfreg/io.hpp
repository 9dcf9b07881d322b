#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hfreg/hp.hpp"
#include "hfreg/radial_pde.hpp"
#include "hfreg/scf.hpp"
#include "hfreg/verify.hpp"
#include "hfreg/weights.hpp"

namespace hfreg::io {

/// 17 significant digits: round-trip exact for doubles.
std::string format_double(double v);

/// temp-file-plus-rename write; never leaves a partial file behind.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

std::string field_csv(const RadialField& field);
nlohmann::json field_meta(const RadialField& field);

std::string seminorm_csv(const SeminormSequence& seq);
nlohmann::json envelope_json(const AnalyticEnvelope& env);
nlohmann::json inequality_json(const InequalityReport& report);
std::string reports_csv(const std::vector<InequalityReport>& reports);
nlohmann::json constants_json(const ConstantsLedger& led);
nlohmann::json scf_summary_json(const SCFState& state, const SystemSpec& spec);
nlohmann::json envelope_report_json(const EnvelopeStability& stability);
std::string hp_csv(const HpResult& result);
nlohmann::json hp_fit_json(const HpResult& graded, const HpResult& uniform);

}  // namespace hfreg::io
