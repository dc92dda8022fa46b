#pragma once

#include <filesystem>
#include <string>

#include "kacdp/baseline.hpp"
#include "kacdp/network.hpp"

namespace kacdp {

// Checkpoints are JSON documents. Doubles are written in shortest
// round-trip form, so load(save(net)) reproduces every finite parameter
// exactly.

std::string network_to_json(const KanNetwork& net);
KanNetwork network_from_json(const std::string& text);
void save_network(const KanNetwork& net, const std::filesystem::path& path);
KanNetwork load_network(const std::filesystem::path& path);

std::string logistic_to_json(const LogisticModel& model);
LogisticModel logistic_from_json(const std::string& text);
void save_logistic(const LogisticModel& model, const std::filesystem::path& path);
LogisticModel load_logistic(const std::filesystem::path& path);

/// Hash of the structure and parameter bits, as 16 hex digits.
std::string model_fingerprint(const KanNetwork& net);

}  // namespace kacdp
