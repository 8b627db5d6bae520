#pragma once
// JSON and CSV helpers shared by the modules and the command-line tool.

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nearcrit/percolation.hpp"

namespace nearcrit {

using Json = nlohmann::json;

Json window_to_json(const Window& w);
Window window_from_json(const Json& j);

// Grid CSV: x,y,state (plus birth/burn columns when present).
void write_config_csv(std::ostream& os, const SiteConfig& c);
Json config_to_json(const SiteConfig& c);
SiteConfig config_from_json(const Json& j);

// "# key: value" comment lines carrying the effective configuration.
void write_header(std::ostream& os, const Json& meta);

void write_estimate_csv(std::ostream& os, const std::vector<EstimateResult>& rows,
                        const std::vector<std::pair<std::string, std::vector<std::string>>>& extra = {});

// Git-style blob hash (SHA-1 of "blob <len>\0<content>") of the canonical JSON dump.
std::string content_hash(const Json& j);

}  // namespace nearcrit
