#pragma once

#include <string>

#include "json.hpp"

#include "dnls/continuum.hpp"
#include "dnls/dynamics.hpp"
#include "dnls/lattice.hpp"

namespace dnls {

/** Shortest decimal form that parses back to the identical double. */
std::string format_full(double v);

/** CSV with header `# dim=<n> mu=<float> radius=<K>`, then one row per site,
 *  `i,value` (1D) or `i,j,value` (2D), indices in lexicographic order.
 *  Round-trips bit-exactly. */
void write_field_csv(const std::string& path, const LatticeField& f);
LatticeField read_field_csv(const std::string& path);

/** Snapshot CSV with header `# dim=<n> mu=<float> radius=<K> time=<t>`,
 *  then `i,re,im` (1D) or `i,j,re,im` (2D) rows in lexicographic order. */
void write_state_csv(const std::string& path, const ComplexLatticeState& s);

/** Profile table as `r,psi` rows plus a JSON summary. */
void write_profile_csv(const std::string& path, const ContinuumProfile& prof);
nlohmann::ordered_json profile_summary_json(const ContinuumProfile& prof);

void write_json_file(const std::string& path, const nlohmann::ordered_json& j);
nlohmann::ordered_json read_json_file(const std::string& path);

}  // namespace dnls
