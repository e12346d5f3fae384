#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chanest/channel.hpp"

namespace chanest {

inline constexpr std::uint32_t kCustomPdpId = 0xFFFFFFFFu;

/** Names of the built-in profiles, in id order. */
const std::vector<std::string>& registry_names();

/** Registry index for a built-in name, or kCustomPdpId if unknown. */
std::uint32_t pdp_id(const std::string& name);

struct PdpOptions {
    std::optional<scalar_t> zeta_s;        // CE spacing; defaults to ce_default_zeta(cfg)
    std::optional<scalar_t> ds_desired_s;  // required for TDL profiles
};

/**
 * Resolve a profile by registry name or, failing that, by reading the name as
 * a text file of "<delay_us> <gain_db>" lines. Throws std::invalid_argument
 * for unknown names with the registry listing in the message.
 */
PowerDelayProfile resolve_pdp(const std::string& name, const OfdmConfig& cfg,
                              const PdpOptions& opts = {});

/** Normalized (unit delay spread) tapped-delay-line profiles. */
PowerDelayProfile tdl_a_normalized();
PowerDelayProfile tdl_b_normalized();

PowerDelayProfile load_pdp_file(const std::string& path);

/** One text line per registry entry with its delays/gains. */
std::string registry_listing(const OfdmConfig& cfg);

}  // namespace chanest
