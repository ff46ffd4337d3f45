// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dstm/constellation.hpp"

namespace dstm {

struct VerifyItem {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyItem> items;
    bool all_pass() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }
};

/// Full invariant battery: amicability of both O-STBC seeds, the doubled-code
/// construction identity, Gram two-block form over random symbols, the
/// closed-form design optimum, full-diversity rank, decoder equivalence, and
/// the built-in constellation criteria. When a constellation is supplied it
/// is additionally checked for the design criteria and for quasi-unitary
/// compatibility (beta diagnostic).
VerifyReport run_verification(const std::optional<ConstellationSet>& external = std::nullopt,
                              const std::string& external_name = "");

}  // namespace dstm
