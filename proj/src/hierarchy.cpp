#include "mlpit/hierarchy.hpp"

#include <string>

#include "mlpit/error.hpp"

namespace mlpit {

std::size_t Hierarchy::size_at(int level) const {
    if (level < 0 || level > finest_level()) {
        throw Error(ErrorCode::structure, "level " + std::to_string(level) + " not in hierarchy");
    }
    return level == 0 ? level0.size() : pairs[level - 1].size();
}

std::vector<std::size_t> Hierarchy::sizes() const {
    std::vector<std::size_t> out;
    out.reserve(pairs.size() + 1);
    out.push_back(level0.size());
    for (const auto& pair : pairs) out.push_back(pair.size());
    return out;
}

void Hierarchy::validate() const {
    if (level0.empty()) throw Error(ErrorCode::structure, "level-0 ensemble is empty");
    for (std::size_t l = 0; l < pairs.size(); ++l) {
        const auto& pair = pairs[l];
        const std::string where = "level " + std::to_string(l + 1);
        if (pair.fine.size() != pair.coarse.size()) {
            throw Error(ErrorCode::structure,
                        where + ": " + std::to_string(pair.fine.size()) + " fine vs " +
                            std::to_string(pair.coarse.size()) + " coarse samples");
        }
        if (pair.fine.empty()) throw Error(ErrorCode::structure, where + " pair ensemble is empty");
    }
    if (!grids.empty() && grids.size() != pairs.size() + 1) {
        throw Error(ErrorCode::structure, "hierarchy has " + std::to_string(pairs.size() + 1) +
                                              " levels but " + std::to_string(grids.size()) +
                                              " grids");
    }
}

}  // namespace mlpit
